#pragma once

#include <compare>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sgsr/image.hpp"

namespace sgsr {

/// Top-left corner of a patch.
struct Position {
  int x = 0;
  int y = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

/// Raster order: by row, then by column.
inline bool raster_less(const Position& a, const Position& b) {
  return a.y != b.y ? a.y < b.y : a.x < b.x;
}

/// Overlapping square patches that together cover every pixel of an image.
struct PatchLayout {
  int width = 0;
  int height = 0;
  int patch_edge = 0;
  int stride = 0;
  std::vector<Position> positions;  // raster order

  int patch_length() const { return patch_edge * patch_edge; }
  std::size_t count() const { return positions.size(); }
};

/// A reference patch and its c best matches; members[0] is the reference.
struct GroupIndex {
  Position reference;
  std::vector<Position> members;

  friend bool operator==(const GroupIndex&, const GroupIndex&) = default;
};

/// patch_length x c matrix; column j is the patch at members[j], row-major.
using GroupMatrix = Eigen::MatrixXd;

/// Offsets 0, stride, 2*stride, ... plus a final offset of size - patch_edge
/// when the regular grid stops short of the border.
std::vector<int> layout_offsets(int size, int patch_edge, int stride);

PatchLayout build_layout(int width, int height, int patch_edge, int stride);

/// Exact block matching by sum of squared differences.
///
/// Candidates are all stride-1 patch positions inside a window_edge x
/// window_edge pixel window centered on the reference patch and shifted
/// inward at the image borders. The reference always comes first; the rest
/// follow by ascending distance, ties broken by raster order.
GroupIndex match_patches(const Image& source, const PatchLayout& layout, Position reference,
                         int window_edge, int group_size);

GroupMatrix gather_group(const Image& source, const GroupIndex& index, int patch_edge);

/// Accumulates group estimates at their patch positions and averages each
/// pixel over the number of contributions it received.
///
/// Contributions are summed in the order they are added, so a fixed add
/// order gives bit-identical output.
class GroupAccumulator {
 public:
  GroupAccumulator(int width, int height, int patch_edge);

  void add(const GroupIndex& index, const GroupMatrix& values);

  /// Throws std::logic_error if some pixel received no contribution.
  Image average() const;

 private:
  int width_;
  int height_;
  int patch_edge_;
  std::vector<double> sum_;
  std::vector<int> count_;
};

struct IndexedGroup {
  GroupIndex index;
  GroupMatrix values;
};

Image scatter_average(std::span<const IndexedGroup> groups, int width, int height,
                      int patch_edge);

}  // namespace sgsr
