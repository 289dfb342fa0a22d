#include "sgsr/grouping.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <string>

#include "sgsr/error.hpp"

namespace sgsr {

std::vector<int> layout_offsets(int size, int patch_edge, int stride) {
  std::vector<int> offsets;
  const int last = size - patch_edge;
  for (int o = 0; o <= last; o += stride) offsets.push_back(o);
  if (offsets.back() != last) offsets.push_back(last);
  return offsets;
}

PatchLayout build_layout(int width, int height, int patch_edge, int stride) {
  if (patch_edge < 1 || stride < 1) {
    throw InvalidArgument("patch edge and stride must be positive");
  }
  if (patch_edge > width || patch_edge > height) {
    throw InvalidArgument("patch larger than image");
  }
  PatchLayout layout;
  layout.width = width;
  layout.height = height;
  layout.patch_edge = patch_edge;
  layout.stride = stride;
  const auto xs = layout_offsets(width, patch_edge, stride);
  const auto ys = layout_offsets(height, patch_edge, stride);
  layout.positions.reserve(xs.size() * ys.size());
  for (int y : ys) {
    for (int x : xs) layout.positions.push_back({x, y});
  }
  return layout;
}

namespace {

struct Candidate {
  double distance;
  Position position;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return raster_less(a.position, b.position);
}

double patch_ssd(const Image& img, Position a, Position b, int edge) {
  double sum = 0.0;
  for (int r = 0; r < edge; ++r) {
    const double* pa = img.row(a.y + r) + a.x;
    const double* pb = img.row(b.y + r) + b.x;
    for (int c = 0; c < edge; ++c) {
      const double d = pa[c] - pb[c];
      sum += d * d;
    }
  }
  return sum;
}

// First pixel of a window_edge-wide window centered on a patch at `offset`,
// shifted inward so it stays inside [0, size).
int window_start(int offset, int patch_edge, int window_edge, int size) {
  const int span = std::min(window_edge, size);
  const int start = offset - (span - patch_edge) / 2;
  return std::clamp(start, 0, size - span);
}

}  // namespace

GroupIndex match_patches(const Image& source, const PatchLayout& layout, Position reference,
                         int window_edge, int group_size) {
  const int edge = layout.patch_edge;
  if (window_edge < edge) {
    throw InvalidArgument("search window smaller than patch");
  }
  if (group_size < 1) {
    throw InvalidArgument("group size must be positive");
  }
  if (source.width() != layout.width || source.height() != layout.height) {
    throw InvalidArgument("image does not match patch layout");
  }
  if (reference.x < 0 || reference.y < 0 || reference.x + edge > source.width() ||
      reference.y + edge > source.height()) {
    throw InvalidArgument("reference patch outside image");
  }

  const int span_x = std::min(window_edge, source.width());
  const int span_y = std::min(window_edge, source.height());
  const int wx = window_start(reference.x, edge, window_edge, source.width());
  const int wy = window_start(reference.y, edge, window_edge, source.height());
  const int nx = span_x - edge + 1;
  const int ny = span_y - edge + 1;
  if (nx * ny < group_size) {
    throw InvalidArgument("search window holds " + std::to_string(nx * ny) +
                          " candidates, fewer than group size " + std::to_string(group_size));
  }

  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(nx) * ny);
  for (int y = wy; y < wy + ny; ++y) {
    for (int x = wx; x < wx + nx; ++x) {
      const Position p{x, y};
      if (p == reference) continue;
      candidates.push_back({patch_ssd(source, reference, p, edge), p});
    }
  }

  const auto keep = static_cast<std::ptrdiff_t>(group_size - 1);
  std::nth_element(candidates.begin(), candidates.begin() + keep, candidates.end(),
                   candidate_less);
  std::sort(candidates.begin(), candidates.begin() + keep, candidate_less);

  GroupIndex index;
  index.reference = reference;
  index.members.reserve(group_size);
  index.members.push_back(reference);
  for (std::ptrdiff_t i = 0; i < keep; ++i) index.members.push_back(candidates[i].position);
  return index;
}

GroupMatrix gather_group(const Image& source, const GroupIndex& index, int patch_edge) {
  const int n = static_cast<int>(index.members.size());
  GroupMatrix group(patch_edge * patch_edge, n);
  for (int j = 0; j < n; ++j) {
    const Position p = index.members[j];
    assert(p.x >= 0 && p.y >= 0 && p.x + patch_edge <= source.width() &&
           p.y + patch_edge <= source.height());
    double* dst = group.col(j).data();
    for (int r = 0; r < patch_edge; ++r) {
      std::copy_n(source.row(p.y + r) + p.x, patch_edge, dst + r * patch_edge);
    }
  }
  return group;
}

GroupAccumulator::GroupAccumulator(int width, int height, int patch_edge)
    : width_(width),
      height_(height),
      patch_edge_(patch_edge),
      sum_(static_cast<std::size_t>(width) * height, 0.0),
      count_(static_cast<std::size_t>(width) * height, 0) {}

void GroupAccumulator::add(const GroupIndex& index, const GroupMatrix& values) {
  if (values.rows() != patch_edge_ * patch_edge_ ||
      values.cols() != static_cast<Eigen::Index>(index.members.size())) {
    throw InvalidArgument("group matrix shape does not match its index");
  }
  for (std::size_t j = 0; j < index.members.size(); ++j) {
    const Position p = index.members[j];
    assert(p.x >= 0 && p.y >= 0 && p.x + patch_edge_ <= width_ && p.y + patch_edge_ <= height_);
    const double* src = values.col(static_cast<Eigen::Index>(j)).data();
    for (int r = 0; r < patch_edge_; ++r) {
      const std::size_t base = static_cast<std::size_t>(p.y + r) * width_ + p.x;
      for (int c = 0; c < patch_edge_; ++c) {
        sum_[base + c] += src[r * patch_edge_ + c];
        ++count_[base + c];
      }
    }
  }
}

Image GroupAccumulator::average() const {
  std::vector<double> out(sum_.size());
  for (std::size_t i = 0; i < sum_.size(); ++i) {
    if (count_[i] == 0) {
      throw std::logic_error("pixel not covered by any group");
    }
    out[i] = sum_[i] / count_[i];
  }
  return Image(width_, height_, std::move(out));
}

Image scatter_average(std::span<const IndexedGroup> groups, int width, int height,
                      int patch_edge) {
  GroupAccumulator acc(width, height, patch_edge);
  for (const auto& g : groups) acc.add(g.index, g.values);
  return acc.average();
}

}  // namespace sgsr
