#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "sgsr/image.hpp"

namespace sgsr {

/// Edge of the square sampling block; every block holds 32 x 32 pixels.
inline constexpr int kBlockEdge = 32;
inline constexpr int kBlockLength = kBlockEdge * kBlockEdge;

/// Everything needed to rebuild the operator that produced a measurement
/// vector. Stored verbatim in measurement files.
struct MeasurementHeader {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t block_edge = kBlockEdge;
  std::uint32_t measurements_per_block = 0;
  std::uint64_t seed = 0;
  double ratio = 0.0;

  friend bool operator==(const MeasurementHeader&, const MeasurementHeader&) = default;
};

/// Concatenated per-block measurements in block-raster order.
struct MeasurementVector {
  MeasurementHeader header;
  std::vector<double> values;
};

/// Block-based random projection b = A x.
///
/// A single M_B x 1024 matrix with orthonormal rows is applied to every
/// 32 x 32 block. Blocks are visited in raster order and flattened row-major.
/// Immutable after construction.
class MeasurementOperator {
 public:
  MeasurementOperator(MeasurementHeader header, Eigen::MatrixXd matrix);

  const MeasurementHeader& header() const { return header_; }
  int width() const { return static_cast<int>(header_.width); }
  int height() const { return static_cast<int>(header_.height); }
  int measurements_per_block() const { return static_cast<int>(header_.measurements_per_block); }
  double ratio() const { return header_.ratio; }
  std::uint64_t seed() const { return header_.seed; }
  int blocks_x() const { return width() / kBlockEdge; }
  int blocks_y() const { return height() / kBlockEdge; }
  int block_count() const { return blocks_x() * blocks_y(); }
  std::size_t measurement_count() const {
    return static_cast<std::size_t>(measurements_per_block()) *
           static_cast<std::size_t>(block_count());
  }

  /// The shared M_B x 1024 block matrix.
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  MeasurementHeader header_;
  Eigen::MatrixXd matrix_;
};

/// round-half-up(ratio * 1024).
int measurements_for_ratio(double ratio);

/// Draws an i.i.d. N(0, 1) matrix from `seed` and orthonormalizes its rows.
/// Throws InvalidArgument for bad dimensions or ratio.
MeasurementOperator build_operator(std::uint64_t seed, double ratio, int image_width,
                                   int image_height);

/// Rebuilds the operator described by a measurement header.
MeasurementOperator build_operator(const MeasurementHeader& header);

MeasurementVector forward(const MeasurementOperator& op, const Image& x);

Image adjoint(const MeasurementOperator& op, const MeasurementVector& b);

/// Measurement file: "SGSRM1\0", u32 width, height, block_edge, M_B, u64 seed,
/// f64 ratio, then f64 payload. All fields little-endian.
void save_measurements(const MeasurementVector& b, const std::filesystem::path& path);
MeasurementVector load_measurements(const std::filesystem::path& path);

}  // namespace sgsr
