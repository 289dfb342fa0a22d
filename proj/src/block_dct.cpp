#include "sgsr/block_dct.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "sgsr/error.hpp"

namespace sgsr {

namespace {

using Block = Eigen::Matrix<double, kDctBlockEdge, kDctBlockEdge, Eigen::RowMajor>;

// Row k holds the k-th orthonormal DCT-II basis vector.
const Block& dct_basis() {
  static const Block basis = [] {
    Block c;
    const double n = kDctBlockEdge;
    for (int k = 0; k < kDctBlockEdge; ++k) {
      const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      for (int i = 0; i < kDctBlockEdge; ++i) {
        c(k, i) = scale * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n));
      }
    }
    return c;
  }();
  return basis;
}

template <typename Transform>
Image blockwise(const Image& in, Transform&& transform) {
  if (in.width() % kDctBlockEdge != 0 || in.height() % kDctBlockEdge != 0) {
    throw InvalidArgument("block DCT needs dimensions that are multiples of 8");
  }
  Image out(in.width(), in.height());
  Block block;
  for (int by = 0; by < in.height(); by += kDctBlockEdge) {
    for (int bx = 0; bx < in.width(); bx += kDctBlockEdge) {
      for (int r = 0; r < kDctBlockEdge; ++r) {
        for (int c = 0; c < kDctBlockEdge; ++c) block(r, c) = in(bx + c, by + r);
      }
      const Block result = transform(block);
      for (int r = 0; r < kDctBlockEdge; ++r) {
        for (int c = 0; c < kDctBlockEdge; ++c) out(bx + c, by + r) = result(r, c);
      }
    }
  }
  return out;
}

}  // namespace

Image block_dct(const Image& image) {
  const Block& c = dct_basis();
  return blockwise(image, [&](const Block& b) -> Block { return c * b * c.transpose(); });
}

Image block_idct(const Image& coefficients) {
  const Block& c = dct_basis();
  return blockwise(coefficients, [&](const Block& b) -> Block { return c.transpose() * b * c; });
}

}  // namespace sgsr
