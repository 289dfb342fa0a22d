#pragma once

#include "sgsr/image.hpp"

namespace sgsr {

inline constexpr int kDctBlockEdge = 8;

/// Orthonormal 2-D DCT-II applied to each non-overlapping 8 x 8 block.
/// Coefficients are stored in place of the block they came from. Image
/// dimensions must be multiples of 8.
Image block_dct(const Image& image);

/// Inverse of block_dct.
Image block_idct(const Image& coefficients);

}  // namespace sgsr
