#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace sgsr {

/// Grayscale raster with real-valued pixels stored row-major.
///
/// Values are nominally in [0, 255]; iterates produced during recovery may
/// leave that range and are only quantized when written to disk.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int x, int y) { return data_[index(x, y)]; }
  double operator()(int x, int y) const { return data_[index(x, y)]; }

  double* row(int y) { return data_.data() + index(0, y); }
  const double* row(int y) const { return data_.data() + index(0, y); }

  std::span<double> pixels() { return data_; }
  std::span<const double> pixels() const { return data_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// PSNR reported when the two images are identical.
inline constexpr double kPsnrIdentical = 99.0;

/// Reads a binary 8-bit PGM ("P5", maxval 255).
Image load_pgm(const std::filesystem::path& path);

/// Writes a binary 8-bit PGM. Pixels are clamped to [0, 255] and rounded
/// half-up.
void save_pgm(const Image& image, const std::filesystem::path& path);

/// Returns a copy with every pixel clamped to [0, 255].
Image clamp_to_byte_range(const Image& image);

/// Returns a copy quantized exactly as save_pgm would store it.
Image quantize(const Image& image);

/// Peak signal-to-noise ratio with peak 255. Identical images give
/// kPsnrIdentical instead of infinity.
double psnr(const Image& reference, const Image& test);

}  // namespace sgsr
