#include "sgsr/image.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "sgsr/error.hpp"

namespace sgsr {

Image::Image(int width, int height, double fill) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("image dimensions must be positive");
  }
  width_ = width;
  height_ = height;
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Image::Image(int width, int height, std::vector<double> data) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("image dimensions must be positive");
  }
  if (data.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvalidArgument("pixel count does not match width x height");
  }
  width_ = width;
  height_ = height;
  data_ = std::move(data);
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::string& bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const auto ch = static_cast<unsigned char>(bytes[pos]);
    if (ch == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(ch)) {
      ++pos;
    } else {
      break;
    }
  }
  std::string token;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    token.push_back(bytes[pos++]);
  }
  return token;
}

int parse_header_int(const std::string& token, const char* what) {
  if (token.empty() || !std::all_of(token.begin(), token.end(),
                                    [](unsigned char c) { return std::isdigit(c); })) {
    throw FormatError(std::string("malformed header: bad ") + what);
  }
  try {
    return std::stoi(token);
  } catch (const std::exception&) {
    throw FormatError(std::string("malformed header: bad ") + what);
  }
}

std::uint8_t to_byte(double value) {
  const double clamped = std::clamp(value, 0.0, 255.0);
  return static_cast<std::uint8_t>(std::floor(clamped + 0.5));
}

}  // namespace

Image load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t pos = 0;
  const std::string magic = next_token(bytes, pos);
  if (magic.size() == 2 && magic[0] == 'P' && magic[1] >= '1' && magic[1] <= '7' && magic != "P5") {
    throw FormatError("unsupported PGM variant " + magic);
  }
  if (magic != "P5") {
    throw FormatError("malformed header: missing P5 magic");
  }
  const int width = parse_header_int(next_token(bytes, pos), "width");
  const int height = parse_header_int(next_token(bytes, pos), "height");
  const int maxval = parse_header_int(next_token(bytes, pos), "maxval");
  if (width <= 0 || height <= 0) {
    throw FormatError("malformed header: zero dimension");
  }
  if (maxval != 255) {
    throw FormatError("unsupported maxval " + std::to_string(maxval) + " (expected 255)");
  }
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError("truncated payload");
  }
  ++pos;

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - pos < count) {
    throw FormatError("truncated payload");
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = static_cast<unsigned char>(bytes[pos + i]);
  }
  return Image(width, height, std::move(data));
}

void save_pgm(const Image& image, const std::filesystem::path& path) {
  if (image.empty()) {
    throw InvalidArgument("cannot save an empty image");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::string raster(image.size(), '\0');
  const auto pixels = image.pixels();
  std::transform(pixels.begin(), pixels.end(), raster.begin(),
                 [](double v) { return static_cast<char>(to_byte(v)); });
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

Image clamp_to_byte_range(const Image& image) {
  Image out = image;
  for (double& v : out.pixels()) v = std::clamp(v, 0.0, 255.0);
  return out;
}

Image quantize(const Image& image) {
  Image out = image;
  for (double& v : out.pixels()) v = to_byte(v);
  return out;
}

double psnr(const Image& reference, const Image& test) {
  if (!reference.same_shape(test) || reference.empty()) {
    throw InvalidArgument("psnr: image dimensions differ");
  }
  const auto a = reference.pixels();
  const auto b = test.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  if (sum == 0.0) {
    return kPsnrIdentical;
  }
  const double mse = sum / static_cast<double>(a.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace sgsr
