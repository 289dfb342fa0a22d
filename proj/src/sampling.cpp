#include "sgsr/sampling.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "sgsr/error.hpp"
#include "sgsr/random.hpp"

namespace sgsr {

namespace {

constexpr std::array<char, 7> kMagic = {'S', 'G', 'S', 'R', 'M', '1', '\0'};
constexpr std::size_t kHeaderBytes = kMagic.size() + 4 * 4 + 8 + 8;
constexpr int kMaxDrawAttempts = 3;

void check_geometry(int width, int height) {
  if (width <= 0 || height <= 0 || width % kBlockEdge != 0 || height % kBlockEdge != 0) {
    throw InvalidArgument("dimensions must be multiples of 32 (got " + std::to_string(width) +
                          "x" + std::to_string(height) + ")");
  }
}

void check_consistent(const MeasurementOperator& op, const MeasurementVector& b) {
  if (b.header != op.header()) {
    throw InvalidArgument("measurement header does not match operator");
  }
  if (b.values.size() != op.measurement_count()) {
    throw InvalidArgument("measurement length does not match operator");
  }
}

// Sub-seed for redraw attempt k; attempt 0 uses the seed unchanged.
std::uint64_t attempt_seed(std::uint64_t seed, int attempt) {
  return seed ^ (static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
}

// Gaussian rows, orthonormalized. Householder QR of the transpose followed by
// making diag(R) positive yields the same basis as Gram-Schmidt.
bool draw_orthonormal_rows(std::uint64_t seed, int rows, Eigen::MatrixXd& out) {
  NormalGenerator normal(seed);
  Eigen::MatrixXd gaussian(kBlockLength, rows);  // column j = row j of Phi
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < kBlockLength; ++j) {
      gaussian(j, i) = normal();
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
  const auto& packed = qr.matrixQR();
  const double largest = packed.diagonal().cwiseAbs().maxCoeff();
  const double smallest = packed.diagonal().cwiseAbs().minCoeff();
  if (!(smallest > 1e-10 * largest)) {
    return false;
  }
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(kBlockLength, rows);
  for (int i = 0; i < rows; ++i) {
    if (packed(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  out = q.transpose();
  return true;
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::string& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_le(const std::string& buf, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
  }
  return v;
}

}  // namespace

MeasurementOperator::MeasurementOperator(MeasurementHeader header, Eigen::MatrixXd matrix)
    : header_(header), matrix_(std::move(matrix)) {
  check_geometry(width(), height());
  if (header_.block_edge != kBlockEdge) {
    throw InvalidArgument("block edge must be 32");
  }
  if (matrix_.rows() != measurements_per_block() || matrix_.cols() != kBlockLength) {
    throw InvalidArgument("block matrix shape does not match header");
  }
}

int measurements_for_ratio(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw InvalidArgument("ratio must lie in (0, 1]");
  }
  const int m = static_cast<int>(std::floor(ratio * kBlockLength + 0.5));
  if (m < 1) {
    throw InvalidArgument("ratio too small: no measurements per block");
  }
  return m;
}

MeasurementOperator build_operator(std::uint64_t seed, double ratio, int image_width,
                                   int image_height) {
  check_geometry(image_width, image_height);
  const int rows = measurements_for_ratio(ratio);

  Eigen::MatrixXd phi;
  for (int attempt = 0; attempt < kMaxDrawAttempts; ++attempt) {
    if (draw_orthonormal_rows(attempt_seed(seed, attempt), rows, phi)) {
      MeasurementHeader header;
      header.width = static_cast<std::uint32_t>(image_width);
      header.height = static_cast<std::uint32_t>(image_height);
      header.block_edge = kBlockEdge;
      header.measurements_per_block = static_cast<std::uint32_t>(rows);
      header.seed = seed;
      header.ratio = ratio;
      return MeasurementOperator(header, std::move(phi));
    }
  }
  throw Error("measurement matrix is rank deficient after 3 draws");
}

MeasurementOperator build_operator(const MeasurementHeader& header) {
  if (header.block_edge != kBlockEdge) {
    throw InvalidArgument("block edge must be 32");
  }
  MeasurementOperator op = build_operator(header.seed, header.ratio, static_cast<int>(header.width),
                                          static_cast<int>(header.height));
  if (op.header() != header) {
    throw InvalidArgument("measurement header is inconsistent with its ratio");
  }
  return op;
}

MeasurementVector forward(const MeasurementOperator& op, const Image& x) {
  if (x.width() != op.width() || x.height() != op.height()) {
    throw InvalidArgument("image dimensions do not match the operator");
  }
  const int bx = op.blocks_x();
  Eigen::MatrixXd blocks(kBlockLength, op.block_count());
  for (int k = 0; k < op.block_count(); ++k) {
    const int x0 = (k % bx) * kBlockEdge;
    const int y0 = (k / bx) * kBlockEdge;
    double* dst = blocks.col(k).data();
    for (int r = 0; r < kBlockEdge; ++r) {
      std::memcpy(dst + r * kBlockEdge, x.row(y0 + r) + x0, kBlockEdge * sizeof(double));
    }
  }
  const Eigen::MatrixXd projected = op.matrix() * blocks;

  MeasurementVector b;
  b.header = op.header();
  b.values.assign(projected.data(), projected.data() + projected.size());
  return b;
}

Image adjoint(const MeasurementOperator& op, const MeasurementVector& b) {
  check_consistent(op, b);
  const Eigen::Map<const Eigen::MatrixXd> measured(b.values.data(), op.measurements_per_block(),
                                                   op.block_count());
  const Eigen::MatrixXd blocks = op.matrix().transpose() * measured;

  Image x(op.width(), op.height());
  const int bx = op.blocks_x();
  for (int k = 0; k < op.block_count(); ++k) {
    const int x0 = (k % bx) * kBlockEdge;
    const int y0 = (k / bx) * kBlockEdge;
    const double* src = blocks.col(k).data();
    for (int r = 0; r < kBlockEdge; ++r) {
      std::memcpy(x.row(y0 + r) + x0, src + r * kBlockEdge, kBlockEdge * sizeof(double));
    }
  }
  return x;
}

void save_measurements(const MeasurementVector& b, const std::filesystem::path& path) {
  const auto& h = b.header;
  const std::size_t expected = static_cast<std::size_t>(h.measurements_per_block) *
                               (h.block_edge ? (h.width / h.block_edge) * (h.height / h.block_edge) : 0);
  if (b.values.size() != expected) {
    throw InvalidArgument("measurement length does not match its header");
  }
  std::string buf;
  buf.reserve(kHeaderBytes + 8 * b.values.size());
  buf.append(kMagic.data(), kMagic.size());
  put_u32(buf, h.width);
  put_u32(buf, h.height);
  put_u32(buf, h.block_edge);
  put_u32(buf, h.measurements_per_block);
  put_u64(buf, h.seed);
  put_f64(buf, h.ratio);
  for (double v : b.values) put_f64(buf, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

MeasurementVector load_measurements(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kMagic.size() || std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("unrecognized measurement file");
  }
  if (buf.size() < kHeaderBytes) {
    throw FormatError("truncated header");
  }
  MeasurementVector b;
  auto& h = b.header;
  std::size_t pos = kMagic.size();
  h.width = static_cast<std::uint32_t>(get_le(buf, pos, 4));
  h.height = static_cast<std::uint32_t>(get_le(buf, pos + 4, 4));
  h.block_edge = static_cast<std::uint32_t>(get_le(buf, pos + 8, 4));
  h.measurements_per_block = static_cast<std::uint32_t>(get_le(buf, pos + 12, 4));
  h.seed = get_le(buf, pos + 16, 8);
  h.ratio = std::bit_cast<double>(get_le(buf, pos + 24, 8));
  pos = kHeaderBytes;

  if (h.block_edge == 0 || h.width % h.block_edge != 0 || h.height % h.block_edge != 0 ||
      h.measurements_per_block == 0 ||
      h.measurements_per_block > h.block_edge * h.block_edge) {
    throw FormatError("inconsistent measurement header");
  }
  const std::uint64_t count = static_cast<std::uint64_t>(h.measurements_per_block) *
                              (h.width / h.block_edge) * (h.height / h.block_edge);
  const std::uint64_t payload = buf.size() - pos;
  if (payload < count * 8) {
    throw FormatError("truncated payload");
  }
  if (payload != count * 8) {
    throw FormatError("payload length does not match header");
  }
  b.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    b.values[i] = std::bit_cast<double>(get_le(buf, pos + 8 * i, 8));
  }
  return b;
}

}  // namespace sgsr
