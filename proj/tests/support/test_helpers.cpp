#include "support/test_helpers.hpp"

#include <atomic>
#include <chrono>
#include <vector>

#include "sgsr/random.hpp"

namespace sgsr::testing {

std::filesystem::path data_dir() { return SGSR_TEST_DATA_DIR; }

Image load_test_image(const std::string& name) { return load_pgm(data_dir() / name); }

Image crop(const Image& image, int width, int height) {
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out(x, y) = image(x, y);
  }
  return out;
}

Image random_image(int width, int height, std::uint64_t seed, double lo, double hi) {
  NormalGenerator gen(seed);
  Image out(width, height);
  for (double& v : out.pixels()) v = lo + (hi - lo) * gen.uniform();
  return out;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  NormalGenerator gen(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gen();
  }
  return m;
}

Eigen::MatrixXd random_orthonormal(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rows, cols, seed));
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

Eigen::MatrixXd matrix_with_spectrum(Eigen::Index rows, Eigen::Index cols,
                                     const Eigen::VectorXd& singular_values, std::uint64_t seed) {
  const Eigen::Index m = singular_values.size();
  const Eigen::MatrixXd u = random_orthonormal(rows, m, seed);
  const Eigen::MatrixXd v = random_orthonormal(cols, m, seed + 7919);
  return u * singular_values.asDiagonal() * v.transpose();
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = std::filesystem::temp_directory_path() /
          ("sgsr_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace sgsr::testing
