#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "corf/random.hpp"

namespace corf::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("corf-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

PrimaryDataset separable_dataset(std::size_t n) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 1);
  Labels y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i >= n / 2 ? 1 : 0;
    X(static_cast<Eigen::Index>(i), 0) = static_cast<double>(y[i] ? i + n : i);
  }
  return make_dataset(std::move(X), std::move(y));
}

PrimaryDataset noisy_dataset(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, j) = rng.normal();
  }
  Labels y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = X(static_cast<Eigen::Index>(i), 0) + 0.5 * rng.normal() > 0 ? 1 : 0;
  y[0] = 0;
  y[1] = 1;
  return make_dataset(std::move(X), std::move(y));
}

}  // namespace corf::testing
