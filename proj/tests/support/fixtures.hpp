#pragma once

#include <filesystem>
#include <string>

#include "corf/dataset.hpp"

namespace corf::testing {

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// One variable, y = 1 for the upper half of the rows. Class-1 values are
/// shifted by n so any in-bag split also classifies out-of-bag rows.
PrimaryDataset separable_dataset(std::size_t n);

/// Standard normal features, labels from the sign of the first column plus
/// noise (both classes guaranteed).
PrimaryDataset noisy_dataset(std::size_t n, std::size_t p, std::uint64_t seed);

}  // namespace corf::testing
