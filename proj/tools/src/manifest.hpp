#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "corf/config.hpp"

namespace corf::cli {

/// Record of a run: command, effective parameters, and CRC-32 of every input
/// file. Contains nothing time- or host-dependent.
class Manifest {
 public:
  explicit Manifest(std::string command);

  void set(const std::string& key, nlohmann::json value);
  void add_input(const std::string& role, const std::filesystem::path& path);
  void add_config(const RunConfig& config);
  void write(const std::filesystem::path& dir) const;

 private:
  nlohmann::json doc_;
};

}  // namespace corf::cli
