#include "manifest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "corf/data_io.hpp"
#include "corf/error.hpp"

namespace corf::cli {

Manifest::Manifest(std::string command) {
  doc_["command"] = std::move(command);
  doc_["params"] = nlohmann::json::object();
  doc_["inputs"] = nlohmann::json::object();
}

void Manifest::set(const std::string& key, nlohmann::json value) { doc_["params"][key] = std::move(value); }

void Manifest::add_input(const std::string& role, const std::filesystem::path& path) {
  std::ostringstream crc;
  crc << std::hex << std::setw(8) << std::setfill('0') << file_crc32(path);
  doc_["inputs"][role] = {{"path", path.string()}, {"crc32", crc.str()}};
}

void Manifest::add_config(const RunConfig& c) {
  const auto p = c.pipeline_params();
  set("ntree", p.forest.ntree);
  set("mtry", c.mtry ? nlohmann::json(*c.mtry) : nlohmann::json("default"));
  set("min_node_size", p.forest.min_node_size);
  set("gamma", p.gamma);
  if (p.gamma_grid) set("gamma_grid", *p.gamma_grid);
  set("criterion", std::string(to_string(p.criterion)));
  set("anscombe", c.anscombe.value_or(false));
  set("standardize", c.standardize.value_or(false));
  doc_["seed"] = p.forest.seed;
}

void Manifest::write(const std::filesystem::path& dir) const {
  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  out << doc_.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace corf::cli
