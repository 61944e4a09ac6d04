#include "corf/config.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "corf/csv.hpp"
#include "corf/error.hpp"

namespace corf {

namespace {

template <typename T>
void take(std::optional<T>& mine, const std::optional<T>& theirs) {
  if (theirs) mine = theirs;
}

}  // namespace

void RunConfig::merge(const RunConfig& o) {
  take(primary, o.primary);
  take(labels, o.labels);
  take(codata, o.codata);
  take(schema, o.schema);
  take(out, o.out);
  take(model, o.model);
  take(ntree, o.ntree);
  take(mtry, o.mtry);
  take(min_node_size, o.min_node_size);
  take(gamma, o.gamma);
  take(gamma_grid, o.gamma_grid);
  take(folds, o.folds);
  take(seed, o.seed);
  take(threads, o.threads);
  take(criterion, o.criterion);
  take(anscombe, o.anscombe);
  take(standardize, o.standardize);
  take(allow_subset, o.allow_subset);
}

void RunConfig::check_inputs() const {
  for (const auto* path : {&primary, &labels, &codata, &schema, &model}) {
    if (*path && !std::filesystem::exists(**path)) throw InputError("file not found: " + (*path)->string());
  }
}

PipelineParams RunConfig::pipeline_params() const {
  PipelineParams p;
  if (ntree) p.forest.ntree = *ntree;
  p.forest.mtry = mtry;
  if (min_node_size) p.forest.min_node_size = *min_node_size;
  if (seed) p.forest.seed = *seed;
  if (threads) p.forest.threads = *threads;
  if (gamma) p.gamma = *gamma;
  p.gamma_grid = gamma_grid;
  if (folds) p.cv_folds = *folds;
  if (criterion) p.criterion = *criterion;
  return p;
}

RunConfig parse_run_config(const std::string& json_text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(origin + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw InputError(origin + ": expected a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "primary") {
        c.primary = value.get<std::string>();
      } else if (key == "labels") {
        c.labels = value.get<std::string>();
      } else if (key == "codata") {
        c.codata = value.get<std::string>();
      } else if (key == "schema") {
        c.schema = value.get<std::string>();
      } else if (key == "out") {
        c.out = value.get<std::string>();
      } else if (key == "model") {
        c.model = value.get<std::string>();
      } else if (key == "ntree") {
        c.ntree = value.get<std::size_t>();
      } else if (key == "mtry") {
        c.mtry = value.get<std::size_t>();
      } else if (key == "min_node_size") {
        c.min_node_size = value.get<std::size_t>();
      } else if (key == "gamma") {
        c.gamma = value.get<double>();
      } else if (key == "gamma_grid") {
        c.gamma_grid = value.get<std::vector<double>>();
      } else if (key == "folds") {
        c.folds = value.get<std::size_t>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "threads") {
        c.threads = value.get<std::size_t>();
      } else if (key == "criterion") {
        c.criterion = parse_criterion(value.get<std::string>());
      } else if (key == "anscombe") {
        c.anscombe = value.get<bool>();
      } else if (key == "standardize") {
        c.standardize = value.get<bool>();
      } else if (key == "allow_subset") {
        c.allow_subset = value.get<bool>();
      } else {
        throw InputError(origin + ": unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(origin + ": " + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path.string());
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& field : split_csv_record(text)) {
    const auto v = parse_number(field);
    if (!v || !std::isfinite(*v)) throw InputError("not a number: '" + field + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw InputError("empty number list");
  return out;
}

}  // namespace corf
