#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "commands.hpp"
#include "corf/config.hpp"
#include "corf/error.hpp"

namespace {

using corf::RunConfig;

// Flag values as parsed; copied into a RunConfig for the flags that were
// actually given so they override a --config file.
struct Flags {
  std::string config, primary, labels, codata, schema, out, model, gamma_grid, criterion;
  std::size_t ntree = 0, mtry = 0, min_node_size = 0, folds = 0, threads = 0;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  bool anscombe = false, standardize = false, allow_subset = false;
};

struct Registered {
  CLI::App* app = nullptr;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  CLI::Option* get(const std::string& name) const {
    for (const auto& [n, o] : options) {
      if (n == name) return o;
    }
    return nullptr;
  }
  bool given(const std::string& name) const {
    auto* o = get(name);
    return o != nullptr && o->count() > 0;
  }
};

Registered add_run_options(CLI::App* app, Flags& f, std::initializer_list<std::string> which) {
  Registered r{app, {}};
  auto want = [&](const std::string& n) { return std::find(which.begin(), which.end(), n) != which.end(); };
  auto add = [&](const std::string& name, CLI::Option* o) { r.options.emplace_back(name, o); };
  add("config", app->add_option("--config", f.config, "JSON run configuration; flags override it"));
  if (want("primary")) add("primary", app->add_option("--primary", f.primary, "primary matrix CSV"));
  if (want("labels")) add("labels", app->add_option("--labels", f.labels, "labels CSV (sample_id,label)"));
  if (want("codata")) add("codata", app->add_option("--codata", f.codata, "co-data CSV keyed by variable id"));
  if (want("schema")) add("schema", app->add_option("--schema", f.schema, "co-data schema JSON"));
  if (want("model")) add("model", app->add_option("--model", f.model, "model file"));
  add("out", app->add_option("--out", f.out, "output directory"));
  if (want("forest")) {
    add("ntree", app->add_option("--ntree", f.ntree, "trees per forest (default 5000)"));
    add("mtry", app->add_option("--mtry", f.mtry, "candidates per split (default ceil(sqrt(P)))"));
    add("min_node_size", app->add_option("--min-node-size", f.min_node_size, "leaf size bound (default 2)"));
    add("gamma", app->add_option("--gamma", f.gamma, "weight threshold multiplier (default 1)"));
    add("gamma_grid", app->add_option("--gamma-grid", f.gamma_grid, "comma-separated gamma values to tune over"));
    add("seed", app->add_option("--seed", f.seed, "random seed (default 1)"));
    add("threads", app->add_option("--threads", f.threads, "worker threads (default CORF_THREADS or all cores)"));
    add("criterion", app->add_option("--criterion", f.criterion, "tuning criterion")
                         ->check(CLI::IsMember({"auc", "brier", "error"})));
    add("anscombe", app->add_flag("--anscombe", f.anscombe, "apply sqrt(x + 3/8) to the primary data"));
    add("standardize", app->add_flag("--standardize", f.standardize, "center and scale primary columns"));
  }
  if (want("folds")) add("folds", app->add_option("--folds", f.folds, "cross-validation folds (default 10)"));
  if (want("allow_subset")) {
    add("allow_subset", app->add_flag("--allow-subset", f.allow_subset, "tolerate missing model variables"));
  }
  return r;
}

RunConfig to_config(const Registered& r, const Flags& f) {
  RunConfig c;
  if (r.given("config")) c = corf::load_run_config(f.config);
  RunConfig flags;
  if (r.given("primary")) flags.primary = f.primary;
  if (r.given("labels")) flags.labels = f.labels;
  if (r.given("codata")) flags.codata = f.codata;
  if (r.given("schema")) flags.schema = f.schema;
  if (r.given("out")) flags.out = f.out;
  if (r.given("model")) flags.model = f.model;
  if (r.given("ntree")) flags.ntree = f.ntree;
  if (r.given("mtry")) flags.mtry = f.mtry;
  if (r.given("min_node_size")) flags.min_node_size = f.min_node_size;
  if (r.given("gamma")) flags.gamma = f.gamma;
  if (r.given("gamma_grid")) flags.gamma_grid = corf::parse_number_list(f.gamma_grid);
  if (r.given("seed")) flags.seed = f.seed;
  if (r.given("threads")) flags.threads = f.threads;
  if (r.given("criterion")) flags.criterion = corf::parse_criterion(f.criterion);
  if (r.given("anscombe")) flags.anscombe = f.anscombe;
  if (r.given("standardize")) flags.standardize = f.standardize;
  if (r.given("folds")) flags.folds = f.folds;
  if (r.given("allow_subset")) flags.allow_subset = f.allow_subset;
  c.merge(flags);
  if (!c.threads) {
    if (const char* env = std::getenv("CORF_THREADS")) {
      try {
        c.threads = static_cast<std::size_t>(std::stoul(env));
      } catch (const std::exception&) {
        throw corf::InputError(std::string("CORF_THREADS is not a number: ") + env);
      }
    }
  }
  return c;
}

int exit_code(corf::ErrorKind kind) {
  switch (kind) {
    case corf::ErrorKind::contract:
    case corf::ErrorKind::input:
      return 2;
    case corf::ErrorKind::convergence:
      return 3;
    case corf::ErrorKind::io:
      return 4;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random forests with co-data moderated variable sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "corf 0.1.0");

  Flags f;
  const std::initializer_list<std::string> training{"primary", "labels", "codata", "schema", "forest"};
  auto* fit = app.add_subcommand("fit", "fit base and co-data forests, write model and report");
  const auto fit_opts = add_run_options(fit, f, training);
  auto* tune = app.add_subcommand("tune", "fit with gamma tuned over --gamma-grid by out-of-bag performance");
  const auto tune_opts = add_run_options(tune, f, training);
  auto* cv = app.add_subcommand("cv", "cross-validate the whole pipeline");
  const auto cv_opts = add_run_options(cv, f, {"primary", "labels", "codata", "schema", "forest", "folds"});
  auto* predict = app.add_subcommand("predict", "score new samples with a saved model");
  const auto predict_opts = add_run_options(predict, f, {"primary", "labels", "model", "allow_subset"});
  auto* report = app.add_subcommand("report", "write report tables for a saved model");
  const auto report_opts = add_run_options(report, f, {"model"});

  auto* simulate = app.add_subcommand("simulate", "write a synthetic dataset with co-data");
  corf::SyntheticSpec spec;
  std::string sim_out;
  simulate->add_option("--n", spec.n, "samples")->capture_default_str();
  simulate->add_option("--p", spec.p, "variables")->capture_default_str();
  simulate->add_option("--n-informative", spec.n_informative, "informative variables")->capture_default_str();
  simulate->add_option("--effect-size", spec.effect_size, "sd of the true logit")->capture_default_str();
  simulate->add_option("--correlation", spec.informative_correlation, "correlation among informative variables")
      ->capture_default_str();
  simulate->add_option("--codata-quality", spec.codata_quality, "co-data flag accuracy in [0, 1]")
      ->capture_default_str();
  simulate->add_option("--seed", spec.seed, "random seed")->capture_default_str();
  simulate->add_option("--out", sim_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit) return corf::cli::run_fit(to_config(fit_opts, f));
    if (*tune) return corf::cli::run_tune(to_config(tune_opts, f));
    if (*cv) return corf::cli::run_cv(to_config(cv_opts, f));
    if (*predict) return corf::cli::run_predict(to_config(predict_opts, f));
    if (*report) return corf::cli::run_report(to_config(report_opts, f));
    if (*simulate) return corf::cli::run_simulate(spec, sim_out);
  } catch (const corf::Error& e) {
    std::fprintf(stderr, "corf: error: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "corf: internal error: %s\n", e.what());
    return 1;
  }
  return 1;
}
