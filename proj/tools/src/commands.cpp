#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <nlohmann/json.hpp>

#include "corf/csv.hpp"
#include "corf/data_io.hpp"
#include "corf/error.hpp"
#include "corf/log.hpp"
#include "corf/metrics.hpp"
#include "corf/model_io.hpp"
#include "corf/pipeline.hpp"
#include "corf/preprocess.hpp"
#include "corf/report.hpp"
#include "manifest.hpp"

namespace corf::cli {
namespace {

namespace fs = std::filesystem;

template <typename T>
const T& required(const std::optional<T>& value, const char* flag) {
  if (!value) throw InputError(std::string("missing required option ") + flag);
  return *value;
}

fs::path prepare_out(const RunConfig& c) {
  const auto& out = required(c.out, "--out");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
  return out;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

struct Inputs {
  PrimaryDataset data;
  Preprocessing preprocessing;
  CoDataSource codata;
};

Inputs load_inputs(const RunConfig& c, Manifest& manifest, bool fit_standardization = true) {
  c.check_inputs();
  const auto& primary = required(c.primary, "--primary");
  const auto& labels = required(c.labels, "--labels");
  const auto& codata = required(c.codata, "--codata");
  const auto& schema_path = required(c.schema, "--schema");
  manifest.add_input("primary", primary);
  manifest.add_input("labels", labels);
  manifest.add_input("codata", codata);
  manifest.add_input("schema", schema_path);

  Inputs in{load_primary(primary, labels), {}, CoDataDesign{}};
  in.preprocessing = fit_preprocessing(in.data, c.anscombe.value_or(false),
                                       fit_standardization && c.standardize.value_or(false));
  const auto schema = load_schema(schema_path);
  auto design = load_codata(codata, schema, in.data.variable_ids);
  if (schema.grouping) {
    in.codata = GroupingCoData::from_nominal(*design.find(*schema.grouping));
  } else {
    in.codata = std::move(design);
  }
  return in;
}

void print_summary(const CorfResult& r) {
  std::printf("base oob: auc %.4f brier %.4f error %.4f\n", r.base.auc, r.base.brier, r.base.error_rate);
  std::printf("corf oob: auc %.4f brier %.4f error %.4f (gamma %g, %zu variables with positive weight)\n",
              r.corf.auc, r.corf.brier, r.corf.error_rate, r.chosen_gamma, r.weights.support_size());
  if (r.degraded) std::printf("co-data step failed: %s\n", r.degraded_reason.c_str());
}

void write_gamma_scores(const CorfResult& r, const fs::path& path) {
  auto out = open_csv(path);
  out << "gamma,score,auc,brier,error_rate\n";
  for (const auto& g : r.gamma_scores) {
    out << g.gamma << ',' << g.score << ',' << g.oob.auc << ',' << g.oob.brier << ',' << g.oob.error_rate << '\n';
  }
  finish(out, path);
}

int fit_like(const RunConfig& c, const char* command, bool tuning) {
  Manifest manifest(command);
  manifest.add_config(c);
  auto in = load_inputs(c, manifest);
  const fs::path out = prepare_out(c);
  auto params = c.pipeline_params();
  if (tuning && !params.gamma_grid) throw InputError("tune requires --gamma-grid");
  const CorfResult result =
      params.gamma_grid ? tune_gamma(in.data, in.codata, params) : run_corf(in.data, in.codata, params);
  const auto artifact = make_artifact(result, in.data, in.preprocessing);
  save_model(artifact, out / "model.corf");
  emit_report(artifact, out);
  if (!result.gamma_scores.empty()) write_gamma_scores(result, out / "gamma_scores.csv");
  manifest.write(out);
  print_summary(result);
  return 0;
}

}  // namespace

int run_fit(const RunConfig& c) { return fit_like(c, "fit", false); }

int run_tune(const RunConfig& c) { return fit_like(c, "tune", true); }

int run_cv(const RunConfig& c) {
  Manifest manifest("cv");
  manifest.add_config(c);
  if (c.standardize.value_or(false)) {
    // Fitting the scaling on all samples would leak into the held-out folds,
    // and tree splits do not depend on it.
    warn("standardization is not applied during cross-validation");
  }
  auto in = load_inputs(c, manifest, false);
  const fs::path out = prepare_out(c);
  const auto params = c.pipeline_params();
  const CvResult cv = cross_validate(in.data, in.codata, params, params.cv_folds);
  manifest.set("folds", params.cv_folds);

  {
    const auto path = out / "cv_predictions.csv";
    auto f = open_csv(path);
    f << "sample_id,label,fold,base,corf\n";
    for (std::size_t i = 0; i < in.data.n(); ++i) {
      f << csv_escape(in.data.sample_ids[i]) << ',' << int{in.data.y[i]} << ',' << cv.fold_of[i] << ','
        << cv.base_scores[i] << ',' << cv.corf_scores[i] << '\n';
    }
    finish(f, path);
  }
  {
    const auto path = out / "cv_folds.csv";
    auto f = open_csv(path);
    f << "fold,size,base_auc,corf_auc,gamma\n";
    for (const auto& fm : cv.folds) {
      f << fm.fold << ',' << fm.size << ',';
      if (fm.base) {
        f << fm.base->auc;
      } else {
        f << "NA";
      }
      f << ',';
      if (fm.corf) {
        f << fm.corf->auc;
      } else {
        f << "NA";
      }
      f << ',' << fm.chosen_gamma << '\n';
    }
    finish(f, path);
  }
  {
    nlohmann::json summary{{"base_cv_auc", cv.base.auc},       {"base_cv_brier", cv.base.brier},
                           {"base_cv_error", cv.base.error_rate}, {"corf_cv_auc", cv.corf.auc},
                           {"corf_cv_brier", cv.corf.brier},     {"corf_cv_error", cv.corf.error_rate},
                           {"folds", cv.folds.size()},          {"leave_one_out", cv.leave_one_out}};
    const auto path = out / "cv_summary.json";
    std::ofstream f(path, std::ios::binary);
    f << summary.dump(2) << '\n';
    finish(f, path);
  }
  manifest.write(out);
  std::printf("base cv: auc %.4f brier %.4f error %.4f\n", cv.base.auc, cv.base.brier, cv.base.error_rate);
  std::printf("corf cv: auc %.4f brier %.4f error %.4f\n", cv.corf.auc, cv.corf.brier, cv.corf.error_rate);
  return 0;
}

int run_predict(const RunConfig& c) {
  c.check_inputs();
  Manifest manifest("predict");
  const auto& model_path = required(c.model, "--model");
  const auto& primary = required(c.primary, "--primary");
  manifest.add_input("model", model_path);
  manifest.add_input("primary", primary);
  const auto model = load_model(model_path);
  PrimaryDataset data;
  if (c.labels) {
    manifest.add_input("labels", *c.labels);
    data = load_primary(primary, *c.labels);
  } else {
    data = load_features(primary);
  }
  const bool allow_subset = c.allow_subset.value_or(false);
  manifest.set("allow_subset", allow_subset);
  const fs::path out = prepare_out(c);
  const auto scores = predict_model(model, data, allow_subset);

  const auto path = out / "predictions.csv";
  auto f = open_csv(path);
  f << "sample_id,score\n";
  for (std::size_t i = 0; i < data.n(); ++i) f << csv_escape(data.sample_ids[i]) << ',' << scores[i] << '\n';
  finish(f, path);

  if (c.labels) {
    const double a = auc(scores, data.y);
    const double b = brier_score(scores, data.y);
    const double e = error_rate(scores, data.y);
    nlohmann::json metrics{{"auc", a}, {"brier", b}, {"error_rate", e}, {"n", data.n()}};
    const auto mpath = out / "predict_metrics.json";
    std::ofstream mf(mpath, std::ios::binary);
    mf << metrics.dump(2) << '\n';
    finish(mf, mpath);
    const auto rpath = out / "roc_predict.csv";
    auto rf = open_csv(rpath);
    rf << "threshold,tpr,fpr\n";
    for (const auto& pt : roc_curve(scores, data.y)) {
      if (std::isinf(pt.threshold)) {
        rf << "inf";
      } else {
        rf << pt.threshold;
      }
      rf << ',' << pt.tpr << ',' << pt.fpr << '\n';
    }
    finish(rf, rpath);
    std::printf("auc %.4f brier %.4f error %.4f on %zu samples\n", a, b, e, data.n());
  } else {
    std::printf("wrote %zu predictions\n", data.n());
  }
  manifest.write(out);
  return 0;
}

int run_simulate(const SyntheticSpec& spec, const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
  const auto syn = generate_synthetic(spec);
  write_primary(syn.data, out / "primary.csv", out / "labels.csv");
  write_codata(syn.codata, out / "codata.csv");
  CoDataSchema schema;
  schema.columns.push_back({"flag", ColumnKind::nominal, Monotonicity::none, {"0", "1"}});
  schema.columns.push_back({"score", ColumnKind::continuous, Monotonicity::increasing, {}});
  save_schema(schema, out / "schema.json");
  {
    const auto path = out / "truth.csv";
    auto f = open_csv(path);
    f << "variable_id,informative\n";
    std::vector<bool> truth(spec.p, false);
    for (auto j : syn.informative) truth[j] = true;
    for (std::size_t j = 0; j < spec.p; ++j) f << syn.data.variable_ids[j] << ',' << (truth[j] ? 1 : 0) << '\n';
    finish(f, path);
  }
  Manifest manifest("simulate");
  manifest.set("n", spec.n);
  manifest.set("p", spec.p);
  manifest.set("n_informative", spec.n_informative);
  manifest.set("effect_size", spec.effect_size);
  manifest.set("informative_correlation", spec.informative_correlation);
  manifest.set("codata_quality", spec.codata_quality);
  manifest.set("seed", spec.seed);
  manifest.write(out);
  std::printf("wrote %zu samples x %zu variables (%zu informative) to %s\n", spec.n, spec.p, spec.n_informative,
              out.string().c_str());
  return 0;
}

int run_report(const RunConfig& c) {
  c.check_inputs();
  const auto& model_path = required(c.model, "--model");
  const auto model = load_model(model_path);
  const fs::path out = prepare_out(c);
  emit_report(model, out);
  Manifest manifest("report");
  manifest.add_input("model", model_path);
  manifest.write(out);
  std::printf("report written to %s\n", out.string().c_str());
  return 0;
}

}  // namespace corf::cli
