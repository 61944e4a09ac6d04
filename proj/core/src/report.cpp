#include "corf/report.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <nlohmann/json.hpp>

#include "corf/csv.hpp"
#include "corf/error.hpp"
#include "corf/metrics.hpp"

namespace corf {
namespace {

class OutFile {
 public:
  explicit OutFile(std::filesystem::path path) : path_(std::move(path)), out_(path_, std::ios::binary) {
    if (!out_) throw IoError("cannot write " + path_.string());
    out_ << std::setprecision(std::numeric_limits<double>::max_digits10);
  }
  ~OutFile() noexcept(false) {
    out_.flush();
    if (!out_ && std::uncaught_exceptions() == 0) throw IoError("cannot write " + path_.string());
  }
  std::ostream& stream() { return out_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void write_roc(const std::vector<std::optional<double>>& votes, const Labels& labels,
               const std::filesystem::path& path) {
  std::vector<double> scores;
  Labels y;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (!votes[i]) continue;
    scores.push_back(*votes[i]);
    y.push_back(labels[i]);
  }
  OutFile file(path);
  auto& out = file.stream();
  out << "threshold,tpr,fpr\n";
  bool both = false;
  for (auto v : y) both = both || v != y.front();
  if (!both) return;
  for (const auto& pt : roc_curve(scores, y)) {
    if (std::isinf(pt.threshold)) {
      out << "inf";
    } else {
      out << pt.threshold;
    }
    out << ',' << pt.tpr << ',' << pt.fpr << '\n';
  }
}

// Design of `rows` variables with every column at its reference value.
CoDataDesign reference_design(const CoDataFit& fit, std::size_t rows) {
  CoDataDesign d;
  for (std::size_t r = 0; r < rows; ++r) d.variable_ids.push_back("g" + std::to_string(r));
  for (const auto& c : fit.schema) {
    if (c.kind == ColumnKind::nominal) {
      d.columns.push_back(CoDataColumn::nominal(c.name, c.levels, std::vector<std::size_t>(rows, 0)));
    } else {
      d.columns.push_back(CoDataColumn::continuous(c.name, std::vector<double>(rows, c.median), c.monotonicity));
    }
  }
  return d;
}

void write_curves(const CoDataFit& fit, const std::filesystem::path& path) {
  OutFile file(path);
  auto& out = file.stream();
  out << "column,x,effect,p_hat\n";
  for (std::size_t c = 0; c < fit.schema.size(); ++c) {
    const auto& col = fit.schema[c];
    if (col.kind == ColumnKind::nominal) {
      const std::size_t L = col.levels.size();
      auto design = reference_design(fit, L);
      for (std::size_t l = 0; l < L; ++l) design.columns[c].values[l] = static_cast<double>(l);
      const auto p = predict_pj(fit, design);
      for (std::size_t l = 0; l < L; ++l) {
        double effect = 0.0;
        for (const auto& t : fit.linear) {
          if (t.column == c && t.level == l) effect = t.coefficient;
        }
        out << csv_escape(col.name) << ',' << csv_escape(col.levels[l]) << ',' << effect << ',' << p[l] << '\n';
      }
      continue;
    }
    auto design = reference_design(fit, kCurveGridSize);
    std::vector<double> grid(kCurveGridSize);
    for (std::size_t g = 0; g < kCurveGridSize; ++g) {
      grid[g] = col.min + (col.max - col.min) * static_cast<double>(g) / static_cast<double>(kCurveGridSize - 1);
      design.columns[c].values[g] = grid[g];
    }
    const auto p = predict_pj(fit, design);
    const SmoothTerm* smooth = nullptr;
    for (const auto& s : fit.smooths) {
      if (s.column == c) smooth = &s;
    }
    double slope = 0.0;
    for (const auto& t : fit.linear) {
      if (t.column == c) slope = t.coefficient;
    }
    for (std::size_t g = 0; g < kCurveGridSize; ++g) {
      const double effect = smooth ? smooth->value(grid[g]) : slope * grid[g];
      out << csv_escape(col.name) << ',' << grid[g] << ',' << effect << ',' << p[g] << '\n';
    }
  }
}

void write_weights(const ModelArtifact& m, const std::filesystem::path& path) {
  OutFile file(path);
  auto& out = file.stream();
  out << "variable_id,p_hat,w_tilde,V\n";
  for (std::size_t j = 0; j < m.variable_ids.size(); ++j) {
    out << csv_escape(m.variable_ids[j]) << ',';
    if (m.codata_fit) {
      out << m.codata_fit->p_hat[j];
    } else {
      out << "NA";
    }
    out << ',' << m.weights[j] << ',' << (j < m.base_split_counts.size() ? m.base_split_counts[j] : 0) << '\n';
  }
}

void write_metrics(const ModelArtifact& m, const std::filesystem::path& path) {
  nlohmann::json doc(nlohmann::json::value_t::object);
  for (const auto& [key, value] : m.metrics) doc[key] = value;
  doc["seed"] = m.seed;
  doc["n_variables"] = m.variable_ids.size();
  doc["n_samples"] = m.labels.size();
  doc["ntree"] = m.forest.trees().size();
  doc["mtry"] = m.forest.mtry();
  if (m.degraded) doc["degraded_reason"] = m.degraded_reason;
  if (m.codata_fit) {
    for (const auto& t : m.codata_fit->linear) doc["coef[" + m.codata_fit->term_label(t) + "]"] = t.coefficient;
    for (const auto& s : m.codata_fit->smooths) {
      doc["lambda[" + m.codata_fit->schema[s.column].name + "]"] = s.lambda;
      doc["edf[" + m.codata_fit->schema[s.column].name + "]"] = s.edf;
    }
    doc["codata_alpha0"] = m.codata_fit->alpha0;
  }
  OutFile file(path);
  file.stream() << doc.dump(2) << '\n';
}

}  // namespace

void emit_report(const ModelArtifact& model, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_roc(model.base_oob, model.labels, dir / "roc_base.csv");
  write_roc(model.corf_oob, model.labels, dir / "roc_corf.csv");
  if (model.codata_fit) {
    write_curves(*model.codata_fit, dir / "codata_curves.csv");
  } else {
    OutFile file(dir / "codata_curves.csv");
    file.stream() << "column,x,effect,p_hat\n";
  }
  write_weights(model, dir / "weights.csv");
  write_metrics(model, dir / "metrics.json");
}

void emit_report(const CorfResult& result, const PrimaryDataset& data, const std::filesystem::path& dir) {
  Preprocessing none;
  none.variable_ids = data.variable_ids;
  emit_report(make_artifact(result, data, none), dir);
}

}  // namespace corf
