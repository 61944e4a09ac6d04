#include "corf/model_io.hpp"

#include <zlib.h>

#include <fstream>
#include <limits>
#include <iterator>
#include <nlohmann/json.hpp>
#include <unordered_map>

#include "corf/error.hpp"
#include "corf/log.hpp"

namespace corf {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'C', 'O', 'R', 'F'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t get_le(const std::vector<std::uint8_t>& in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(in[at + static_cast<std::size_t>(b)]) << (8 * b);
  return v;
}

std::uint32_t crc_of(const std::uint8_t* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

json optional_votes(const std::vector<std::optional<double>>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(x ? json(*x) : json(nullptr));
  return out;
}

std::vector<std::optional<double>> votes_from(const json& j) {
  std::vector<std::optional<double>> out;
  for (const auto& x : j) {
    if (x.is_null()) {
      out.emplace_back();
    } else {
      out.emplace_back(x.get<double>());
    }
  }
  return out;
}

json forest_to_json(const Forest& forest) {
  const auto& p = forest.params();
  json params{{"ntree", p.ntree},
              {"mtry", *p.mtry},
              {"min_node_size", p.min_node_size},
              {"seed", p.seed},
              {"sampling_weights", p.sampling_weights ? json(p.sampling_weights->values()) : json(nullptr)}};
  json trees = json::array();
  for (const auto& tree : forest.trees()) {
    std::vector<std::int32_t> variable, left, right;
    std::vector<double> threshold;
    std::vector<std::uint32_t> c0, c1;
    for (const auto& node : tree.nodes) {
      variable.push_back(node.variable);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      c0.push_back(node.count0);
      c1.push_back(node.count1);
    }
    trees.push_back(json{{"variable", variable},
                         {"threshold", threshold},
                         {"left", left},
                         {"right", right},
                         {"count0", c0},
                         {"count1", c1},
                         {"inbag", tree.inbag_counts}});
  }
  return json{{"params", params}, {"n_variables", forest.n_variables()}, {"trees", trees}};
}

Forest forest_from_json(const json& j) {
  const auto& jp = j.at("params");
  ForestParams params;
  params.ntree = jp.at("ntree").get<std::size_t>();
  params.mtry = jp.at("mtry").get<std::size_t>();
  params.min_node_size = jp.at("min_node_size").get<std::size_t>();
  params.seed = jp.at("seed").get<std::uint64_t>();
  if (!jp.at("sampling_weights").is_null()) {
    params.sampling_weights =
        SamplingWeights::from_normalized(jp.at("sampling_weights").get<std::vector<double>>());
  }
  std::vector<Tree> trees;
  for (const auto& jt : j.at("trees")) {
    const auto variable = jt.at("variable").get<std::vector<std::int32_t>>();
    const auto threshold = jt.at("threshold").get<std::vector<double>>();
    const auto left = jt.at("left").get<std::vector<std::int32_t>>();
    const auto right = jt.at("right").get<std::vector<std::int32_t>>();
    const auto c0 = jt.at("count0").get<std::vector<std::uint32_t>>();
    const auto c1 = jt.at("count1").get<std::vector<std::uint32_t>>();
    const std::size_t m = variable.size();
    if (threshold.size() != m || left.size() != m || right.size() != m || c0.size() != m || c1.size() != m ||
        m == 0) {
      throw InputError("inconsistent tree arrays in model body");
    }
    Tree tree;
    tree.nodes.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      tree.nodes[k] = TreeNode{variable[k], threshold[k], left[k], right[k], c0[k], c1[k]};
    }
    tree.inbag_counts = jt.at("inbag").get<std::vector<std::uint32_t>>();
    trees.push_back(std::move(tree));
  }
  return Forest(std::move(trees), std::move(params), j.at("n_variables").get<std::size_t>());
}

json fit_to_json(const CoDataFit& fit) {
  json schema = json::array();
  for (const auto& c : fit.schema) {
    schema.push_back(json{{"name", c.name},
                          {"kind", std::string(to_string(c.kind))},
                          {"levels", c.levels},
                          {"monotonicity", std::string(to_string(c.monotonicity))},
                          {"min", c.min},
                          {"max", c.max},
                          {"median", c.median}});
  }
  json linear = json::array();
  for (const auto& t : fit.linear) {
    linear.push_back(json{{"column", t.column}, {"level", t.level}, {"coefficient", t.coefficient}});
  }
  json smooths = json::array();
  for (const auto& s : fit.smooths) {
    smooths.push_back(json{{"column", s.column},
                           {"direction", std::string(to_string(s.direction))},
                           {"degree", s.spline.degree()},
                           {"lower", s.spline.lower()},
                           {"upper", s.spline.upper()},
                           {"interior", s.spline.interior_knots()},
                           {"theta_tilde", s.theta_tilde},
                           {"lambda", s.lambda},
                           {"edf", s.edf}});
  }
  json trials = json::array();
  for (const auto& t : fit.lambda_trials) {
    trials.push_back(
        json{{"lambdas", t.lambdas}, {"deviance", t.deviance}, {"edf", t.edf}, {"criterion", t.criterion}});
  }
  return json{{"schema", schema},
              {"alpha0", fit.alpha0},
              {"linear", linear},
              {"smooths", smooths},
              {"tau", fit.tau},
              {"p_hat", fit.p_hat},
              {"total_splits", fit.total_splits},
              {"iterations", fit.iterations},
              {"gradient_norm", fit.gradient_norm},
              {"edf", fit.edf},
              {"deviance", fit.deviance},
              {"criterion", fit.criterion},
              {"reference_dispersion", fit.reference_dispersion},
              {"lambda_trials", trials},
              {"dropped_terms", fit.dropped_terms}};
}

CoDataFit fit_from_json(const json& j) {
  CoDataFit fit;
  for (const auto& c : j.at("schema")) {
    ColumnSchema s;
    s.name = c.at("name").get<std::string>();
    s.kind = parse_column_kind(c.at("kind").get<std::string>());
    s.levels = c.at("levels").get<std::vector<std::string>>();
    s.monotonicity = parse_monotonicity(c.at("monotonicity").get<std::string>());
    s.min = c.at("min").get<double>();
    s.max = c.at("max").get<double>();
    s.median = c.at("median").get<double>();
    fit.schema.push_back(std::move(s));
  }
  fit.alpha0 = j.at("alpha0").get<double>();
  for (const auto& t : j.at("linear")) {
    fit.linear.push_back(LinearTerm{t.at("column").get<std::size_t>(), t.at("level").get<std::size_t>(),
                                    t.at("coefficient").get<double>()});
  }
  for (const auto& s : j.at("smooths")) {
    SmoothTerm term;
    term.column = s.at("column").get<std::size_t>();
    term.direction = parse_monotonicity(s.at("direction").get<std::string>());
    term.spline = BSpline(s.at("degree").get<int>(), s.at("lower").get<double>(), s.at("upper").get<double>(),
                          s.at("interior").get<std::vector<double>>());
    term.theta_tilde = s.at("theta_tilde").get<std::vector<double>>();
    term.lambda = s.at("lambda").get<double>();
    term.edf = s.at("edf").get<double>();
    fit.smooths.push_back(std::move(term));
  }
  fit.tau = j.at("tau").get<double>();
  fit.p_hat = j.at("p_hat").get<std::vector<double>>();
  fit.total_splits = j.at("total_splits").get<std::uint64_t>();
  fit.iterations = j.at("iterations").get<std::size_t>();
  fit.gradient_norm = j.at("gradient_norm").get<double>();
  fit.edf = j.at("edf").get<double>();
  fit.deviance = j.at("deviance").get<double>();
  fit.criterion = j.at("criterion").get<double>();
  fit.reference_dispersion = j.at("reference_dispersion").get<double>();
  for (const auto& t : j.at("lambda_trials")) {
    fit.lambda_trials.push_back(LambdaTrial{t.at("lambdas").get<std::vector<double>>(),
                                            t.at("deviance").get<double>(), t.at("edf").get<double>(),
                                            t.at("criterion").get<double>()});
  }
  fit.dropped_terms = j.at("dropped_terms").get<std::vector<std::string>>();
  return fit;
}

json artifact_to_json(const ModelArtifact& m) {
  const auto& pre = m.preprocessing;
  return json{{"forest", forest_to_json(m.forest)},
              {"codata_fit", m.codata_fit ? fit_to_json(*m.codata_fit) : json(nullptr)},
              {"weights", m.weights.values()},
              {"variable_ids", m.variable_ids},
              {"preprocessing",
               json{{"anscombe", pre.anscombe},
                    {"standardize", pre.standardize},
                    {"variable_ids", pre.variable_ids},
                    {"mean", pre.mean},
                    {"sd", pre.sd}}},
              {"seed", m.seed},
              {"gamma", m.gamma},
              {"degraded", m.degraded},
              {"degraded_reason", m.degraded_reason},
              {"metrics", m.metrics},
              {"base_split_counts", m.base_split_counts},
              {"sample_ids", m.sample_ids},
              {"labels", m.labels},
              {"base_oob", optional_votes(m.base_oob)},
              {"corf_oob", optional_votes(m.corf_oob)}};
}

ModelArtifact artifact_from_json(const json& j) {
  ModelArtifact m;
  m.forest = forest_from_json(j.at("forest"));
  if (!j.at("codata_fit").is_null()) m.codata_fit = fit_from_json(j.at("codata_fit"));
  m.weights = SamplingWeights::from_normalized(j.at("weights").get<std::vector<double>>());
  m.variable_ids = j.at("variable_ids").get<std::vector<std::string>>();
  const auto& jp = j.at("preprocessing");
  m.preprocessing.anscombe = jp.at("anscombe").get<bool>();
  m.preprocessing.standardize = jp.at("standardize").get<bool>();
  m.preprocessing.variable_ids = jp.at("variable_ids").get<std::vector<std::string>>();
  m.preprocessing.mean = jp.at("mean").get<std::vector<double>>();
  m.preprocessing.sd = jp.at("sd").get<std::vector<double>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.gamma = j.at("gamma").get<double>();
  m.degraded = j.at("degraded").get<bool>();
  m.degraded_reason = j.at("degraded_reason").get<std::string>();
  m.metrics = j.at("metrics").get<std::map<std::string, double>>();
  m.base_split_counts = j.at("base_split_counts").get<std::vector<std::uint64_t>>();
  m.sample_ids = j.at("sample_ids").get<std::vector<std::string>>();
  m.labels = j.at("labels").get<Labels>();
  m.base_oob = votes_from(j.at("base_oob"));
  m.corf_oob = votes_from(j.at("corf_oob"));
  if (m.variable_ids.size() != m.forest.n_variables() || m.weights.size() != m.forest.n_variables()) {
    throw InputError("model body is inconsistent: variable count mismatch");
  }
  return m;
}

}  // namespace

std::map<std::string, double> summary_metrics(const CorfResult& r) {
  std::map<std::string, double> m{{"base_oob_auc", r.base.auc},
                                  {"base_oob_brier", r.base.brier},
                                  {"base_oob_error", r.base.error_rate},
                                  {"corf_oob_auc", r.corf.auc},
                                  {"corf_oob_brier", r.corf.brier},
                                  {"corf_oob_error", r.corf.error_rate},
                                  {"gamma", r.chosen_gamma},
                                  {"degraded", r.degraded ? 1.0 : 0.0},
                                  {"uniform_fallback", r.uniform_fallback ? 1.0 : 0.0},
                                  {"support_size", static_cast<double>(r.weights.support_size())},
                                  {"base_total_splits", static_cast<double>(r.base_forest.total_splits())}};
  if (r.codata_fit) {
    m["codata_tau"] = r.codata_fit->tau;
    m["codata_edf"] = r.codata_fit->edf;
    m["codata_deviance"] = r.codata_fit->deviance;
    m["codata_iterations"] = static_cast<double>(r.codata_fit->iterations);
    m["codata_gradient_norm"] = r.codata_fit->gradient_norm;
  }
  for (const auto& g : r.gamma_scores) m["gamma_score[" + std::to_string(g.gamma) + "]"] = g.score;
  return m;
}

ModelArtifact make_artifact(const CorfResult& result, const PrimaryDataset& data, const Preprocessing& preprocessing) {
  ModelArtifact m;
  m.forest = result.corf_forest;
  m.codata_fit = result.codata_fit;
  m.weights = result.weights;
  m.variable_ids = data.variable_ids;
  m.preprocessing = preprocessing;
  m.seed = result.base_forest.params().seed;
  m.gamma = result.chosen_gamma;
  m.degraded = result.degraded;
  m.degraded_reason = result.degraded_reason;
  m.metrics = summary_metrics(result);
  m.base_split_counts = result.base_forest.split_counts();
  m.sample_ids = data.sample_ids;
  m.labels = data.y;
  m.base_oob = result.base_oob.vote_fraction;
  m.corf_oob = result.corf_oob.vote_fraction;
  return m;
}

std::vector<std::uint8_t> serialize_model(const ModelArtifact& model) {
  const json header{{"format", "corf-model"},
                    {"format_version", ModelArtifact::format_version},
                    {"n_variables", model.forest.n_variables()},
                    {"ntree", model.forest.trees().size()},
                    {"seed", model.seed}};
  const std::string header_text = header.dump();
  const std::vector<std::uint8_t> body = json::to_cbor(artifact_to_json(model));

  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 + 4 + header_text.size() + 8 + body.size() + 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, ModelArtifact::format_version);
  put_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out.insert(out.end(), header_text.begin(), header_text.end());
  put_u64(out, body.size());
  out.insert(out.end(), body.begin(), body.end());
  put_u32(out, crc_of(out.data(), out.size()));
  return out;
}

ModelArtifact deserialize_model(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw ModelFormatError(ModelFormatProblem::not_corf, "not a CoRF model");
  }
  auto need = [&](std::size_t end) {
    if (bytes.size() < end) throw ModelFormatError(ModelFormatProblem::truncated, "truncated container");
  };
  need(8);
  const auto version = static_cast<std::uint32_t>(get_le(bytes, 4, 4));
  if (version != ModelArtifact::format_version) {
    throw ModelFormatError(ModelFormatProblem::unsupported_version,
                           "unsupported model format version " + std::to_string(version) + " (expected " +
                               std::to_string(ModelArtifact::format_version) + ")");
  }
  need(12);
  const std::size_t header_len = get_le(bytes, 8, 4);
  need(12 + header_len + 8);
  const std::size_t body_at = 12 + header_len + 8;
  const std::uint64_t body_len = get_le(bytes, 12 + header_len, 8);
  if (body_len > bytes.size()) throw ModelFormatError(ModelFormatProblem::truncated, "truncated container");
  const std::size_t end = body_at + static_cast<std::size_t>(body_len);
  need(end + 4);
  if (bytes.size() != end + 4) {
    throw ModelFormatError(ModelFormatProblem::corrupt, "corrupt model: trailing bytes after footer");
  }
  const auto stored = static_cast<std::uint32_t>(get_le(bytes, end, 4));
  if (stored != crc_of(bytes.data(), end)) {
    throw ModelFormatError(ModelFormatProblem::corrupt, "corrupt model: checksum mismatch");
  }
  try {
    const auto doc = json::from_cbor(bytes.begin() + static_cast<std::ptrdiff_t>(body_at),
                                     bytes.begin() + static_cast<std::ptrdiff_t>(end));
    return artifact_from_json(doc);
  } catch (const json::exception& e) {
    throw ModelFormatError(ModelFormatProblem::corrupt, std::string("corrupt model body: ") + e.what());
  } catch (const Error& e) {
    throw ModelFormatError(ModelFormatProblem::corrupt, std::string("corrupt model body: ") + e.what());
  }
}

void save_model(const ModelArtifact& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

ModelArtifact load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

std::vector<double> predict_model(const ModelArtifact& model, const PrimaryDataset& data, bool allow_subset) {
  const auto& pre = model.preprocessing;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < data.p(); ++j) index.emplace(data.variable_ids[j], j);

  Eigen::MatrixXd X(static_cast<Eigen::Index>(data.n()), static_cast<Eigen::Index>(model.variable_ids.size()));
  std::size_t missing = 0;
  for (std::size_t k = 0; k < model.variable_ids.size(); ++k) {
    auto col = X.col(static_cast<Eigen::Index>(k));
    auto it = index.find(model.variable_ids[k]);
    if (it == index.end()) {
      if (!allow_subset) throw InputError("variable id " + model.variable_ids[k] + " is missing from the input");
      ++missing;
      col.setZero();
      continue;
    }
    col = data.X.col(static_cast<Eigen::Index>(it->second));
    if (pre.anscombe) col = anscombe_transform(col);
    if (pre.standardize) col = (col.array() - pre.mean[k]) / pre.sd[k];
  }
  if (missing > 0) {
    warn(std::to_string(missing) + " of " + std::to_string(model.variable_ids.size()) +
         " model variables are missing from the input and were set to 0");
  }
  return predict_forest(model.forest, X);
}

}  // namespace corf
