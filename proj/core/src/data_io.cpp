#include "corf/data_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <unordered_map>

#include "corf/csv.hpp"
#include "corf/error.hpp"

namespace corf {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

std::string where(const CsvReader& r) { return r.path().string() + ":" + std::to_string(r.line()); }

}  // namespace

PrimaryDataset load_features(const std::filesystem::path& matrix_path) {
  CsvReader reader(matrix_path);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw InputError(matrix_path.string() + " is empty");
  if (fields.size() < 2) throw InputError(matrix_path.string() + ": header has no variable ids");
  PrimaryDataset d;
  d.variable_ids.assign(fields.begin() + 1, fields.end());
  const std::size_t p = d.variable_ids.size();

  std::vector<double> values;  // row-major while streaming
  std::size_t row = 0;
  while (reader.next(fields)) {
    if (fields.size() != p + 1) {
      throw InputError(where(reader) + ": expected " + std::to_string(p + 1) + " fields, found " +
                       std::to_string(fields.size()));
    }
    d.sample_ids.push_back(fields[0]);
    for (std::size_t j = 0; j < p; ++j) {
      const auto v = parse_number(fields[j + 1]);
      if (!v) {
        throw InputError("non-numeric value at (" + std::to_string(row + 1) + "," + std::to_string(j + 1) + ") in " +
                         matrix_path.string() + ": '" + fields[j + 1] + "'");
      }
      if (!std::isfinite(*v)) {
        throw InputError("non-finite value at (" + std::to_string(row + 1) + "," + std::to_string(j + 1) + ") in " +
                         matrix_path.string());
      }
      values.push_back(*v);
    }
    ++row;
  }
  d.X.resize(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < row; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * p + j];
    }
  }
  std::set<std::string> seen;
  for (const auto& id : d.variable_ids) {
    if (!seen.insert(id).second) throw InputError("duplicate variable id: " + id);
  }
  seen.clear();
  for (const auto& id : d.sample_ids) {
    if (!seen.insert(id).second) throw InputError("duplicate sample id: " + id);
  }
  return d;
}

PrimaryDataset load_primary(const std::filesystem::path& matrix_path, const std::filesystem::path& labels_path) {
  PrimaryDataset d = load_features(matrix_path);

  CsvReader reader(labels_path);
  std::unordered_map<std::string, std::uint8_t> labels;
  std::vector<std::string> fields;
  bool first = true;
  while (reader.next(fields)) {
    if (fields.size() != 2) throw InputError(where(reader) + ": expected sample_id,label");
    const auto v = parse_number(fields[1]);
    if (!v || !(*v == 0.0 || *v == 1.0)) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw InputError(where(reader) + ": label must be 0 or 1, found '" + fields[1] + "'");
    }
    first = false;
    if (!labels.emplace(fields[0], static_cast<std::uint8_t>(*v)).second) {
      throw InputError("duplicate sample id in labels: " + fields[0]);
    }
  }
  d.y.reserve(d.n());
  for (const auto& id : d.sample_ids) {
    auto it = labels.find(id);
    if (it == labels.end()) throw InputError("no label for sample id " + id);
    d.y.push_back(it->second);
  }
  d.validate();
  return d;
}

void CoDataSchema::validate() const {
  std::set<std::string> names;
  for (const auto& c : columns) {
    if (c.name.empty()) throw InputError("schema column without a name");
    if (!names.insert(c.name).second) throw InputError("schema lists column " + c.name + " twice");
    if (c.kind == ColumnKind::nominal && c.monotonicity != Monotonicity::none) {
      throw InputError("monotonicity declared on nominal co-data column " + c.name);
    }
    if (c.kind == ColumnKind::continuous && !c.levels.empty()) {
      throw InputError("levels declared on continuous co-data column " + c.name);
    }
  }
  if (grouping) {
    auto it = std::find_if(columns.begin(), columns.end(), [&](const ColumnSpec& c) { return c.name == *grouping; });
    if (it == columns.end() || it->kind != ColumnKind::nominal) {
      throw InputError("grouping column " + *grouping + " must be a nominal schema column");
    }
  }
}

CoDataSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
  auto reject_unknown = [&](const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                            const std::string& context) {
    if (!obj.is_object()) throw InputError(path.string() + ": " + context + " must be an object");
    for (const auto& [key, _] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw InputError(path.string() + ": unknown key '" + key + "' in " + context);
      }
    }
  };
  reject_unknown(doc, {"columns", "grouping"}, "schema");
  CoDataSchema schema;
  try {
    for (const auto& c : doc.value("columns", nlohmann::json::array())) {
      reject_unknown(c, {"name", "kind", "monotonicity", "levels"}, "column");
      ColumnSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.kind = parse_column_kind(c.at("kind").get<std::string>());
      spec.monotonicity = parse_monotonicity(c.value("monotonicity", std::string("none")));
      spec.levels = c.value("levels", std::vector<std::string>{});
      schema.columns.push_back(std::move(spec));
    }
    if (doc.contains("grouping")) schema.grouping = doc.at("grouping").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  schema.validate();
  return schema;
}

void save_schema(const CoDataSchema& schema, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["columns"] = nlohmann::json::array();
  for (const auto& c : schema.columns) {
    nlohmann::json col{{"name", c.name}, {"kind", std::string(to_string(c.kind))}};
    if (c.kind == ColumnKind::continuous) col["monotonicity"] = std::string(to_string(c.monotonicity));
    if (!c.levels.empty()) col["levels"] = c.levels;
    doc["columns"].push_back(std::move(col));
  }
  if (schema.grouping) doc["grouping"] = *schema.grouping;
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

CoDataDesign load_codata(const std::filesystem::path& matrix_path, const CoDataSchema& schema,
                         const std::vector<std::string>& variable_ids) {
  schema.validate();
  CsvReader reader(matrix_path);
  std::vector<std::string> header;
  if (!reader.next(header)) throw InputError(matrix_path.string() + " is empty");

  std::vector<std::size_t> field_of(schema.columns.size());
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    auto it = std::find(header.begin() + 1, header.end(), schema.columns[c].name);
    if (it == header.end()) {
      throw InputError("schema column " + schema.columns[c].name + " is absent from " + matrix_path.string());
    }
    field_of[c] = static_cast<std::size_t>(it - header.begin());
  }
  for (std::size_t f = 1; f < header.size(); ++f) {
    const bool listed = std::any_of(schema.columns.begin(), schema.columns.end(),
                                    [&](const ColumnSpec& c) { return c.name == header[f]; });
    if (!listed) throw InputError("co-data column " + header[f] + " is not described by the schema");
  }

  std::unordered_map<std::string, std::vector<std::string>> rows;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() != header.size()) throw InputError(where(reader) + ": wrong number of fields");
    auto id = fields[0];
    if (!rows.emplace(std::move(id), std::move(fields)).second) {
      throw InputError("duplicate variable id in co-data: " + fields[0]);
    }
  }

  CoDataDesign design;
  design.variable_ids = variable_ids;
  std::vector<const std::vector<std::string>*> aligned;
  aligned.reserve(variable_ids.size());
  for (const auto& id : variable_ids) {
    auto it = rows.find(id);
    if (it == rows.end()) throw InputError("variable id " + id + " has no co-data row");
    aligned.push_back(&it->second);
  }

  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const auto& spec = schema.columns[c];
    const std::size_t f = field_of[c];
    if (spec.kind == ColumnKind::nominal) {
      std::vector<std::string> levels = spec.levels;
      if (levels.empty()) {
        std::set<std::string> distinct;
        for (const auto* r : aligned) distinct.insert((*r)[f]);
        levels.assign(distinct.begin(), distinct.end());
      }
      std::vector<std::size_t> index;
      index.reserve(aligned.size());
      for (std::size_t j = 0; j < aligned.size(); ++j) {
        const auto& value = (*aligned[j])[f];
        auto it = std::find(levels.begin(), levels.end(), value);
        if (it == levels.end()) {
          throw InputError("co-data column " + spec.name + ": level '" + value + "' of " + variable_ids[j] +
                           " is not declared");
        }
        index.push_back(static_cast<std::size_t>(it - levels.begin()));
      }
      design.columns.push_back(CoDataColumn::nominal(spec.name, std::move(levels), std::move(index)));
    } else {
      std::vector<double> values;
      values.reserve(aligned.size());
      for (std::size_t j = 0; j < aligned.size(); ++j) {
        const auto v = parse_number((*aligned[j])[f]);
        if (!v || !std::isfinite(*v)) {
          throw InputError("co-data column " + spec.name + ": invalid value for " + variable_ids[j]);
        }
        values.push_back(*v);
      }
      design.columns.push_back(CoDataColumn::continuous(spec.name, std::move(values), spec.monotonicity));
    }
  }
  design.validate();
  return design;
}

void write_primary(const PrimaryDataset& data, const std::filesystem::path& matrix_path,
                   const std::filesystem::path& labels_path) {
  {
    auto out = open_output(matrix_path);
    out << "sample_id";
    for (const auto& id : data.variable_ids) out << ',' << csv_escape(id);
    out << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
      out << csv_escape(data.sample_ids[i]);
      for (std::size_t j = 0; j < data.p(); ++j) {
        out << ',' << data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      out << '\n';
    }
    if (!out) throw IoError("cannot write " + matrix_path.string());
  }
  auto out = open_output(labels_path);
  out << "sample_id,label\n";
  for (std::size_t i = 0; i < data.n(); ++i) out << csv_escape(data.sample_ids[i]) << ',' << int{data.y[i]} << '\n';
  if (!out) throw IoError("cannot write " + labels_path.string());
}

void write_codata(const CoDataDesign& design, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "variable_id";
  for (const auto& c : design.columns) out << ',' << csv_escape(c.name);
  out << '\n';
  for (std::size_t j = 0; j < design.p(); ++j) {
    out << csv_escape(design.variable_ids[j]);
    for (const auto& c : design.columns) {
      out << ',';
      if (c.kind == ColumnKind::nominal) {
        out << csv_escape(c.levels[c.level_index(j)]);
      } else {
        out << c.values[j];
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("cannot write " + path.string());
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  uLong crc = crc32(0L, Z_NULL, 0);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(got));
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace corf
