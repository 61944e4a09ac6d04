#include "corf/codata.hpp"

#include <cmath>
#include <unordered_set>

#include "corf/error.hpp"

namespace corf {

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::nominal ? "nominal" : "continuous";
}

std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::increasing:
      return "increasing";
    case Monotonicity::decreasing:
      return "decreasing";
    case Monotonicity::none:
      break;
  }
  return "none";
}

ColumnKind parse_column_kind(std::string_view text) {
  if (text == "nominal") return ColumnKind::nominal;
  if (text == "continuous") return ColumnKind::continuous;
  throw InputError("unknown co-data kind '" + std::string(text) + "' (expected nominal or continuous)");
}

Monotonicity parse_monotonicity(std::string_view text) {
  if (text == "none" || text.empty()) return Monotonicity::none;
  if (text == "increasing") return Monotonicity::increasing;
  if (text == "decreasing") return Monotonicity::decreasing;
  throw InputError("unknown monotonicity '" + std::string(text) + "' (expected increasing, decreasing or none)");
}

CoDataColumn CoDataColumn::nominal(std::string name, std::vector<std::string> levels, std::vector<std::size_t> index) {
  CoDataColumn c;
  c.name = std::move(name);
  c.kind = ColumnKind::nominal;
  c.levels = std::move(levels);
  c.values.assign(index.begin(), index.end());
  return c;
}

CoDataColumn CoDataColumn::continuous(std::string name, std::vector<double> values, Monotonicity monotonicity) {
  CoDataColumn c;
  c.name = std::move(name);
  c.kind = ColumnKind::continuous;
  c.monotonicity = monotonicity;
  c.values = std::move(values);
  return c;
}

void CoDataDesign::validate() const {
  std::unordered_set<std::string> names;
  for (const auto& c : columns) {
    if (!names.insert(c.name).second) throw InputError("duplicate co-data column name: " + c.name);
    if (c.values.size() != p()) {
      throw InputError("co-data column " + c.name + " has " + std::to_string(c.values.size()) +
                       " rows, expected " + std::to_string(p()));
    }
    if (c.kind == ColumnKind::nominal) {
      if (c.monotonicity != Monotonicity::none) {
        throw InputError("monotonicity declared on nominal co-data column " + c.name);
      }
      if (c.levels.size() < 2) throw InputError("nominal co-data column " + c.name + " needs at least 2 levels");
      for (double v : c.values) {
        if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(c.levels.size())) {
          throw InputError("nominal co-data column " + c.name + " has an invalid level index");
        }
      }
    } else {
      for (double v : c.values) {
        if (!std::isfinite(v)) throw InputError("continuous co-data column " + c.name + " has a non-finite value");
      }
    }
  }
}

const CoDataColumn* CoDataDesign::find(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

CoDataDesign empty_design(std::size_t p) {
  CoDataDesign d;
  d.variable_ids.reserve(p);
  for (std::size_t j = 0; j < p; ++j) d.variable_ids.push_back("v" + std::to_string(j));
  return d;
}

std::vector<std::size_t> GroupingCoData::group_sizes() const {
  std::vector<std::size_t> sizes(groups(), 0);
  for (auto g : group_of) {
    if (g < sizes.size()) ++sizes[g];
  }
  return sizes;
}

void GroupingCoData::validate() const {
  CORF_REQUIRE(!group_of.empty(), "grouping covers no variables");
  for (auto g : group_of) CORF_REQUIRE(g < groups(), "group label out of range");
  const auto sizes = group_sizes();
  for (std::size_t g = 0; g < groups(); ++g) {
    CORF_REQUIRE(sizes[g] > 0, "group " + group_names[g] + " is empty");
  }
}

GroupingCoData GroupingCoData::from_nominal(const CoDataColumn& column) {
  CORF_REQUIRE(column.kind == ColumnKind::nominal, "grouping needs a nominal column");
  GroupingCoData g;
  g.group_names = column.levels;
  g.group_of.reserve(column.values.size());
  for (std::size_t j = 0; j < column.values.size(); ++j) g.group_of.push_back(column.level_index(j));
  return g;
}

}  // namespace corf
