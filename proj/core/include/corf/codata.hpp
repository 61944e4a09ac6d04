#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace corf {

enum class ColumnKind { nominal, continuous };
enum class Monotonicity { none, increasing, decreasing };

std::string_view to_string(ColumnKind kind);
std::string_view to_string(Monotonicity m);
ColumnKind parse_column_kind(std::string_view text);
Monotonicity parse_monotonicity(std::string_view text);

/// One column of side information on the P variables.
///
/// Nominal columns store level indices into `levels` (the first level is the
/// reference category). Continuous columns store raw values; a monotone
/// direction makes the column a shape-constrained spline term, `none` makes
/// it a plain linear term.
struct CoDataColumn {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::vector<std::string> levels;
  Monotonicity monotonicity = Monotonicity::none;
  std::vector<double> values;

  static CoDataColumn nominal(std::string name, std::vector<std::string> levels, std::vector<std::size_t> index);
  static CoDataColumn continuous(std::string name, std::vector<double> values,
                                 Monotonicity monotonicity = Monotonicity::none);

  std::size_t level_index(std::size_t j) const { return static_cast<std::size_t>(values[j]); }
};

/// P-by-C co-data design, rows aligned with the primary variables.
struct CoDataDesign {
  std::vector<std::string> variable_ids;
  std::vector<CoDataColumn> columns;

  std::size_t p() const { return variable_ids.size(); }
  /// Throws InputError on a violated invariant.
  void validate() const;
  const CoDataColumn* find(std::string_view name) const;
};

/// Intercept-only design over `p` anonymous variables.
CoDataDesign empty_design(std::size_t p);

/// A priori partition of the variables.
struct GroupingCoData {
  std::vector<std::size_t> group_of;  // group label per variable, 0..G-1
  std::vector<std::string> group_names;

  std::size_t groups() const { return group_names.size(); }
  std::vector<std::size_t> group_sizes() const;
  /// Throws ContractError if a label is out of range or a group is empty.
  void validate() const;

  /// Groups given by the levels of a nominal column.
  static GroupingCoData from_nominal(const CoDataColumn& column);
};

}  // namespace corf
