#include "lm/lp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lm::lp {

std::string to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::Limit: return "limit";
  }
  return "unknown";
}

int LinearProgram::add_variable(const std::string& name, double lower, double upper,
                                double objective) {
  if (lower > upper) {
    throw std::invalid_argument("variable " + name + ": lower bound exceeds upper bound");
  }
  names_.push_back(name);
  lower_.push_back(lower);
  upper_.push_back(upper);
  objective_.push_back(objective);
  return num_variables() - 1;
}

int LinearProgram::add_row(std::vector<std::pair<int, double>> entries, Relation rel, double rhs,
                           std::string name) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Row row;
  row.rel = rel;
  row.rhs = rhs;
  row.name = std::move(name);
  for (const auto& [var, coef] : entries) {
    if (var < 0 || var >= num_variables()) {
      throw std::invalid_argument("row references unknown variable index");
    }
    if (!row.entries.empty() && row.entries.back().first == var) {
      row.entries.back().second += coef;
    } else {
      row.entries.emplace_back(var, coef);
    }
  }
  rows_.push_back(std::move(row));
  return num_rows() - 1;
}

void LinearProgram::set_bounds(int var, double lower, double upper) {
  if (lower > upper) {
    throw std::invalid_argument("variable " + names_[var] + ": lower bound exceeds upper bound");
  }
  lower_[var] = lower;
  upper_[var] = upper;
}

void LinearProgram::add_note(std::string note) {
  if (note.find('\n') != std::string::npos) {
    throw std::invalid_argument("LP notes must be single lines");
  }
  notes_.push_back(std::move(note));
}

void LinearProgram::validate() const {
  for (int v = 0; v < num_variables(); ++v) {
    if (lower_[v] > upper_[v]) {
      throw std::invalid_argument("variable " + names_[v] + ": lower bound exceeds upper bound");
    }
    if (std::isnan(lower_[v]) || std::isnan(upper_[v]) || std::isnan(objective_[v])) {
      throw std::invalid_argument("variable " + names_[v] + ": NaN in bounds or objective");
    }
  }
  for (const Row& row : rows_) {
    for (const auto& [var, coef] : row.entries) {
      if (var < 0 || var >= num_variables()) {
        throw std::invalid_argument("row " + row.name + " references unknown variable");
      }
      if (std::isnan(coef)) {
        throw std::invalid_argument("row " + row.name + " has a NaN coefficient");
      }
    }
    if (std::isnan(row.rhs)) {
      throw std::invalid_argument("row " + row.name + " has a NaN right-hand side");
    }
  }
}

double LinearProgram::objective_value(const std::vector<double>& values) const {
  double total = 0.0;
  for (int v = 0; v < num_variables(); ++v) total += objective_[v] * values[v];
  return total;
}

FeasibilityCheck check_feasibility(const LinearProgram& lp, const std::vector<double>& values) {
  FeasibilityCheck check;
  for (int v = 0; v < lp.num_variables(); ++v) {
    double violation = std::max(lp.lower(v) - values[v], values[v] - lp.upper(v));
    check.max_bound_violation = std::max(check.max_bound_violation, violation);
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    const Row& row = lp.row(i);
    double activity = 0.0;
    for (const auto& [var, coef] : row.entries) activity += coef * values[var];
    double violation = 0.0;
    switch (row.rel) {
      case Relation::LE: violation = activity - row.rhs; break;
      case Relation::GE: violation = row.rhs - activity; break;
      case Relation::EQ: violation = std::abs(activity - row.rhs); break;
    }
    if (violation > check.max_row_violation) {
      check.max_row_violation = violation;
      check.worst_row = i;
    }
  }
  check.max_row_violation = std::max(check.max_row_violation, 0.0);
  return check;
}

}  // namespace lm::lp
