#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace lm::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Maximize, Minimize };
enum class Relation { LE, EQ, GE };
enum class Status { Optimal, Infeasible, Unbounded, Limit };

std::string to_string(Status status);

// Sparse constraint row. Entries are kept sorted by variable index with
// duplicates merged, so builders may emit the same variable twice.
struct Row {
  std::vector<std::pair<int, double>> entries;
  Relation rel = Relation::LE;
  double rhs = 0.0;
  std::string name;
};

// Sparse LP model: named bounded variables, linear objective, and rows.
class LinearProgram {
 public:
  int add_variable(const std::string& name, double lower, double upper, double objective = 0.0);
  // Entries may repeat a variable; they are merged by summation.
  int add_row(std::vector<std::pair<int, double>> entries, Relation rel, double rhs,
              std::string name = {});

  void set_sense(Sense sense) { sense_ = sense; }
  Sense sense() const { return sense_; }
  void set_objective(int var, double coefficient) { objective_[var] = coefficient; }

  int num_variables() const { return static_cast<int>(lower_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  const std::string& variable_name(int var) const { return names_[var]; }
  double lower(int var) const { return lower_[var]; }
  double upper(int var) const { return upper_[var]; }
  double objective(int var) const { return objective_[var]; }
  const Row& row(int i) const { return rows_[i]; }
  const std::vector<Row>& rows() const { return rows_; }

  // Replaces a variable's bounds (used by presolve and file import).
  void set_bounds(int var, double lower, double upper);

  // Free-text annotations carried into the LP text export as comment lines.
  // Builders use them to document modeling choices a reader of the exported
  // file could not otherwise reconstruct (e.g. how an ambiguous constraint
  // family was read). One line per note; newlines are not allowed.
  void add_note(std::string note);
  const std::vector<std::string>& notes() const { return notes_; }

  // Throws std::invalid_argument when a row references a missing variable or
  // bounds cross.
  void validate() const;

  // Objective value of an assignment, in this LP's own sense.
  double objective_value(const std::vector<double>& values) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> objective_;
  std::vector<Row> rows_;
  std::vector<std::string> notes_;
  Sense sense_ = Sense::Maximize;
};

struct LPSolution {
  Status status = Status::Limit;
  std::vector<double> values;   // one per LP variable, empty unless optimal
  double objective_value = 0.0;
  int iterations = 0;
  std::string backend;
  std::string message;
};

// Independent feasibility audit, deliberately separate from any solver code
// path: largest absolute row violation and largest bound violation.
struct FeasibilityCheck {
  double max_row_violation = 0.0;
  double max_bound_violation = 0.0;
  int worst_row = -1;
};
FeasibilityCheck check_feasibility(const LinearProgram& lp, const std::vector<double>& values);

}  // namespace lm::lp
