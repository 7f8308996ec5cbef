#include "lm/factor/factor_lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "lm/core/tolerances.hpp"
#include "lm/pricing/price_system.hpp"

namespace lm {
namespace {

using lm::lp::LinearProgram;
using lm::lp::LPSolution;
using lm::lp::Relation;
using lm::lp::Row;
using lm::lp::Sense;

using Entries = std::vector<std::pair<int, double>>;

constexpr double kMonoGapScale = 1e-9;  // row monotonicity gap = 1e-9 / n
// Floor on the interpolated diagonal's slope inside a cell: far above solver
// noise, far below the real slope, so the price curve always inverts.
constexpr double kDiagCellGap = 1e-6;
constexpr int kSeparatorBatch = 10000;

double phi1_margin(int n) { return 2.5 / (static_cast<double>(n) * n); }
double phi2_margin(int n) { return 5.0 / (static_cast<double>(n) * n); }

std::string tag(const std::string& head, std::initializer_list<int> parts) {
  std::string name = head;
  for (int p : parts) {
    name += '_';
    name += std::to_string(p);
  }
  return name;
}

void add_h_variables(LinearProgram& prog, int n) {
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      double lo = 0.0, hi = 1.0;
      if (j == 0) hi = 0.0;
      if (j == n) lo = 1.0;
      prog.add_variable(tag("h", {i, j}), lo, hi);
    }
  }
  prog.add_variable("Gamma", 0.0, 1.0, 1.0);
}

// scale * (trapezoid sum of row i of h from column i to column j).
void append_trapezoid(Entries& entries, int n, int i, int j, double scale) {
  const double c = scale / (2.0 * n);
  for (int y = i; y < j; ++y) {
    entries.push_back({h_var(n, i, y), c});
    entries.push_back({h_var(n, i, y + 1), c});
  }
}

// Gamma - H(i,j) expressed directly over h: Gamma - (j/n) h(i,j) + trapezoid.
void append_minus_H(Entries& entries, int n, int i, int j) {
  if (j > 0) entries.push_back({h_var(n, i, j), -static_cast<double>(j) / n});
  append_trapezoid(entries, n, i, j, 1.0);
}

// Monotonicity, Lipschitz, and in-cell diagonal slope rows shared by both
// two-dimensional families. The per-step cap is lip_scale/n: 4 for the fully
// online family (whose margin analysis needs per-coordinate steps of 4/n)
// and 12 for the general-arrival family (the combined-coordinate reading;
// the tighter cap provably costs about 0.004 of the optimum there).
void add_shape_rows(LinearProgram& prog, int n, double lip_scale) {
  const double gap = kMonoGapScale / n;
  const double lip = lip_scale / n;
  prog.add_note("mono rows: h(i, j+1) - h(i, j) >= " + std::to_string(kMonoGapScale) +
                "/n, a strictly positive floor that keeps the grid invertible in theta");
  prog.add_note("lipt/liptau rows: per-cell changes of h are capped at " +
                std::to_string(static_cast<int>(lip_scale)) +
                "/n in each coordinate; the cap is read as an upper bound on step size "
                "(a lower-bound reading would contradict the mono rows)");
  prog.add_note("diagcell rows: the bilinear diagonal's slope stays positive inside "
                "every cell so the induced price curve is invertible");
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j < n; ++j) {
      Entries step = {{h_var(n, i, j + 1), 1.0}, {h_var(n, i, j), -1.0}};
      prog.add_row(step, Relation::GE, gap, tag("mono", {i, j}));
      prog.add_row(step, Relation::LE, lip, tag("lipt", {i, j}));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 1; j < n; ++j) {  // the fixed boundary columns difference to zero
      Entries step = {{h_var(n, i + 1, j), 1.0}, {h_var(n, i, j), -1.0}};
      prog.add_row(step, Relation::LE, lip, tag("liptau", {i, j, 0}));
      prog.add_row({{h_var(n, i, j), 1.0}, {h_var(n, i + 1, j), -1.0}}, Relation::LE, lip,
                   tag("liptau", {i, j, 1}));
    }
  }
  for (int i = 0; i < n; ++i) {
    // Bilinear diagonal through cell i is quadratic with slope b + 2at;
    // positive slope at both ends keeps it strictly increasing.
    prog.add_row({{h_var(n, i, i + 1), 1.0}, {h_var(n, i + 1, i), 1.0}, {h_var(n, i, i), -2.0}},
                 Relation::GE, kDiagCellGap, tag("diagcell", {i, 0}));
    prog.add_row(
        {{h_var(n, i + 1, i + 1), 2.0}, {h_var(n, i, i + 1), -1.0}, {h_var(n, i + 1, i), -1.0}},
        Relation::GE, kDiagCellGap, tag("diagcell", {i, 1}));
  }
}

Row make_phi2_row(int n, bool use_aux, int iu, int ju, int iv, int jv) {
  const double rest = 1.0 - static_cast<double>(jv) / n;
  Row row;
  row.rel = Relation::LE;
  row.rhs = rest - phi2_margin(n);
  row.name = tag("phi2", {iu, ju, iv, jv});
  row.entries.push_back({gamma_var(n), 1.0});
  if (use_aux) {
    row.entries.push_back({H_var(n, iu, ju), -1.0});
    row.entries.push_back({H_var(n, iv, jv), -1.0});
  } else {
    append_minus_H(row.entries, n, iu, ju);
    append_minus_H(row.entries, n, iv, jv);
  }
  if (rest > 0.0) row.entries.push_back({h_var(n, iu, ju), rest});
  return row;
}

LinearProgram build_fully_lp(int n, bool use_aux, bool include_phi2) {
  LinearProgram prog;
  prog.set_sense(Sense::Maximize);
  add_h_variables(prog, n);
  if (use_aux) {
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double hi = (i <= j) ? 1.0 : 0.0;
        prog.add_variable(tag("H", {i, j}), 0.0, hi);
      }
    }
    for (int i = 0; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        Entries def = {{H_var(n, i, j), 1.0}};
        append_minus_H(def, n, i, j);
        prog.add_row(def, Relation::EQ, 0.0, tag("hdef", {i, j}));
      }
    }
  }
  for (int iv = 0; iv <= n; ++iv) {
    for (int jv = iv; jv <= n; ++jv) {
      Entries e = {{gamma_var(n), 1.0}};
      if (use_aux) {
        e.push_back({H_var(n, iv, jv), -1.0});
      } else {
        append_minus_H(e, n, iv, jv);
      }
      const double rhs = 1.0 - static_cast<double>(jv) / n - phi1_margin(n);
      prog.add_row(e, Relation::LE, rhs, tag("phi1", {iv, jv}));
    }
  }
  if (include_phi2) {
    for (int iu = 0; iu <= n; ++iu) {
      for (int ju = iu; ju <= n; ++ju) {
        for (int iv = n - ju; iv <= n; ++iv) {
          for (int jv = iv; jv <= n; ++jv) {
            const Row row = make_phi2_row(n, use_aux, iu, ju, iv, jv);
            prog.add_row(row.entries, row.rel, row.rhs, row.name);
          }
        }
      }
    }
  }
  add_shape_rows(prog, n, 4.0);
  return prog;
}

}  // namespace

std::string to_string(FactorFamily family) {
  switch (family) {
    case FactorFamily::FullyOnline:
      return "fully_online";
    case FactorFamily::GeneralArrival:
      return "general_arrival";
    case FactorFamily::NaiveOneDim:
      return "naive_one_dim";
  }
  return "unknown";
}

void validate_factor_spec(const FactorLPSpec& spec) {
  if (spec.n < 4) {
    throw std::invalid_argument("factor LP: grid resolution must be at least 4, got " +
                                std::to_string(spec.n));
  }
}

lm::lp::LinearProgram build_fully_online_lp(int n, bool use_auxiliary_H) {
  FactorLPSpec spec;
  spec.n = n;
  validate_factor_spec(spec);
  return build_fully_lp(n, use_auxiliary_H, /*include_phi2=*/true);
}

// Appends B_k / (4n) to a row, where B_k = h(k,k+1) + h(k+1,k) - 2 h(k,k) is
// the corner slope of diagonal cell k. With the twistdiag rows forcing each
// cell's twist A <= 0, the price term s * h(s,s) is convex inside cell k with
// second derivative at most 2nB_k, so it dips at most B_k / (4n) below the
// chord between its endpoints. Charging that dip to every constraint row that
// touches the cell makes the discrete rows imply the continuous bound without
// a blanket cap on how fast the diagonal may climb.
void append_diag_dip_charge(Entries& entries, int n, int k) {
  if (k < 0 || k >= n) return;
  const double c = 1.0 / (4.0 * n);
  entries.push_back({h_var(n, k, k + 1), c});
  entries.push_back({h_var(n, k + 1, k), c});
  entries.push_back({h_var(n, k, k), -2.0 * c});
}

lm::lp::LinearProgram build_general_arrival_lp(int n) {
  FactorLPSpec spec;
  spec.family = FactorFamily::GeneralArrival;
  spec.n = n;
  validate_factor_spec(spec);
  LinearProgram prog;
  prog.set_sense(Sense::Maximize);
  add_h_variables(prog, n);
  for (int iv = 0; iv <= n; ++iv) {
    for (int jv = iv; jv <= n; ++jv) {
      Entries e = {{gamma_var(n), 1.0}};
      append_minus_H(e, n, iv, jv);
      const double rest = 1.0 - static_cast<double>(jv) / n;
      if (rest > 0.0) e.push_back({h_var(n, n - jv, n - jv), -rest});
      // A grid point at theta = jv/n corners the theta cells mapping to
      // diagonal cells n-jv-1 (above) and n-jv (below); charge both dips.
      append_diag_dip_charge(e, n, n - jv - 1);
      append_diag_dip_charge(e, n, n - jv);
      prog.add_row(e, Relation::LE, -phi1_margin(n), tag("phig", {iv, jv}));
    }
  }
  add_shape_rows(prog, n, 12.0);
  prog.add_note("the general-arrival family uses the 12/n step cap (the combined-coordinate "
                "reading); the per-coordinate 4/n cap over-restricts this family and lowers "
                "its optimum by about 0.004 at n = 100");
  prog.add_note("phig rows charge each constraint the interpolation dip of the diagonal price "
                "term, B_k/(4n) per adjacent diagonal cell, so the sampled continuous bound "
                "holds at the reported optimum without a blanket diagonal step cap");
  for (int i = 0; i < n; ++i) {
    Entries e = {{h_var(n, i + 1, i + 1), static_cast<double>(i + 1) / n}};
    if (i > 0) e.push_back({h_var(n, i, i), -static_cast<double>(i) / n});
    prog.add_row(e, Relation::GE, 0.0, tag("prodmono", {i}));
    // Nonpositive twist keeps the in-cell diagonal concave, which is what
    // makes the B_k/(4n) dip charge above a valid bound.
    prog.add_row({{h_var(n, i, i), 1.0},
                  {h_var(n, i + 1, i + 1), 1.0},
                  {h_var(n, i, i + 1), -1.0},
                  {h_var(n, i + 1, i), -1.0}},
                 Relation::LE, 0.0, tag("twistdiag", {i}));
  }
  return prog;
}

namespace {

Row make_naive_row(int n, int iv, int jv, int iu) {
  Row row;
  row.rel = Relation::LE;
  row.rhs = -phi1_margin(n);
  row.name = tag("naive", {iv, jv, iu});
  row.entries.push_back({naive_gamma_var(n), 1.0});
  if (jv > 0) row.entries.push_back({naive_h_var(jv), -static_cast<double>(jv) / n});
  const double c = 1.0 / (2.0 * n);
  for (int y = iv; y < jv; ++y) {
    row.entries.push_back({naive_h_var(y), c});
    row.entries.push_back({naive_h_var(y + 1), c});
  }
  if (iu > 0) row.entries.push_back({naive_h_var(iu), -static_cast<double>(iu) / n});
  return row;
}

LinearProgram build_naive_master(int n) {
  LinearProgram prog;
  prog.set_sense(Sense::Maximize);
  for (int i = 0; i <= n; ++i) {
    const double lo = (i == n) ? 1.0 : 0.0;
    const double hi = (i == 0) ? 0.0 : 1.0;
    prog.add_variable(tag("h", {i}), lo, hi);
  }
  prog.add_variable("Gamma", 0.0, 1.0, 1.0);
  const double gap = kMonoGapScale / n;
  for (int j = 0; j < n; ++j) {
    prog.add_row({{naive_h_var(j + 1), 1.0}, {naive_h_var(j), -1.0}}, Relation::GE, gap,
                 tag("mono", {j}));
    Entries pm = {{naive_h_var(j + 1), static_cast<double>(j + 1) / n}};
    if (j > 0) pm.push_back({naive_h_var(j), -static_cast<double>(j) / n});
    prog.add_row(pm, Relation::GE, 0.0, tag("prodmono", {j}));
  }
  return prog;
}

}  // namespace

lm::lp::LinearProgram build_naive_lp(int n) {
  FactorLPSpec spec;
  spec.family = FactorFamily::NaiveOneDim;
  spec.n = n;
  validate_factor_spec(spec);
  LinearProgram prog = build_naive_master(n);
  for (int jv = 0; jv <= n; ++jv) {
    for (int iv = 0; iv <= jv; ++iv) {
      for (int iu = n - jv; iu <= n; ++iu) {
        const Row row = make_naive_row(n, iv, jv, iu);
        prog.add_row(row.entries, row.rel, row.rhs, row.name);
      }
    }
  }
  return prog;
}

namespace {

// H(i,j) on grid points from h values, via per-row trapezoid prefix sums.
std::vector<std::vector<double>> H_table(int n, const std::vector<double>& h) {
  const auto hv = [&](int i, int j) { return h[static_cast<size_t>(i) * (n + 1) + j]; };
  std::vector<std::vector<double>> H(n + 1, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i <= n; ++i) {
    double prefix = 0.0;
    H[i][i] = (static_cast<double>(i) / n) * hv(i, i);
    for (int j = i + 1; j <= n; ++j) {
      prefix += (hv(i, j - 1) + hv(i, j)) / (2.0 * n);
      H[i][j] = (static_cast<double>(j) / n) * hv(i, j) - prefix;
    }
  }
  return H;
}

// Snap fixed boundary columns, clamp into [0,1], and restore the strict
// monotonicity that solver roundoff can eat (dips are at most the 1e-7
// feasibility audit tolerance, far below the 4/n headroom).
std::vector<double> cleanup_grid_values(int n, std::vector<double> h) {
  const double gap = 0.7 * kMonoGapScale / n;
  for (int i = 0; i <= n; ++i) {
    double* row = h.data() + static_cast<size_t>(i) * (n + 1);
    row[0] = 0.0;
    row[n] = 1.0;
    for (int j = 1; j < n; ++j) row[j] = std::clamp(row[j], 0.0, 1.0);
    for (int j = 1; j < n; ++j) row[j] = std::max(row[j], row[j - 1] + gap);
    if (row[n - 1] > 1.0 - gap) {
      row[n - 1] = 1.0 - gap;
      for (int j = n - 2; j >= 1; --j) row[j] = std::min(row[j], row[j + 1] - gap);
    }
  }
  return h;
}

struct TupleCandidate {
  double violation;
  int a, b, c, d;  // family-specific tuple indices
  bool operator>(const TupleCandidate& other) const { return violation > other.violation; }
};

// Keeps the kSeparatorBatch most violated tuples seen so far.
class TopViolations {
 public:
  void offer(const TupleCandidate& cand) {
    if (static_cast<int>(heap_.size()) < kSeparatorBatch) {
      heap_.push(cand);
    } else if (cand.violation > heap_.top().violation) {
      heap_.pop();
      heap_.push(cand);
    }
  }
  std::vector<TupleCandidate> take_sorted() {
    std::vector<TupleCandidate> all;
    all.reserve(heap_.size());
    while (!heap_.empty()) {
      all.push_back(heap_.top());
      heap_.pop();
    }
    std::reverse(all.begin(), all.end());
    return all;
  }

 private:
  std::priority_queue<TupleCandidate, std::vector<TupleCandidate>, std::greater<TupleCandidate>>
      heap_;
};

std::uint64_t tuple_key(int iu, int ju, int iv, int jv) {
  return (((static_cast<std::uint64_t>(iu) * 256 + ju) * 256 + iv) * 256) + jv;
}

// Exact minima of the discrete constraint families on the given h values,
// margins included. Used to restate gamma on the cleaned solution.
double exact_fully_gamma(int n, const std::vector<double>& h) {
  const auto hv = [&](int i, int j) { return h[static_cast<size_t>(i) * (n + 1) + j]; };
  const auto H = H_table(n, h);
  double best = std::numeric_limits<double>::infinity();
  for (int iv = 0; iv <= n; ++iv) {
    for (int jv = iv; jv <= n; ++jv) {
      best = std::min(best, H[iv][jv] + 1.0 - static_cast<double>(jv) / n - phi1_margin(n));
    }
  }
  for (int iu = 0; iu <= n; ++iu) {
    for (int ju = iu; ju <= n; ++ju) {
      const double side_u = H[iu][ju];
      const double rest_u = 1.0 - hv(iu, ju);
      for (int iv = n - ju; iv <= n; ++iv) {
        for (int jv = iv; jv <= n; ++jv) {
          const double value = side_u + H[iv][jv] +
                               rest_u * (1.0 - static_cast<double>(jv) / n) - phi2_margin(n);
          best = std::min(best, value);
        }
      }
    }
  }
  return best;
}

double exact_general_gamma(int n, const std::vector<double>& h) {
  const auto hv = [&](int i, int j) { return h[static_cast<size_t>(i) * (n + 1) + j]; };
  const auto H = H_table(n, h);
  // Dip charge per diagonal cell, mirroring append_diag_dip_charge.
  const auto dip = [&](int k) {
    if (k < 0 || k >= n) return 0.0;
    return (hv(k, k + 1) + hv(k + 1, k) - 2.0 * hv(k, k)) / (4.0 * n);
  };
  double best = std::numeric_limits<double>::infinity();
  for (int iv = 0; iv <= n; ++iv) {
    for (int jv = iv; jv <= n; ++jv) {
      const double rest = 1.0 - static_cast<double>(jv) / n;
      const double value = H[iv][jv] + rest * hv(n - jv, n - jv) - phi1_margin(n) -
                           dip(n - jv - 1) - dip(n - jv);
      best = std::min(best, value);
    }
  }
  return best;
}

double exact_naive_gamma(int n, const std::vector<double>& h) {
  // min over iu >= k of (iu/n) h(iu), as a suffix array.
  std::vector<double> suffix(n + 2, std::numeric_limits<double>::infinity());
  for (int i = n; i >= 0; --i) {
    suffix[i] = std::min(suffix[i + 1], (static_cast<double>(i) / n) * h[i]);
  }
  double best = std::numeric_limits<double>::infinity();
  for (int jv = 0; jv <= n; ++jv) {
    double trapezoid = 0.0;
    const double head = (static_cast<double>(jv) / n) * h[jv];
    // iv descending keeps the trapezoid sum incremental.
    for (int iv = jv; iv >= 0; --iv) {
      if (iv < jv) trapezoid += (h[iv] + h[iv + 1]) / (2.0 * n);
      best = std::min(best, head - trapezoid + suffix[n - jv] - phi1_margin(n));
    }
  }
  return best;
}

std::map<std::string, int> count_rows_by_kind(const LinearProgram& prog) {
  std::map<std::string, int> counts;
  for (const auto& row : prog.rows()) {
    const auto cut = row.name.find('_');
    counts[row.name.substr(0, cut)] += 1;
  }
  return counts;
}

}  // namespace

FactorSolution solve_factor_lp(const FactorLPSpec& spec, const lm::lp::SolveOptions& options) {
  validate_factor_spec(spec);
  const auto started = std::chrono::steady_clock::now();
  const int n = spec.n;

  FactorSolution out;
  out.spec = spec;

  LinearProgram prog;
  LPSolution solution;
  if (spec.family == FactorFamily::FullyOnline) {
    if (spec.use_row_generation) {
      prog = build_fully_lp(n, spec.use_auxiliary_H, /*include_phi2=*/false);
      std::unordered_set<std::uint64_t> emitted;
      const bool use_aux = spec.use_auxiliary_H;
      const auto separator = [n, use_aux, &emitted](const LPSolution& sol) {
        const std::vector<double> h(sol.values.begin(), sol.values.begin() + (n + 1) * (n + 1));
        const auto hv = [&](int i, int j) { return h[static_cast<size_t>(i) * (n + 1) + j]; };
        const auto H = H_table(n, h);
        const double gamma = sol.values[gamma_var(n)];
        TopViolations top;
        for (int iu = 0; iu <= n; ++iu) {
          for (int ju = iu; ju <= n; ++ju) {
            const double side_u = H[iu][ju];
            const double rest_u = 1.0 - hv(iu, ju);
            for (int iv = n - ju; iv <= n; ++iv) {
              for (int jv = iv; jv <= n; ++jv) {
                const double value = side_u + H[iv][jv] +
                                     rest_u * (1.0 - static_cast<double>(jv) / n);
                const double violation = gamma + phi2_margin(n) - value;
                if (violation > tol::kLpFeas && !emitted.count(tuple_key(iu, ju, iv, jv))) {
                  top.offer(TupleCandidate{violation, iu, ju, iv, jv});
                }
              }
            }
          }
        }
        std::vector<Row> rows;
        for (const auto& cand : top.take_sorted()) {
          emitted.insert(tuple_key(cand.a, cand.b, cand.c, cand.d));
          rows.push_back(make_phi2_row(n, use_aux, cand.a, cand.b, cand.c, cand.d));
        }
        return rows;
      };
      const auto generated = lm::lp::solve_with_row_generation(prog, separator, 60, options);
      solution = generated.solution;
      out.rounds = generated.rounds;
    } else {
      prog = build_fully_lp(n, spec.use_auxiliary_H, /*include_phi2=*/true);
      solution = lm::lp::solve(prog, options);
    }
  } else if (spec.family == FactorFamily::GeneralArrival) {
    prog = build_general_arrival_lp(n);
    solution = lm::lp::solve(prog, options);
  } else {
    if (spec.use_row_generation) {
      prog = build_naive_master(n);
      std::unordered_set<std::uint64_t> emitted;
      const auto separator = [n, &emitted](const LPSolution& sol) {
        const std::vector<double> h(sol.values.begin(), sol.values.begin() + n + 1);
        const double gamma = sol.values[naive_gamma_var(n)];
        TopViolations top;
        for (int jv = 0; jv <= n; ++jv) {
          const double head = (static_cast<double>(jv) / n) * h[jv];
          double trapezoid = 0.0;
          for (int iv = jv; iv >= 0; --iv) {
            if (iv < jv) trapezoid += (h[iv] + h[iv + 1]) / (2.0 * n);
            for (int iu = n - jv; iu <= n; ++iu) {
              const double value = head - trapezoid + (static_cast<double>(iu) / n) * h[iu];
              const double violation = gamma + phi1_margin(n) - value;
              if (violation > tol::kLpFeas && !emitted.count(tuple_key(0, iv, jv, iu))) {
                top.offer({violation, 0, iv, jv, iu});
              }
            }
          }
        }
        std::vector<Row> rows;
        for (const auto& cand : top.take_sorted()) {
          emitted.insert(tuple_key(0, cand.b, cand.c, cand.d));
          rows.push_back(make_naive_row(n, cand.b, cand.c, cand.d));
        }
        return rows;
      };
      const auto generated = lm::lp::solve_with_row_generation(prog, separator, 60, options);
      solution = generated.solution;
      out.rounds = generated.rounds;
    } else {
      prog = build_naive_lp(n);
      solution = lm::lp::solve(prog, options);
    }
  }

  if (solution.status != lm::lp::Status::Optimal) {
    throw std::runtime_error("factor LP (" + to_string(spec.family) +
                             "): solver returned " + lm::lp::to_string(solution.status) +
                             (solution.message.empty() ? "" : ": " + solution.message));
  }

  double exact = 0.0;
  if (spec.family == FactorFamily::NaiveOneDim) {
    out.curve.assign(solution.values.begin(), solution.values.begin() + n + 1);
    out.curve[0] = 0.0;
    out.curve[n] = 1.0;
    const double gap = 0.7 * kMonoGapScale / n;
    for (int j = 1; j < n; ++j) out.curve[j] = std::clamp(out.curve[j], 0.0, 1.0);
    for (int j = 1; j < n; ++j) out.curve[j] = std::max(out.curve[j], out.curve[j - 1] + gap);
    if (out.curve[n - 1] > 1.0 - gap) {
      out.curve[n - 1] = 1.0 - gap;
      for (int j = n - 2; j >= 1; --j) {
        out.curve[j] = std::min(out.curve[j], out.curve[j + 1] - gap);
      }
    }
    exact = exact_naive_gamma(n, out.curve);
  } else {
    std::vector<double> h(solution.values.begin(), solution.values.begin() + (n + 1) * (n + 1));
    h = cleanup_grid_values(n, std::move(h));
    out.grid = make_h_grid(n, std::move(h));
    validate_h_grid(out.grid);
    // Constructing the price system rejects grids whose diagonal cannot invert.
    const PriceSystem price_check(out.grid);
    (void)price_check;
    exact = spec.family == FactorFamily::FullyOnline ? exact_fully_gamma(n, out.grid.values)
                                                     : exact_general_gamma(n, out.grid.values);
  }

  if (std::abs(exact - solution.objective_value) > tol::kUserFacing) {
    throw std::runtime_error("factor LP (" + to_string(spec.family) +
                             "): cleaned solution drifted from the LP objective: exact " +
                             std::to_string(exact) + " vs objective " +
                             std::to_string(solution.objective_value));
  }
  out.gamma = exact;
  out.constraint_counts = count_rows_by_kind(prog);
  out.backend = solution.backend;
  out.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace lm
