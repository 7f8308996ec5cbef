#include "lm/lp/interior_point.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lm::lp {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Reduced standard form produced by presolve: only live variables remain
// (flipped so the lower bound is finite), GE rows are negated to LE.
struct Reduced {
  bool decided = false;
  LPSolution solution;  // meaningful when decided

  std::vector<int> live;        // reduced index -> original variable
  std::vector<char> flipped;    // reduced variable was negated
  std::vector<double> lo, up;   // bounds after flipping
  std::vector<double> fixed;    // original-size values for fixed variables
  std::vector<char> is_fixed;

  struct RRow {
    std::vector<std::pair<int, double>> entries;  // reduced indices
    bool eq = false;
    double rhs = 0.0;
  };
  std::vector<RRow> rows;
};

Reduced presolve(const LinearProgram& lp) {
  const int nv = lp.num_variables();
  Reduced red;
  red.fixed.assign(nv, 0.0);
  red.is_fixed.assign(nv, 0);

  std::vector<double> lo(nv), up(nv);
  for (int j = 0; j < nv; ++j) {
    lo[j] = lp.lower(j);
    up[j] = lp.upper(j);
  }

  auto infeasible = [&red](const std::string& why) {
    red.decided = true;
    red.solution.status = Status::Infeasible;
    red.solution.message = why;
  };

  std::vector<char> row_dropped(lp.num_rows(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int j = 0; j < nv; ++j) {
      if (lo[j] > up[j] + 1e-9) {
        infeasible("presolve: crossing bounds on " + lp.variable_name(j));
        return red;
      }
      if (!red.is_fixed[j] && up[j] - lo[j] <= 1e-12) {
        red.is_fixed[j] = 1;
        red.fixed[j] = 0.5 * (lo[j] + up[j]);
        changed = true;
      }
    }
    for (int i = 0; i < lp.num_rows(); ++i) {
      if (row_dropped[i]) continue;
      const Row& row = lp.row(i);
      double rhs = row.rhs;
      int live_var = -1;
      double live_coef = 0.0;
      int live_count = 0;
      for (const auto& [var, coef] : row.entries) {
        if (coef == 0.0) continue;
        if (red.is_fixed[var]) {
          rhs -= coef * red.fixed[var];
        } else {
          ++live_count;
          live_var = var;
          live_coef = coef;
        }
      }
      if (live_count == 0) {
        const double viol = row.rel == Relation::LE   ? -rhs
                            : row.rel == Relation::GE ? rhs
                                                      : std::abs(rhs);
        if (viol > 1e-7) {
          infeasible("presolve: constant row " + row.name + " violated");
          return red;
        }
        row_dropped[i] = 1;
        changed = true;
      } else if (live_count == 1) {
        // Singleton row becomes a bound on its single live variable.
        const double v = rhs / live_coef;
        Relation rel = row.rel;
        if (live_coef < 0 && rel != Relation::EQ) {
          rel = rel == Relation::LE ? Relation::GE : Relation::LE;
        }
        if (rel == Relation::LE) {
          up[live_var] = std::min(up[live_var], v);
        } else if (rel == Relation::GE) {
          lo[live_var] = std::max(lo[live_var], v);
        } else {
          lo[live_var] = std::max(lo[live_var], v);
          up[live_var] = std::min(up[live_var], v);
        }
        row_dropped[i] = 1;
        changed = true;
      }
    }
  }

  for (int j = 0; j < nv; ++j) {
    if (red.is_fixed[j]) continue;
    if (!std::isfinite(lo[j]) && !std::isfinite(up[j])) {
      throw std::invalid_argument(
          "interior-point backend requires every variable to have a finite bound: " +
          lp.variable_name(j));
    }
    red.live.push_back(j);
    if (std::isfinite(lo[j])) {
      red.flipped.push_back(0);
      red.lo.push_back(lo[j]);
      red.up.push_back(up[j]);
    } else {
      red.flipped.push_back(1);
      red.lo.push_back(-up[j]);
      red.up.push_back(kInf);
    }
  }

  std::vector<int> to_reduced(nv, -1);
  for (size_t k = 0; k < red.live.size(); ++k) to_reduced[red.live[k]] = static_cast<int>(k);

  for (int i = 0; i < lp.num_rows(); ++i) {
    if (row_dropped[i]) continue;
    const Row& row = lp.row(i);
    Reduced::RRow rrow;
    double rhs = row.rhs;
    for (const auto& [var, coef] : row.entries) {
      if (coef == 0.0) continue;
      if (red.is_fixed[var]) {
        rhs -= coef * red.fixed[var];
        continue;
      }
      const int k = to_reduced[var];
      rrow.entries.emplace_back(k, red.flipped[k] ? -coef : coef);
    }
    const double sign = row.rel == Relation::GE ? -1.0 : 1.0;
    rrow.eq = row.rel == Relation::EQ;
    rrow.rhs = sign * rhs;
    if (sign < 0) {
      for (auto& [k, coef] : rrow.entries) coef = -coef;
    }
    red.rows.push_back(std::move(rrow));
  }
  return red;
}

double max_step(const Vec& value, const Vec& delta) {
  double alpha = 1.0;
  for (int i = 0; i < value.size(); ++i) {
    if (delta[i] < 0.0) alpha = std::min(alpha, -value[i] / delta[i]);
  }
  return alpha;
}

}  // namespace

LPSolution solve_interior_point(const LinearProgram& lp, const IpmOptions& options) {
  lp.validate();
  Reduced red = presolve(lp);
  LPSolution solution;
  solution.backend = "interior_point";
  if (red.decided) {
    red.solution.backend = solution.backend;
    return red.solution;
  }

  const int n = static_cast<int>(red.live.size());
  const int m = static_cast<int>(red.rows.size());
  const double minimize_sign = lp.sense() == Sense::Maximize ? -1.0 : 1.0;

  auto compose_values = [&](const Vec* x) {
    std::vector<double> full(lp.num_variables());
    for (int j = 0; j < lp.num_variables(); ++j) {
      if (red.is_fixed[j]) full[j] = red.fixed[j];
    }
    if (x != nullptr) {
      for (int k = 0; k < n; ++k) {
        double v = (*x)[k] + red.lo[k];
        if (red.flipped[k]) v = -v;
        full[red.live[k]] = v;
      }
    }
    return full;
  };

  // Everything was fixed by presolve: just audit the (already checked) rows.
  if (n == 0) {
    solution.status = Status::Optimal;
    solution.values = compose_values(nullptr);
    solution.objective_value = lp.objective_value(solution.values);
    return solution;
  }

  // Shifted form: x in [0, r], rows A x (<=|=) b with bounds already folded.
  Vec c(n), r(n);
  for (int k = 0; k < n; ++k) {
    double obj = lp.objective(red.live[k]);
    if (red.flipped[k]) obj = -obj;
    c[k] = minimize_sign * obj;
    r[k] = red.up[k] - red.lo[k];  // may be +inf
  }

  if (m == 0) {
    Vec x(n);
    for (int k = 0; k < n; ++k) {
      if (c[k] < 0.0) {
        if (!std::isfinite(r[k])) {
          solution.status = Status::Unbounded;
          solution.message = "cost ray on " + lp.variable_name(red.live[k]);
          return solution;
        }
        x[k] = r[k];
      } else {
        x[k] = 0.0;
      }
    }
    solution.status = Status::Optimal;
    solution.values = compose_values(&x);
    solution.objective_value = lp.objective_value(solution.values);
    return solution;
  }

  Vec b(m);
  std::vector<char> is_eq(m);
  std::vector<Eigen::Triplet<double>> a_trip;
  for (int i = 0; i < m; ++i) {
    const auto& row = red.rows[i];
    double shift = 0.0;
    for (const auto& [k, coef] : row.entries) {
      a_trip.emplace_back(i, k, coef);
      shift += coef * red.lo[k];
    }
    b[i] = row.rhs - shift;
    is_eq[i] = row.eq ? 1 : 0;
  }
  SpMat A(m, n);
  A.setFromTriplets(a_trip.begin(), a_trip.end());
  SpMat At = A.transpose();

  std::vector<char> has_upper(n);
  for (int k = 0; k < n; ++k) has_upper[k] = std::isfinite(r[k]) ? 1 : 0;
  int n_upper = 0, n_ineq = 0;
  for (int k = 0; k < n; ++k) n_upper += has_upper[k];
  for (int i = 0; i < m; ++i) n_ineq += is_eq[i] ? 0 : 1;

  // Iterates: primal x, row slacks s (inequalities), bound slacks w = r - x;
  // duals y (rows), v >= 0 (inequality rows, y = -v there), sx, t (bounds).
  Vec x(n), w(n), sx(n), t(n), y = Vec::Zero(m), s(m), v(m);
  for (int k = 0; k < n; ++k) {
    x[k] = has_upper[k] ? 0.5 * r[k] : 1.0;
    if (x[k] <= 1e-8) x[k] = 1e-8;
    w[k] = has_upper[k] ? r[k] - x[k] : 1.0;
    sx[k] = 1.0;
    t[k] = has_upper[k] ? 1.0 : 0.0;
  }
  Vec ax = A * x;
  for (int i = 0; i < m; ++i) {
    s[i] = is_eq[i] ? 0.0 : std::max(1.0, b[i] - ax[i]);
    v[i] = is_eq[i] ? 0.0 : 1.0;
    // Inequality-row duals satisfy y = -v; the Newton steps preserve this
    // (dv = -dy), so it must hold at the starting point too.
    y[i] = -v[i];
  }

  const int total_pairs = n + n_upper + n_ineq;
  const double bnorm = 1.0 + b.lpNorm<Eigen::Infinity>();
  const double cnorm = 1.0 + c.lpNorm<Eigen::Infinity>();

  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analyzed = false;
  double reg = options.regularization;

  auto assemble = [&](const Vec& d, const Vec& sigma_row) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(a_trip.size() * 2 + n + m);
    for (int k = 0; k < n; ++k) trip.emplace_back(k, k, -d[k] - reg);
    for (const auto& entry : a_trip) {
      trip.emplace_back(n + entry.row(), entry.col(), entry.value());
      trip.emplace_back(entry.col(), n + entry.row(), entry.value());
    }
    for (int i = 0; i < m; ++i) trip.emplace_back(n + i, n + i, sigma_row[i] + reg);
    SpMat K(n + m, n + m);
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
  };

  Vec dx(n), dy(m), dsx(n), dt(n), ds(m), dv(m);
  Vec rb(m), rc(n);
  int iter = 0;
  std::string stall_note;

  for (iter = 0; iter < options.max_iterations; ++iter) {
    ax = A * x;
    for (int i = 0; i < m; ++i) rb[i] = b[i] - ax[i] - (is_eq[i] ? 0.0 : s[i]);
    rc = c - At * y - sx + t;

    double mu = x.dot(sx);
    for (int k = 0; k < n; ++k) {
      if (has_upper[k]) mu += w[k] * t[k];
    }
    for (int i = 0; i < m; ++i) {
      if (!is_eq[i]) mu += s[i] * v[i];
    }
    mu /= std::max(1, total_pairs);

    const double rel_rb = rb.lpNorm<Eigen::Infinity>() / bnorm;
    const double rel_rc = rc.lpNorm<Eigen::Infinity>() / cnorm;
    const double pobj = c.dot(x);
    const double rel_gap = mu * total_pairs / (1.0 + std::abs(pobj));
    if (options.verbose) {
      std::ostringstream line;
      line << "ipm iter " << iter << " mu " << mu << " rb " << rel_rb << " rc " << rel_rc;
      solution.message = line.str();
    }
    if (rel_rb <= options.tolerance && rel_rc <= options.tolerance &&
        rel_gap <= options.tolerance) {
      break;
    }
    if (iter > 20 && mu < 1e-10 && rel_rb > 1e-6) {
      solution.status = Status::Infeasible;
      std::ostringstream why;
      why << "complementarity vanished with primal residual " << rel_rb;
      solution.message = why.str();
      return solution;
    }

    Vec d(n), sigma_row(m);
    for (int k = 0; k < n; ++k) {
      d[k] = sx[k] / x[k] + (has_upper[k] ? t[k] / w[k] : 0.0);
    }
    for (int i = 0; i < m; ++i) sigma_row[i] = is_eq[i] ? 0.0 : s[i] / v[i];

    SpMat K = assemble(d, sigma_row);
    if (!analyzed) {
      ldlt.analyzePattern(K);
      analyzed = true;
    }
    ldlt.factorize(K);
    for (int bump = 0; ldlt.info() != Eigen::Success && bump < 4; ++bump) {
      reg *= 100.0;
      K = assemble(d, sigma_row);
      ldlt.factorize(K);
    }
    if (ldlt.info() != Eigen::Success) {
      throw std::runtime_error("interior point: KKT factorization failed at iteration " +
                               std::to_string(iter));
    }

    auto solve_kkt = [&](const Vec& rhs_top, const Vec& rhs_bottom, Vec& out_dx, Vec& out_dy) {
      Vec rhs(n + m);
      rhs.head(n) = rhs_top;
      rhs.tail(m) = rhs_bottom;
      Vec z = ldlt.solve(rhs);
      // One round of iterative refinement against the assembled system.
      Vec resid = rhs - K * z;
      z += ldlt.solve(resid);
      out_dx = z.head(n);
      out_dy = z.tail(m);
    };

    // Predictor (affine scaling) direction.
    Vec rxs = -(x.array() * sx.array()).matrix();
    Vec rwt(n), rsv(m);
    for (int k = 0; k < n; ++k) rwt[k] = has_upper[k] ? -w[k] * t[k] : 0.0;
    for (int i = 0; i < m; ++i) rsv[i] = is_eq[i] ? 0.0 : -s[i] * v[i];

    auto build_rhs = [&](const Vec& rxs_, const Vec& rwt_, const Vec& rsv_, Vec& top, Vec& bottom) {
      top = rc;
      for (int k = 0; k < n; ++k) {
        top[k] -= rxs_[k] / x[k];
        if (has_upper[k]) top[k] += rwt_[k] / w[k];
      }
      bottom = rb;
      for (int i = 0; i < m; ++i) {
        if (!is_eq[i]) bottom[i] -= rsv_[i] / v[i];
      }
    };

    Vec top(n), bottom(m);
    build_rhs(rxs, rwt, rsv, top, bottom);
    Vec dx_a(n), dy_a(m);
    solve_kkt(top, bottom, dx_a, dy_a);

    auto recover = [&](const Vec& rxs_, const Vec& rwt_, const Vec& rsv_, const Vec& dx_,
                       const Vec& dy_, Vec& dsx_, Vec& dt_, Vec& ds_, Vec& dv_) {
      for (int k = 0; k < n; ++k) {
        dsx_[k] = (rxs_[k] - sx[k] * dx_[k]) / x[k];
        dt_[k] = has_upper[k] ? (rwt_[k] + t[k] * dx_[k]) / w[k] : 0.0;
      }
      for (int i = 0; i < m; ++i) {
        if (is_eq[i]) {
          ds_[i] = 0.0;
          dv_[i] = 0.0;
        } else {
          dv_[i] = -dy_[i];
          ds_[i] = (rsv_[i] - s[i] * dv_[i]) / v[i];
        }
      }
    };

    Vec dsx_a(n), dt_a(n), ds_a(m), dv_a(m);
    recover(rxs, rwt, rsv, dx_a, dy_a, dsx_a, dt_a, ds_a, dv_a);

    // Affine step lengths over all nonnegative blocks.
    double ap = std::min(max_step(x, dx_a), max_step(s, ds_a));
    double ad = std::min(max_step(sx, dsx_a), max_step(v, dv_a));
    for (int k = 0; k < n; ++k) {
      if (!has_upper[k]) continue;
      if (dx_a[k] > 0.0) ap = std::min(ap, w[k] / dx_a[k]);
      if (dt_a[k] < 0.0) ad = std::min(ad, -t[k] / dt_a[k]);
    }

    double mu_aff = (x + ap * dx_a).dot(sx + ad * dsx_a);
    for (int k = 0; k < n; ++k) {
      if (has_upper[k]) mu_aff += (w[k] - ap * dx_a[k]) * (t[k] + ad * dt_a[k]);
    }
    for (int i = 0; i < m; ++i) {
      if (!is_eq[i]) mu_aff += (s[i] + ap * ds_a[i]) * (v[i] + ad * dv_a[i]);
    }
    mu_aff /= std::max(1, total_pairs);
    double sigma = std::pow(std::max(mu_aff, 0.0) / std::max(mu, 1e-300), 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // Corrector direction reuses the factorization.
    for (int k = 0; k < n; ++k) {
      rxs[k] += sigma * mu - dx_a[k] * dsx_a[k];
      if (has_upper[k]) rwt[k] += sigma * mu + dx_a[k] * dt_a[k];
    }
    for (int i = 0; i < m; ++i) {
      if (!is_eq[i]) rsv[i] += sigma * mu - ds_a[i] * dv_a[i];
    }
    build_rhs(rxs, rwt, rsv, top, bottom);
    solve_kkt(top, bottom, dx, dy);
    recover(rxs, rwt, rsv, dx, dy, dsx, dt, ds, dv);

    ap = std::min(max_step(x, dx), max_step(s, ds));
    ad = std::min(max_step(sx, dsx), max_step(v, dv));
    for (int k = 0; k < n; ++k) {
      if (!has_upper[k]) continue;
      if (dx[k] > 0.0) ap = std::min(ap, w[k] / dx[k]);
      if (dt[k] < 0.0) ad = std::min(ad, -t[k] / dt[k]);
    }
    const double eta = std::max(0.995, 1.0 - mu);
    ap = std::min(1.0, eta * ap);
    ad = std::min(1.0, eta * ad);

    x += ap * dx;
    s += ap * ds;
    y += ad * dy;
    sx += ad * dsx;
    t += ad * dt;
    v += ad * dv;
    for (int k = 0; k < n; ++k) {
      if (has_upper[k]) w[k] = std::max(r[k] - x[k], 1e-300);
    }
  }

  // Final residual audit decides between full and degraded convergence.
  ax = A * x;
  for (int i = 0; i < m; ++i) rb[i] = b[i] - ax[i] - (is_eq[i] ? 0.0 : s[i]);
  rc = c - At * y - sx + t;
  double mu = x.dot(sx);
  for (int k = 0; k < n; ++k) {
    if (has_upper[k]) mu += w[k] * t[k];
  }
  for (int i = 0; i < m; ++i) {
    if (!is_eq[i]) mu += s[i] * v[i];
  }
  mu /= std::max(1, total_pairs);
  const double rel_rb = rb.lpNorm<Eigen::Infinity>() / bnorm;
  const double rel_rc = rc.lpNorm<Eigen::Infinity>() / cnorm;
  const double rel_gap = mu * total_pairs / (1.0 + std::abs(c.dot(x)));

  solution.iterations = iter;
  if (rel_rb <= 1e-7 && rel_rc <= 1e-7 && rel_gap <= 1e-7) {
    solution.status = Status::Optimal;
    solution.values = compose_values(&x);
    solution.objective_value = lp.objective_value(solution.values);
    if (iter >= options.max_iterations) {
      solution.message = "stopped at the iteration cap with reduced precision";
    }
  } else {
    solution.status = Status::Limit;
    std::ostringstream why;
    why << "no convergence: rel_rb " << rel_rb << " rel_rc " << rel_rc << " rel_gap " << rel_gap;
    solution.message = why.str();
  }
  return solution;
}

}  // namespace lm::lp
