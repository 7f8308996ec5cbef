#include "lm/pricing/h_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "lm/core/json_io.hpp"

namespace lm {
namespace {

constexpr double kEntryTol = 1e-12;

void check_grid(const HGrid& grid, double tol) {
  const int n = grid.n;
  if (n < 1) {
    throw std::invalid_argument("h grid: n must be at least 1, got " + std::to_string(n));
  }
  const size_t want = static_cast<size_t>(n + 1) * (n + 1);
  if (grid.values.size() != want) {
    throw std::invalid_argument("h grid: expected " + std::to_string(want) + " values for n=" +
                                std::to_string(n) + ", got " + std::to_string(grid.values.size()));
  }
  for (double v : grid.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("h grid: non-finite value");
    if (v < -tol || v > 1.0 + tol) {
      throw std::invalid_argument("h grid: value " + std::to_string(v) + " outside [0,1]");
    }
  }
  const double min_gap = 0.5e-9 / n;  // half the LP monotonicity floor, to absorb roundoff
  // Grids must not jump faster than 12/n per cell in either coordinate.  The
  // optimizer is allowed to push solutions right onto that bound, so leave a
  // little room for solver noise.
  const double max_step = 12.0 / n + 1e-6;
  for (int i = 0; i <= n; ++i) {
    if (std::abs(grid.at(i, 0)) > tol) {
      throw std::invalid_argument("h grid: row " + std::to_string(i) + " does not start at 0");
    }
    if (std::abs(grid.at(i, n) - 1.0) > tol) {
      throw std::invalid_argument("h grid: row " + std::to_string(i) + " does not end at 1");
    }
    for (int j = 0; j < n; ++j) {
      const double step = grid.at(i, j + 1) - grid.at(i, j);
      if (step < min_gap) {
        throw std::invalid_argument("h grid: row " + std::to_string(i) +
                                    " not strictly increasing at column " + std::to_string(j));
      }
      if (step > max_step) {
        throw std::invalid_argument("h grid: theta step at (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") exceeds 12/n");
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (std::abs(grid.at(i + 1, j) - grid.at(i, j)) > max_step) {
        throw std::invalid_argument("h grid: tau step at (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") exceeds 12/n");
      }
    }
  }
}

}  // namespace

void validate_h_grid(const HGrid& grid) { check_grid(grid, 0.0); }

HGrid make_h_grid(int n, std::vector<double> values) {
  HGrid grid{n, std::move(values)};
  check_grid(grid, kEntryTol);
  for (int i = 0; i <= n; ++i) {
    grid.at(i, 0) = 0.0;
    grid.at(i, n) = 1.0;
  }
  for (double& v : grid.values) v = std::clamp(v, 0.0, 1.0);
  return grid;
}

namespace {

// Cell index and in-cell weight for coordinate t; weights within 1e-12 of a
// corner collapse onto it so that grid-point queries return stored values
// exactly.
struct Locator {
  int cell;
  double w;
};

Locator locate(double t, int n) {
  t = std::clamp(t, 0.0, 1.0);
  double s = t * n;
  int cell = static_cast<int>(std::floor(s));
  double w = s - cell;
  if (w < 1e-12) {
    w = 0.0;
  } else if (w > 1.0 - 1e-12) {
    ++cell;
    w = 0.0;
  }
  if (cell >= n) {
    // t == 1 (or snapped there): read row/column n with zero weight.
    cell = n;
    w = 0.0;
  }
  if (cell < 0) {
    cell = 0;
    w = 0.0;
  }
  return {cell, w};
}

}  // namespace

double interpolate_h(const HGrid& grid, double tau, double theta) {
  const int n = grid.n;
  const Locator a = locate(tau, n);
  const Locator b = locate(theta, n);
  double value = (1.0 - a.w) * (1.0 - b.w) * grid.at(a.cell, b.cell);
  if (b.w > 0.0) value += (1.0 - a.w) * b.w * grid.at(a.cell, b.cell + 1);
  if (a.w > 0.0) value += a.w * (1.0 - b.w) * grid.at(a.cell + 1, b.cell);
  if (a.w > 0.0 && b.w > 0.0) value += a.w * b.w * grid.at(a.cell + 1, b.cell + 1);
  return value;
}

std::string h_grid_to_json(const HGrid& grid) {
  nlohmann::ordered_json doc;
  doc["n"] = grid.n;
  doc["values"] = grid.values;
  return doc.dump(2) + "\n";
}

HGrid h_grid_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("h grid: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("values")) {
    throw std::invalid_argument("h grid: JSON must be an object with \"n\" and \"values\"");
  }
  if (!doc["n"].is_number_integer()) {
    throw std::invalid_argument("h grid: \"n\" must be an integer");
  }
  if (!doc["values"].is_array()) {
    throw std::invalid_argument("h grid: \"values\" must be an array");
  }
  std::vector<double> values;
  values.reserve(doc["values"].size());
  for (const auto& v : doc["values"]) {
    if (!v.is_number()) throw std::invalid_argument("h grid: \"values\" entries must be numbers");
    values.push_back(v.get<double>());
  }
  return make_h_grid(doc["n"].get<int>(), std::move(values));
}

HGrid load_h_grid(const std::string& path) { return h_grid_from_json(read_text_file(path)); }

void save_h_grid(const HGrid& grid, const std::string& path) {
  write_text_file(path, h_grid_to_json(grid));
}

}  // namespace lm
