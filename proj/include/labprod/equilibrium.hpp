#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "labprod/error.hpp"

namespace labprod::equilibrium {

/// A Cobb-Douglas firm Y = A K^alpha L^beta. Labor is continuous.
struct TheoryFirm {
  std::string id;
  double A = 1.0;
  double alpha = 0.4;
  double beta = 0.6;
  double K = 1.0;
  double L = 1.0;
};

/// Price, interest rate and wage rate. Only w/p matters for labor demand.
struct MarketContext {
  double p = 1.0;
  double r = 0.0;
  double w = 0.0;
};

inline void validate(const TheoryFirm& f, bool relaxed = false) {
  if (!(f.A > 0.0 && f.K > 0.0 && f.L > 0.0)) {
    throw ConfigError("firm '" + f.id + "': A, K and L must be positive");
  }
  bool beta_ok = relaxed ? (f.beta > 0.0 && f.beta <= 1.0) : (f.beta > 0.0 && f.beta < 1.0);
  if (!beta_ok) throw ConfigError("firm '" + f.id + "': beta must lie in (0, 1)");
}

inline void validate(const MarketContext& m) {
  if (!(m.p > 0.0)) throw ConfigError("price must be positive");
  if (m.r < 0.0 || m.w < 0.0) throw ConfigError("interest and wage rates must be non-negative");
}

inline double output(const TheoryFirm& f) {
  return f.A * std::pow(f.K, f.alpha) * std::pow(f.L, f.beta);
}

// Operating profit pY - rK - wL.
inline double profit(const TheoryFirm& f, const MarketContext& m) {
  return m.p * output(f) - m.r * f.K - m.w * f.L;
}

/// dY/dL = beta Y / L. `relaxed` admits beta = 1 (linear in labor).
inline double marginal_labor_productivity(const TheoryFirm& f, bool relaxed = false) {
  validate(f, relaxed);
  return f.beta * output(f) / f.L;
}

/// Profit-maximizing labor where p dY/dL = w.
inline double optimal_labor(const TheoryFirm& f, const MarketContext& m) {
  validate(f);
  validate(m);
  if (!(m.w > 0.0)) throw UnboundedDemandError("zero wage: labor demand is unbounded");
  return std::pow(m.p * f.beta * f.A * std::pow(f.K, f.alpha) / m.w, 1.0 / (1.0 - f.beta));
}

struct DispersionInput {
  double beta = 0.0;
  double Y = 0.0;
  double L = 0.0;
};

struct DispersionStats {
  double max_relative_spread = 0.0;  // (max v - min v) / min v
  double coefficient_of_variation = 0.0;
};

/// Spread of v_i = beta_i (Y/L)_i. Zero exactly when every firm has the same
/// marginal labor productivity, i.e. the no-arbitrage state.
inline DispersionStats equilibrium_dispersion(std::span<const DispersionInput> firms) {
  if (firms.size() < 2) throw InsufficientDataError("dispersion needs at least 2 firms");
  std::vector<double> v;
  v.reserve(firms.size());
  for (const auto& f : firms) {
    if (!(f.L > 0.0 && f.Y > 0.0)) throw InsufficientDataError("dispersion needs positive Y and L");
    v.push_back(f.beta * f.Y / f.L);
  }
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  return {(*hi - *lo) / *lo, std::sqrt(var) / mean};
}

inline DispersionStats equilibrium_dispersion(std::span<const TheoryFirm> firms) {
  std::vector<DispersionInput> in;
  in.reserve(firms.size());
  for (const auto& f : firms) in.push_back({f.beta, output(f), f.L});
  return equilibrium_dispersion(std::span<const DispersionInput>(in));
}

struct StepRule {
  enum class Kind { fixed, adaptive };
  Kind kind = Kind::adaptive;
  // Amount moved per step (fixed) or the largest step tried (adaptive).
  // Zero picks a quarter of the mean labor.
  double delta_L = 0.0;
};

struct SimulationOptions {
  StepRule step;
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  double L_min = 1e-9;
};

struct ReallocationStep {
  std::size_t iteration = 0;
  std::string mover_from;
  std::string mover_to;
  double delta_L = 0.0;
  double max_spread = 0.0;
  double total_output = 0.0;
  double total_labor = 0.0;
  double total_profit = 0.0;
};

struct ReallocationTrace {
  std::vector<ReallocationStep> steps;  // steps[0] is the initial state
  bool converged = false;
  std::vector<TheoryFirm> final_firms;
};

namespace detail {

inline double mpl_at(const TheoryFirm& f, double L) {
  return f.beta * f.A * std::pow(f.K, f.alpha) * std::pow(L, f.beta - 1.0);
}

struct Extremes {
  std::size_t lo = 0;  // lowest marginal product: donor
  std::size_t hi = 0;  // highest: recipient
  double spread = 0.0;
};

inline Extremes find_extremes(const std::vector<TheoryFirm>& firms) {
  Extremes e;
  double vlo = mpl_at(firms[0], firms[0].L), vhi = vlo;
  for (std::size_t i = 1; i < firms.size(); ++i) {
    double v = mpl_at(firms[i], firms[i].L);
    if (v < vlo || (v == vlo && firms[i].id < firms[e.lo].id)) {
      vlo = v;
      e.lo = i;
    }
    if (v > vhi || (v == vhi && firms[i].id < firms[e.hi].id)) {
      vhi = v;
      e.hi = i;
    }
  }
  e.spread = (vhi - vlo) / vlo;
  return e;
}

inline ReallocationStep snapshot(const std::vector<TheoryFirm>& firms, const MarketContext& m,
                                 std::size_t iteration, double spread) {
  ReallocationStep s;
  s.iteration = iteration;
  s.max_spread = spread;
  for (const auto& f : firms) {
    s.total_output += output(f);
    s.total_labor += f.L;
    s.total_profit += profit(f, m);
  }
  return s;
}

}  // namespace detail

/// Moves labor from the firm with the lowest marginal labor productivity to the
/// one with the highest until the relative spread of marginal products falls
/// to `tol`. Total labor is conserved; L never drops below L_min. In adaptive
/// mode a step that would reverse the pair's ordering is halved until it does
/// not, so every accepted move raises total output.
inline ReallocationTrace simulate_reallocation(std::vector<TheoryFirm> firms, const MarketContext& m,
                                               const SimulationOptions& opt = {}) {
  if (firms.size() < 2) throw InsufficientDataError("reallocation needs at least 2 firms");
  if (!(opt.tol > 0.0)) throw ConfigError("tolerance must be positive");
  validate(m);
  double total_L = 0.0;
  for (const auto& f : firms) {
    validate(f);
    total_L += f.L;
  }
  const double max_step =
      opt.step.delta_L > 0.0 ? opt.step.delta_L : 0.25 * total_L / static_cast<double>(firms.size());
  double step = max_step;

  ReallocationTrace trace;
  auto ext = detail::find_extremes(firms);
  trace.steps.push_back(detail::snapshot(firms, m, 0, ext.spread));

  for (std::size_t iter = 1; iter <= opt.max_iter; ++iter) {
    if (ext.spread <= opt.tol) {
      trace.converged = true;
      break;
    }
    TheoryFirm& donor = firms[ext.lo];
    TheoryFirm& recipient = firms[ext.hi];
    double room = donor.L - opt.L_min;
    if (!(room > 0.0)) break;
    double delta = std::min(step, room);
    if (opt.step.kind == StepRule::Kind::adaptive) {
      int halvings = 0;
      while (detail::mpl_at(donor, donor.L - delta) > detail::mpl_at(recipient, recipient.L + delta)) {
        delta *= 0.5;
        if (++halvings > 200) break;
      }
      step = std::min(2.0 * delta, max_step);
    }
    donor.L = delta >= room ? opt.L_min : donor.L - delta;
    recipient.L += delta;

    ext = detail::find_extremes(firms);
    auto snap = detail::snapshot(firms, m, iter, ext.spread);
    snap.mover_from = donor.id;
    snap.mover_to = recipient.id;
    snap.delta_L = delta;
    trace.steps.push_back(std::move(snap));
  }
  if (!trace.converged && ext.spread <= opt.tol) trace.converged = true;
  trace.final_firms = std::move(firms);
  return trace;
}

}  // namespace labprod::equilibrium
