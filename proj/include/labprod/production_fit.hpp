#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "labprod/error.hpp"
#include "labprod/linalg.hpp"
#include "labprod/measures.hpp"
#include "labprod/record.hpp"

namespace labprod {

/// Log-linear Cobb-Douglas design: log10 Y = logA + alpha log10 K + beta log10 L.
struct LogDesign {
  std::vector<double> responses;                 // log10 Y
  std::vector<std::array<double, 2>> regressors;  // (log10 K, log10 L)
  std::size_t excluded = 0;                      // records with Y, K or L <= 0 (or K absent)

  std::size_t size() const { return responses.size(); }
};

inline LogDesign log_design(const Dataset& d, ValueBasis basis, const MacroContext& ctx) {
  LogDesign out;
  for (const auto& r : d.records) {
    double y = value_for_basis(r, basis, ctx);
    if (!(y > 0.0) || !r.capital || !(*r.capital > 0.0) || r.workers <= 0) {
      ++out.excluded;
      continue;
    }
    out.responses.push_back(std::log10(y));
    out.regressors.push_back({std::log10(*r.capital), std::log10(static_cast<double>(r.workers))});
  }
  if (out.size() < 3) {
    throw InsufficientDataError(std::to_string(out.size()) +
                                " usable records with positive Y, K, L; need at least 3");
  }
  return out;
}

struct ProductionFit {
  double logA = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double se_logA = 0.0;
  double se_alpha = 0.0;
  double se_beta = 0.0;
  double r2 = 0.0;
  std::size_t n_used = 0;
  std::size_t excluded = 0;
  bool used_qr = false;

  double A() const { return std::pow(10.0, logA); }
};

inline ProductionFit fit_cobb_douglas(const LogDesign& design) {
  if (design.size() < 3) throw InsufficientDataError("need at least 3 records");
  linalg::Matrix x(design.size(), 3);
  for (std::size_t i = 0; i < design.size(); ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = design.regressors[i][0];
    x(i, 2) = design.regressors[i][1];
  }
  auto res = linalg::ols(x, design.responses, {"intercept", "log10 K", "log10 L"});
  ProductionFit fit;
  fit.logA = res.coef[0];
  fit.alpha = res.coef[1];
  fit.beta = res.coef[2];
  fit.se_logA = res.se[0];
  fit.se_alpha = res.se[1];
  fit.se_beta = res.se[2];
  fit.r2 = res.r2;
  fit.n_used = design.size();
  fit.excluded = design.excluded;
  fit.used_qr = res.used_qr;
  return fit;
}

inline ProductionFit fit_cobb_douglas(const Dataset& d, ValueBasis basis, const MacroContext& ctx) {
  return fit_cobb_douglas(log_design(d, basis, ctx));
}

enum class ReturnsClass { constant, decreasing, increasing };

inline std::string_view to_string(ReturnsClass c) {
  switch (c) {
    case ReturnsClass::constant: return "constant";
    case ReturnsClass::decreasing: return "decreasing";
    case ReturnsClass::increasing: return "increasing";
  }
  return "";
}

struct ReturnsToScale {
  ReturnsClass classification = ReturnsClass::constant;
  double sum_elasticities = 0.0;
  double tolerance_used = 0.0;
};

inline constexpr double kDefaultReturnsTolerance = 0.05;

inline ReturnsToScale classify_returns(double alpha, double beta, double tol = kDefaultReturnsTolerance) {
  if (!(tol > 0.0)) throw ConfigError("returns-to-scale tolerance must be positive");
  double sum = alpha + beta;
  ReturnsClass c = ReturnsClass::constant;
  if (sum < 1.0 - tol) {
    c = ReturnsClass::decreasing;
  } else if (sum > 1.0 + tol) {
    c = ReturnsClass::increasing;
  }
  return {c, sum, tol};
}

inline ReturnsToScale classify_returns(const ProductionFit& fit, double tol = kDefaultReturnsTolerance) {
  return classify_returns(fit.alpha, fit.beta, tol);
}

// Y/L = A (K/L)^alpha, valid under constant returns to scale.
inline double productivity_from_capital_ratio(double logA, double alpha, double k_over_l) {
  if (!(k_over_l > 0.0)) throw ConfigError("capital-equipment ratio must be positive");
  return std::pow(10.0, logA) * std::pow(k_over_l, alpha);
}

struct StratumKey {
  std::string country;
  std::optional<SectorClass> sector_class;
  std::optional<int> year;  // nullopt when years are pooled

  friend auto operator<=>(const StratumKey&, const StratumKey&) = default;
};

struct StratumFit {
  StratumKey key;
  std::optional<ProductionFit> fit;
  std::string error;  // set when fit is absent
  ErrorCategory error_category = ErrorCategory::data;
};

/// One fit per country x sector class (x year unless pooled). A stratum that
/// cannot be fitted carries its error message instead of aborting the rest.
inline std::vector<StratumFit> fit_by_stratum(const Dataset& d, ValueBasis basis, const MacroContext& ctx,
                                              bool pool_years) {
  std::map<StratumKey, Dataset> strata;
  for (const auto& r : d.records) {
    StratumKey key{r.country.code(), r.sector_class,
                   pool_years ? std::nullopt : std::optional<int>(r.year)};
    auto& bucket = strata[key];
    bucket.currency_unit = d.currency_unit;
    bucket.records.push_back(r);
  }
  std::vector<StratumFit> out;
  for (const auto& [key, subset] : strata) {
    StratumFit sf{key, std::nullopt, {}};
    try {
      sf.fit = fit_cobb_douglas(subset, basis, ctx);
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::config) throw;
      sf.error = e.what();
      sf.error_category = e.category();
    }
    out.push_back(std::move(sf));
  }
  return out;
}

}  // namespace labprod
