#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labprod/csv.hpp"
#include "labprod/error.hpp"
#include "labprod/linalg.hpp"
#include "labprod/measures.hpp"
#include "labprod/record.hpp"

namespace labprod {

struct RankPoint {
  std::size_t rank = 0;
  double value = 0.0;

  friend bool operator==(const RankPoint&, const RankPoint&) = default;
};

/// Values in descending order with ranks 1..n.
struct RankSizeSeries {
  std::vector<RankPoint> points;
  std::size_t dropped = 0;  // non-positive or non-finite inputs

  std::size_t n() const noexcept { return points.size(); }
};

inline RankSizeSeries rank_size(std::span<const double> values) {
  std::vector<std::size_t> idx;
  RankSizeSeries out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 0.0 && std::isfinite(values[i])) {
      idx.push_back(i);
    } else {
      ++out.dropped;
    }
  }
  if (idx.empty()) throw EmptySeriesError("no positive values to rank");
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] > values[b]; });
  out.points.reserve(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out.points.push_back({k + 1, values[idx[k]]});
  return out;
}

/// Which part of the rank-size series the power law is fitted to.
struct TailSpec {
  enum class Kind { fraction, ranks, whole };
  Kind kind = Kind::whole;
  double fraction = 0.1;
  std::size_t min_points = 10;  // floor for fraction mode
  std::size_t min_rank = 1;
  std::size_t max_rank = 0;

  static TailSpec whole() { return {}; }
  static TailSpec top_fraction(double f, std::size_t min_points = 10) {
    TailSpec t;
    t.kind = Kind::fraction;
    t.fraction = f;
    t.min_points = min_points;
    return t;
  }
  static TailSpec rank_range(std::size_t lo, std::size_t hi) {
    TailSpec t;
    t.kind = Kind::ranks;
    t.min_rank = lo;
    t.max_rank = hi;
    return t;
  }

  // Parses "whole", "frac:0.1" or "ranks:2..500".
  static TailSpec parse(std::string_view s) {
    if (s == "whole") return whole();
    if (s.starts_with("frac:")) {
      auto f = csv::parse_double(s.substr(5));
      if (!f || !(*f > 0.0 && *f <= 1.0)) throw ConfigError("tail fraction must lie in (0, 1]: " + std::string(s));
      return top_fraction(*f);
    }
    if (s.starts_with("ranks:")) {
      auto body = s.substr(6);
      auto dots = body.find("..");
      if (dots != std::string_view::npos) {
        auto lo = csv::parse_int(body.substr(0, dots));
        auto hi = csv::parse_int(body.substr(dots + 2));
        if (lo && hi && *lo >= 1 && *hi >= *lo) {
          return rank_range(static_cast<std::size_t>(*lo), static_cast<std::size_t>(*hi));
        }
      }
    }
    throw ConfigError("bad tail spec '" + std::string(s) + "' (expected whole, frac:F or ranks:A..B)");
  }

  std::string describe() const {
    switch (kind) {
      case Kind::whole: return "whole";
      case Kind::fraction: return "frac:" + csv::format_sig15(fraction);
      case Kind::ranks: return "ranks:" + std::to_string(min_rank) + ".." + std::to_string(max_rank);
    }
    return "";
  }
};

struct ParetoFit {
  double mu = 0.0;
  double se_mu = 0.0;
  double r2 = 0.0;
  double intercept = 0.0;  // log10 rank = intercept - mu * log10 value
  std::size_t min_rank = 0;
  std::size_t max_rank = 0;
  double tail_fraction = 0.0;  // points used / n
  std::size_t n_total = 0;
};

inline std::pair<std::size_t, std::size_t> select_ranks(const RankSizeSeries& s, const TailSpec& tail) {
  const std::size_t n = s.n();
  switch (tail.kind) {
    case TailSpec::Kind::whole:
      return {1, n};
    case TailSpec::Kind::fraction: {
      auto k = static_cast<std::size_t>(std::ceil(tail.fraction * static_cast<double>(n) - 1e-9));
      k = std::min(std::max(k, tail.min_points), n);
      return {1, k};
    }
    case TailSpec::Kind::ranks:
      if (tail.min_rank < 1 || tail.max_rank > n || tail.min_rank > tail.max_rank) {
        throw InsufficientDataError("rank range " + tail.describe() + " outside 1.." + std::to_string(n));
      }
      return {tail.min_rank, tail.max_rank};
  }
  return {1, n};
}

/// Least squares of log10 rank on log10 value over the selected ranks; the
/// Pareto index is minus the slope.
inline ParetoFit fit_pareto(const RankSizeSeries& s, const TailSpec& tail = TailSpec::whole()) {
  auto [lo, hi] = select_ranks(s, tail);
  std::size_t m = hi - lo + 1;
  if (m < 3) throw InsufficientDataError("power-law fit needs at least 3 points, got " + std::to_string(m));
  std::vector<double> lv(m), lr(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& p = s.points[lo - 1 + k];
    lv[k] = std::log10(p.value);
    lr[k] = std::log10(static_cast<double>(p.rank));
  }
  if (s.points[lo - 1].value == s.points[hi - 1].value) {
    throw ZeroVarianceError("all selected values are equal");
  }
  auto line = linalg::fit_line(lv, lr);
  ParetoFit fit;
  fit.mu = -line.slope;
  if (!(fit.mu > 0.0)) throw ZeroVarianceError("non-negative rank-size slope");
  fit.se_mu = line.se_slope;
  fit.r2 = line.r2;
  fit.intercept = line.intercept;
  fit.min_rank = lo;
  fit.max_rank = hi;
  fit.n_total = s.n();
  fit.tail_fraction = static_cast<double>(m) / static_cast<double>(s.n());
  return fit;
}

inline ParetoFit fit_pareto(std::span<const double> values, const TailSpec& tail = TailSpec::whole()) {
  return fit_pareto(rank_size(values), tail);
}

/// Hill maximum-likelihood estimate of the index from the k largest values,
/// using the (k+1)-th as threshold. Cross-check only.
inline double hill_estimate(const RankSizeSeries& s, std::size_t k) {
  if (k < 1 || k >= s.n()) throw InsufficientDataError("Hill estimate needs 1 <= k < n");
  double threshold = s.points[k].value;
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(s.points[i].value / threshold);
  if (!(sum > 0.0)) throw ZeroVarianceError("top values equal the threshold");
  return static_cast<double>(k) / sum;
}

enum class ParetoLevel { firm, sector };

/// Productivity values to rank: one per firm (zero-worker records skipped) or
/// one pooled figure per sector.
inline std::vector<double> productivity_values(const Dataset& d, ParetoLevel level, ValueBasis basis,
                                               const MacroContext& ctx,
                                               AggregateMode mode = AggregateMode::pooled) {
  std::vector<double> values;
  if (level == ParetoLevel::firm) {
    values.reserve(d.size());
    for (const auto& r : d.records) {
      if (r.workers <= 0) continue;
      values.push_back(labor_productivity(r, basis, ctx).value);
    }
  } else {
    for (const auto& [sector, agg] : aggregate_by_sector(d, basis, ctx, mode)) {
      values.push_back(agg.productivity);
    }
  }
  return values;
}

inline std::map<int, Dataset> split_by_year(const Dataset& d) {
  std::map<int, Dataset> out;
  for (const auto& r : d.records) {
    auto& bucket = out[r.year];
    if (bucket.empty()) {
      bucket.currency_unit = d.currency_unit;
      bucket.provenance = d.provenance;
    }
    bucket.records.push_back(r);
  }
  return out;
}

struct YearParetoFit {
  std::optional<ParetoFit> fit;  // absent when the year could not be fitted
  std::string error;
  std::size_t dropped = 0;
};

/// One Pareto fit per year. A year that fails is reported absent; the series
/// is never interpolated or aborted.
inline std::map<int, YearParetoFit> pareto_time_series(const std::map<int, Dataset>& by_year,
                                                       ParetoLevel level, ValueBasis basis,
                                                       const MacroContext& ctx, const TailSpec& tail,
                                                       AggregateMode mode = AggregateMode::pooled) {
  std::map<int, YearParetoFit> out;
  for (const auto& [year, data] : by_year) {
    YearParetoFit yf;
    try {
      auto series = rank_size(productivity_values(data, level, basis, ctx, mode));
      yf.dropped = series.dropped;
      yf.fit = fit_pareto(series, tail);
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::config) throw;
      yf.error = e.what();
    }
    out.emplace(year, std::move(yf));
  }
  return out;
}

}  // namespace labprod
