#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "labprod/error.hpp"
#include "labprod/record.hpp"

namespace labprod {

enum class ValueBasis {
  gross_margin,             // revenue - cogs
  added_value_labor_share,  // gross margin / (1 - labor share)
  added_value_components,   // five-term income-side sum
};

inline std::string_view to_string(ValueBasis b) {
  switch (b) {
    case ValueBasis::gross_margin: return "gm";
    case ValueBasis::added_value_labor_share: return "av-share";
    case ValueBasis::added_value_components: return "av-components";
  }
  return "";
}

inline std::optional<ValueBasis> parse_value_basis(std::string_view s) {
  if (s == "gm" || s == "gross_margin") return ValueBasis::gross_margin;
  if (s == "av-share" || s == "added_value_labor_share") return ValueBasis::added_value_labor_share;
  if (s == "av-components" || s == "added_value_components") return ValueBasis::added_value_components;
  return std::nullopt;
}

struct MacroEntry {
  std::optional<double> labor_share;
  std::optional<double> gdp;
  std::optional<double> exchange_rate;  // target currency per source unit
};

/// Macro-economic quantities keyed by (country, year). A default entry, when
/// set, answers lookups with no specific entry.
class MacroContext {
 public:
  void set(const std::string& country, int year, const MacroEntry& e) {
    validate(e);
    entries_[{Country(country).code(), year}] = e;
  }
  void set_default(const MacroEntry& e) {
    validate(e);
    default_ = e;
  }

  double labor_share(const Country& c, int year) const {
    auto v = lookup(c, year, &MacroEntry::labor_share);
    if (!v) throw ContextError("no labor_share for " + key_text(c, year));
    return *v;
  }
  double gdp(const Country& c, int year) const {
    auto v = lookup(c, year, &MacroEntry::gdp);
    if (!v) throw ContextError("no gdp for " + key_text(c, year));
    return *v;
  }
  double exchange_rate(const Country& c, int year) const {
    auto v = lookup(c, year, &MacroEntry::exchange_rate);
    if (!v) throw ContextError("no exchange_rate for " + key_text(c, year));
    return *v;
  }
  bool has_gdp(const Country& c, int year) const {
    return lookup(c, year, &MacroEntry::gdp).has_value();
  }

  const std::map<std::pair<std::string, int>, MacroEntry>& entries() const { return entries_; }

 private:
  static void validate(const MacroEntry& e) {
    if (e.labor_share && !(*e.labor_share >= 0.0 && *e.labor_share < 1.0)) {
      throw ContextError("labor_share must lie in [0, 1)");
    }
    if (e.gdp && !(*e.gdp > 0.0)) throw ContextError("gdp must be positive");
    if (e.exchange_rate && !(*e.exchange_rate > 0.0)) {
      throw ContextError("exchange_rate must be positive");
    }
  }

  std::optional<double> lookup(const Country& c, int year,
                               std::optional<double> MacroEntry::*member) const {
    auto it = entries_.find({c.code(), year});
    if (it != entries_.end() && (it->second.*member)) return it->second.*member;
    if (default_ && ((*default_).*member)) return (*default_).*member;
    return std::nullopt;
  }

  static std::string key_text(const Country& c, int year) {
    return "(" + (c.code().empty() ? std::string("<none>") : c.code()) + ", " +
           std::to_string(year) + ")";
  }

  std::map<std::pair<std::string, int>, MacroEntry> entries_;
  std::optional<MacroEntry> default_;
};

inline double gross_margin(const FirmRecord& r) { return r.revenue - r.cogs; }

inline double added_value_from_share(double gross_margin, double labor_share) {
  if (!(labor_share < 1.0)) throw DegenerateShareError("labor_share >= 1 leaves no added value");
  if (labor_share < 0.0) throw DegenerateShareError("negative labor_share");
  return gross_margin / (1.0 - labor_share);
}

inline double added_value_components(const FirmRecord& r) {
  auto need = [&](const std::optional<double>& v, const char* name) {
    if (!v) throw IncompleteRecordError(r.firm_id + "/" + std::to_string(r.year) + ": " + name + " absent");
    return *v;
  };
  // Fixed summation order keeps results bit-stable.
  double sum = need(r.ordinary_income, "ordinary_income");
  sum += need(r.total_labor_cost, "total_labor_cost");
  sum += need(r.financial_expense, "financial_expense");
  sum += need(r.tax_public_charge, "tax_public_charge");
  sum += need(r.depreciation, "depreciation");
  return sum;
}

enum class AddedValueBasis { labor_share, components };

inline double added_value(const FirmRecord& r, AddedValueBasis basis, const MacroContext& ctx) {
  if (basis == AddedValueBasis::components) return added_value_components(r);
  return added_value_from_share(gross_margin(r), ctx.labor_share(r.country, r.year));
}

/// Numerator of the labor-productivity ratio for the chosen basis.
inline double value_for_basis(const FirmRecord& r, ValueBasis basis, const MacroContext& ctx) {
  switch (basis) {
    case ValueBasis::gross_margin: return gross_margin(r);
    case ValueBasis::added_value_labor_share: return added_value(r, AddedValueBasis::labor_share, ctx);
    case ValueBasis::added_value_components: return added_value(r, AddedValueBasis::components, ctx);
  }
  return 0.0;
}

struct ProductivityMeasure {
  ValueBasis basis = ValueBasis::gross_margin;
  double value = 0.0;  // per worker
  std::int64_t workers = 0;
};

inline ProductivityMeasure labor_productivity(const FirmRecord& r, ValueBasis basis,
                                              const MacroContext& ctx) {
  if (r.workers <= 0) {
    throw ZeroWorkersError(r.firm_id + "/" + std::to_string(r.year) + ": zero workers");
  }
  return {basis, value_for_basis(r, basis, ctx) / static_cast<double>(r.workers), r.workers};
}

// How several firms collapse to one productivity figure.
enum class AggregateMode { pooled, mean };

struct Aggregate {
  double total_value = 0.0;
  double total_workers = 0.0;
  double productivity = 0.0;
  std::size_t firms = 0;
};

namespace detail {

class Accumulator {
 public:
  explicit Accumulator(AggregateMode mode) : mode_(mode) {}
  void add(double value, std::int64_t workers) {
    double w = static_cast<double>(workers);
    agg_.total_value += value;
    agg_.total_workers += w;
    ratio_sum_ += value / w;
    ++agg_.firms;
  }
  bool empty() const { return agg_.firms == 0; }
  Aggregate finish() const {
    Aggregate out = agg_;
    out.productivity = mode_ == AggregateMode::pooled
                           ? agg_.total_value / agg_.total_workers
                           : ratio_sum_ / static_cast<double>(agg_.firms);
    return out;
  }

 private:
  AggregateMode mode_;
  Aggregate agg_;
  double ratio_sum_ = 0.0;
};

}  // namespace detail

/// Productivity of the whole dataset as one figure. Zero-worker records are
/// excluded; returns nullopt when nothing remains.
inline std::optional<Aggregate> aggregate_productivity(const Dataset& d, ValueBasis basis,
                                                       const MacroContext& ctx,
                                                       AggregateMode mode = AggregateMode::pooled) {
  detail::Accumulator acc(mode);
  for (const auto& r : d.records) {
    if (r.workers <= 0) continue;
    acc.add(value_for_basis(r, basis, ctx), r.workers);
  }
  if (acc.empty()) return std::nullopt;
  return acc.finish();
}

/// Per-sector productivity. Pooled mode treats each sector as one firm
/// (sum of values over sum of workers). Zero-worker records are excluded and
/// sectors left empty are omitted.
inline std::map<std::string, Aggregate> aggregate_by_sector(const Dataset& d, ValueBasis basis,
                                                           const MacroContext& ctx,
                                                           AggregateMode mode = AggregateMode::pooled) {
  std::map<std::string, detail::Accumulator> acc;
  for (const auto& r : d.records) {
    if (r.workers <= 0) continue;
    acc.try_emplace(r.sector, mode).first->second.add(value_for_basis(r, basis, ctx), r.workers);
  }
  std::map<std::string, Aggregate> out;
  for (const auto& [sector, a] : acc) out.emplace(sector, a.finish());
  return out;
}

/// Pooled productivity per (year, sector class); records without a class are
/// skipped.
inline std::map<std::pair<int, SectorClass>, Aggregate> productivity_by_class_series(
    const Dataset& d, ValueBasis basis, const MacroContext& ctx,
    AggregateMode mode = AggregateMode::pooled) {
  std::map<std::pair<int, SectorClass>, detail::Accumulator> acc;
  for (const auto& r : d.records) {
    if (r.workers <= 0 || !r.sector_class) continue;
    acc.try_emplace({r.year, *r.sector_class}, mode)
        .first->second.add(value_for_basis(r, basis, ctx), r.workers);
  }
  std::map<std::pair<int, SectorClass>, Aggregate> out;
  for (const auto& [key, a] : acc) out.emplace(key, a.finish());
  return out;
}

/// Aggregated added value of one country-year divided by its GDP. Not clamped:
/// values above 1 indicate inconsistent inputs rather than an error.
inline double gdp_coverage(const Dataset& d, const MacroContext& ctx, const Country& country,
                           int year, AddedValueBasis basis = AddedValueBasis::labor_share) {
  double gdp = ctx.gdp(country, year);
  double total = 0.0;
  for (const auto& r : d.records) {
    if (r.year != year || r.country != country) continue;
    total += added_value(r, basis, ctx);
  }
  return total / gdp;
}

/// Solves share*mfg + (1 - share)*x = overall for x, the productivity ratio of
/// the non-manufacturing remainder.
inline double backout_nonmanufacturing_ratio(double share_mfg, double mfg_ratio,
                                             double overall_ratio) {
  if (share_mfg >= 1.0) throw DivisionDegeneracyError("manufacturing share of 1 leaves no remainder");
  if (share_mfg < 0.0) throw DivisionDegeneracyError("negative manufacturing share");
  return (overall_ratio - share_mfg * mfg_ratio) / (1.0 - share_mfg);
}

struct SweepPoint {
  std::int64_t threshold = 0;
  std::optional<Aggregate> aggregate;  // empty when no firm reaches the threshold
};

/// Productivity of firms with at least `t` workers, for each threshold t.
inline std::vector<SweepPoint> size_sweep(const Dataset& d, const std::vector<std::int64_t>& thresholds,
                                          ValueBasis basis, const MacroContext& ctx,
                                          AggregateMode mode = AggregateMode::pooled) {
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (thresholds[i] <= thresholds[i - 1]) throw ConfigError("thresholds must be strictly ascending");
  }
  // Values are computed once; each threshold re-scans in dataset order.
  std::vector<std::pair<double, std::int64_t>> rows;
  rows.reserve(d.size());
  for (const auto& r : d.records) {
    if (r.workers <= 0) continue;
    rows.emplace_back(value_for_basis(r, basis, ctx), r.workers);
  }
  std::vector<SweepPoint> out;
  out.reserve(thresholds.size());
  for (auto t : thresholds) {
    detail::Accumulator acc(mode);
    for (const auto& [value, workers] : rows) {
      if (workers >= t) acc.add(value, workers);
    }
    out.push_back({t, acc.empty() ? std::nullopt : std::optional<Aggregate>(acc.finish())});
  }
  return out;
}

/// Converts all money fields using the (country, year) exchange rates in ctx.
inline Dataset convert_currency(const Dataset& d, const MacroContext& ctx,
                                const std::string& target_unit) {
  Dataset out = d;
  out.currency_unit = target_unit;
  for (auto& r : out.records) {
    double rate = ctx.exchange_rate(r.country, r.year);
    auto scale = [rate](std::optional<double>& v) {
      if (v) *v *= rate;
    };
    r.revenue *= rate;
    r.cogs *= rate;
    scale(r.total_labor_cost);
    scale(r.capital);
    scale(r.ordinary_income);
    scale(r.financial_expense);
    scale(r.tax_public_charge);
    scale(r.depreciation);
  }
  return out;
}

}  // namespace labprod
