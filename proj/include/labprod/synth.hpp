#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "labprod/error.hpp"
#include "labprod/record.hpp"

namespace labprod::synth {

/// SplitMix64 (Steele, Lea & Flood). Fully specified integer arithmetic, so
/// streams are identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1] with 53-bit resolution; 1 is reachable, 0 is not.
  double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  // Standard normal by Box-Muller (cosine branch only).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t x) { return SplitMix64(x).next(); }

// Independent stream for item `index` under `seed`; adding items never
// changes the draws of earlier ones.
inline SplitMix64 stream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) {
  return SplitMix64(mix64(seed ^ mix64(index + 1) ^ mix64(salt + 0x5eed)));
}

// Inverse CDF of the Pareto law P(X > x) = (xmin / x)^mu.
inline double pareto_quantile(double u, double mu, double xmin) {
  return xmin * std::pow(u, -1.0 / mu);
}

struct SizeDistribution {
  enum class Kind { pareto, lognormal, fixed };
  Kind kind = Kind::lognormal;
  double mu = 1.5;     // pareto index
  double xmin = 10.0;  // pareto lower bound
  double m = 4.0;      // lognormal: mean of ln L
  double s = 1.0;      // lognormal: sd of ln L
  double L = 100.0;    // fixed

  static SizeDistribution pareto(double mu, double xmin) {
    SizeDistribution d;
    d.kind = Kind::pareto;
    d.mu = mu;
    d.xmin = xmin;
    return d;
  }
  static SizeDistribution lognormal(double m, double s) {
    SizeDistribution d;
    d.kind = Kind::lognormal;
    d.m = m;
    d.s = s;
    return d;
  }
  static SizeDistribution fixed(double L) {
    SizeDistribution d;
    d.kind = Kind::fixed;
    d.L = L;
    return d;
  }
};

/// K = c * L^gamma * 10^(sigma * z). A non-zero sigma keeps log K and log L
/// from being exactly collinear.
struct CapitalRule {
  double c = 50.0;
  double gamma = 0.9;
  double sigma = 0.3;
};

struct SynthSpec {
  std::size_t n = 1000;
  double logA = 0.0;
  double alpha = 0.4;
  double beta = 0.6;
  double noise_sigma = 0.0;  // sd of additive noise on log10 Y
  SizeDistribution size_dist;
  CapitalRule capital_rule;
  double labor_share = 0.5;
  std::uint64_t seed = 1;

  int year = 2003;
  std::string country = "JP";
  std::string sector = "synthetic";
  std::size_t n_sectors = 1;  // firms are assigned round-robin when > 1
  SectorClass sector_class = SectorClass::manufacturing;
  std::string id_prefix = "F";
  std::string currency_unit = "kJPY";
};

inline void validate(const SynthSpec& s) {
  if (s.n < 1) throw ConfigError("synth: n must be at least 1");
  if (!(s.alpha > 0.0 && s.alpha < 1.0) || !(s.beta > 0.0 && s.beta < 1.0)) {
    throw ConfigError("synth: alpha and beta must lie in (0, 1)");
  }
  if (!(s.noise_sigma >= 0.0)) throw ConfigError("synth: noise_sigma must be non-negative");
  if (!(s.labor_share >= 0.0 && s.labor_share < 1.0)) throw ConfigError("synth: labor_share must lie in [0, 1)");
  if (s.n_sectors < 1) throw ConfigError("synth: n_sectors must be at least 1");
  if (!(s.capital_rule.c > 0.0) || !(s.capital_rule.sigma >= 0.0)) {
    throw ConfigError("synth: capital rule needs c > 0 and sigma >= 0");
  }
  const auto& d = s.size_dist;
  switch (d.kind) {
    case SizeDistribution::Kind::pareto:
      if (!(d.mu > 0.0 && d.xmin > 0.0)) throw ConfigError("synth: pareto size needs mu, xmin > 0");
      break;
    case SizeDistribution::Kind::lognormal:
      if (!(d.s >= 0.0)) throw ConfigError("synth: lognormal size needs s >= 0");
      break;
    case SizeDistribution::Kind::fixed:
      if (!(d.L >= 1.0)) throw ConfigError("synth: fixed size needs L >= 1");
      break;
  }
}

namespace detail {

struct Draws {
  double u_size;
  double z_size;
  double z_capital;
  double z_noise;
};

// Every firm consumes the same draws in the same order whatever the spec.
inline Draws draws_for(std::uint64_t seed, std::size_t index) {
  auto rng = stream(seed, index);
  Draws d{};
  d.u_size = rng.uniform();
  d.z_size = rng.normal();
  d.z_capital = rng.normal();
  d.z_noise = rng.normal();
  return d;
}

inline std::int64_t draw_workers(const SizeDistribution& dist, const Draws& d) {
  double L = 0.0;
  switch (dist.kind) {
    case SizeDistribution::Kind::pareto: L = pareto_quantile(d.u_size, dist.mu, dist.xmin); break;
    case SizeDistribution::Kind::lognormal: L = std::exp(dist.m + dist.s * d.z_size); break;
    case SizeDistribution::Kind::fixed: L = dist.L; break;
  }
  return std::max<std::int64_t>(1, std::llround(std::min(L, 1e15)));
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Books value added Y so that gross margin == Y exactly, the labor-share form
// of added value equals Y + labor cost, and the five income components sum to
// the same added value.
inline FirmRecord make_record(const SynthSpec& spec, std::size_t index, std::int64_t workers,
                              double capital, double y) {
  FirmRecord r;
  r.firm_id = spec.id_prefix + std::to_string(index);
  r.year = spec.year;
  r.country = Country(spec.country);
  r.sector = spec.n_sectors > 1 ? spec.sector + "-" + std::to_string(index % spec.n_sectors) : spec.sector;
  r.sector_class = spec.sector_class;
  r.revenue = 2.0 * y;
  r.cogs = y;
  r.workers = workers;
  r.capital = capital;
  double labor = y * spec.labor_share / (1.0 - spec.labor_share);
  r.total_labor_cost = labor;
  r.depreciation = 0.2 * y;
  r.financial_expense = 0.1 * y;
  r.tax_public_charge = 0.1 * y;
  r.ordinary_income = 0.6 * y;
  return r;
}

inline Dataset generate(const SynthSpec& spec, double gradient) {
  validate(spec);
  std::vector<Draws> draws(spec.n);
  std::vector<std::int64_t> workers(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    draws[i] = draws_for(spec.seed, i);
    workers[i] = draw_workers(spec.size_dist, draws[i]);
  }
  double l_median = 1.0;
  if (gradient != 0.0) {
    l_median = median(std::vector<double>(workers.begin(), workers.end()));
  }

  Dataset out;
  out.currency_unit = spec.currency_unit;
  out.provenance.push_back("synth:seed=" + std::to_string(spec.seed));
  out.records.reserve(spec.n);
  const auto& cap = spec.capital_rule;
  for (std::size_t i = 0; i < spec.n; ++i) {
    double L = static_cast<double>(workers[i]);
    double capital = cap.c * std::pow(L, cap.gamma) * std::pow(10.0, cap.sigma * draws[i].z_capital);
    double log_y = spec.logA + spec.alpha * std::log10(capital) + spec.beta * std::log10(L) +
                   spec.noise_sigma * draws[i].z_noise;
    double y = std::pow(10.0, log_y);
    if (gradient != 0.0) y *= std::pow(L / l_median, gradient);
    out.records.push_back(make_record(spec, i, workers[i], capital, y));
  }
  return out;
}

}  // namespace detail

/// Cobb-Douglas firm population with known (logA, alpha, beta).
inline Dataset gen_cobb_douglas_firms(const SynthSpec& spec) { return detail::generate(spec, 0.0); }

/// As gen_cobb_douglas_firms, with each firm's output (hence productivity)
/// scaled by (L / median L)^gradient.
inline Dataset gen_size_graded_economy(const SynthSpec& base, double gradient) {
  return detail::generate(base, gradient);
}

/// n draws from the Pareto law with index mu and lower bound xmin.
inline std::vector<double> gen_pareto_sample(double mu, double xmin, std::size_t n, std::uint64_t seed) {
  if (!(mu > 0.0 && xmin > 0.0)) throw ConfigError("pareto sample needs mu > 0 and xmin > 0");
  if (n < 1) throw ConfigError("pareto sample needs n >= 1");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = pareto_quantile(stream(seed, i).uniform(), mu, xmin);
  return out;
}

/// Economy of sectors whose productivity levels are log-normal (sd of ln level
/// sector_sigma) and whose firms scatter above their sector level by an
/// independent Pareto(firm_mu) factor. Every firm has the same head count, so pooled sector productivity
/// is the sector level times the mean firm factor.
struct SectorEconomySpec {
  std::size_t n_sectors = 50;
  std::size_t firms_per_sector = 200;
  double sector_sigma = 1.0;
  double firm_mu = 2.0;
  double base_productivity = 1000.0;
  std::int64_t workers = 10;
  std::uint64_t seed = 7;
  int year = 2003;
  std::string country = "JP";
  std::string currency_unit = "kJPY";
};

inline Dataset gen_sector_economy(const SectorEconomySpec& spec) {
  if (spec.n_sectors < 1 || spec.firms_per_sector < 1 || spec.workers < 1) {
    throw ConfigError("sector economy needs positive counts");
  }
  if (!(spec.sector_sigma >= 0.0 && spec.firm_mu > 0.0 && spec.base_productivity > 0.0)) {
    throw ConfigError("sector economy needs sector_sigma >= 0, firm_mu > 0 and positive base productivity");
  }
  SynthSpec book;
  book.labor_share = 0.5;
  book.year = spec.year;
  book.country = spec.country;
  Dataset out;
  out.currency_unit = spec.currency_unit;
  out.provenance.push_back("synth-sectors:seed=" + std::to_string(spec.seed));
  std::size_t index = 0;
  for (std::size_t s = 0; s < spec.n_sectors; ++s) {
    double level = spec.base_productivity * std::exp(spec.sector_sigma * stream(spec.seed, s, 1).normal());
    for (std::size_t f = 0; f < spec.firms_per_sector; ++f, ++index) {
      double factor = pareto_quantile(stream(spec.seed, index, 2).uniform(), spec.firm_mu, 1.0);
      double y = level * factor * static_cast<double>(spec.workers);
      auto r = detail::make_record(book, index, spec.workers, y, y);
      r.sector = "S" + std::to_string(s);
      r.sector_class = s % 2 ? SectorClass::non_manufacturing : SectorClass::manufacturing;
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

/// Firms whose gross-margin productivity is Pareto(mu, xmin), one cross-section
/// per call.
inline Dataset gen_pareto_productivity_firms(double mu, double xmin, std::size_t n, std::int64_t workers,
                                             std::uint64_t seed, int year, const std::string& country = "JP") {
  if (!(mu > 0.0 && xmin > 0.0) || n < 1 || workers < 1) {
    throw ConfigError("pareto firms need mu, xmin > 0 and positive counts");
  }
  Dataset d;
  d.currency_unit = "kJPY";
  d.provenance.push_back("synth-pareto:seed=" + std::to_string(seed));
  SynthSpec book;
  book.year = year;
  book.country = country;
  for (std::size_t i = 0; i < n; ++i) {
    double y = pareto_quantile(stream(seed, i, 2).uniform(), mu, xmin) * static_cast<double>(workers);
    auto r = detail::make_record(book, i, workers, y, y);
    d.records.push_back(std::move(r));
  }
  return d;
}

}  // namespace labprod::synth
