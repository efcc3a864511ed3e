#pragma once

// JSON readers for the tool's configuration files: column schema, macro
// context, synthetic-population spec and reallocation scenario.

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "labprod/equilibrium.hpp"
#include "labprod/error.hpp"
#include "labprod/ingest.hpp"
#include "labprod/measures.hpp"
#include "labprod/synth.hpp"

namespace labprod::config {

using nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

namespace detail {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline char delimiter_from(const std::string& s) {
  if (s == "," || s == "comma") return ',';
  if (s == "\t" || s == "tab") return '\t';
  if (s == ";" || s == "semicolon") return ';';
  throw ConfigError("unsupported delimiter '" + s + "'");
}

inline MacroEntry entry_from(const json& j) {
  return {get_opt(j, "labor_share"), get_opt(j, "gdp"), get_opt(j, "exchange_rate")};
}

}  // namespace detail

/// {"columns": {"revenue": "Sales", ...}, "delimiter": "tab", "min_year": 1990,
///  "max_year": 2010, "currency_unit": "kJPY", "provenance": "vendor feed"}
inline Schema schema_from_json(const json& j) {
  Schema s;
  if (j.contains("columns")) {
    for (const auto& [field, header] : j.at("columns").items()) {
      bool known = false;
      for (auto c : kCanonicalColumns) known = known || c == field;
      if (!known) throw ConfigError("schema maps unknown field '" + field + "'");
      s.columns[field] = header.get<std::string>();
    }
  }
  s.delimiter = detail::delimiter_from(detail::get_or<std::string>(j, "delimiter", ","));
  s.min_year = detail::get_or(j, "min_year", s.min_year);
  s.max_year = detail::get_or(j, "max_year", s.max_year);
  s.currency_unit = detail::get_or<std::string>(j, "currency_unit", "");
  s.provenance = detail::get_or<std::string>(j, "provenance", "");
  if (s.min_year > s.max_year) throw ConfigError("schema: min_year exceeds max_year");
  return s;
}

/// {"default": {"labor_share": 0.6}, "entries": [{"country": "JP", "year": 2003,
///  "labor_share": 0.62, "gdp": 5.0e11, "exchange_rate": 0.0087}]}
inline MacroContext macro_from_json(const json& j) {
  MacroContext ctx;
  if (j.contains("default")) ctx.set_default(detail::entry_from(j.at("default")));
  if (j.contains("entries")) {
    for (const auto& e : j.at("entries")) {
      if (!e.contains("country") || !e.contains("year")) {
        throw ConfigError("macro entry needs country and year");
      }
      ctx.set(e.at("country").get<std::string>(), e.at("year").get<int>(), detail::entry_from(e));
    }
  }
  return ctx;
}

struct SynthJob {
  enum class Kind { cobb_douglas, size_graded, sector_economy };
  Kind kind = Kind::cobb_douglas;
  synth::SynthSpec spec;
  double gradient = 0.0;
  synth::SectorEconomySpec sectors;
  std::vector<int> years;  // extra cross-sections; seed is offset by year
};

inline synth::SynthSpec synth_spec_from_json(const json& j) {
  synth::SynthSpec s;
  s.n = detail::get_or<std::size_t>(j, "n", s.n);
  s.logA = detail::get_or(j, "logA", s.logA);
  s.alpha = detail::get_or(j, "alpha", s.alpha);
  s.beta = detail::get_or(j, "beta", s.beta);
  s.noise_sigma = detail::get_or(j, "noise_sigma", s.noise_sigma);
  s.labor_share = detail::get_or(j, "labor_share", s.labor_share);
  s.seed = detail::get_or<std::uint64_t>(j, "seed", s.seed);
  s.year = detail::get_or(j, "year", s.year);
  s.country = detail::get_or(j, "country", s.country);
  s.sector = detail::get_or(j, "sector", s.sector);
  s.n_sectors = detail::get_or<std::size_t>(j, "n_sectors", s.n_sectors);
  s.id_prefix = detail::get_or(j, "id_prefix", s.id_prefix);
  s.currency_unit = detail::get_or(j, "currency_unit", s.currency_unit);
  if (j.contains("sector_class")) {
    auto c = parse_sector_class(j.at("sector_class").get<std::string>());
    if (!c) throw ConfigError("unknown sector_class in synth spec");
    s.sector_class = *c;
  }
  if (j.contains("size_dist")) {
    const auto& d = j.at("size_dist");
    auto kind = detail::get_or<std::string>(d, "kind", "lognormal");
    if (kind == "pareto") {
      s.size_dist = synth::SizeDistribution::pareto(detail::get_or(d, "mu", 1.5), detail::get_or(d, "xmin", 10.0));
    } else if (kind == "lognormal") {
      s.size_dist = synth::SizeDistribution::lognormal(detail::get_or(d, "m", 4.0), detail::get_or(d, "s", 1.0));
    } else if (kind == "fixed") {
      s.size_dist = synth::SizeDistribution::fixed(detail::get_or(d, "L", 100.0));
    } else {
      throw ConfigError("unknown size_dist kind '" + kind + "'");
    }
  }
  if (j.contains("capital_rule")) {
    const auto& c = j.at("capital_rule");
    s.capital_rule.c = detail::get_or(c, "c", s.capital_rule.c);
    s.capital_rule.gamma = detail::get_or(c, "gamma", s.capital_rule.gamma);
    s.capital_rule.sigma = detail::get_or(c, "sigma", s.capital_rule.sigma);
  }
  synth::validate(s);
  return s;
}

inline SynthJob synth_job_from_json(const json& j) {
  SynthJob job;
  auto kind = detail::get_or<std::string>(j, "kind", "cobb_douglas");
  if (kind == "cobb_douglas") {
    job.kind = SynthJob::Kind::cobb_douglas;
  } else if (kind == "size_graded") {
    job.kind = SynthJob::Kind::size_graded;
    job.gradient = detail::get_or(j, "gradient", 0.0);
  } else if (kind == "sector_economy") {
    job.kind = SynthJob::Kind::sector_economy;
    auto& s = job.sectors;
    s.n_sectors = detail::get_or<std::size_t>(j, "n_sectors", s.n_sectors);
    s.firms_per_sector = detail::get_or<std::size_t>(j, "firms_per_sector", s.firms_per_sector);
    s.sector_sigma = detail::get_or(j, "sector_sigma", s.sector_sigma);
    s.firm_mu = detail::get_or(j, "firm_mu", s.firm_mu);
    s.base_productivity = detail::get_or(j, "base_productivity", s.base_productivity);
    s.workers = detail::get_or<std::int64_t>(j, "workers", s.workers);
    s.seed = detail::get_or<std::uint64_t>(j, "seed", s.seed);
    s.year = detail::get_or(j, "year", s.year);
    s.country = detail::get_or(j, "country", s.country);
    s.currency_unit = detail::get_or(j, "currency_unit", s.currency_unit);
  } else {
    throw ConfigError("unknown synth kind '" + kind + "'");
  }
  if (job.kind != SynthJob::Kind::sector_economy) job.spec = synth_spec_from_json(j);
  job.years = detail::get_or<std::vector<int>>(j, "years", {});
  return job;
}

/// Generates the job's dataset. When `years` is set, one cross-section per
/// year is produced with seed + year and concatenated in year order.
inline Dataset run_synth_job(const SynthJob& job) {
  auto one = [&](std::optional<int> year) {
    switch (job.kind) {
      case SynthJob::Kind::sector_economy: {
        auto s = job.sectors;
        if (year) {
          s.year = *year;
          s.seed += static_cast<std::uint64_t>(*year);
        }
        return synth::gen_sector_economy(s);
      }
      default: {
        auto s = job.spec;
        if (year) {
          s.year = *year;
          s.seed += static_cast<std::uint64_t>(*year);
          s.id_prefix += std::to_string(*year) + "-";
        }
        return job.kind == SynthJob::Kind::size_graded ? synth::gen_size_graded_economy(s, job.gradient)
                                                      : synth::gen_cobb_douglas_firms(s);
      }
    }
  };
  if (job.years.empty()) return one(std::nullopt);
  Dataset out;
  for (int y : job.years) {
    auto part = one(y);
    out.currency_unit = part.currency_unit;
    out.provenance.insert(out.provenance.end(), part.provenance.begin(), part.provenance.end());
    out.records.insert(out.records.end(), part.records.begin(), part.records.end());
  }
  return out;
}

struct Scenario {
  std::vector<equilibrium::TheoryFirm> firms;
  equilibrium::MarketContext market;
  equilibrium::SimulationOptions options;
};

/// {"firms": [{"id": "a", "A": 1, "alpha": 0.4, "beta": 0.6, "K": 1, "L0": 2}],
///  "market": {"p": 1, "r": 0.05, "w": 0.5},
///  "step_rule": "adaptive", "delta_L": 0.5, "tol": 1e-8, "max_iter": 100000}
inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  if (!j.contains("firms") || !j.at("firms").is_array()) throw ConfigError("scenario needs a firms array");
  std::size_t index = 0;
  for (const auto& f : j.at("firms")) {
    equilibrium::TheoryFirm t;
    t.id = detail::get_or<std::string>(f, "id", "firm" + std::to_string(index));
    t.A = detail::get_or(f, "A", t.A);
    t.alpha = detail::get_or(f, "alpha", t.alpha);
    t.beta = detail::get_or(f, "beta", t.beta);
    t.K = detail::get_or(f, "K", t.K);
    t.L = detail::get_or(f, "L0", detail::get_or(f, "L", t.L));
    equilibrium::validate(t);
    s.firms.push_back(t);
    ++index;
  }
  if (j.contains("market")) {
    const auto& m = j.at("market");
    s.market.p = detail::get_or(m, "p", s.market.p);
    s.market.r = detail::get_or(m, "r", s.market.r);
    s.market.w = detail::get_or(m, "w", s.market.w);
  }
  equilibrium::validate(s.market);
  auto rule = detail::get_or<std::string>(j, "step_rule", "adaptive");
  if (rule == "adaptive") {
    s.options.step.kind = equilibrium::StepRule::Kind::adaptive;
  } else if (rule == "fixed") {
    s.options.step.kind = equilibrium::StepRule::Kind::fixed;
  } else {
    throw ConfigError("unknown step_rule '" + rule + "'");
  }
  s.options.step.delta_L = detail::get_or(j, "delta_L", 0.0);
  s.options.tol = detail::get_or(j, "tol", s.options.tol);
  s.options.max_iter = detail::get_or<std::size_t>(j, "max_iter", s.options.max_iter);
  s.options.L_min = detail::get_or(j, "L_min", s.options.L_min);
  return s;
}

}  // namespace labprod::config
