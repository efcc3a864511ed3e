#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "labprod/pareto_fit.hpp"
#include "labprod/synth.hpp"

using namespace labprod;

namespace {

std::vector<double> exact_power_law(double mu, std::size_t n, double scale = 1.0) {
  std::vector<double> v;
  for (std::size_t r = 1; r <= n; ++r) v.push_back(scale * std::pow(static_cast<double>(r), -1.0 / mu));
  return v;
}

// Slope by textbook sums, for cross-checking the estimator.
double slope_by_sums(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(RankSize, Examples) {
  std::vector<double> v{3, 1, 2};
  auto s = rank_size(v);
  ASSERT_EQ(s.n(), 3u);
  EXPECT_EQ(s.points[0].rank, 1u);
  EXPECT_EQ(s.points[0].value, 3.0);
  EXPECT_EQ(s.points[2].value, 1.0);

  std::vector<double> one{5};
  auto single = rank_size(one);
  ASSERT_EQ(single.n(), 1u);
  EXPECT_EQ(single.points[0].value, 5.0);
}

TEST(RankSize, DropsNonPositive) {
  std::vector<double> v{-1, 4, 0, 2, std::nan("")};
  auto s = rank_size(v);
  EXPECT_EQ(s.n(), 2u);
  EXPECT_EQ(s.dropped, 3u);
  std::vector<double> none{0, -2};
  EXPECT_THROW(rank_size(none), EmptySeriesError);
}

TEST(RankSize, TiesKeepInputOrderAgainstBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> small(1, 6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(40);
    for (auto& x : v) x = small(rng);
    // Selection sort: repeatedly take the first occurrence of the current maximum.
    std::vector<std::pair<double, std::size_t>> expected;
    std::vector<bool> used(v.size(), false);
    for (std::size_t k = 0; k < v.size(); ++k) {
      std::size_t best = v.size();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!used[i] && (best == v.size() || v[i] > v[best])) best = i;
      }
      used[best] = true;
      expected.push_back({v[best], best});
    }
    auto s = rank_size(v);
    for (std::size_t k = 0; k < v.size(); ++k) {
      EXPECT_EQ(s.points[k].rank, k + 1);
      EXPECT_EQ(s.points[k].value, expected[k].first);
    }
  }
}

TEST(RankSize, InvariantsOnRandomInput) {
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> dist(0, 2);
  std::vector<double> v(1000);
  for (auto& x : v) x = dist(rng);
  auto s = rank_size(v);
  for (std::size_t k = 0; k < s.n(); ++k) {
    EXPECT_EQ(s.points[k].rank, k + 1);
    EXPECT_GT(s.points[k].value, 0.0);
    if (k) EXPECT_LE(s.points[k].value, s.points[k - 1].value);
  }
}

TEST(FitPareto, ExactPowerLawsAcrossIndices) {
  for (double mu : {0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0}) {
    for (std::size_t n : {100u, 1000u, 5000u}) {
      auto fit = fit_pareto(exact_power_law(mu, n));
      EXPECT_NEAR(fit.mu, mu, 1e-6) << mu << " " << n;
      EXPECT_NEAR(fit.r2, 1.0, 1e-12);
      EXPECT_EQ(fit.min_rank, 1u);
      EXPECT_EQ(fit.max_rank, n);
      EXPECT_EQ(fit.tail_fraction, 1.0);
    }
  }
}

TEST(FitPareto, Zipf) {
  std::vector<double> v;
  for (int r = 1; r <= 1000; ++r) v.push_back(1.0 / r);
  EXPECT_NEAR(fit_pareto(v).mu, 1.0, 1e-6);
}

TEST(FitPareto, ConstantSeriesIsDegenerate) {
  std::vector<double> v(20, 4.0);
  EXPECT_THROW(fit_pareto(v), ZeroVarianceError);
}

TEST(FitPareto, TooFewPoints) {
  std::vector<double> v{3, 2};
  EXPECT_THROW(fit_pareto(v), InsufficientDataError);
  auto s = rank_size(exact_power_law(2.0, 50));
  EXPECT_THROW(fit_pareto(s, TailSpec::rank_range(10, 11)), InsufficientDataError);
  EXPECT_THROW(fit_pareto(s, TailSpec::rank_range(10, 51)), InsufficientDataError);
}

TEST(FitPareto, MatchesTextbookSlope) {
  auto sample = synth::gen_pareto_sample(1.7, 2.0, 500, 19);
  auto s = rank_size(sample);
  std::vector<double> x, y;
  for (const auto& p : s.points) {
    x.push_back(std::log10(p.value));
    y.push_back(std::log10(static_cast<double>(p.rank)));
  }
  EXPECT_NEAR(fit_pareto(s).mu, -slope_by_sums(x, y), 1e-9);
}

TEST(FitPareto, ScaleInvariance) {
  auto sample = synth::gen_pareto_sample(1.3, 1.0, 2000, 4);
  auto base = fit_pareto(sample);
  for (double c : {1e-6, 0.5, 7.0, 1e9}) {
    std::vector<double> scaled;
    for (double x : sample) scaled.push_back(c * x);
    auto f = fit_pareto(scaled);
    EXPECT_NEAR(f.mu, base.mu, 1e-9 * base.mu);
    EXPECT_NEAR(f.r2, base.r2, 1e-9);
    EXPECT_NEAR(f.intercept, base.intercept + base.mu * std::log10(c), 1e-8);
  }
}

TEST(FitPareto, DroppingLargestPointOnExactData) {
  for (double mu : {0.5, 2.0, 5.0}) {
    auto s = rank_size(exact_power_law(mu, 1000));
    auto all = fit_pareto(s, TailSpec::whole());
    auto rest = fit_pareto(s, TailSpec::rank_range(2, 1000));
    EXPECT_LT(std::abs(all.mu - rest.mu), 1e-6);
  }
}

TEST(FitPareto, WholeEqualsExplicitFullRange) {
  auto s = rank_size(synth::gen_pareto_sample(2.5, 1.0, 777, 8));
  auto a = fit_pareto(s, TailSpec::whole());
  auto b = fit_pareto(s, TailSpec::rank_range(1, s.n()));
  EXPECT_EQ(a.mu, b.mu);
  EXPECT_EQ(a.se_mu, b.se_mu);
  EXPECT_EQ(a.r2, b.r2);
}

TEST(FitPareto, FractionTailSelection) {
  auto s = rank_size(exact_power_law(2.0, 1000));
  auto f = fit_pareto(s, TailSpec::top_fraction(0.1));
  EXPECT_EQ(f.max_rank, 100u);
  EXPECT_DOUBLE_EQ(f.tail_fraction, 0.1);
  auto small = rank_size(exact_power_law(2.0, 50));
  EXPECT_EQ(fit_pareto(small, TailSpec::top_fraction(0.1)).max_rank, 10u);
  auto tiny = rank_size(exact_power_law(2.0, 6));
  EXPECT_EQ(fit_pareto(tiny, TailSpec::top_fraction(0.1)).max_rank, 6u);
}

TEST(TailSpec, Parse) {
  EXPECT_EQ(TailSpec::parse("whole").kind, TailSpec::Kind::whole);
  auto f = TailSpec::parse("frac:0.25");
  EXPECT_EQ(f.kind, TailSpec::Kind::fraction);
  EXPECT_EQ(f.fraction, 0.25);
  auto r = TailSpec::parse("ranks:2..500");
  EXPECT_EQ(r.min_rank, 2u);
  EXPECT_EQ(r.max_rank, 500u);
  EXPECT_EQ(r.describe(), "ranks:2..500");
  for (auto bad : {"frac:0", "frac:1.5", "ranks:5..2", "ranks:0..4", "tail", "ranks:3"}) {
    EXPECT_THROW(TailSpec::parse(bad), ConfigError) << bad;
  }
}

TEST(FitPareto, StochasticRecovery) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto sample = synth::gen_pareto_sample(2.0, 1.0, 100000, seed);
    EXPECT_NEAR(fit_pareto(sample).mu, 2.0, 0.04) << seed;
  }
}

TEST(Hill, RecoversIndex) {
  auto s = rank_size(synth::gen_pareto_sample(1.5, 1.0, 50000, 2));
  EXPECT_NEAR(hill_estimate(s, 5000), 1.5, 0.08);
  EXPECT_THROW(hill_estimate(s, 0), InsufficientDataError);
  EXPECT_THROW(hill_estimate(s, s.n()), InsufficientDataError);
}

TEST(ParetoTimeSeries, SingleYearMatchesDirectFit) {
  auto d = synth::gen_pareto_productivity_firms(1.8, 100.0, 2000, 5, 3, 2001);
  auto series = pareto_time_series(split_by_year(d), ParetoLevel::firm, ValueBasis::gross_margin, {},
                                   TailSpec::top_fraction(0.1));
  ASSERT_EQ(series.size(), 1u);
  auto direct = fit_pareto(productivity_values(d, ParetoLevel::firm, ValueBasis::gross_margin, {}),
                           TailSpec::top_fraction(0.1));
  EXPECT_EQ(series.at(2001).fit->mu, direct.mu);
  EXPECT_EQ(series.at(2001).fit->r2, direct.r2);
}

TEST(ParetoTimeSeries, ReproducesIndexStep) {
  Dataset all;
  all.currency_unit = "kJPY";
  for (int year = 1990; year <= 2003; ++year) {
    double mu = year < 1995 ? 2.0 : 1.5;
    auto d = synth::gen_pareto_productivity_firms(mu, 100.0, 10000, 5, 1000 + year, year);
    all.records.insert(all.records.end(), d.records.begin(), d.records.end());
  }
  auto series = pareto_time_series(split_by_year(all), ParetoLevel::firm, ValueBasis::gross_margin, {},
                                   TailSpec::whole());
  ASSERT_EQ(series.size(), 14u);
  for (const auto& [year, yf] : series) {
    ASSERT_TRUE(yf.fit.has_value());
    EXPECT_NEAR(yf.fit->mu, year < 1995 ? 2.0 : 1.5, 0.1) << year;
  }
}

TEST(ParetoTimeSeries, BadYearIsAbsentNotFatal) {
  auto good = synth::gen_pareto_productivity_firms(2.0, 10.0, 500, 1, 5, 2000);
  auto bad = synth::gen_pareto_productivity_firms(2.0, 10.0, 2, 1, 6, 2001);
  Dataset all = good;
  all.records.insert(all.records.end(), bad.records.begin(), bad.records.end());
  auto series = pareto_time_series(split_by_year(all), ParetoLevel::firm, ValueBasis::gross_margin, {},
                                   TailSpec::whole());
  ASSERT_EQ(series.size(), 2u);
  EXPECT_TRUE(series.at(2000).fit.has_value());
  EXPECT_FALSE(series.at(2001).fit.has_value());
  EXPECT_FALSE(series.at(2001).error.empty());
}

TEST(ParetoLevels, FirmIndexExceedsSectorIndex) {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    synth::SectorEconomySpec spec;
    spec.seed = seed;
    auto d = synth::gen_sector_economy(spec);
    auto firm = fit_pareto(productivity_values(d, ParetoLevel::firm, ValueBasis::gross_margin, {}),
                           TailSpec::top_fraction(0.1));
    auto sector = fit_pareto(productivity_values(d, ParetoLevel::sector, ValueBasis::gross_margin, {}),
                             TailSpec::whole());
    EXPECT_GT(firm.mu, sector.mu) << seed;
  }
}

TEST(ParetoLevels, SectorValuesArePooledRatios) {
  synth::SectorEconomySpec spec;
  spec.n_sectors = 4;
  spec.firms_per_sector = 3;
  auto d = synth::gen_sector_economy(spec);
  auto values = productivity_values(d, ParetoLevel::sector, ValueBasis::gross_margin, {});
  ASSERT_EQ(values.size(), 4u);
  std::map<std::string, std::pair<double, double>> sums;
  for (const auto& r : d.records) {
    sums[r.sector].first += r.revenue - r.cogs;
    sums[r.sector].second += static_cast<double>(r.workers);
  }
  std::vector<double> expected;
  for (const auto& [s, p] : sums) expected.push_back(p.first / p.second);
  std::sort(values.begin(), values.end());
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(values[i], expected[i], 1e-12 * expected[i]);
}
