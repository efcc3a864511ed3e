#include <gtest/gtest.h>

#include <cmath>

#include "labprod/production_fit.hpp"
#include "labprod/synth.hpp"

using namespace labprod;

namespace {

synth::SynthSpec cd_spec(std::size_t n, double alpha, double beta, double sigma, std::uint64_t seed) {
  synth::SynthSpec s;
  s.n = n;
  s.logA = 0.0;
  s.alpha = alpha;
  s.beta = beta;
  s.noise_sigma = sigma;
  s.seed = seed;
  s.size_dist = synth::SizeDistribution::lognormal(4.0, 1.2);
  return s;
}

LogDesign design_from(const std::vector<std::array<double, 3>>& ykl) {
  Dataset d;
  for (std::size_t i = 0; i < ykl.size(); ++i) {
    FirmRecord r;
    r.firm_id = "f" + std::to_string(i);
    r.revenue = ykl[i][0] > 0 ? ykl[i][0] : 0.0;
    r.cogs = ykl[i][0] > 0 ? 0.0 : -ykl[i][0];
    r.capital = ykl[i][1];
    r.workers = static_cast<std::int64_t>(ykl[i][2]);
    d.records.push_back(r);
  }
  return log_design(d, ValueBasis::gross_margin, {});
}

}  // namespace

TEST(LogDesign, PowersOfTenAndSignExclusion) {
  auto d = design_from({{100, 10, 10}, {-5, 10, 10}, {1000, 100, 10}, {10, 10, 100}});
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.excluded, 1u);
  EXPECT_EQ(d.responses[0], 2.0);
  EXPECT_EQ(d.regressors[0][0], 1.0);
  EXPECT_EQ(d.regressors[0][1], 1.0);
}

TEST(LogDesign, TooFewUsableRecords) {
  EXPECT_THROW(design_from({{100, 10, 10}, {-5, 10, 10}, {1000, 100, 10}}), InsufficientDataError);
}

TEST(LogDesign, NoiselessResponsesSatisfyModel) {
  auto d = synth::gen_cobb_douglas_firms(cd_spec(200, 0.4, 0.6, 0.0, 1));
  auto design = log_design(d, ValueBasis::gross_margin, {});
  for (std::size_t i = 0; i < design.size(); ++i) {
    double model = 0.4 * design.regressors[i][0] + 0.6 * design.regressors[i][1];
    EXPECT_NEAR(design.responses[i], model, 1e-12);
  }
}

TEST(FitCobbDouglas, ExactRecoveryOnNoiselessData) {
  auto d = synth::gen_cobb_douglas_firms(cd_spec(1000, 0.4, 0.6, 0.0, 42));
  auto fit = fit_cobb_douglas(d, ValueBasis::gross_margin, {});
  EXPECT_NEAR(fit.logA, 0.0, 1e-10);
  EXPECT_NEAR(fit.alpha, 0.4, 1e-10);
  EXPECT_NEAR(fit.beta, 0.6, 1e-10);
  EXPECT_EQ(fit.r2, 1.0);
  EXPECT_EQ(fit.n_used, 1000u);
  EXPECT_FALSE(fit.used_qr);
}

TEST(FitCobbDouglas, IdenticalFirmsAreCollinear) {
  auto d = design_from({{100, 10, 10}, {100, 10, 10}, {100, 10, 10}, {100, 10, 10}});
  try {
    fit_cobb_douglas(d);
    FAIL();
  } catch (const CollinearityError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("log10 K"), std::string::npos);
    EXPECT_NE(msg.find("log10 L"), std::string::npos);
  }
}

TEST(FitCobbDouglas, ProportionalCapitalIsCollinear) {
  std::vector<std::array<double, 3>> rows;
  for (int L = 1; L <= 20; ++L) rows.push_back({std::pow(L, 0.7) * 3.0, 5.0 * L, static_cast<double>(L)});
  try {
    fit_cobb_douglas(design_from(rows));
    FAIL();
  } catch (const CollinearityError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("log10 K"), std::string::npos);
    EXPECT_NE(msg.find("log10 L"), std::string::npos);
  }
}

TEST(FitCobbDouglas, NoisyRecoveryNearReportedLaborElasticity) {
  auto d = synth::gen_cobb_douglas_firms(cd_spec(10000, 0.4, 0.6, 0.1, 7));
  auto fit = fit_cobb_douglas(d, ValueBasis::gross_margin, {});
  EXPECT_NEAR(fit.beta, 0.6, 0.02);
  EXPECT_NEAR(fit.alpha, 0.4, 0.02);
  EXPECT_GT(fit.se_beta, 0.0);
  EXPECT_LT(fit.se_beta, 0.01);
}

TEST(FitCobbDouglas, ScaleEquivariance) {
  auto d = synth::gen_cobb_douglas_firms(cd_spec(500, 0.3, 0.5, 0.2, 5));
  auto base = fit_cobb_douglas(d, ValueBasis::gross_margin, {});
  for (double c : {0.001, 3.0, 1e6}) {
    Dataset scaledY = d, scaledK = d;
    for (auto& r : scaledY.records) {
      r.revenue *= c;
      r.cogs *= c;
    }
    for (auto& r : scaledK.records) *r.capital *= c;
    auto fy = fit_cobb_douglas(scaledY, ValueBasis::gross_margin, {});
    EXPECT_NEAR(fy.logA, base.logA + std::log10(c), 1e-9);
    EXPECT_NEAR(fy.alpha, base.alpha, 1e-9);
    EXPECT_NEAR(fy.beta, base.beta, 1e-9);
    EXPECT_NEAR(fy.r2, base.r2, 1e-9);
    auto fk = fit_cobb_douglas(scaledK, ValueBasis::gross_margin, {});
    EXPECT_NEAR(fk.logA, base.logA - base.alpha * std::log10(c), 1e-9);
    EXPECT_NEAR(fk.alpha, base.alpha, 1e-9);
    EXPECT_NEAR(fk.beta, base.beta, 1e-9);
  }
}

TEST(FitCobbDouglas, RefitOnOwnPredictionsIsIdempotent) {
  auto d = synth::gen_cobb_douglas_firms(cd_spec(400, 0.3, 0.6, 0.15, 9));
  auto design = log_design(d, ValueBasis::gross_margin, {});
  auto fit = fit_cobb_douglas(design);
  LogDesign predicted = design;
  for (std::size_t i = 0; i < design.size(); ++i) {
    predicted.responses[i] = fit.logA + fit.alpha * design.regressors[i][0] + fit.beta * design.regressors[i][1];
  }
  auto refit = fit_cobb_douglas(predicted);
  EXPECT_NEAR(refit.logA, fit.logA, 1e-10);
  EXPECT_NEAR(refit.alpha, fit.alpha, 1e-10);
  EXPECT_NEAR(refit.beta, fit.beta, 1e-10);
  EXPECT_EQ(refit.r2, 1.0);
}

TEST(FitCobbDouglas, IllConditionedDesignUsesQr) {
  // Regressors nearly collinear: log K = log L + tiny wiggle.
  LogDesign design;
  for (int i = 0; i < 50; ++i) {
    double lk = 1.0 + 0.01 * i;
    double ll = lk + 1e-6 * std::sin(i * 1.3);
    design.regressors.push_back({lk, ll});
    design.responses.push_back(0.5 + 0.3 * lk + 0.6 * ll);
  }
  auto fit = fit_cobb_douglas(design);
  EXPECT_TRUE(fit.used_qr);
  EXPECT_NEAR(fit.alpha, 0.3, 1e-5);
  EXPECT_NEAR(fit.beta, 0.6, 1e-5);
}

TEST(FitCobbDouglas, ThreeRecordsGiveInfiniteStandardErrors) {
  auto d = design_from({{100, 10, 10}, {1000, 100, 10}, {10, 10, 100}});
  auto fit = fit_cobb_douglas(d);
  EXPECT_TRUE(std::isinf(fit.se_alpha));
  EXPECT_EQ(fit.n_used, 3u);
}

TEST(ClassifyReturns, Regimes) {
  EXPECT_EQ(classify_returns(0.4, 0.6, 0.05).classification, ReturnsClass::constant);
  EXPECT_EQ(classify_returns(0.25, 0.6, 0.05).classification, ReturnsClass::decreasing);
  EXPECT_EQ(classify_returns(0.5, 0.6, 0.05).classification, ReturnsClass::increasing);
  auto r = classify_returns(0.42, 0.6, 0.05);
  EXPECT_EQ(r.classification, ReturnsClass::constant);
  EXPECT_DOUBLE_EQ(r.sum_elasticities, 1.02);
  EXPECT_EQ(r.tolerance_used, 0.05);
  EXPECT_THROW(classify_returns(0.4, 0.6, 0.0), ConfigError);
}

TEST(CapitalRatio, Formula) {
  EXPECT_DOUBLE_EQ(productivity_from_capital_ratio(0.0, 0.5, 4.0), 2.0);
  EXPECT_DOUBLE_EQ(productivity_from_capital_ratio(0.3, 0.0, 123.0), std::pow(10.0, 0.3));
  EXPECT_THROW(productivity_from_capital_ratio(0.0, 0.5, 0.0), ConfigError);
}

TEST(CapitalRatio, MatchesProductionFunctionUnderConstantReturns) {
  auto d = synth::gen_cobb_douglas_firms(cd_spec(300, 0.35, 0.65, 0.0, 4));
  for (const auto& r : d.records) {
    double L = static_cast<double>(r.workers);
    double actual = gross_margin(r) / L;
    double predicted = productivity_from_capital_ratio(0.0, 0.35, *r.capital / L);
    EXPECT_NEAR(predicted, actual, 1e-12 * actual);
  }
}

TEST(FitByStratum, SeparatesStrataAndReportsFailures) {
  auto mfg = synth::gen_cobb_douglas_firms(cd_spec(300, 0.4, 0.6, 0.0, 1));
  auto spec = cd_spec(300, 0.25, 0.6, 0.0, 2);
  spec.sector_class = SectorClass::non_manufacturing;
  spec.id_prefix = "S";
  auto non = synth::gen_cobb_douglas_firms(spec);
  Dataset all = mfg;
  all.records.insert(all.records.end(), non.records.begin(), non.records.end());
  FirmRecord lonely;
  lonely.firm_id = "US1";
  lonely.country = Country("US");
  lonely.year = 2003;
  lonely.revenue = 10;
  lonely.workers = 1;
  lonely.capital = 1;
  all.records.push_back(lonely);

  auto fits = fit_by_stratum(all, ValueBasis::gross_margin, {}, false);
  ASSERT_EQ(fits.size(), 3u);
  EXPECT_EQ(fits[0].key.country, "JP");
  EXPECT_NEAR(fits[0].fit->alpha, 0.4, 1e-10);
  EXPECT_EQ(classify_returns(*fits[0].fit).classification, ReturnsClass::constant);
  EXPECT_NEAR(fits[1].fit->alpha, 0.25, 1e-10);
  EXPECT_EQ(classify_returns(*fits[1].fit).classification, ReturnsClass::decreasing);
  EXPECT_EQ(fits[2].key.country, "US");
  EXPECT_FALSE(fits[2].fit.has_value());
  EXPECT_FALSE(fits[2].error.empty());
}
