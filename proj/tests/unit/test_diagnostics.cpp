#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hmmcr/chain_io.hpp"
#include "hmmcr/diagnostics.hpp"
#include "test_support.hpp"

using namespace hmmcr;

namespace {

std::vector<double> ar1(std::size_t n, double rho, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  x[0] = standardNormal(rng) / std::sqrt(1 - rho * rho);
  for (std::size_t i = 1; i < n; ++i) x[i] = rho * x[i - 1] + standardNormal(rng);
  return x;
}

ChainOutput fakeChain(std::size_t n, std::size_t d, std::uint64_t seed, double runtime) {
  ChainOutput c;
  c.samples.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = ar1(n, 0.2 * static_cast<double>(j), seed + j);
    for (std::size_t i = 0; i < n; ++i) c.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    c.names.push_back("x[" + std::to_string(j + 1) + "]");
  }
  c.runtimeSeconds = runtime;
  c.seed = seed;
  c.scheme = SamplerScheme::allUnivariate(d);
  c.acceptanceRates.assign(d, 0.44);
  return c;
}

}  // namespace

TEST_CASE("ESS of iid normal draws") {
  const auto x = ar1(100000, 0.0, 1);
  const auto e = effectiveSampleSize(x);
  CHECK_FALSE(e.degenerate);
  CHECK(std::abs(e.ess - 1e5) < 0.15 * 1e5);
  CHECK(e.ess <= 1e5);
}

TEST_CASE("ESS of an AR(1) chain") {
  const double rho = 0.9;
  const auto x = ar1(100000, rho, 2);
  const double expected = 1e5 * (1 - rho) / (1 + rho);
  CHECK(std::abs(effectiveSampleSize(x).ess - expected) < 0.25 * expected);
}

TEST_CASE("constant, short and non-finite chains") {
  const std::vector<double> flat(500, 0.1);
  const auto e = effectiveSampleSize(flat);
  CHECK(e.degenerate);
  CHECK(e.ess == 0.0);
  CHECK(testing::throwsKind([] { (void)effectiveSampleSize(std::vector<double>(5, 1.0)); },
                            ErrorKind::ChainTooShort));
  auto bad = ar1(200, 0.5, 3);
  bad[17] = std::nan("");
  CHECK(testing::throwsKind([&] { (void)effectiveSampleSize(bad); }, ErrorKind::InvalidArgument));
}

TEST_CASE("ESS is affine invariant and reversal invariant") {
  const auto x = ar1(20000, 0.7, 4);
  const double base = effectiveSampleSize(x).ess;
  std::vector<double> y(x.size()), r(x.rbegin(), x.rend());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return -3.5 * v + 12.0; });
  CHECK(effectiveSampleSize(y).ess == doctest::Approx(base).epsilon(1e-8));
  CHECK(effectiveSampleSize(r).ess == doctest::Approx(base).epsilon(1e-8));
}

TEST_CASE("thinning does not increase ESS beyond noise") {
  int violations = 0;
  for (std::uint64_t seed = 10; seed < 30; ++seed) {
    const auto x = ar1(40000, 0.5, seed);
    std::vector<double> thin;
    for (std::size_t i = 0; i < x.size(); i += 4) thin.push_back(x[i]);
    violations += effectiveSampleSize(thin).ess > 1.1 * effectiveSampleSize(x).ess;
  }
  CHECK(violations <= 1);
}

TEST_CASE("ESPS arithmetic") {
  const auto a = efficiencyFromEss({"a", "b"}, {5000, 5000}, 10.0, StrategyLabel::Filtering);
  CHECK(a.minEsps == doctest::Approx(500));
  CHECK(a.meanEsps == doctest::Approx(500));
  const auto b = efficiencyFromEss({"a", "b"}, {100, 900}, 10.0, StrategyLabel::Filtering);
  CHECK(b.minEsps == doctest::Approx(10));
  CHECK(b.meanEsps == doctest::Approx(50));
  CHECK(b.maxEsps == doctest::Approx(90));
  CHECK(testing::throwsKind([] { (void)efficiencyFromEss({"a"}, {1.0}, 0.0, StrategyLabel::Filtering); },
                            ErrorKind::InvalidArgument));
}

TEST_CASE("report from a chain respects invariants") {
  const auto c = fakeChain(5000, 4, 5, 2.0);
  const auto r = efficiencyReport(c, 0.1, StrategyLabel::FilteringRR);
  CHECK(r.samplesUsed == 4500);
  for (double e : r.perParamEss) {
    CHECK(e >= 0.0);
    CHECK(e <= 4500.0);
  }
  CHECK(r.minEsps <= r.meanEsps);
  CHECK(r.meanEsps <= r.maxEsps);
  CHECK(r.perParamEsps[0] == doctest::Approx(r.perParamEss[0] / 2.0));
}

TEST_CASE("report regenerated from persisted chain is identical") {
  const auto c = fakeChain(3000, 3, 6, 0.123456789012345);
  std::stringstream csv, meta;
  writeChainCsv(csv, c);
  writeChainMeta(meta, c, {{"strategy", "Filtering"}});
  const auto back = readChain(csv, meta);
  const auto a = efficiencyReport(c, 0.1, StrategyLabel::Filtering);
  const auto b = efficiencyReport(back, 0.1, StrategyLabel::Filtering);
  CHECK(a.perParamEss == b.perParamEss);
  CHECK(a.perParamEsps == b.perParamEsps);
  CHECK(a.minEsps == b.minEsps);
  CHECK(a.runtimeSeconds == b.runtimeSeconds);
}

TEST_CASE("strategy comparison") {
  const auto latent = efficiencyFromEss({"phi", "p"}, {100, 200}, 1.0, StrategyLabel::LatentState);
  const auto filter = efficiencyFromEss({"phi", "p"}, {6000, 9000}, 1.0, StrategyLabel::Filtering);
  const EfficiencyReport both[] = {latent, filter};
  const auto table = compareStrategies(both);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[1].foldChange.value() == doctest::Approx(60.0));
  CHECK(table.rows[0].foldChange.value() == doctest::Approx(1.0));

  const EfficiencyReport one[] = {latent};
  CHECK(testing::throwsKind([&] { (void)compareStrategies(one); }, ErrorKind::InvalidArgument));
  const auto other = efficiencyFromEss({"phi", "q"}, {1, 2}, 1.0, StrategyLabel::Filtering);
  const EfficiencyReport mismatched[] = {latent, other};
  CHECK(testing::throwsKind([&] { (void)compareStrategies(mismatched); }, ErrorKind::DimensionMismatch));

  const EfficiencyReport noLatent[] = {filter, filter};
  CHECK_FALSE(compareStrategies(noLatent).rows[0].foldChange.has_value());

  std::ostringstream csv, text, fig;
  writeComparisonCsv(csv, table);
  writeComparisonText(text, table);
  writeFigureData(fig, table);
  CHECK(csv.str().find("fold_change") != std::string::npos);
  CHECK(csv.str().find("Filtering,6000,") != std::string::npos);
  CHECK(text.str().find("LatentState") != std::string::npos);
  CHECK(fig.str().rfind("strategy,min,mean\n", 0) == 0);
}

TEST_CASE("strategy labels") {
  for (auto l : {StrategyLabel::LatentState, StrategyLabel::Filtering, StrategyLabel::FilteringRR,
                 StrategyLabel::FilteringBlocking}) {
    CHECK((parseStrategyLabel(toString(l)) == l));
  }
  CHECK((parseStrategyLabel("filter-rr") == StrategyLabel::FilteringRR));
  CHECK(testing::throwsKind([] { (void)parseStrategyLabel("gibbs"); }, ErrorKind::InvalidArgument));
}

TEST_CASE("posterior summary") {
  const auto x = ar1(50000, 0.0, 7);
  const auto s = summarize(x);
  CHECK(std::abs(s.mean) < 0.02);
  CHECK(s.sd == doctest::Approx(1.0).epsilon(0.03));
  CHECK(s.mcse == doctest::Approx(s.sd / std::sqrt(s.ess)));
}
