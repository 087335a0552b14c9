#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hmmcr/diagnostics.hpp"
#include "hmmcr/model.hpp"
#include "hmmcr/samplers.hpp"
#include "hmmcr/simulate.hpp"
#include "test_support.hpp"

using namespace hmmcr;

namespace {

const LogDensityFn kStdNormal = [](std::span<const double> x) { return -0.5 * x[0] * x[0]; };
const LogDensityFn kUniform = [](std::span<const double> x) {
  return (x[0] >= 0.0 && x[0] <= 1.0) ? 0.0 : -std::numeric_limits<double>::infinity();
};

// E[(1 - |e|)^+] for e ~ N(0, s^2): acceptance of a random walk on U(0,1).
double uniformOverlap(double s) {
  const int n = 20000;
  double total = 0.0;
  const double h = 1.0 / n;
  for (int i = 0; i <= n; ++i) {
    const double e = i * h;
    const double f = (1.0 - e) * std::exp(-0.5 * e * e / (s * s)) / (s * std::sqrt(2.0 * M_PI));
    total += (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * f;
  }
  return 2.0 * total * h / 3.0;
}

}  // namespace

TEST_CASE("zero proposal scale never moves and always accepts") {
  Rng rng(1);
  std::vector<double> x{0.3};
  UnivariateSampler s(0, 0.0);
  double cur = kStdNormal(x);
  for (int i = 0; i < 1000; ++i) cur = s.step(x, cur, kStdNormal, rng).logDensity;
  CHECK(x[0] == 0.3);
  CHECK(s.acceptanceRate() == 1.0);
}

TEST_CASE("uniform target: acceptance matches the analytic overlap") {
  for (double scale : {0.2, 0.5, 1.5}) {
    Rng rng(2);
    std::vector<double> x{0.5};
    double cur = 0.0;
    long acc = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += univariateRwStep(x, 0, scale, cur, kUniform, rng).accepted;
    const double rate = static_cast<double>(acc) / n;
    const double expected = uniformOverlap(scale);
    // Binomial SE inflated for the Markov dependence of accept indicators.
    const double se = std::sqrt(expected * (1 - expected) / n) * 3.0;
    CHECK(std::abs(rate - expected) < 3 * se);
  }
}

TEST_CASE("uniform target: KS statistic below the 1% critical value") {
  Rng rng(3);
  std::vector<double> x{0.5};
  std::vector<double> draws;
  const int n = 100000, thin = 10;
  for (int i = 0; i < n; ++i) {
    univariateRwStep(x, 0, 0.8, 0.0, kUniform, rng);
    if (i % thin == 0) draws.push_back(x[0]);
  }
  // KS assumes independent draws, so it is applied to the thinned chain.
  std::sort(draws.begin(), draws.end());
  double d = 0.0;
  const double m = static_cast<double>(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    d = std::max({d, std::abs((i + 1) / m - draws[i]), std::abs(draws[i] - i / m)});
  }
  CHECK(d < 1.628 / std::sqrt(m));
}

TEST_CASE("a one-element block moves exactly like the univariate step") {
  Rng a(4), b(4);
  std::vector<double> x{0.0}, y{0.0};
  const BlockProposal prop(Matrix::Identity(1, 1));
  const std::size_t idx[] = {0};
  double cx = 0.0, cy = 0.0;
  for (int i = 0; i < 2000; ++i) {
    cx = univariateRwStep(x, 0, 1.3, cx, kStdNormal, a).logDensity;
    cy = blockRwStep(y, idx, prop, 1.3, cy, kStdNormal, b).logDensity;
    REQUIRE(x[0] == y[0]);
  }
}

TEST_CASE("acceptance ratio is antisymmetric") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const double p = 10 * standardNormal(rng), q = 10 * standardNormal(rng);
    CHECK(logAcceptanceRatio(p, q) == -logAcceptanceRatio(q, p));
  }
  CHECK(logAcceptanceRatio(0.0, -std::numeric_limits<double>::infinity()) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("adaptation direction") {
  CHECK(adaptScale(1.0, 1.0, 0.44, 0) > 1.0);
  CHECK(adaptScale(1.0, 0.0, 0.44, 0) < 1.0);
  CHECK(adaptScale(1.0, 0.44, 0.44, 5) == 1.0);
  CHECK(adaptationWeight(10) < adaptationWeight(1));
}

TEST_CASE("univariate adaptation from a tiny scale reaches the target") {
  Rng rng(6);
  std::vector<double> x{0.0};
  UnivariateSampler s(0, 1e-3);
  const AdaptationSettings settings;
  double cur = 0.0;
  long late = 0, lateAcc = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto out = s.step(x, cur, kStdNormal, rng);
    cur = out.logDensity;
    s.afterIteration(settings);
    if (i >= 8000) {
      ++late;
      lateAcc += out.accepted;
    }
  }
  const double rate = static_cast<double>(lateAcc) / static_cast<double>(late);
  CHECK(std::abs(rate - 0.44) < 0.1);
  CHECK(s.scale() > 1.0);
}

TEST_CASE("block adaptation targets 0.234 on an isotropic Gaussian") {
  const std::size_t d = 5;
  Rng rng(7);
  std::vector<double> x(d, 0.0);
  std::vector<std::size_t> all(d);
  for (std::size_t j = 0; j < d; ++j) all[j] = j;
  BlockSampler s(all, Matrix::Identity(d, d) * 0.01);
  const LogDensityFn fn = [](std::span<const double> v) {
    double t = 0.0;
    for (double e : v) t -= 0.5 * e * e;
    return t;
  };
  const AdaptationSettings settings;
  double cur = fn(x);
  long late = 0, lateAcc = 0;
  for (int i = 0; i < 40000; ++i) {
    const auto out = s.step(x, cur, fn, rng);
    cur = out.logDensity;
    s.afterIteration(x, settings);
    if (i >= 30000) {
      ++late;
      lateAcc += out.accepted;
    }
  }
  CHECK(std::abs(static_cast<double>(lateAcc) / late - 0.234) < 0.05);
}

TEST_CASE("adapted covariance beats identity on a correlated Gaussian") {
  const double rho = 0.95;
  const LogDensityFn fn = [=](std::span<const double> v) {
    return -0.5 * (v[0] * v[0] - 2 * rho * v[0] * v[1] + v[1] * v[1]) / (1 - rho * rho);
  };
  auto run = [&](bool adapt, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x{0.0, 0.0};
    BlockSampler s({0, 1}, Matrix::Identity(2, 2));
    AdaptationSettings settings;
    settings.enabled = adapt;
    double cur = fn(x);
    std::vector<double> trace;
    for (int i = 0; i < 30000; ++i) {
      cur = s.step(x, cur, fn, rng).logDensity;
      s.afterIteration(x, settings);
      if (i >= 5000) trace.push_back(x[0]);
    }
    return effectiveSampleSize(trace).ess;
  };
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) wins += run(true, seed) > run(false, seed);
  CHECK(wins >= 4);
}

TEST_CASE("non-positive-definite covariance is rejected") {
  Matrix m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;
  CHECK(testing::throwsKind([&] { (void)BlockProposal(m); }, ErrorKind::NotPositiveDefinite));
  const auto diag = BlockProposal::diagonal(m);
  CHECK(diag.covariance()(0, 1) == 0.0);
  CHECK(diag.covariance()(1, 1) == 1.0);
}

TEST_CASE("block adaptation falls back to the diagonal when the window is degenerate") {
  // Target where one coordinate never moves: the empirical window covariance
  // is singular in that direction, so only the jitter keeps it PD.
  Rng rng(8);
  std::vector<double> x{0.0, 0.0};
  BlockSampler s({0, 1}, Matrix::Identity(2, 2));
  const LogDensityFn fn = [](std::span<const double> v) { return -0.5 * v[0] * v[0]; };
  double cur = fn(x);
  for (int i = 0; i < 2000; ++i) {
    cur = s.step(x, cur, fn, rng).logDensity;
    s.afterIteration(x, AdaptationSettings{});
  }
  CHECK(s.proposal().covariance().allFinite());
  CHECK(s.proposal().covariance()(0, 0) > 0.0);
}

TEST_CASE("latent conditional: deterministic emission gives a point mass") {
  const auto m = buildOrchidModel();
  std::vector<double> theta(19, 0.7);
  for (std::size_t j = 10; j < 19; ++j) theta[j] = 1.0;
  const auto data = parseDataset(std::string("10201000000\n"), 3);
  auto latents = initializeLatents(m, theta, data);
  const auto mats = m.matrices(theta, 11);
  const auto rows = m.toEmissionRows(data.histories[0]);
  const Vector c2 = latentConditional(mats, latents, rows, 0, 2);
  CHECK(c2(1) == doctest::Approx(1.0));
  Rng rng(9);
  for (int i = 0; i < 50; ++i) CHECK(latentGibbsStep(mats, latents, rows, 0, 4, rng) == 0);
}

TEST_CASE("latent conditional: uninformative emissions and uniform transitions") {
  HmmMatrices mats;
  mats.transitions = {Matrix::Constant(3, 3, 1.0 / 3.0)};
  mats.emissions = {Matrix::Constant(2, 3, 0.5)};
  const auto m = parseModelConfig(R"({"states": ["A", "B"], "transitions": true, "detection": "state"})");
  const auto data = parseDataset(std::string("1000\n"), 3);
  auto latents = LatentStateMatrix::forDataset(m, data);
  const ObservationHistory rows{{0, 1, 1, 1}, 0};
  const Vector c = latentConditional(mats, latents, rows, 0, 2);
  for (int x = 0; x < 3; ++x) CHECK(c(x) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("latent Gibbs frequencies match the enumerated conditional") {
  const auto m = parseModelConfig(R"({"states": ["A", "B"], "survival": "state", "transitions": true,
                                      "detection": "state"})");
  const std::vector<double> theta{0.8, 0.6, 1.0, 2.0, 0.5, 1.5, 0.7, 0.4};
  const auto data = parseDataset(std::string("10020\n"), 3);
  auto latents = initializeLatents(m, theta, data);
  const auto mats = m.matrices(theta, 5);
  const auto rows = m.toEmissionRows(data.histories[0]);
  const int t = 2;
  // Direct: T(x | prev) Z(y | x) T(next | x), normalized.
  Vector w(3);
  for (int x = 0; x < 3; ++x) {
    w(x) = mats.transitions[0](x, latents.at(0, t - 1)) * mats.emissions[0](rows.codes[t], x) *
           mats.transitions[0](latents.at(0, t + 1), x);
  }
  w /= w.sum();
  Rng rng(10);
  const int n = 100000;
  std::vector<long> counts(3, 0);
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(latentGibbsStep(mats, latents, rows, 0, t, rng))];
  for (int x = 0; x < 3; ++x) {
    const double f = static_cast<double>(counts[static_cast<std::size_t>(x)]) / n;
    CHECK(std::abs(f - w(x)) <= 3 * std::sqrt(w(x) * (1 - w(x)) / n) + 1e-12);
  }
}

TEST_CASE("latent conditional with no consistent state is an error") {
  HmmMatrices mats;
  mats.transitions = {Matrix::Identity(3, 3)};
  Matrix z(3, 3);
  z << 1, 0, 0, 0, 1, 0, 0, 0, 1;
  mats.emissions = {z};
  const auto m = parseModelConfig(R"({"states": ["A", "B"], "transitions": true, "detection": "state"})");
  const auto data = parseDataset(std::string("1200\n"), 3);
  auto latents = LatentStateMatrix::forDataset(m, data);
  const ObservationHistory rows{{0, 1, 2, 2}, 0};
  CHECK(testing::throwsKind([&] { (void)latentConditional(mats, latents, rows, 0, 1); },
                            ErrorKind::InconsistentLatentState));
}
