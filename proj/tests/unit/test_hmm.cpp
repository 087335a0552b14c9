#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "hmmcr/error.hpp"
#include "hmmcr/hmm.hpp"
#include "test_support.hpp"

using namespace hmmcr;

namespace {

// Joint probability of one latent path, straight from the product form.
double pathProbability(const DiscreteHmmSpec& hmm, const ObservationHistory& h,
                       const std::vector<int>& path) {
  const int f = h.firstOccasion;
  double p = hmm.initialDist()(path[0]);
  for (int t = f; t < h.length(); ++t) {
    const int x = path[static_cast<std::size_t>(t - f)];
    if (t > f) p *= hmm.transition(t)(x, path[static_cast<std::size_t>(t - f - 1)]);
    if (!(t == f && hmm.conditionsOnFirst())) p *= hmm.emission(t)(h.codes[static_cast<std::size_t>(t)], x);
  }
  return p;
}

void forEachPath(int states, int len, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> path(static_cast<std::size_t>(len), 0);
  while (true) {
    fn(path);
    int pos = len - 1;
    while (pos >= 0 && ++path[static_cast<std::size_t>(pos)] == states) path[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
}

double relErr(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("single-state HMM has log-likelihood zero") {
  const auto hmm = DiscreteHmmSpec::homogeneous(Vector::Ones(1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), 3);
  const ObservationHistory h{{0, 0, 0}, 0};
  CHECK(forwardFilterLogLik(hmm, h) == doctest::Approx(0.0));
  CHECK(latentEnumerationLogLik(hmm, h) == doctest::Approx(0.0));
}

TEST_CASE("identity emissions, half-half transitions") {
  Matrix T(2, 2);
  T << 0.5, 0.5, 0.5, 0.5;
  Vector p1(2);
  p1 << 1.0, 0.0;
  const auto hmm = DiscreteHmmSpec::homogeneous(p1, T, Matrix::Identity(2, 2), 2);
  const ObservationHistory h{{0, 1}, 0};
  CHECK(forwardFilterLogLik(hmm, h) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("filter matches enumeration on random 3-state HMMs") {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto hmm = testing::randomHmm(3, 3, 5, rng);
    const auto h = testing::randomHistory(3, 5, rng);
    const double a = forwardFilterLogLik(hmm, h);
    const double b = latentEnumerationLogLik(hmm, h);
    CHECK(relErr(a, b) < 1e-10);
  }
}

TEST_CASE("filter matches enumeration with a later first occasion and conditioning") {
  Rng rng(12);
  for (int rep = 0; rep < 50; ++rep) {
    const int k = 6;
    std::uniform_int_distribution<int> first(0, k - 1);
    const bool cond = rep % 2 == 0;
    const auto hmm = testing::randomHmm(3, 4, k, rng, false, cond);
    const auto h = testing::randomHistory(4, k, rng, first(rng));
    CHECK(relErr(forwardFilterLogLik(hmm, h), latentEnumerationLogLik(hmm, h)) < 1e-10);
  }
}

TEST_CASE("enumeration, k = 1, is the emission-weighted initial sum") {
  Rng rng(3);
  const auto hmm = testing::randomHmm(2, 3, 1, rng, true);
  const ObservationHistory h{{2}, 0};
  double direct = 0.0;
  for (int x = 0; x < 2; ++x) direct += hmm.initialDist()(x) * hmm.emission(0)(2, x);
  CHECK(latentEnumerationLogLik(hmm, h) == doctest::Approx(std::log(direct)).epsilon(1e-14));
  CHECK(forwardFilterLogLik(hmm, h) == doctest::Approx(std::log(direct)).epsilon(1e-14));
}

TEST_CASE("enumeration cap") {
  Rng rng(4);
  const auto hmm = testing::randomHmm(4, 2, 12, rng, true);
  const auto h = testing::randomHistory(2, 12, rng);
  try {
    (void)latentEnumerationLogLik(hmm, h, 1000);
    FAIL("expected EnumerationCapExceeded");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::EnumerationCapExceeded));
  }
  // 4^12 paths is over the default cap too; 4^9 is well inside it.
  CHECK(testing::throwsKind([&] { (void)latentEnumerationLogLik(hmm, h); },
                            ErrorKind::EnumerationCapExceeded));
  const auto shorter = testing::randomHmm(4, 2, 9, rng, true);
  const auto h9 = testing::randomHistory(2, 9, rng);
  CHECK(relErr(latentEnumerationLogLik(shorter, h9), forwardFilterLogLik(shorter, h9)) < 1e-10);
}

TEST_CASE("filter distributions: deterministic HMM gives unit filtered vectors") {
  Matrix perm(3, 3);
  perm << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  Vector p1 = Vector::Unit(3, 1);
  const auto hmm = DiscreteHmmSpec::homogeneous(p1, perm, Matrix::Identity(3, 3), 4);
  const ObservationHistory h{{1, 2, 0, 1}, 0};
  const auto steps = forwardFilterDistributions(hmm, h);
  REQUIRE(steps.size() == 4);
  for (const auto& s : steps) {
    CHECK(s.filtered.maxCoeff() == doctest::Approx(1.0));
    CHECK(s.filtered.sum() == doctest::Approx(1.0));
  }
  CHECK(forwardFilterLogLik(hmm, h) == doctest::Approx(0.0));
}

TEST_CASE("filter distributions: uninformative emissions leave Q = P") {
  Rng rng(5);
  Matrix Z(3, 2);
  Z << 0.2, 0.2, 0.5, 0.5, 0.3, 0.3;
  const auto hmm = DiscreteHmmSpec::homogeneous(testing::randomDistribution(2, rng),
                                                testing::randomStochastic(2, 2, rng), Z, 5);
  const auto steps = forwardFilterDistributions(hmm, testing::randomHistory(3, 5, rng));
  for (const auto& s : steps) CHECK((s.filtered - s.predicted).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("filter distributions match enumerated conditionals") {
  Rng rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const int k = 4;
    const auto hmm = testing::randomHmm(2, 3, k, rng);
    const auto h = testing::randomHistory(3, k, rng);
    const auto steps = forwardFilterDistributions(hmm, h);
    REQUIRE(steps.size() == static_cast<std::size_t>(k));
    double product = 1.0;
    for (int t = 0; t < k; ++t) {
      // Pr(X_t | y_{0..t}) by enumerating paths up to t.
      ObservationHistory prefix{{h.codes.begin(), h.codes.begin() + t + 1}, 0};
      Vector joint = Vector::Zero(2);
      forEachPath(2, t + 1, [&](const std::vector<int>& path) {
        joint(path.back()) += pathProbability(hmm, prefix, path);
      });
      const Vector q = joint / joint.sum();
      CHECK((steps[static_cast<std::size_t>(t)].filtered - q).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(steps[static_cast<std::size_t>(t)].predicted.sum() == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(steps[static_cast<std::size_t>(t)].filtered.sum() == doctest::Approx(1.0).epsilon(1e-10));
      product *= steps[static_cast<std::size_t>(t)].conditionalLikelihood;
    }
    CHECK(relErr(product, std::exp(forwardFilterLogLik(hmm, h))) < 1e-10);
  }
}

TEST_CASE("zero-probability history returns -infinity") {
  const auto hmm = DiscreteHmmSpec::homogeneous(Vector::Unit(2, 0), Matrix::Identity(2, 2),
                                                Matrix::Identity(2, 2), 3);
  const ObservationHistory h{{0, 1, 0}, 0};
  CHECK(forwardFilterLogLik(hmm, h) == -std::numeric_limits<double>::infinity());
  CHECK(latentEnumerationLogLik(hmm, h) == -std::numeric_limits<double>::infinity());
  const auto steps = forwardFilterDistributions(hmm, h);
  CHECK(steps.back().conditionalLikelihood == 0.0);
}

TEST_CASE("uniform emission column keeps the filter well-defined") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix Z = testing::randomStochastic(3, 3, rng);
    Z.col(rep % 3).setConstant(1.0 / 3.0);
    const auto hmm = DiscreteHmmSpec::homogeneous(testing::randomDistribution(3, rng),
                                                  testing::randomStochastic(3, 3, rng), Z, 5);
    const auto h = testing::randomHistory(3, 5, rng);
    const double ll = forwardFilterLogLik(hmm, h);
    CHECK(std::isfinite(ll));
    CHECK(relErr(ll, latentEnumerationLogLik(hmm, h)) < 1e-10);
  }
}

TEST_CASE("long histories do not underflow") {
  Matrix Z(2, 1);
  Z << 1e-3, 1.0 - 1e-3;
  const auto hmm = DiscreteHmmSpec::homogeneous(Vector::Ones(1), Matrix::Ones(1, 1), Z, 500);
  ObservationHistory h{std::vector<int>(500, 0), 0};
  CHECK(forwardFilterLogLik(hmm, h) == doctest::Approx(500 * std::log(1e-3)).epsilon(1e-12));
}

TEST_CASE("construction rejects non-stochastic matrices") {
  Matrix bad(2, 2);
  bad << 0.5, 0.5, 0.6, 0.5;
  auto expectKind = [](auto fn, ErrorKind kind) {
    try {
      fn();
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK((e.kind() == kind));
    }
  };
  expectKind([&] { (void)DiscreteHmmSpec::homogeneous(Vector::Unit(2, 0), bad, Matrix::Identity(2, 2), 3); },
             ErrorKind::NotStochastic);
  expectKind([&] { (void)DiscreteHmmSpec::homogeneous(Vector::Unit(2, 0), Matrix::Identity(2, 2), bad, 3); },
             ErrorKind::NotStochastic);
  Vector p(2);
  p << 0.5, 0.6;
  expectKind([&] { (void)DiscreteHmmSpec::homogeneous(p, Matrix::Identity(2, 2), Matrix::Identity(2, 2), 3); },
             ErrorKind::NotStochastic);
  // wrong number of time-varying matrices
  expectKind([&] {
    (void)DiscreteHmmSpec(Vector::Unit(2, 0), {Matrix::Identity(2, 2), Matrix::Identity(2, 2)},
                          {Matrix::Identity(2, 2)}, 5);
  }, ErrorKind::DimensionMismatch);
}

TEST_CASE("dimension mismatch between HMM and history") {
  const auto hmm = DiscreteHmmSpec::homogeneous(Vector::Unit(2, 0), Matrix::Identity(2, 2),
                                                Matrix::Identity(2, 2), 3);
  auto expectMismatch = [&](const ObservationHistory& h) {
    try {
      (void)forwardFilterLogLik(hmm, h);
      FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
      CHECK((e.kind() == ErrorKind::DimensionMismatch));
    }
  };
  expectMismatch({{0, 1}, 0});
  expectMismatch({{0, 2, 1}, 0});
  expectMismatch({{0, 1, 1}, 3});
}

TEST_CASE("conditioning on first drops exactly the first emission factor") {
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const auto plain = testing::randomHmm(3, 3, 5, rng);
    const auto h = testing::randomHistory(3, 5, rng, 1);
    // Point-mass initial so the first emission factor is a single number.
    const Vector start = Vector::Unit(3, rep % 3);
    const auto a = plain.withInitial(start);
    std::vector<Matrix> T, Z;
    for (int t = 1; t < 5; ++t) T.push_back(plain.transition(t));
    for (int t = 0; t < 5; ++t) Z.push_back(plain.emission(t));
    const DiscreteHmmSpec cond(start, T, Z, 5, true);
    const double firstFactor = std::log(plain.emission(1)(h.codes[1], rep % 3));
    CHECK(forwardFilterLogLik(cond, h) ==
          doctest::Approx(forwardFilterLogLik(a, h) - firstFactor).epsilon(1e-12));
  }
}
