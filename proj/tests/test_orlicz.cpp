#include <numbers>

#include "doctest.h"
#include "support/gen.hpp"

#include "sparselab/errors.hpp"
#include "sparselab/orlicz.hpp"
#include "sparselab/spec_parse.hpp"

using namespace sparselab;

namespace {

/// psi(s) = (r-1) r^{-r/(r-1)} s^{r/(r-1)}.
double powerPsi(double r, double s) { return (r - 1.0) * std::pow(r, -r / (r - 1.0)) * std::pow(s, r / (r - 1.0)); }

double powerMean(const StepFunction& f, const Cube& q, double r) {
  long double acc = 0;
  for (double v : f.valuesOn(q)) acc += std::pow(static_cast<long double>(v), r);
  return std::pow(static_cast<double>(acc / static_cast<long double>(q.cellSpan(f.grid()))), 1.0 / r);
}

}  // namespace

TEST_CASE("evaluate examples") {
  CHECK(YoungFunction::power(2)(3.0) == 9.0);
  CHECK(YoungFunction::llogEps(0.3)(1.0) == 1.0);
  CHECK(YoungFunction::llog2Alpha(1.5)(1.0) == 1.0);
  CHECK(YoungFunction::llog2Log3Alpha(1.5)(1.0) == 1.0);
  CHECK(YoungFunction::power(2)(0.0) == 0.0);
  CHECK_THROWS_AS((void)YoungFunction::power(2)(-1.0), DomainError);
  CHECK_THROWS_AS((void)YoungFunction::llogEps(1.0), DomainError);
  CHECK_THROWS_AS((void)YoungFunction::llog2Alpha(2.0), DomainError);
  // t (1 + log t)^eps at t = e^2.
  const double t = std::exp(2.0);
  CHECK(YoungFunction::llogEps(0.5)(t) == doctest::Approx(t * std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("logK examples") {
  CHECK(logK(1, 1.0) == 1.0);
  CHECK(logK(1, std::numbers::e) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(logK(2, std::numbers::e) == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(logK(3, 0.0) == 1.0);
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const double x = std::exp(rng.uniform(-10.0, 40.0));
    for (int k = 1; k <= 4; ++k) CHECK(logK(k, x) >= 1.0);
  }
}

TEST_CASE("complementary function of powers matches the closed form") {
  for (double r : {1.5, 2.0, 3.0}) {
    const YoungFunction phi = YoungFunction::power(r);
    for (double e = -3.0; e <= 6.0; e += 0.25) {
      const double s = std::pow(10.0, e);
      CHECK(complementaryValue(phi, s) == doctest::Approx(powerPsi(r, s)).epsilon(1e-6));
    }
    CHECK(complementaryValue(phi, 0.0) == 0.0);
  }
  CHECK(complementaryValue(YoungFunction::power(2), 2.0) == doctest::Approx(1.0).epsilon(1e-9));
  // (r-1) r^{-r/(r-1)} s^{r/(r-1)} at r = s = 3 is 2 * 3^{-3/2} * 3^{3/2}.
  CHECK(complementaryValue(YoungFunction::power(3), 3.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS((void)complementaryValue(YoungFunction::power(1), 2.0), UnboundedError);
}

TEST_CASE("inverse complementary function") {
  const YoungFunction p2 = YoungFunction::power(2);
  CHECK(inverseComplementary(p2, 1.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(inverseComplementary(p2, 4.0) == doctest::Approx(2.0 * inverseComplementary(p2, 1.0)).epsilon(1e-9));
  for (double r : {1.5, 3.0}) {
    const YoungFunction phi = YoungFunction::power(r);
    for (double y : {0.01, 1.0, 10.0, 1e4}) {
      const double closed = r * std::pow(y / (r - 1.0), (r - 1.0) / r);
      CHECK(inverseComplementary(phi, y) == doctest::Approx(closed).epsilon(1e-8));
      CHECK(std::exp2(powerInverseComplementaryLog2(r, std::log2(y))) == doctest::Approx(closed).epsilon(1e-12));
    }
    // psi^{-1}(y) grows like y^{1/r'}.
    const double rp = r / (r - 1.0);
    const double a = inverseComplementary(phi, 1e2) / std::pow(1e2, 1.0 / rp);
    const double b = inverseComplementary(phi, 1e6) / std::pow(1e6, 1.0 / rp);
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
  }
}

TEST_CASE("complementary table invariants") {
  for (const YoungFunction& phi : {YoungFunction::power(1.5), YoungFunction::llogEps(0.5),
                                   YoungFunction::llog2Alpha(1.5), YoungFunction::llog2Log3Alpha(1.5)}) {
    const ComplementaryTable table(phi);
    const auto s = table.s();
    const auto psi = table.psi();
    for (std::size_t i = 1; i < s.size(); ++i) {
      CHECK(psi[i] >= psi[i - 1]);
      CHECK(psi[i] / s[i] >= psi[i - 1] / s[i - 1] * (1 - 1e-9));
    }
    CHECK(isConvexIncreasingOnGrid(phi));
  }
}

TEST_CASE("surrogate examples") {
  const YoungFunction e = YoungFunction::llogEps(0.5);
  for (int k = 1; k <= 10; ++k) {
    const double x = std::ldexp(1.0, k);
    CHECK(e.surrogateFromLog2(x) == doctest::Approx(std::sqrt(1.0 + x * std::log(2.0))).epsilon(1e-13));
  }
  CHECK(e.surrogate(std::exp(1.0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(YoungFunction::llog2Alpha(1.5).surrogate(1.0) == 1.0);
  CHECK(YoungFunction::llog2Log3Alpha(1.5).surrogate(1.0) == 1.0);
  CHECK_THROWS_AS((void)YoungFunction::power(2).surrogate(2.0), DomainError);
}

TEST_CASE("surrogate check stays bounded") {
  for (const YoungFunction& phi :
       {YoungFunction::llogEps(0.5), YoungFunction::llog2Alpha(1.5), YoungFunction::llog2Log3Alpha(1.5)}) {
    const double v = verifySurrogate(phi, std::ldexp(1.0, 64));
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
    CHECK(v < 10.0);
    CHECK(verifySurrogate(phi, 1.0) == 0.0);
  }
}

TEST_CASE("Luxemburg norm examples") {
  const DyadicGrid g(5);
  for (const YoungFunction& phi : {YoungFunction::power(2), YoungFunction::llogEps(0.5), YoungFunction::llog2Alpha(1.5),
                                   YoungFunction::llog2Log3Alpha(1.5)}) {
    CHECK(luxemburgNorm(StepFunction::constant(g, 3.0), Cube::root(), phi) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(luxemburgNorm(StepFunction::zero(g), Cube::root(), phi) == 0.0);
  }
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    const DyadicGrid gi(1 + static_cast<int>(rng.below(8)));
    const StepFunction f = gen::stepFunction(rng, gi);
    const Cube q = gen::cube(rng, gi);
    if (f.maxValue() == 0.0) continue;
    CHECK(luxemburgNorm(f, q, YoungFunction::power(1)) == doctest::Approx(gen::naiveAverage(f, q)).epsilon(1e-9));
    for (double r : {1.5, 2.0, 3.0}) {
      CHECK(luxemburgNorm(f, q, YoungFunction::power(r)) == doctest::Approx(powerMean(f, q, r)).epsilon(1e-9));
    }
  }
}

TEST_CASE("property: Luxemburg norm is homogeneous and monotone") {
  Rng rng(23);
  const YoungFunction phis[] = {YoungFunction::power(2), YoungFunction::llogEps(0.5), YoungFunction::llog2Log3Alpha(1.5)};
  for (int i = 0; i < 60; ++i) {
    const DyadicGrid g(1 + static_cast<int>(rng.below(8)));
    const StepFunction f = gen::stepFunction(rng, g);
    const Cube q = gen::cube(rng, g);
    const double c = std::exp(rng.uniform(-5.0, 5.0));
    const YoungFunction& phi = phis[i % 3];
    const double n = luxemburgNorm(f, q, phi);
    CHECK(luxemburgNorm(scaled(f, c), q, phi) == doctest::Approx(c * n).epsilon(1e-9));
    const StepFunction bigger = transformed(f, [&](double v) { return v + rng.uniform(0.0, 1.0); });
    CHECK(luxemburgNorm(bigger, q, phi) >= n * (1 - 1e-10));
  }
}

TEST_CASE("property: generalized Hoelder inequality with constant 2") {
  Rng rng(24);
  for (double r : {1.5, 2.0, 3.0}) {
    const YoungFunction phi = YoungFunction::power(r);
    const ComplementaryTable psi(phi, 1e-8, 1e8, 1200);
    for (int i = 0; i < 200; ++i) {
      const DyadicGrid g(1 + static_cast<int>(rng.below(7)));
      const StepFunction f = gen::stepFunction(rng, g);
      const StepFunction h = gen::stepFunction(rng, g);
      const Cube q = gen::cube(rng, g);
      const double lhs = gen::naiveAverage(product(f, h), q);
      const double rhs = 2.0 * luxemburgNorm(f, q, phi) * luxemburgNormOf(h.valuesOn(q), psi);
      CHECK(lhs <= rhs * (1 + 1e-9));
    }
  }
}

TEST_CASE("Orlicz maximal function") {
  Rng rng(25);
  for (int i = 0; i < 30; ++i) {
    const DyadicGrid g(1 + static_cast<int>(rng.below(6)));
    const StepFunction w = gen::stepFunction(rng, g);
    const StepFunction m1 = orliczMaximal(w, YoungFunction::power(1));
    const StepFunction mw = dyadicMaximal(w);
    for (std::size_t c = 0; c < w.size(); ++c) CHECK(m1[c] == doctest::Approx(mw[c]).epsilon(1e-12));
    for (double r : {1.5, 2.0, 3.0}) {
      const StepFunction m = orliczMaximal(w, YoungFunction::power(r));
      const auto oracle = gen::naiveMaximal(transformed(w, [&](double v) { return std::pow(v, r); }));
      for (std::size_t c = 0; c < w.size(); ++c) {
        CHECK(m[c] == doctest::Approx(std::pow(oracle[c], 1.0 / r)).epsilon(1e-9));
      }
    }
  }
  const DyadicGrid g(4);
  const StepFunction m = orliczMaximal(StepFunction::constant(g, 2.5), YoungFunction::llog2Log3Alpha(1.5));
  for (double v : m.values()) CHECK(v == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("c_phi of Power(2) against direct summation") {
  // psi^{-1}(y) = 2 sqrt(y), so the k-th term is 2^{-1-2^{k-1}}.
  long double oracle = 0;
  for (int k = 1; k <= 10; ++k) oracle += std::exp2(-1.0L - std::ldexp(1.0L, k - 1));
  const CPhiResult c = cPhi(YoungFunction::power(2), false);
  CHECK(c.value == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-12));
  CHECK(std::fabs(c.value - 0.40820) < 1e-4);
  CHECK(c.truncationK >= 4);
  CHECK_THROWS_AS((void)cPhi(YoungFunction::power(1), false), Error);
}

TEST_CASE("c_phi laws of the log families") {
  std::vector<double> eps;
  std::vector<double> a2;
  std::vector<double> a3;
  for (int i = 1; i <= 9; ++i) {
    const double x = 0.1 * i;
    eps.push_back(cPhi(YoungFunction::llogEps(x), true).value * x);
    const double alpha = 1.0 + x;
    a2.push_back(cPhi(YoungFunction::llog2Alpha(alpha), true).value * x);
    a3.push_back(cPhi(YoungFunction::llog2Log3Alpha(alpha), true).value * x);
  }
  const auto spread = [](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
  };
  CHECK(spread(eps) <= 4.0);
  CHECK(spread(a2) <= 6.0);
  CHECK(spread(a3) <= 6.0);
  // Surrogate and numerical psi^{-1} agree on the order of magnitude.
  const double num = cPhi(YoungFunction::llogEps(0.5), false).value;
  const double sur = cPhi(YoungFunction::llogEps(0.5), true).value;
  CHECK(num > 0.0);
  CHECK(sur / num < 10.0);
  CHECK(num / sur < 10.0);
}

TEST_CASE("Young function spec strings") {
  CHECK(parseYoungFunction("power:r=2").spec() == "power:r=2");
  CHECK(parseYoungFunction("power:2").spec() == "power:r=2");
  CHECK(parseYoungFunction("llog:eps=0.5").family() == YoungFamily::LLogEps);
  CHECK(parseYoungFunction("llog2:alpha=1.5").family() == YoungFamily::LLog2Alpha);
  CHECK(parseYoungFunction("llog2log3:alpha=1.5").family() == YoungFamily::LLog2Log3Alpha);
  CHECK_THROWS_AS((void)parseYoungFunction("llog:alpha=0.5"), ParseError);
  CHECK_THROWS_AS((void)parseYoungFunction("cosh"), ParseError);
}

TEST_CASE("tabulated Young functions") {
  const YoungFunction t = YoungFunction::tabulated({0.5, 1.0, 2.0}, {0.25, 1.0, 4.0});
  CHECK(t(1.0) == 1.0);
  CHECK(t(3.0) == doctest::Approx(4.0 + 3.0));
  CHECK_THROWS_AS((void)YoungFunction::tabulated({0.5, 1.0, 2.0}, {0.4, 1.0, 1.2}), DomainError);
  CHECK_THROWS_AS((void)YoungFunction::tabulated({0.5, 2.0}, {0.25, 4.0}), DomainError);
}
