#pragma once

// Young functions, their complementary functions, Luxemburg norms,
// the c_phi series and Orlicz maximal functions.

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "sparselab/dyadic.hpp"
#include "sparselab/errors.hpp"

namespace sparselab {

/// log_1(x) = 1 + log_+(x), log_k = log_1 o log_{k-1}. Always >= 1.
[[nodiscard]] double logK(int k, double x);

enum class YoungFamily { Power, LLogEps, LLog2Alpha, LLog2Log3Alpha, Tabulated };

class YoungFunction {
 public:
  /// phi(t) = t^r, r >= 1.
  [[nodiscard]] static YoungFunction power(double r);
  /// phi(t) = t (log_1 t)^eps, eps in (0,1).
  [[nodiscard]] static YoungFunction llogEps(double eps);
  /// phi(t) = t (log_2 t)^alpha, alpha in (1,2).
  [[nodiscard]] static YoungFunction llog2Alpha(double alpha);
  /// phi(t) = t log_2 t (log_3 t)^alpha, alpha in (1,2).
  [[nodiscard]] static YoungFunction llog2Log3Alpha(double alpha);
  /// Piecewise linear through (0,0) and the given nodes, extended past the last
  /// node with the last slope. The nodes must include t = 1.
  [[nodiscard]] static YoungFunction tabulated(std::vector<double> t, std::vector<double> phi);

  [[nodiscard]] YoungFamily family() const noexcept { return family_; }
  /// r, eps or alpha; 0 for tabulated.
  [[nodiscard]] double parameter() const noexcept { return param_; }
  /// Canonical spec string, e.g. "power:r=2".
  [[nodiscard]] std::string spec() const;

  [[nodiscard]] double operator()(double t) const;
  /// The logarithmic part L with phi(t) = t L(t); named log families only.
  [[nodiscard]] double surrogate(double t) const;
  /// L(2^x) evaluated without forming 2^x, so x may be as large as 2^64.
  [[nodiscard]] double surrogateFromLog2(double log2t) const;

  [[nodiscard]] bool hasSurrogate() const noexcept {
    return family_ == YoungFamily::LLogEps || family_ == YoungFamily::LLog2Alpha ||
           family_ == YoungFamily::LLog2Log3Alpha;
  }
  /// phi(t)/t -> infinity, needed for a finite complementary function.
  [[nodiscard]] bool isSuperlinear() const noexcept;
  /// phi^{-1}(1): the Luxemburg norm of the constant 1.
  [[nodiscard]] double inverseAtOne() const noexcept { return inverseAtOne_; }

  /// Nodes and phi values of the Legendre evaluation grid.
  [[nodiscard]] std::span<const double> legendreNodes() const noexcept;
  [[nodiscard]] std::span<const double> legendreValues() const noexcept { return *gridValues_; }

 private:
  YoungFunction(YoungFamily family, double param);
  void finish();

  YoungFamily family_;
  double param_;
  std::shared_ptr<const std::vector<double>> tableT_;
  std::shared_ptr<const std::vector<double>> tablePhi_;
  std::shared_ptr<const std::vector<double>> gridValues_;
  double inverseAtOne_ = 1.0;
};

/// Finite-difference convexity and monotonicity check on a log grid of t in [1e-6, 1e6].
[[nodiscard]] bool isConvexIncreasingOnGrid(const YoungFunction& phi);

/// Legendre evaluation grid: t in [1e-9, 1e12], log-spaced.
inline constexpr double kLegendreMinT = 1e-9;
inline constexpr double kLegendreMaxT = 1e12;
inline constexpr int kLegendreNodes = 2048;

/// psi(s) = sup_{t>0} (s t - phi(t)). Throws UnboundedError when the maximizer
/// sits at the top of the evaluation grid.
[[nodiscard]] double complementaryValue(const YoungFunction& phi, double s);

/// psi^{-1}(y) by bisection on complementaryValue, relative tolerance 1e-12.
[[nodiscard]] double inverseComplementary(const YoungFunction& phi, double y);

/// Closed form for Power(r), r > 1: log2 psi^{-1}(2^x) with psi^{-1}(y) = r (y/(r-1))^{(r-1)/r}.
[[nodiscard]] double powerInverseComplementaryLog2(double r, double log2y);

/// The growth function used in the verifiers' bounds, in log2 form: the exact
/// psi^{-1} for Power(r), the surrogate L for named log families when
/// `useSurrogate`, otherwise numerical psi^{-1}.
[[nodiscard]] double boundGrowthLog2(const YoungFunction& phi, double log2y, bool useSurrogate = true);

/// psi tabulated on a log grid of s; linear interpolation, +inf past the last
/// finite node.
class ComplementaryTable {
 public:
  explicit ComplementaryTable(const YoungFunction& phi, double sMin = 1e-6, double sMax = 1e6, int nodes = 600);

  [[nodiscard]] double operator()(double s) const;
  [[nodiscard]] std::span<const double> s() const noexcept { return s_; }
  [[nodiscard]] std::span<const double> psi() const noexcept { return psi_; }
  [[nodiscard]] double maxS() const noexcept { return s_.back(); }

 private:
  std::vector<double> s_;
  std::vector<double> psi_;
};

/// max over a log grid of t in [1, tMax] of sup_{0<s<t} s (L(t) - L(s)) / t.
[[nodiscard]] double verifySurrogate(const YoungFunction& phi, double tMax);

/// max over a log grid of t in [2, tMax] of L(t) / psi^{-1}(t), stopping where
/// numerical psi^{-1} leaves the evaluation grid.
[[nodiscard]] double surrogateConstant(const YoungFunction& phi, double tMax);

/// inf{lambda > 0 : mean of phi(v / lambda) <= 1} over the given cell values.
/// `phi` is any increasing convex callable with phi(0) = 0 (possibly +inf).
template <class Phi>
[[nodiscard]] double luxemburgNormOf(std::span<const double> values, const Phi& phi) {
  double top = 0.0;
  for (double v : values) top = std::max(top, v);
  if (top == 0.0) return 0.0;
  const double n = static_cast<double>(values.size());
  const auto excess = [&](double logLambda) {
    const double lambda = std::exp(logLambda);
    double acc = 0.0;
    for (double v : values) {
      if (v > 0.0) acc += phi(v / lambda);
    }
    // Capped so that the root finder's interpolation never sees inf or huge values.
    const double g = acc / n - 1.0;
    return g < 1e6 ? g : 1e6;
  };

  double hi = std::log(top);
  for (int i = 0; excess(hi) > 0.0; ++i) {
    if (i > 200) throw DegenerateError("Luxemburg norm: no upper bracket");
    hi += std::log(2.0);
  }
  double lo = hi + std::log(1e-9);
  for (int i = 0; excess(lo) <= 0.0; ++i) {
    if (i > 200) throw DegenerateError("Luxemburg norm: no lower bracket");
    lo += std::log(1e-3);
  }
  boost::uintmax_t maxIter = 300;
  const auto [a, b] = boost::math::tools::toms748_solve(excess, lo, hi, boost::math::tools::eps_tolerance<double>(52),
                                                        maxIter);
  return std::exp(0.5 * (a + b));
}

/// ||f||_{phi(L),Q}.
[[nodiscard]] double luxemburgNorm(const StepFunction& f, const Cube& q, const YoungFunction& phi);

/// M_{phi(L)} w(x) = max over dyadic Q containing x of ||w||_{phi(L),Q}.
[[nodiscard]] StepFunction orliczMaximal(const StepFunction& w, const YoungFunction& phi);

struct CPhiResult {
  std::string family;
  double value = 0.0;
  std::vector<double> terms;
  int truncationK = 0;
  bool surrogate = false;
  /// Power-law tail estimate when the series was cut at the cap.
  std::optional<double> tailEstimate;
  /// Numerical psi^{-1} left the evaluation grid before convergence.
  bool rangeLimited = false;
};

inline constexpr int kCPhiMaxK = 64;

/// c_phi = sum_{k>=1} 1/psi^{-1}(2^{2^k}), summed until a term falls below
/// rtol times the partial sum or k reaches 64. Throws DivergenceError when the
/// terms do not decay faster than 1/k at the cap.
[[nodiscard]] CPhiResult cPhi(const YoungFunction& phi, bool useSurrogate, double rtol = 1e-12);

}  // namespace sparselab
