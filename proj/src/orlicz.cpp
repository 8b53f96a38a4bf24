#include "sparselab/orlicz.hpp"

#include <algorithm>
#include <numbers>

#include "sparselab/io.hpp"

namespace sparselab {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInvPhi = 0.6180339887498949;  // golden ratio conjugate

const std::vector<double>& legendreGrid() {
  static const std::vector<double> nodes = [] {
    std::vector<double> t(kLegendreNodes);
    const double a = std::log(kLegendreMinT);
    const double b = std::log(kLegendreMaxT);
    for (int i = 0; i < kLegendreNodes; ++i) t[i] = std::exp(a + (b - a) * i / (kLegendreNodes - 1));
    return t;
  }();
  return nodes;
}

// Golden-section maximization of a unimodal function on [lo, hi].
template <class Fn>
double goldenMax(const Fn& fn, double lo, double hi, double relTol = 1e-15) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = fn(x1);
  double f2 = fn(x2);
  for (int i = 0; i < 200 && hi - lo > relTol * std::max(std::abs(hi), 1e-300); ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = fn(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = fn(x1);
    }
  }
  return std::max(f1, f2);
}

void requireNamedParameter(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

double logK(int k, double x) {
  if (k < 1) throw DomainError("logK needs k >= 1");
  if (!(x >= 0.0)) throw DomainError("logK needs x >= 0");
  for (int i = 0; i < k; ++i) x = 1.0 + (x > 1.0 ? std::log(x) : 0.0);
  return x;
}

// ---- YoungFunction ----

YoungFunction::YoungFunction(YoungFamily family, double param) : family_(family), param_(param) {}

void YoungFunction::finish() {
  const auto& nodes = legendreGrid();
  auto values = std::make_shared<std::vector<double>>(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) (*values)[i] = (*this)(nodes[i]);
  gridValues_ = std::move(values);
  if (family_ == YoungFamily::Tabulated) {
    // phi is piecewise linear, so phi^{-1}(1) is found on the segment crossing 1.
    const auto& t = *tableT_;
    const auto& p = *tablePhi_;
    double prevT = 0.0;
    double prevP = 0.0;
    inverseAtOne_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (p[i] >= 1.0) {
        inverseAtOne_ = prevT + (1.0 - prevP) * (t[i] - prevT) / (p[i] - prevP);
        break;
      }
      prevT = t[i];
      prevP = p[i];
    }
    if (!std::isfinite(inverseAtOne_)) {
      const double slope = (p.back() - p[p.size() - 2]) / (t.back() - t[t.size() - 2]);
      if (!(slope > 0.0)) throw DomainError("tabulated Young function never reaches 1");
      inverseAtOne_ = t.back() + (1.0 - p.back()) / slope;
    }
  }
}

YoungFunction YoungFunction::power(double r) {
  requireNamedParameter(std::isfinite(r) && r >= 1.0, "power family needs r >= 1");
  YoungFunction phi(YoungFamily::Power, r);
  phi.finish();
  return phi;
}

YoungFunction YoungFunction::llogEps(double eps) {
  requireNamedParameter(eps > 0.0 && eps < 1.0, "llog family needs eps in (0,1)");
  YoungFunction phi(YoungFamily::LLogEps, eps);
  phi.finish();
  return phi;
}

YoungFunction YoungFunction::llog2Alpha(double alpha) {
  requireNamedParameter(alpha > 1.0 && alpha < 2.0, "llog2 family needs alpha in (1,2)");
  YoungFunction phi(YoungFamily::LLog2Alpha, alpha);
  phi.finish();
  return phi;
}

YoungFunction YoungFunction::llog2Log3Alpha(double alpha) {
  requireNamedParameter(alpha > 1.0 && alpha < 2.0, "llog2log3 family needs alpha in (1,2)");
  YoungFunction phi(YoungFamily::LLog2Log3Alpha, alpha);
  phi.finish();
  return phi;
}

YoungFunction YoungFunction::tabulated(std::vector<double> t, std::vector<double> values) {
  if (t.size() != values.size() || t.size() < 2) throw DomainError("tabulated Young function needs >= 2 matching nodes");
  double prevT = 0.0;
  double prevP = 0.0;
  double prevSlope = 0.0;
  bool hasOne = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > prevT) || !std::isfinite(t[i])) throw DomainError("tabulated nodes must be positive and increasing");
    if (!(values[i] >= prevP) || !std::isfinite(values[i])) throw DomainError("tabulated values must be nondecreasing");
    const double slope = (values[i] - prevP) / (t[i] - prevT);
    if (slope < prevSlope * (1.0 - 1e-12)) throw DomainError("tabulated Young function is not convex");
    prevSlope = slope;
    hasOne = hasOne || t[i] == 1.0;
    prevT = t[i];
    prevP = values[i];
  }
  if (!hasOne) throw DomainError("tabulated Young function must declare phi(1) with a node at t = 1");
  YoungFunction phi(YoungFamily::Tabulated, 0.0);
  phi.tableT_ = std::make_shared<const std::vector<double>>(std::move(t));
  phi.tablePhi_ = std::make_shared<const std::vector<double>>(std::move(values));
  phi.finish();
  return phi;
}

std::string YoungFunction::spec() const {
  switch (family_) {
    case YoungFamily::Power:
      return "power:r=" + formatShortest(param_);
    case YoungFamily::LLogEps:
      return "llog:eps=" + formatShortest(param_);
    case YoungFamily::LLog2Alpha:
      return "llog2:alpha=" + formatShortest(param_);
    case YoungFamily::LLog2Log3Alpha:
      return "llog2log3:alpha=" + formatShortest(param_);
    case YoungFamily::Tabulated:
      return "tabulated:n=" + std::to_string(tableT_->size());
  }
  return {};
}

double YoungFunction::operator()(double t) const {
  if (!(t >= 0.0)) throw DomainError("Young function evaluated at a negative argument");
  switch (family_) {
    case YoungFamily::Power:
      return std::pow(t, param_);
    case YoungFamily::LLogEps:
    case YoungFamily::LLog2Alpha:
    case YoungFamily::LLog2Log3Alpha:
      return t <= 1.0 ? t : t * surrogate(t);
    case YoungFamily::Tabulated: {
      const auto& ts = *tableT_;
      const auto& ps = *tablePhi_;
      if (t <= ts.front()) return ps.front() * (t / ts.front());
      const auto it = std::upper_bound(ts.begin(), ts.end(), t);
      const std::size_t j = static_cast<std::size_t>(it - ts.begin());
      const std::size_t i = j == ts.size() ? ts.size() - 2 : j - 1;
      const std::size_t k = i + 1;
      return ps[i] + (ps[k] - ps[i]) * (t - ts[i]) / (ts[k] - ts[i]);
    }
  }
  return 0.0;
}

double YoungFunction::surrogate(double t) const {
  if (!(t >= 0.0)) throw DomainError("surrogate L evaluated at a negative argument");
  if (t <= 1.0) {
    if (!hasSurrogate()) throw DomainError("surrogate L is defined for the named log families only");
    return 1.0;
  }
  return surrogateFromLog2(std::log2(t));
}

double YoungFunction::surrogateFromLog2(double log2t) const {
  const double log1 = 1.0 + std::max(0.0, log2t * kLn2);
  switch (family_) {
    case YoungFamily::LLogEps:
      return std::pow(log1, param_);
    case YoungFamily::LLog2Alpha:
      return std::pow(1.0 + std::log(log1), param_);
    case YoungFamily::LLog2Log3Alpha: {
      const double log2 = 1.0 + std::log(log1);
      const double log3 = 1.0 + std::log(log2);
      return log2 * std::pow(log3, param_);
    }
    default:
      throw DomainError("surrogate L is defined for the named log families only, not " + spec());
  }
}

bool YoungFunction::isSuperlinear() const noexcept {
  switch (family_) {
    case YoungFamily::Power:
      return param_ > 1.0;
    case YoungFamily::Tabulated:
      return false;
    default:
      return true;
  }
}

std::span<const double> YoungFunction::legendreNodes() const noexcept { return legendreGrid(); }

bool isConvexIncreasingOnGrid(const YoungFunction& phi) {
  constexpr int n = 400;
  double prevT = 0.0;
  double prevP = phi(0.0);
  double prevSlope = -std::numeric_limits<double>::infinity();
  if (prevP != 0.0) return false;
  for (int i = 0; i < n; ++i) {
    const double t = std::pow(10.0, -6.0 + 12.0 * i / (n - 1));
    const double p = phi(t);
    if (p < prevP) return false;
    const double slope = (p - prevP) / (t - prevT);
    if (slope < prevSlope * (1.0 - 1e-9)) return false;
    prevSlope = slope;
    prevT = t;
    prevP = p;
  }
  return true;
}

// ---- complementary function ----

double complementaryValue(const YoungFunction& phi, double s) {
  if (!(s >= 0.0)) throw DomainError("complementaryValue needs s >= 0");
  if (s == 0.0) return 0.0;
  const auto nodes = phi.legendreNodes();
  const auto values = phi.legendreValues();
  std::size_t best = 0;
  double bestValue = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double g = s * nodes[i] - values[i];
    if (g > bestValue) {
      bestValue = g;
      best = i;
    }
  }
  if (best + 1 == nodes.size()) {
    throw UnboundedError("complementary function unbounded at s = " + formatShortest(s) + " for " + phi.spec());
  }
  const double lo = best == 0 ? 0.0 : nodes[best - 1];
  const double hi = nodes[best + 1];
  const double refined = goldenMax([&](double t) { return s * t - phi(t); }, lo, hi);
  return std::max({0.0, bestValue, refined});
}

double inverseComplementary(const YoungFunction& phi, double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("inverseComplementary needs finite y > 0");
  double lo = 0.0;
  double hi = 1.0;
  if (complementaryValue(phi, hi) >= y) {
    lo = hi;
    while (lo > 1e-300 && complementaryValue(phi, lo) >= y) {
      hi = lo;
      lo *= 0.5;
    }
  } else {
    lo = hi;
    hi *= 2.0;
    while (complementaryValue(phi, hi) < y) {
      lo = hi;
      hi *= 2.0;
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (complementaryValue(phi, mid) >= y) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double powerInverseComplementaryLog2(double r, double log2y) {
  if (!(r > 1.0)) throw DomainError("closed-form psi^{-1} needs r > 1");
  const double rPrime = r / (r - 1.0);
  return std::log2(r) + (log2y - std::log2(r - 1.0)) / rPrime;
}

double boundGrowthLog2(const YoungFunction& phi, double log2y, bool useSurrogate) {
  if (phi.family() == YoungFamily::Power) {
    return phi.parameter() == 1.0 ? 0.0 : powerInverseComplementaryLog2(phi.parameter(), log2y);
  }
  if (useSurrogate && phi.hasSurrogate()) return std::log2(phi.surrogateFromLog2(log2y));
  if (log2y > 1000.0) throw UnboundedError("numerical psi^{-1} argument overflows a double");
  return std::log2(inverseComplementary(phi, std::exp2(log2y)));
}

ComplementaryTable::ComplementaryTable(const YoungFunction& phi, double sMin, double sMax, int nodes) {
  if (!(sMin > 0.0 && sMax > sMin && nodes >= 2)) throw DomainError("invalid complementary table range");
  for (int i = 0; i < nodes; ++i) {
    const double s = std::exp(std::log(sMin) + (std::log(sMax) - std::log(sMin)) * i / (nodes - 1));
    try {
      const double v = complementaryValue(phi, s);
      s_.push_back(s);
      psi_.push_back(v);
    } catch (const UnboundedError&) {
      break;
    }
  }
  if (s_.size() < 2) throw UnboundedError("complementary function unbounded on the whole table range");
}

double ComplementaryTable::operator()(double s) const {
  if (!(s >= 0.0)) throw DomainError("complementary table evaluated at a negative argument");
  if (s <= s_.front()) return psi_.front() * (s / s_.front());
  if (s > s_.back()) return std::numeric_limits<double>::infinity();
  const auto it = std::lower_bound(s_.begin(), s_.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - s_.begin());
  const std::size_t i = k - 1;
  return psi_[i] + (psi_[k] - psi_[i]) * (s - s_[i]) / (s_[k] - s_[i]);
}

double verifySurrogate(const YoungFunction& phi, double tMax) {
  if (!phi.hasSurrogate()) throw DomainError("verifySurrogate needs a named log family");
  if (!(tMax > 1.0)) return 0.0;
  constexpr int outer = 256;
  constexpr int inner = 256;
  double worst = 0.0;
  for (int i = 1; i < outer; ++i) {
    const double log2t = std::log2(tMax) * i / (outer - 1);
    const double lt = phi.surrogateFromLog2(log2t);
    // On s <= 1 the surrogate is 1, so the best s there is s = 1.
    const auto h = [&](double log2s) { return std::exp2(log2s - log2t) * (lt - phi.surrogateFromLog2(log2s)); };
    double best = h(0.0);
    int bestJ = 0;
    for (int j = 1; j < inner; ++j) {
      const double v = h(log2t * j / inner);
      if (v > best) {
        best = v;
        bestJ = j;
      }
    }
    const double lo = log2t * std::max(0, bestJ - 1) / inner;
    const double hi = log2t * std::min(inner, bestJ + 1) / inner;
    best = std::max(best, goldenMax(h, lo, hi, 1e-12));
    worst = std::max(worst, best);
  }
  return worst;
}

double surrogateConstant(const YoungFunction& phi, double tMax) {
  if (!phi.hasSurrogate()) throw DomainError("surrogateConstant needs a named log family");
  constexpr int n = 64;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = std::exp(std::log(2.0) + (std::log(tMax) - std::log(2.0)) * i / (n - 1));
    try {
      worst = std::max(worst, phi.surrogate(t) / inverseComplementary(phi, t));
    } catch (const UnboundedError&) {
      break;
    }
  }
  return worst;
}

double luxemburgNorm(const StepFunction& f, const Cube& q, const YoungFunction& phi) {
  if (!q.isValidIn(f.grid())) throw DomainError("cube " + toString(q) + " outside the grid");
  return luxemburgNormOf(f.valuesOn(q), phi);
}

StepFunction orliczMaximal(const StepFunction& w, const YoungFunction& phi) {
  const DyadicGrid& grid = w.grid();
  const std::vector<double> maxima = cubeMaxima(w);
  const double normOfOne = phi.inverseAtOne();
  std::vector<double> running(grid.cubeCount());
  for (std::size_t node = 0; node < running.size(); ++node) {
    const double inherited = node == 0 ? 0.0 : running[(node - 1) / 2];
    // ||w||_{Q'} <= max_Q w / phi^{-1}(1) for every Q' inside Q.
    if (node != 0 && inherited >= maxima[node] / normOfOne) {
      running[node] = inherited;
      continue;
    }
    const Cube q = Cube::fromNodeId(node);
    running[node] = std::max(inherited, luxemburgNormOf(w.valuesOn(q), phi));
  }
  const auto leafBase = static_cast<std::ptrdiff_t>(grid.cellCount() - 1);
  return StepFunction(grid, std::vector<double>(running.begin() + leafBase, running.end()));
}

// ---- c_phi ----

CPhiResult cPhi(const YoungFunction& phi, bool useSurrogate, double rtol) {
  if (!(rtol > 0.0)) throw DomainError("cPhi needs rtol > 0");
  CPhiResult out;
  out.family = phi.spec();
  out.surrogate = useSurrogate && phi.hasSurrogate();
  CompensatedAccumulator sum;
  bool converged = false;
  for (int k = 1; k <= kCPhiMaxK; ++k) {
    const double log2y = std::ldexp(1.0, k);
    double term = 0.0;
    if (phi.family() == YoungFamily::Power || out.surrogate) {
      term = std::exp2(-boundGrowthLog2(phi, log2y, out.surrogate));
    } else {
      try {
        term = std::exp2(-boundGrowthLog2(phi, log2y, false));
      } catch (const UnboundedError&) {
        out.rangeLimited = true;
        break;
      }
    }
    out.terms.push_back(term);
    sum.add(term);
    out.truncationK = k;
    if (term < rtol * sum.value()) {
      converged = true;
      break;
    }
  }
  out.value = sum.value();
  if (!converged && !out.rangeLimited) {
    const double t63 = out.terms[kCPhiMaxK - 2];
    const double t64 = out.terms[kCPhiMaxK - 1];
    const double decay = std::log(t63 / t64) / std::log(64.0 / 63.0);
    if (!(decay > 1.0)) {
      throw DivergenceError("c_phi series for " + out.family + " does not decay by k = 64 (local exponent " +
                            formatShortest(decay) + ")");
    }
    out.tailEstimate = kCPhiMaxK * t64 / (decay - 1.0);
  }
  return out;
}

}  // namespace sparselab
