#include "sparselab/weights.hpp"

#include <algorithm>
#include <cmath>

#include "sparselab/errors.hpp"
#include "sparselab/random.hpp"
#include "sparselab/spec_parse.hpp"

namespace sparselab {

Weight::Weight(StepFunction f) : f_(std::move(f)) {
  if (!(f_.minValue() > 0.0)) throw DomainError("weights must be strictly positive");
}

double apConstant(const Weight& w, double p) {
  if (!(p > 1.0)) throw DomainError("apConstant needs p > 1");
  const CubeSums sw(w);
  const CubeSums ss(dualWeight(w, p));
  double best = 0.0;
  for (std::size_t node = 0; node < w.grid().cubeCount(); ++node) {
    best = std::max(best, sw.averageAt(node) * std::pow(ss.averageAt(node), p - 1.0));
  }
  return best;
}

double a1Constant(const Weight& w) {
  const StepFunction mw = dyadicMaximal(w);
  double best = 0.0;
  for (std::size_t i = 0; i < w.function().size(); ++i) best = std::max(best, mw[i] / w[i]);
  return best;
}

double aInfConstant(const Weight& w) {
  const DyadicGrid& grid = w.grid();
  const int depth = grid.depth();
  const CubeSums sums(w);
  std::vector<double> cur;
  std::vector<double> next;
  cur.reserve(grid.cellCount());
  next.reserve(grid.cellCount());
  double best = 0.0;
  for (std::size_t node = 0; node < grid.cubeCount(); ++node) {
    const Cube q = Cube::fromNodeId(node);
    cur.assign(1, sums.averageAt(node));
    for (int level = q.level + 1; level <= depth; ++level) {
      const std::size_t width = std::size_t{1} << (level - q.level);
      const std::size_t base = Cube{level, q.index << (level - q.level)}.nodeId();
      next.resize(width);
      for (std::size_t i = 0; i < width; ++i) next[i] = std::max(cur[i / 2], sums.averageAt(base + i));
      std::swap(cur, next);
    }
    // Both sides in units of the cell length.
    const double numerator = compensatedSum(cur);
    const double denominator = compensatedSum(w.function().valuesOn(q));
    best = std::max(best, numerator / denominator);
  }
  return best;
}

Weight dualWeight(const Weight& w, double p) {
  if (!(p > 1.0)) throw DomainError("dualWeight needs p > 1");
  const double e = -1.0 / (p - 1.0);
  if (p == 2.0) return Weight(transformed(w, [](double v) { return 1.0 / v; }));
  return Weight(transformed(w, [e](double v) { return std::pow(v, e); }));
}

double reverseHolderCheck(const Weight& w, double r) {
  if (!(r > 1.0)) throw DomainError("reverseHolderCheck needs r > 1");
  const double top = w.function().maxValue();
  const StepFunction v = transformed(w, [top](double x) { return x / top; });
  const StepFunction vr = transformed(v, [r](double x) { return std::pow(x, r); });
  const CubeSums s1(v);
  const CubeSums sr(vr);
  double best = 0.0;
  for (std::size_t node = 0; node < w.grid().cubeCount(); ++node) {
    best = std::max(best, std::pow(sr.averageAt(node), 1.0 / r) / s1.averageAt(node));
  }
  return best;
}

double reverseHolderExponent(double aInf, double c) {
  if (!(aInf >= 1.0) || !(c > 0.0)) throw DomainError("reverseHolderExponent needs [w]_{A_inf} >= 1 and c > 0");
  return 1.0 + 1.0 / (c * aInf);
}

double calibrateReverseHolder(std::span<const Weight> weights) {
  std::vector<double> aInf;
  aInf.reserve(weights.size());
  for (const Weight& w : weights) aInf.push_back(aInfConstant(w));
  const auto worst = [&](double c) {
    double m = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      m = std::max(m, reverseHolderCheck(weights[i], reverseHolderExponent(aInf[i], c)));
    }
    return m;
  };
  double lo = 1e-3;
  double hi = 1e3;
  if (worst(lo) <= 2.0) return lo;
  if (worst(hi) > 2.0) throw DegenerateError("no reverse Hoelder constant c <= 1e3 found");
  while (hi / lo > 1.0 + 1e-3) {
    const double mid = std::sqrt(lo * hi);
    if (worst(mid) <= 2.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

StepFunction clampDynamicRange(const StepFunction& f, double range) {
  const double floor = f.maxValue() / range;
  return transformed(f, [floor](double v) { return std::max(v, floor); });
}

namespace {

// Average of |x - x0|^a over [left, right].
double powerCellAverage(double left, double right, double x0, double a) {
  const double e = a + 1.0;
  const double len = right - left;
  // \int_d^{d+h} x^{a} dx for d >= 0, written to avoid cancellation.
  const auto ramp = [e](double d, double h) {
    if (d == 0.0) return std::pow(h, e) / e;
    return std::pow(d, e) * std::expm1(e * std::log1p(h / d)) / e;
  };
  double integral = 0.0;
  if (x0 <= left) {
    integral = ramp(left - x0, len);
  } else if (x0 >= right) {
    integral = ramp(x0 - right, len);
  } else {
    integral = ramp(0.0, x0 - left) + ramp(0.0, right - x0);
  }
  return integral / len;
}

StepFunction generateWeightKind(const DyadicGrid& grid, const SpecString& spec, std::uint64_t seed) {
  const std::size_t n = grid.cellCount();
  std::vector<double> v(n, 1.0);
  const std::string& kind = spec.kind();
  if (kind == "const") {
    spec.requireKeys({"c"}, true);
    const double c = spec.number("c", 1.0, true);
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("const weight needs c > 0");
    std::fill(v.begin(), v.end(), c);
  } else if (kind == "power") {
    spec.requireKeys({"a", "x0"}, false);
    const double a = spec.number("a");
    const double x0 = spec.number("x0", 0.5);
    if (!(a > -1.0) || a > 50.0) throw DomainError("power weight needs a in (-1, 50]");
    if (!(x0 >= 0.0 && x0 <= 1.0)) throw DomainError("power weight needs x0 in [0,1]");
    const double h = grid.cellLength();
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = powerCellAverage(static_cast<double>(i) * h, static_cast<double>(i + 1) * h, x0, a);
    }
  } else if (kind == "cascade") {
    spec.requireKeys({"theta", "depth", "seed"}, false);
    const double theta = spec.number("theta");
    const auto levels = spec.integer("depth", grid.depth());
    const auto s = static_cast<std::uint64_t>(spec.integer("seed", static_cast<std::int64_t>(seed)));
    if (!(theta >= 0.0 && theta < 1.0)) throw DomainError("cascade needs theta in [0,1); theta >= 1 produces zeros");
    if (levels < 0 || levels > grid.depth()) throw DomainError("cascade depth must lie in [0, grid depth]");
    Rng rng(s);
    const auto lv = static_cast<int>(levels);
    std::vector<double> density(1, 1.0);
    for (int level = 0; level < lv; ++level) {
      std::vector<double> children(density.size() * 2);
      for (std::size_t i = 0; i < density.size(); ++i) {
        const double xi = rng.uniform(-1.0, 1.0);
        children[2 * i] = density[i] * (1.0 + theta * xi);
        children[2 * i + 1] = density[i] * (1.0 - theta * xi);
      }
      density = std::move(children);
    }
    const int shift = grid.depth() - lv;
    for (std::size_t i = 0; i < n; ++i) v[i] = density[i >> shift];
  } else if (kind == "spike") {
    spec.requireKeys({"j", "h", "at"}, true);
    const auto j = spec.integer("j", std::nullopt, true);
    if (j < 0 || j > grid.depth()) throw DomainError("spike needs j in [0, grid depth]");
    const double h = spec.number("h", std::ldexp(1.0, static_cast<int>(j)));
    const auto at = spec.integer("at", 0);
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("spike needs h > 0");
    if (at < 0 || static_cast<std::uint64_t>(at) >= (std::uint64_t{1} << j)) throw DomainError("spike index out of range");
    const Cube q{static_cast<int>(j), static_cast<std::uint64_t>(at)};
    std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(q.firstCell(grid)), q.cellSpan(grid), h);
  } else {
    throw ParseError("unknown weight kind '" + kind + "'");
  }
  return StepFunction(grid, std::move(v));
}

}  // namespace

Weight generateWeight(const DyadicGrid& grid, std::string_view text, std::uint64_t seed) {
  const SpecString spec = SpecString::parse(text);
  return Weight(clampDynamicRange(generateWeightKind(grid, spec, seed)));
}

StepFunction generateFunction(const DyadicGrid& grid, std::string_view text, std::uint64_t seed) {
  const SpecString spec = SpecString::parse(text);
  const std::size_t n = grid.cellCount();
  const std::string& kind = spec.kind();
  if (kind == "zero") {
    spec.requireKeys({});
    return StepFunction::zero(grid);
  }
  if (kind == "cube") {
    spec.requireKeys({"level", "index", "h"});
    const Cube q{static_cast<int>(spec.integer("level")), static_cast<std::uint64_t>(spec.integer("index", 0))};
    if (!q.isValidIn(grid)) throw DomainError("cube function outside the grid");
    return StepFunction::indicator(grid, q, spec.number("h", 1.0));
  }
  if (kind == "cells") {
    spec.requireKeys({"count"}, true);
    const auto count = spec.integer("count", std::nullopt, true);
    if (count < 1) throw DomainError("cells needs count >= 1");
    Rng rng(seed);
    std::vector<double> v(n, 0.0);
    for (std::int64_t i = 0; i < count; ++i) v[rng.below(n)] += rng.uniform(0.5, 2.0);
    return StepFunction(grid, std::move(v));
  }
  if (kind == "noise") {
    spec.requireKeys({"sigma"}, true);
    const double sigma = spec.number("sigma", 1.0, true);
    if (!(sigma >= 0.0) || sigma > 5.0) throw DomainError("noise needs sigma in [0, 5]");
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = std::exp(sigma * rng.normal());
    return clampDynamicRange(StepFunction(grid, std::move(v)));
  }
  return clampDynamicRange(generateWeightKind(grid, spec, seed));
}

}  // namespace sparselab
