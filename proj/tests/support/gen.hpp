#pragma once

// Hand-rolled generators for the property tests, plus brute-force oracles that
// share no code with the library beyond the value types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "sparselab/dyadic.hpp"
#include "sparselab/random.hpp"
#include "sparselab/sparse.hpp"
#include "sparselab/weights.hpp"

// Cube comparisons in CHECK need double parentheses: doctest would pick up
// sparselab::toString through ADL.

namespace gen {

using namespace sparselab;

/// Values mixing zeros, flat runs and log-uniform magnitudes.
inline StepFunction stepFunction(Rng& rng, const DyadicGrid& grid, bool allowZero = true) {
  std::vector<double> v(grid.cellCount());
  const int style = static_cast<int>(rng.below(3));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (style == 0) {
      v[i] = std::exp(rng.uniform(-4.0, 4.0));
    } else if (style == 1) {
      v[i] = allowZero && rng.bernoulli(0.5) ? 0.0 : rng.uniform(0.0, 3.0);
    } else {
      v[i] = i > 0 && rng.bernoulli(0.7) ? v[i - 1] : std::exp(rng.uniform(-2.0, 2.0));
    }
  }
  if (!allowZero) {
    for (double& x : v) x = std::max(x, 1e-3);
  }
  if (allowZero && std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
  return StepFunction(grid, std::move(v));
}

inline Weight weight(Rng& rng, const DyadicGrid& grid) { return Weight(stepFunction(rng, grid, false)); }

inline Cube cube(Rng& rng, const DyadicGrid& grid) {
  const int level = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.depth()) + 1));
  return {level, rng.below(std::uint64_t{1} << level)};
}

/// Random cubes thinned until sparse, without the library's pruning code.
inline SparseFamily sparseFamily(Rng& rng, const DyadicGrid& grid, double density = 0.2) {
  std::vector<Cube> kept;
  std::vector<Cube> candidates;
  for (int level = grid.depth(); level >= 0; --level) {
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << level); ++i) {
      if (rng.bernoulli(density) || level == 0) candidates.push_back({level, i});
    }
  }
  for (const Cube& q : candidates) {
    std::vector<char> covered(q.cellSpan(grid), 0);
    for (const Cube& d : kept) {
      if (!q.strictlyContains(d)) continue;
      const std::size_t first = d.firstCell(grid) - q.firstCell(grid);
      for (std::size_t c = 0; c < d.cellSpan(grid); ++c) covered[first + c] = 1;
    }
    const double frac = static_cast<double>(std::count(covered.begin(), covered.end(), 1)) /
                        static_cast<double>(covered.size());
    if (frac <= 0.125) kept.push_back(q);
  }
  return SparseFamily(grid, kept);
}

// ---- oracles ----

inline double naiveAverage(const StepFunction& f, const Cube& q) {
  long double s = 0;
  const auto& g = f.grid();
  for (std::size_t c = q.firstCell(g); c < q.firstCell(g) + q.cellSpan(g); ++c) s += f[c];
  return static_cast<double>(s / static_cast<long double>(q.cellSpan(g)));
}

/// Every dyadic ancestor of each cell, enumerated from the interval endpoints.
inline std::vector<double> naiveMaximal(const StepFunction& f) {
  const auto& g = f.grid();
  std::vector<double> out(g.cellCount(), 0.0);
  for (std::size_t c = 0; c < out.size(); ++c) {
    const double x = (static_cast<double>(c) + 0.5) * g.cellLength();
    for (int level = 0; level <= g.depth(); ++level) {
      const auto index = static_cast<std::uint64_t>(std::floor(x * std::ldexp(1.0, level)));
      out[c] = std::max(out[c], naiveAverage(f, {level, index}));
    }
  }
  return out;
}

inline std::vector<double> naiveSparse(const SparseFamily& s, const StepFunction& f, bool squared) {
  const auto& g = f.grid();
  std::vector<double> out(g.cellCount(), 0.0);
  for (const Cube& q : s.cubes()) {
    const double a = naiveAverage(f, q);
    for (std::size_t c = q.firstCell(g); c < q.firstCell(g) + q.cellSpan(g); ++c) out[c] += squared ? a * a : a;
  }
  return out;
}

/// sup over all thresholds lambda (taken just below each value) of lambda w(g > lambda)^{1/p}.
inline double naiveWeakNorm(const StepFunction& g, const StepFunction& w, double p) {
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = g[i];
    long double m = 0;
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (g[c] >= v) m += w[c];
    }
    best = std::max(best, v * std::pow(static_cast<double>(m) * g.grid().cellLength(), 1.0 / p));
  }
  return best;
}

inline bool close(double a, double b, double rel = 1e-12, double abs = 1e-300) {
  return std::fabs(a - b) <= std::max(abs, rel * std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace gen
