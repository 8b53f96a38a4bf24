#pragma once

// Weights and their characteristics over dyadic cubes, plus generators for
// weights and test functions.

#include <cstdint>
#include <span>
#include <string_view>

#include "sparselab/dyadic.hpp"

namespace sparselab {

/// Step function with strictly positive values.
class Weight {
 public:
  explicit Weight(StepFunction f);

  [[nodiscard]] const StepFunction& function() const noexcept { return f_; }
  operator const StepFunction&() const noexcept { return f_; }  // NOLINT(google-explicit-constructor)
  [[nodiscard]] const DyadicGrid& grid() const noexcept { return f_.grid(); }
  [[nodiscard]] double operator[](std::size_t cell) const noexcept { return f_[cell]; }
  [[nodiscard]] double dynamicRange() const noexcept { return f_.maxValue() / f_.minValue(); }

  bool operator==(const Weight&) const = default;

 private:
  StepFunction f_;
};

inline constexpr double kMaxDynamicRange = 1e12;

/// max over dyadic Q of <w>_Q <w^{-1/(p-1)}>_Q^{p-1}.
[[nodiscard]] double apConstant(const Weight& w, double p);
/// max over cells of Mw / w.
[[nodiscard]] double a1Constant(const Weight& w);
/// Fujii-Wilson: max over dyadic Q of \int_Q M(w 1_Q) / w(Q), with the maximal
/// function restricted to subcubes of Q.
[[nodiscard]] double aInfConstant(const Weight& w);
/// sigma = w^{-1/(p-1)}.
[[nodiscard]] Weight dualWeight(const Weight& w, double p);
/// max over dyadic Q of <w^r>_Q^{1/r} / <w>_Q.
[[nodiscard]] double reverseHolderCheck(const Weight& w, double r);
/// r(w) = 1 + 1/(c [w]_{A_inf}).
[[nodiscard]] double reverseHolderExponent(double aInf, double c);
/// Smallest c (to relative 1e-3, searched in [1e-3, 1e3]) for which
/// reverseHolderCheck(w, 1 + 1/(c [w]_{A_inf})) <= 2 for every weight.
[[nodiscard]] double calibrateReverseHolder(std::span<const Weight> weights);

/// Raises values below max/1e12 to that floor.
[[nodiscard]] StepFunction clampDynamicRange(const StepFunction& f, double range = kMaxDynamicRange);

/// "const:c", "power:a=..,x0=..", "cascade:theta=..,depth=..,seed=..",
/// "spike:j=..,h=..,at=..". `seed` is used when the spec carries none.
[[nodiscard]] Weight generateWeight(const DyadicGrid& grid, std::string_view spec, std::uint64_t seed);

/// Weight kinds plus "zero", "cube:level=..,index=..,h=..", "cells:count=.."
/// (random cells with random heights) and "noise:sigma=.." (log-normal).
[[nodiscard]] StepFunction generateFunction(const DyadicGrid& grid, std::string_view spec, std::uint64_t seed);

}  // namespace sparselab
