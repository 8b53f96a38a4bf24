#pragma once

// Finite dyadic model of [0,1): cubes, step functions on the finest cells,
// cell sets, averages and the dyadic maximal function.

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sparselab {

inline constexpr int kMaxDepth = 30;

class DyadicGrid {
 public:
  explicit DyadicGrid(int depth);

  [[nodiscard]] int depth() const noexcept { return depth_; }
  [[nodiscard]] std::size_t cellCount() const noexcept { return std::size_t{1} << depth_; }
  /// Number of dyadic cubes, 2^{N+1} - 1.
  [[nodiscard]] std::size_t cubeCount() const noexcept { return (std::size_t{2} << depth_) - 1; }
  [[nodiscard]] double cellLength() const noexcept;

  bool operator==(const DyadicGrid&) const = default;

 private:
  int depth_;
};

/// The dyadic interval [index 2^-level, (index + 1) 2^-level).
struct Cube {
  int level = 0;
  std::uint64_t index = 0;

  [[nodiscard]] double length() const noexcept;
  [[nodiscard]] double left() const noexcept;
  [[nodiscard]] double right() const noexcept;
  [[nodiscard]] Cube parent() const;
  [[nodiscard]] Cube child(int which) const noexcept { return {level + 1, 2 * index + static_cast<std::uint64_t>(which)}; }
  /// True when `other` is a subset of *this (including equality).
  [[nodiscard]] bool contains(const Cube& other) const noexcept;
  [[nodiscard]] bool strictlyContains(const Cube& other) const noexcept {
    return other.level > level && contains(other);
  }
  [[nodiscard]] bool isValidIn(const DyadicGrid& grid) const noexcept;

  /// First finest cell covered by the cube and the number of covered cells.
  [[nodiscard]] std::size_t firstCell(const DyadicGrid& grid) const noexcept {
    return static_cast<std::size_t>(index) << (grid.depth() - level);
  }
  [[nodiscard]] std::size_t cellSpan(const DyadicGrid& grid) const noexcept {
    return std::size_t{1} << (grid.depth() - level);
  }

  /// Heap-order position: (2^level - 1) + index.
  [[nodiscard]] std::size_t nodeId() const noexcept {
    return ((std::size_t{1} << level) - 1) + static_cast<std::size_t>(index);
  }
  [[nodiscard]] static Cube fromNodeId(std::size_t id) noexcept;
  [[nodiscard]] static Cube root() noexcept { return {0, 0}; }
  /// The level-`level` ancestor of a finest cell.
  [[nodiscard]] static Cube containingCell(const DyadicGrid& grid, std::size_t cell, int level) noexcept {
    return {level, static_cast<std::uint64_t>(cell >> (grid.depth() - level))};
  }

  auto operator<=>(const Cube&) const = default;
};

std::string toString(const Cube& q);

/// Nonnegative function, constant on each finest cell.
class StepFunction {
 public:
  StepFunction(DyadicGrid grid, std::vector<double> values);

  [[nodiscard]] static StepFunction constant(DyadicGrid grid, double value);
  [[nodiscard]] static StepFunction zero(DyadicGrid grid) { return constant(grid, 0.0); }
  [[nodiscard]] static StepFunction indicator(DyadicGrid grid, const Cube& q, double height = 1.0);

  [[nodiscard]] const DyadicGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<const double> valuesOn(const Cube& q) const noexcept {
    return std::span<const double>(values_).subspan(q.firstCell(grid_), q.cellSpan(grid_));
  }
  [[nodiscard]] double operator[](std::size_t cell) const noexcept { return values_[cell]; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  [[nodiscard]] double integral() const;
  [[nodiscard]] double maxValue() const noexcept;
  [[nodiscard]] double minValue() const noexcept;
  [[nodiscard]] bool isZero() const noexcept { return maxValue() == 0.0; }

  bool operator==(const StepFunction&) const = default;

 private:
  DyadicGrid grid_;
  std::vector<double> values_;
};

/// Applies `fn` cell-wise and wraps the result (which must stay nonnegative).
template <class Fn>
[[nodiscard]] StepFunction transformed(const StepFunction& f, Fn&& fn) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(f[i]);
  return StepFunction(f.grid(), std::move(out));
}

[[nodiscard]] StepFunction product(const StepFunction& a, const StepFunction& b);
[[nodiscard]] StepFunction scaled(const StepFunction& f, double c);

/// Membership bitmask over the finest cells.
class CellSet {
 public:
  explicit CellSet(DyadicGrid grid);

  [[nodiscard]] static CellSet full(DyadicGrid grid);
  [[nodiscard]] static CellSet ofCube(DyadicGrid grid, const Cube& q);

  void insert(std::size_t cell) noexcept { words_[cell >> 6] |= bit(cell); }
  void erase(std::size_t cell) noexcept { words_[cell >> 6] &= ~bit(cell); }
  [[nodiscard]] bool contains(std::size_t cell) const noexcept { return (words_[cell >> 6] & bit(cell)) != 0; }
  void insertCube(const Cube& q) noexcept;
  void eraseCube(const Cube& q) noexcept;

  [[nodiscard]] const DyadicGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t count() const noexcept;
  /// Number of member cells inside q.
  [[nodiscard]] std::size_t countIn(const Cube& q) const noexcept;
  [[nodiscard]] double measure() const noexcept;
  [[nodiscard]] bool empty() const noexcept { return count() == 0; }
  [[nodiscard]] bool isSubsetOf(const CellSet& other) const;

  CellSet& operator|=(const CellSet& other);
  CellSet& operator&=(const CellSet& other);
  CellSet& operator-=(const CellSet& other);
  friend CellSet operator|(CellSet a, const CellSet& b) { return a |= b; }
  friend CellSet operator&(CellSet a, const CellSet& b) { return a &= b; }
  friend CellSet operator-(CellSet a, const CellSet& b) { return a -= b; }
  bool operator==(const CellSet&) const = default;

  template <class Fn>
  void forEach(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        fn((w << 6) + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

  /// Hex digit i encodes cells 4i..4i+3; bit b of the digit is cell 4i+b.
  [[nodiscard]] std::string toHex() const;
  [[nodiscard]] static CellSet fromHex(DyadicGrid grid, std::string_view hex);

 private:
  static std::uint64_t bit(std::size_t cell) noexcept { return std::uint64_t{1} << (cell & 63); }
  void checkSameGrid(const CellSet& other) const;

  DyadicGrid grid_;
  std::vector<std::uint64_t> words_;
};

/// Neumaier-compensated sum.
[[nodiscard]] double compensatedSum(std::span<const double> xs) noexcept;

class CompensatedAccumulator {
 public:
  void add(double x) noexcept;
  [[nodiscard]] double value() const noexcept { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

/// Sums of cell values for every dyadic cube, built bottom-up by pairwise addition.
class CubeSums {
 public:
  explicit CubeSums(const StepFunction& f);

  [[nodiscard]] const DyadicGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] double integral(const Cube& q) const noexcept;
  [[nodiscard]] double average(const Cube& q) const noexcept;
  [[nodiscard]] double averageAt(std::size_t node) const noexcept { return averages_[node]; }

 private:
  DyadicGrid grid_;
  std::vector<double> sums_;
  std::vector<double> averages_;
};

/// Maximum cell value on every dyadic cube.
[[nodiscard]] std::vector<double> cubeMaxima(const StepFunction& f);

// ---- operations ----

/// (1/|Q|) \int_Q f.
[[nodiscard]] double average(const StepFunction& f, const Cube& q);
/// \int_E w dx.
[[nodiscard]] double weightedMeasure(const StepFunction& w, const CellSet& e);
/// \int g w dx.
[[nodiscard]] double weightedIntegral(const StepFunction& g, const StepFunction& w);
/// Cells where g > lambda (strict).
[[nodiscard]] CellSet superLevelSet(const StepFunction& g, double lambda);
/// sup_lambda lambda w(g > lambda)^{1/p}, realized over the distinct values v of g as v w(g >= v)^{1/p}.
[[nodiscard]] double weakNorm(const StepFunction& g, const StepFunction& w, double p);
/// (\int g^p w)^{1/p}.
[[nodiscard]] double lpNorm(const StepFunction& g, const StepFunction& w, double p);
/// Mf(x) = max over dyadic Q containing x of <f>_Q.
[[nodiscard]] StepFunction dyadicMaximal(const StepFunction& f);

void requireSameGrid(const DyadicGrid& a, const DyadicGrid& b, const char* what);

}  // namespace sparselab
