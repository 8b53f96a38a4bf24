#include "sparselab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparselab/errors.hpp"

namespace sparselab {

DyadicGrid::DyadicGrid(int depth) : depth_(depth) {
  if (depth < 1 || depth > kMaxDepth) {
    throw DomainError("grid depth must lie in [1, " + std::to_string(kMaxDepth) + "], got " + std::to_string(depth));
  }
}

double DyadicGrid::cellLength() const noexcept { return std::ldexp(1.0, -depth_); }

double Cube::length() const noexcept { return std::ldexp(1.0, -level); }
double Cube::left() const noexcept { return std::ldexp(static_cast<double>(index), -level); }
double Cube::right() const noexcept { return std::ldexp(static_cast<double>(index + 1), -level); }

Cube Cube::parent() const {
  if (level == 0) throw DomainError("the root cube has no parent");
  return {level - 1, index / 2};
}

bool Cube::contains(const Cube& other) const noexcept {
  if (other.level < level) return false;
  return (other.index >> (other.level - level)) == index;
}

bool Cube::isValidIn(const DyadicGrid& grid) const noexcept {
  return level >= 0 && level <= grid.depth() && index < (std::uint64_t{1} << level);
}

Cube Cube::fromNodeId(std::size_t id) noexcept {
  const int level = std::bit_width(id + 1) - 1;
  return {level, static_cast<std::uint64_t>(id + 1 - (std::size_t{1} << level))};
}

std::string toString(const Cube& q) {
  return "[" + std::to_string(q.index) + "/2^" + std::to_string(q.level) + ", " + std::to_string(q.index + 1) + "/2^" +
         std::to_string(q.level) + ")";
}

void requireSameGrid(const DyadicGrid& a, const DyadicGrid& b, const char* what) {
  if (!(a == b)) {
    throw DomainError(std::string(what) + ": grids differ (depth " + std::to_string(a.depth()) + " vs " +
                      std::to_string(b.depth()) + ")");
  }
}

// ---- StepFunction ----

StepFunction::StepFunction(DyadicGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cellCount()) {
    throw DomainError("step function needs " + std::to_string(grid_.cellCount()) + " values, got " +
                      std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("step function values must be finite and nonnegative");
  }
}

StepFunction StepFunction::constant(DyadicGrid grid, double value) {
  return StepFunction(grid, std::vector<double>(grid.cellCount(), value));
}

StepFunction StepFunction::indicator(DyadicGrid grid, const Cube& q, double height) {
  if (!q.isValidIn(grid)) throw DomainError("cube " + toString(q) + " outside the grid");
  std::vector<double> v(grid.cellCount(), 0.0);
  std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(q.firstCell(grid)), q.cellSpan(grid), height);
  return StepFunction(grid, std::move(v));
}

double StepFunction::integral() const { return compensatedSum(values_) * grid_.cellLength(); }

double StepFunction::maxValue() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

double StepFunction::minValue() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

StepFunction product(const StepFunction& a, const StepFunction& b) {
  requireSameGrid(a.grid(), b.grid(), "product");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return StepFunction(a.grid(), std::move(out));
}

StepFunction scaled(const StepFunction& f, double c) {
  return transformed(f, [c](double v) { return c * v; });
}

// ---- CellSet ----

CellSet::CellSet(DyadicGrid grid) : grid_(grid), words_((grid.cellCount() + 63) / 64, 0) {}

CellSet CellSet::full(DyadicGrid grid) {
  CellSet s(grid);
  s.insertCube(Cube::root());
  return s;
}

CellSet CellSet::ofCube(DyadicGrid grid, const Cube& q) {
  CellSet s(grid);
  s.insertCube(q);
  return s;
}

void CellSet::insertCube(const Cube& q) noexcept {
  const std::size_t first = q.firstCell(grid_);
  const std::size_t span = q.cellSpan(grid_);
  if (span >= 64) {
    std::fill_n(words_.begin() + static_cast<std::ptrdiff_t>(first >> 6), span >> 6, ~std::uint64_t{0});
  } else {
    for (std::size_t c = first; c < first + span; ++c) insert(c);
  }
}

void CellSet::eraseCube(const Cube& q) noexcept {
  const std::size_t first = q.firstCell(grid_);
  const std::size_t span = q.cellSpan(grid_);
  if (span >= 64) {
    std::fill_n(words_.begin() + static_cast<std::ptrdiff_t>(first >> 6), span >> 6, std::uint64_t{0});
  } else {
    for (std::size_t c = first; c < first + span; ++c) erase(c);
  }
}

std::size_t CellSet::count() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t CellSet::countIn(const Cube& q) const noexcept {
  const std::size_t first = q.firstCell(grid_);
  const std::size_t span = q.cellSpan(grid_);
  if (span < 64) {
    const std::uint64_t mask = ((std::uint64_t{1} << span) - 1) << (first & 63);
    return static_cast<std::size_t>(std::popcount(words_[first >> 6] & mask));
  }
  std::size_t n = 0;
  for (std::size_t w = first >> 6; w < (first + span) >> 6; ++w) n += static_cast<std::size_t>(std::popcount(words_[w]));
  return n;
}

double CellSet::measure() const noexcept { return static_cast<double>(count()) * grid_.cellLength(); }

void CellSet::checkSameGrid(const CellSet& other) const { requireSameGrid(grid_, other.grid_, "cell set"); }

bool CellSet::isSubsetOf(const CellSet& other) const {
  checkSameGrid(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

CellSet& CellSet::operator|=(const CellSet& other) {
  checkSameGrid(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

CellSet& CellSet::operator&=(const CellSet& other) {
  checkSameGrid(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

CellSet& CellSet::operator-=(const CellSet& other) {
  checkSameGrid(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

std::string CellSet::toHex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t n = grid_.cellCount();
  std::string out((n + 3) / 4, '0');
  for (std::size_t d = 0; d < out.size(); ++d) {
    unsigned nibble = 0;
    for (std::size_t b = 0; b < 4 && 4 * d + b < n; ++b) {
      if (contains(4 * d + b)) nibble |= 1u << b;
    }
    out[d] = kDigits[nibble];
  }
  return out;
}

CellSet CellSet::fromHex(DyadicGrid grid, std::string_view hex) {
  CellSet s(grid);
  const std::size_t n = grid.cellCount();
  if (hex.size() != (n + 3) / 4) {
    throw ParseError("cell set hex for depth " + std::to_string(grid.depth()) + " needs " + std::to_string((n + 3) / 4) +
                     " digits, got " + std::to_string(hex.size()));
  }
  for (std::size_t d = 0; d < hex.size(); ++d) {
    const char c = hex[d];
    unsigned nibble = 0;
    if (c >= '0' && c <= '9') {
      nibble = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      nibble = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      nibble = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw ParseError(std::string("invalid hex digit '") + c + "'");
    }
    for (std::size_t b = 0; b < 4; ++b) {
      if ((nibble >> b) & 1u) {
        if (4 * d + b >= n) throw ParseError("cell set hex sets a bit beyond the grid");
        s.insert(4 * d + b);
      }
    }
  }
  return s;
}

// ---- summation ----

void CompensatedAccumulator::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensatedSum(std::span<const double> xs) noexcept {
  CompensatedAccumulator acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

CubeSums::CubeSums(const StepFunction& f) : grid_(f.grid()), sums_(f.grid().cubeCount()), averages_(sums_.size()) {
  const int depth = grid_.depth();
  const std::size_t leafBase = grid_.cellCount() - 1;
  std::copy(f.values().begin(), f.values().end(), sums_.begin() + static_cast<std::ptrdiff_t>(leafBase));
  for (int level = depth - 1; level >= 0; --level) {
    const std::size_t base = (std::size_t{1} << level) - 1;
    const std::size_t count = std::size_t{1} << level;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t node = base + i;
      sums_[node] = sums_[2 * node + 1] + sums_[2 * node + 2];
    }
  }
  for (int level = 0; level <= depth; ++level) {
    const std::size_t base = (std::size_t{1} << level) - 1;
    const std::size_t count = std::size_t{1} << level;
    const double cells = std::ldexp(1.0, depth - level);
    for (std::size_t i = 0; i < count; ++i) averages_[base + i] = sums_[base + i] / cells;
  }
}

double CubeSums::integral(const Cube& q) const noexcept { return sums_[q.nodeId()] * grid_.cellLength(); }

double CubeSums::average(const Cube& q) const noexcept { return averages_[q.nodeId()]; }

std::vector<double> cubeMaxima(const StepFunction& f) {
  const DyadicGrid& grid = f.grid();
  std::vector<double> maxima(grid.cubeCount());
  const std::size_t leafBase = grid.cellCount() - 1;
  std::copy(f.values().begin(), f.values().end(), maxima.begin() + static_cast<std::ptrdiff_t>(leafBase));
  for (std::size_t node = leafBase; node-- > 0;) maxima[node] = std::max(maxima[2 * node + 1], maxima[2 * node + 2]);
  return maxima;
}

// ---- operations ----

double average(const StepFunction& f, const Cube& q) {
  if (!q.isValidIn(f.grid())) throw DomainError("cube " + toString(q) + " outside the grid");
  const auto cells = f.valuesOn(q);
  return compensatedSum(cells) / static_cast<double>(cells.size());
}

double weightedMeasure(const StepFunction& w, const CellSet& e) {
  requireSameGrid(w.grid(), e.grid(), "weightedMeasure");
  CompensatedAccumulator acc;
  e.forEach([&](std::size_t c) { acc.add(w[c]); });
  return acc.value() * w.grid().cellLength();
}

double weightedIntegral(const StepFunction& g, const StepFunction& w) {
  requireSameGrid(g.grid(), w.grid(), "weightedIntegral");
  CompensatedAccumulator acc;
  for (std::size_t i = 0; i < g.size(); ++i) acc.add(g[i] * w[i]);
  return acc.value() * g.grid().cellLength();
}

CellSet superLevelSet(const StepFunction& g, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("superLevelSet needs lambda >= 0");
  CellSet s(g.grid());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > lambda) s.insert(i);
  }
  return s;
}

double weakNorm(const StepFunction& g, const StepFunction& w, double p) {
  if (!(p >= 1.0)) throw DomainError("weakNorm needs p >= 1");
  requireSameGrid(g.grid(), w.grid(), "weakNorm");
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });

  const double h = g.grid().cellLength();
  CompensatedAccumulator mass;
  double best = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double v = g[order[k]];
    if (v <= 0.0) break;
    mass.add(w[order[k]]);
    const bool groupEnds = k + 1 == order.size() || g[order[k + 1]] != v;
    if (groupEnds) best = std::max(best, v * std::pow(mass.value() * h, 1.0 / p));
  }
  return best;
}

double lpNorm(const StepFunction& g, const StepFunction& w, double p) {
  if (!(p >= 1.0)) throw DomainError("lpNorm needs p >= 1");
  requireSameGrid(g.grid(), w.grid(), "lpNorm");
  CompensatedAccumulator acc;
  for (std::size_t i = 0; i < g.size(); ++i) acc.add(std::pow(g[i], p) * w[i]);
  return std::pow(acc.value() * g.grid().cellLength(), 1.0 / p);
}

StepFunction dyadicMaximal(const StepFunction& f) {
  const CubeSums sums(f);
  const DyadicGrid& grid = f.grid();
  std::vector<double> running(grid.cubeCount());
  running[0] = sums.averageAt(0);
  for (std::size_t node = 1; node < running.size(); ++node) {
    running[node] = std::max(running[(node - 1) / 2], sums.averageAt(node));
  }
  const auto leafBase = static_cast<std::ptrdiff_t>(grid.cellCount() - 1);
  return StepFunction(grid, std::vector<double>(running.begin() + leafBase, running.end()));
}

}  // namespace sparselab
