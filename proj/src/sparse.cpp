#include "sparselab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"

#include "sparselab/errors.hpp"
#include "sparselab/io.hpp"
#include "sparselab/random.hpp"
#include "sparselab/spec_parse.hpp"

namespace sparselab {

SparseFamily::SparseFamily(DyadicGrid grid, std::vector<Cube> cubes, double eta)
    : grid_(grid), eta_(eta), cubes_(std::move(cubes)) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("sparsity parameter must lie in (0,1)");
  for (const Cube& q : cubes_) {
    if (!q.isValidIn(grid_)) throw DomainError("cube " + toString(q) + " outside the grid");
  }
  std::sort(cubes_.begin(), cubes_.end());
  if (std::adjacent_find(cubes_.begin(), cubes_.end()) != cubes_.end()) {
    throw DomainError("a sparse family cannot list a cube twice");
  }
  parent_.assign(cubes_.size(), -1);
  children_.assign(cubes_.size(), {});
  for (std::size_t i = 0; i < cubes_.size(); ++i) {
    Cube a = cubes_[i];
    while (a.level > 0) {
      a = a.parent();
      if (const auto j = find(a)) {
        parent_[i] = static_cast<long>(*j);
        children_[*j].push_back(i);
        break;
      }
    }
  }
}

std::optional<std::size_t> SparseFamily::find(const Cube& q) const {
  const auto it = std::lower_bound(cubes_.begin(), cubes_.end(), q);
  if (it == cubes_.end() || *it != q) return std::nullopt;
  return static_cast<std::size_t>(it - cubes_.begin());
}

SparseFamily SparseFamily::with(const Cube& q) const {
  if (contains(q)) return *this;
  std::vector<Cube> next = cubes_;
  next.push_back(q);
  return SparseFamily(grid_, std::move(next), eta_);
}

SparseFamily SparseFamily::without(const Cube& q) const {
  std::vector<Cube> next;
  next.reserve(cubes_.size());
  for (const Cube& c : cubes_) {
    if (c != q) next.push_back(c);
  }
  return SparseFamily(grid_, std::move(next), eta_);
}

SparsityCertificate validateSparsity(const SparseFamily& family) { return validateSparsity(family, family.eta()); }

SparsityCertificate validateSparsity(const SparseFamily& family, double eta) {
  SparsityCertificate cert;
  cert.eta = eta;
  cert.fractions.resize(family.size());
  const DyadicGrid& grid = family.grid();
  for (std::size_t i = 0; i < family.size(); ++i) {
    // The forest children are the maximal strict descendants, so they are
    // disjoint and their union is the union of all strict descendants.
    std::size_t covered = 0;
    for (std::size_t c : family.children(i)) covered += family[c].cellSpan(grid);
    const std::size_t span = family[i].cellSpan(grid);
    const double fraction = static_cast<double>(covered) / static_cast<double>(span);
    cert.fractions[i] = fraction;
    if (!cert.worstCube || fraction > cert.worstFraction) {
      cert.worstFraction = fraction;
      cert.worstCube = family[i];
    }
    if (static_cast<double>(covered) > eta * static_cast<double>(span)) cert.pass = false;
  }
  return cert;
}

// ---- generation ----

SparseFamily pruneToSparse(const DyadicGrid& grid, std::vector<Cube> candidates, double eta) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  CellSet kept(grid);
  std::vector<Cube> out;
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
    const Cube& q = *it;
    if (!q.isValidIn(grid)) throw DomainError("cube " + toString(q) + " outside the grid");
    // Everything already kept inside q is strictly smaller than q.
    const std::size_t covered = kept.countIn(q);
    if (static_cast<double>(covered) <= eta * static_cast<double>(q.cellSpan(grid))) {
      out.push_back(q);
      kept.insertCube(q);
    }
  }
  return SparseFamily(grid, std::move(out), eta);
}

SparseFamily stoppingCubes(const StepFunction& f, double ratio, double eta) {
  if (!(ratio > 1.0)) throw DomainError("stopping cubes need ratio > 1");
  const DyadicGrid& grid = f.grid();
  if (f.isZero()) return SparseFamily(grid, {}, eta);
  const CubeSums sums(f);
  std::vector<Cube> selected{Cube::root()};
  std::vector<Cube> pending{Cube::root()};
  std::vector<Cube> stack;
  while (!pending.empty()) {
    const Cube top = pending.back();
    pending.pop_back();
    const double threshold = ratio * sums.average(top);
    stack.clear();
    if (top.level < grid.depth()) {
      stack.push_back(top.child(1));
      stack.push_back(top.child(0));
    }
    while (!stack.empty()) {
      const Cube q = stack.back();
      stack.pop_back();
      if (sums.average(q) > threshold) {
        selected.push_back(q);
        pending.push_back(q);
      } else if (q.level < grid.depth()) {
        stack.push_back(q.child(1));
        stack.push_back(q.child(0));
      }
    }
  }
  return pruneToSparse(grid, std::move(selected), eta);
}

SparseFamily randomPruned(const DyadicGrid& grid, double density, std::uint64_t seed, double eta) {
  if (!(density >= 0.0 && density <= 1.0)) throw DomainError("density must lie in [0,1]");
  if (grid.depth() > 22) throw DomainError("randomPruned enumerates every cube; depth must be <= 22");
  Rng rng(seed);
  std::vector<Cube> candidates{Cube::root()};
  for (std::size_t node = 1; node < grid.cubeCount(); ++node) {
    if (rng.bernoulli(density)) candidates.push_back(Cube::fromNodeId(node));
  }
  return pruneToSparse(grid, std::move(candidates), eta);
}

SparseFamily chainFamily(const DyadicGrid& grid, double x, int step, int top, int bottom) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("chain point must lie in [0,1)");
  if (step < 1 || top < 0 || bottom < top || bottom > grid.depth()) throw DomainError("invalid chain levels");
  const auto cell = static_cast<std::size_t>(std::ldexp(x, grid.depth()));
  std::vector<Cube> cubes;
  for (int level = top; level <= bottom; level += step) cubes.push_back(Cube::containingCell(grid, cell, level));
  return SparseFamily(grid, std::move(cubes));
}

SparseFamily generateSparse(const DyadicGrid& grid, std::string_view text, const StepFunction& f, std::uint64_t seed) {
  const SpecString spec = SpecString::parse(text);
  const std::string& kind = spec.kind();
  if (kind == "stopping") {
    spec.requireKeys({"ratio"}, true);
    requireSameGrid(grid, f.grid(), "stopping cubes");
    return stoppingCubes(f, spec.number("ratio", 8.0, true));
  }
  if (kind == "random") {
    spec.requireKeys({"density"}, true);
    return randomPruned(grid, spec.number("density", std::nullopt, true), seed);
  }
  if (kind == "chain") {
    spec.requireKeys({"x", "step", "top", "bottom"});
    return chainFamily(grid, spec.number("x", 0.0), static_cast<int>(spec.integer("step", 3)),
                       static_cast<int>(spec.integer("top", 0)), static_cast<int>(spec.integer("bottom", grid.depth())));
  }
  if (kind == "single") {
    spec.requireKeys({"level", "index"});
    return SparseFamily(grid, {Cube{static_cast<int>(spec.integer("level", 0)),
                                    static_cast<std::uint64_t>(spec.integer("index", 0))}});
  }
  if (kind == "empty") {
    spec.requireKeys({});
    return SparseFamily(grid, {});
  }
  throw ParseError("unknown sparse strategy '" + kind + "'");
}

// ---- operators ----

namespace {

template <class Term>
StepFunction accumulate(const SparseFamily& family, const std::vector<std::size_t>& members, Term term) {
  const DyadicGrid& grid = family.grid();
  std::vector<double> out(grid.cellCount(), 0.0);
  // Members in family order, so each cell sums its terms from the top down.
  for (std::size_t i : members) {
    const Cube& q = family[i];
    const double a = term(q);
    const std::size_t first = q.firstCell(grid);
    const std::size_t span = q.cellSpan(grid);
    for (std::size_t c = first; c < first + span; ++c) out[c] += a;
  }
  return StepFunction(grid, std::move(out));
}

std::vector<std::size_t> allMembers(const SparseFamily& family) {
  std::vector<std::size_t> all(family.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

}  // namespace

StepFunction sparseSum(const SparseFamily& family, const std::vector<std::size_t>& members, const CubeSums& sums) {
  requireSameGrid(family.grid(), sums.grid(), "sparse operator");
  return accumulate(family, members, [&](const Cube& q) { return sums.average(q); });
}

StepFunction sparseSquareSum(const SparseFamily& family, const std::vector<std::size_t>& members,
                             const CubeSums& sums) {
  requireSameGrid(family.grid(), sums.grid(), "sparse square function");
  return accumulate(family, members, [&](const Cube& q) {
    const double a = sums.average(q);
    return a * a;
  });
}

StepFunction applySparse(const SparseFamily& family, const StepFunction& f) {
  return sparseSum(family, allMembers(family), CubeSums(f));
}

StepFunction applySparseSquare(const SparseFamily& family, const StepFunction& f) {
  const StepFunction sq = sparseSquareSum(family, allMembers(family), CubeSums(f));
  return transformed(sq, [](double v) { return std::sqrt(v); });
}

// ---- decompositions ----

int averageBand(double a, int base) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("averageBand needs a finite positive average");
  if (base != 2 && base != 4) throw DomainError("averageBand base must be 2 or 4");
  int e = 0;
  const double mant = std::frexp(a, &e);  // a = mant 2^e, mant in [1/2, 1)
  const int m = mant == 0.5 ? 1 - e : -e;   // 2^{-m-1} < a <= 2^{-m}
  if (base == 2) return m;
  return m >= 0 ? m / 2 : -((-m + 1) / 2);
}

AverageSplit splitByAverage(const SparseFamily& family, const StepFunction& f, int base) {
  return splitByAverage(family, CubeSums(f), base);
}

AverageSplit splitByAverage(const SparseFamily& family, const CubeSums& sums, int base) {
  requireSameGrid(family.grid(), sums.grid(), "splitByAverage");
  AverageSplit out;
  out.base = base;
  std::map<int, std::vector<std::size_t>> bands;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double a = sums.average(family[i]);
    if (a == 0.0) {
      out.zeroAverage.push_back(i);
      continue;
    }
    bands[averageBand(a, base)].push_back(i);
  }
  for (auto& [index, members] : bands) out.bands.push_back({index, std::move(members)});
  return out;
}

LayeredFamily layerDecompose(const SparseFamily& parent, const std::vector<std::size_t>& members) {
  std::vector<Cube> cubes;
  cubes.reserve(members.size());
  for (std::size_t i : members) cubes.push_back(parent[i]);
  LayeredFamily out{SparseFamily(parent.grid(), std::move(cubes), parent.eta()), {}, {}, {}, {}};
  const SparseFamily& sub = out.family;
  out.source.resize(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) out.source[i] = *parent.find(sub[i]);
  out.layer.assign(sub.size(), 0);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    // Parents precede children in family order.
    const long p = sub.parent(i);
    out.layer[i] = p < 0 ? 0 : out.layer[static_cast<std::size_t>(p)] + 1;
    const auto v = static_cast<std::size_t>(out.layer[i]);
    if (out.layers.size() <= v) out.layers.resize(v + 1);
    out.layers[v].push_back(i);
  }
  out.exceptional.reserve(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    CellSet e = CellSet::ofCube(sub.grid(), sub[i]);
    for (std::size_t c : sub.children(i)) e.eraseCube(sub[c]);
    out.exceptional.push_back(std::move(e));
  }
  return out;
}

CellSet deepDescendantSet(const LayeredFamily& layered, std::size_t i, int u) {
  if (u < 1) throw DomainError("deepDescendantSet needs u >= 1");
  const SparseFamily& sub = layered.family;
  std::vector<std::size_t> generation{i};
  for (int step = 0; step < u && !generation.empty(); ++step) {
    std::vector<std::size_t> next;
    for (std::size_t g : generation) {
      const auto& ch = sub.children(g);
      next.insert(next.end(), ch.begin(), ch.end());
    }
    generation = std::move(next);
  }
  CellSet out(sub.grid());
  for (std::size_t g : generation) out.insertCube(sub[g]);
  return out;
}

std::optional<std::size_t> descendantAt(const LayeredFamily& layered, std::size_t i, int u, std::size_t cell) {
  const SparseFamily& sub = layered.family;
  std::size_t cur = i;
  for (int step = 0; step < u; ++step) {
    const auto& ch = sub.children(cur);
    const auto it = std::find_if(ch.begin(), ch.end(), [&](std::size_t c) {
      return Cube::containingCell(sub.grid(), cell, sub[c].level) == sub[c];
    });
    if (it == ch.end()) return std::nullopt;
    cur = *it;
  }
  return cur;
}

PowerFamily powerDecompose(const SparseFamily& family, const StepFunction& f) {
  const CubeSums sums(f);
  const AverageSplit split = splitByAverage(family, sums, 2);
  PowerFamily out;
  out.zeroAverage = split.zeroAverage;
  const DyadicGrid& grid = family.grid();
  for (const AverageBand& band : split.bands) {
    LayeredFamily layered = layerDecompose(family, band.members);
    std::vector<double> count(grid.cellCount(), 0.0);
    CellSet support(grid);
    for (std::size_t i = 0; i < layered.family.size(); ++i) {
      const Cube& q = layered.family[i];
      const std::size_t first = q.firstCell(grid);
      for (std::size_t c = first; c < first + q.cellSpan(grid); ++c) count[c] += 1.0;
      if (layered.layer[i] == 0) support.insertCube(q);
    }
    out.bands.push_back({band.index, std::move(layered), StepFunction(grid, std::move(count)), std::move(support)});
  }
  return out;
}

// ---- serialization ----

std::string sparseFamilyToJson(const SparseFamily& family) {
  std::string out = "{\"depth\":" + std::to_string(family.grid().depth()) + ",\"eta\":" + format17(family.eta()) +
                    ",\"cubes\":[";
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (i != 0) out += ',';
    out += "{\"level\":" + std::to_string(family[i].level) + ",\"index\":" + std::to_string(family[i].index) + "}";
  }
  out += "]}";
  return out;
}

SparseFamily sparseFamilyFromJson(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const DyadicGrid grid(j.at("depth").get<int>());
    std::vector<Cube> cubes;
    for (const auto& c : j.at("cubes")) cubes.push_back({c.at("level").get<int>(), c.at("index").get<std::uint64_t>()});
    return SparseFamily(grid, std::move(cubes), j.value("eta", kSparsity));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sparse family JSON: ") + e.what());
  }
}

std::string decompositionToJson(const SparseFamily& family, const StepFunction& f) {
  const AverageSplit split = splitByAverage(family, f, 4);
  std::string out = "{\"bands\":[";
  for (std::size_t b = 0; b < split.bands.size(); ++b) {
    const LayeredFamily layered = layerDecompose(family, split.bands[b].members);
    if (b != 0) out += ',';
    out += "{\"k\":" + std::to_string(split.bands[b].index) + ",\"layers\":[";
    for (std::size_t v = 0; v < layered.layers.size(); ++v) {
      if (v != 0) out += ',';
      out += "{\"v\":" + std::to_string(v) + ",\"cubes\":[";
      for (std::size_t n = 0; n < layered.layers[v].size(); ++n) {
        const std::size_t i = layered.layers[v][n];
        if (n != 0) out += ',';
        out += "{\"level\":" + std::to_string(layered.family[i].level) +
               ",\"index\":" + std::to_string(layered.family[i].index) + ",\"E\":\"" +
               layered.exceptional[i].toHex() + "\"}";
      }
      out += "]}";
    }
    out += "]}";
  }
  out += "]}";
  return out;
}

}  // namespace sparselab
