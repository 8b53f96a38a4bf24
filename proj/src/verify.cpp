#include "sparselab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "sparselab/errors.hpp"
#include "sparselab/io.hpp"
#include "sparselab/random.hpp"

namespace sparselab {

bool VerifierResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void VerifierResult::check(std::string name, bool ok, std::string detail) {
  checks.push_back({std::move(name), ok, std::move(detail)});
}

std::optional<double> VerifierResult::constant(std::string_view name) const {
  for (const auto& [key, value] : constants) {
    if (key == name) return value;
  }
  return std::nullopt;
}

double ratioOf(double lhs, double rhs, const char* what) {
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) throw DegenerateError(std::string(what) + ": non-finite side");
  if (!(rhs > 0.0)) throw DegenerateError(std::string(what) + ": right side is not positive");
  return lhs / rhs;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double driftOf(double first, double last) {
  if (first == 0.0 && last == 0.0) return 1.0;
  if (first == 0.0) return kInf;
  return last / first;
}

std::string num(double x) { return formatShortest(x); }

std::string driftDetail(const std::vector<SummaryRow>& rows, double drift, double limit) {
  if (rows.empty()) return "no rows";
  return "depth " + std::to_string(rows.front().depth) + " -> " + std::to_string(rows.back().depth) + ": " +
         num(drift) + " (limit " + num(limit) + ")";
}

VerificationReport instanceReport(const std::string& id, const Corpus& corpus, const Instance& inst) {
  VerificationReport r;
  r.id = id;
  r.depth = inst.depth;
  r.seed = inst.seed;
  r.parameters = {{"instance", std::to_string(inst.id)},
                  {"weight", corpus.weights[inst.weightIndex].spec},
                  {"function", inst.functionSpec},
                  {"sparse", inst.sparseSpec}};
  return r;
}

std::vector<VerificationReport> collect(std::vector<std::optional<VerificationReport>>& slots) {
  std::vector<VerificationReport> out;
  out.reserve(slots.size());
  for (auto& s : slots) {
    if (s) out.push_back(std::move(*s));
  }
  return out;
}

double maxRatio(const std::vector<VerificationReport>& reports) {
  double m = 0.0;
  for (const auto& r : reports) m = std::max(m, r.ratio);
  return m;
}

double maxFitted(const std::vector<VerificationReport>& reports) {
  double m = 0.0;
  for (const auto& r : reports) m = std::max(m, r.fittedConstant);
  return m;
}

void addSummary(VerifierResult& out, const std::string& id, const std::vector<VerificationReport>& reports) {
  auto rows = summarizeByDepth(id, reports);
  out.summary.insert(out.summary.end(), rows.begin(), rows.end());
}

/// Adds a per-depth drift check on the rows of `id` and records the constants.
void driftCheck(VerifierResult& out, const std::string& id, const std::vector<VerificationReport>& reports,
                double limit, bool fitted = false) {
  const auto rows = summarizeByDepth(id, reports);
  const double drift = depthDrift(rows, fitted);
  out.check(id + " depth drift", drift <= limit, driftDetail(rows, drift, limit));
  out.constants.emplace_back(id + "/C", fitted ? maxFitted(reports) : maxRatio(reports));
  out.constants.emplace_back(id + "/drift", drift);
  for (const auto& row : rows) {
    out.constants.emplace_back(id + "/depth=" + std::to_string(row.depth), fitted ? row.fittedConstant : row.maxRatio);
  }
}

struct WeightStats {
  double a1 = 0.0;
  double ap = 0.0;
  double aInf = 0.0;
};

std::vector<WeightStats> weightStats(const Corpus& corpus, double p, bool needA1, const Executor& executor) {
  std::vector<WeightStats> out(corpus.weights.size());
  executor.forEach(out.size(), [&](std::size_t i) {
    const Weight& w = corpus.weights[i].w;
    if (needA1) out[i].a1 = a1Constant(w);
    if (p > 1.0) out[i].ap = apConstant(w, p);
    out[i].aInf = aInfConstant(w);
  });
  return out;
}

double integralOn(const StepFunction& f, const CellSet& e) {
  CompensatedAccumulator acc;
  e.forEach([&](std::size_t c) { acc.add(f[c]); });
  return acc.value() * f.grid().cellLength();
}

/// sum over cells of g^q w, times the cell length.
double powerIntegral(const StepFunction& g, const StepFunction& w, double q) {
  CompensatedAccumulator acc;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (g[c] > 0.0) acc.add((q == 1.0 ? g[c] : std::pow(g[c], q)) * w[c]);
  }
  return acc.value() * g.grid().cellLength();
}

/// Value v of g maximizing v w(g >= v)^{1/p}; 0 when g vanishes.
double extremalLevel(const StepFunction& g, const StepFunction& w, double p) {
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });
  const double h = g.grid().cellLength();
  CompensatedAccumulator mass;
  double best = 0.0;
  double level = 0.0;
  for (std::size_t n = 0; n < order.size(); ++n) {
    const double v = g[order[n]];
    if (v <= 0.0) break;
    mass.add(w[order[n]] * h);
    if (n + 1 < order.size() && g[order[n + 1]] == v) continue;
    const double value = v * std::pow(mass.value(), 1.0 / p);
    if (value > best) {
      best = value;
      level = v;
    }
  }
  return level;
}

bool lessOrClose(double a, double b, double rel) { return a <= b + rel * std::abs(b); }

}  // namespace

double depthDrift(const std::vector<SummaryRow>& rows, bool fitted) {
  if (rows.empty()) return 1.0;
  return fitted ? driftOf(rows.front().fittedConstant, rows.back().fittedConstant)
                : driftOf(rows.front().maxRatio, rows.back().maxRatio);
}

std::vector<SummaryRow> summarizeByDepth(const std::string& id, const std::vector<VerificationReport>& reports) {
  std::map<int, SummaryRow> rows;
  for (const auto& r : reports) {
    if (r.id != id) continue;
    auto [it, inserted] = rows.try_emplace(r.depth, SummaryRow{id, r.depth, r.ratio, r.fittedConstant});
    if (!inserted) {
      it->second.maxRatio = std::max(it->second.maxRatio, r.ratio);
      it->second.fittedConstant = std::max(it->second.fittedConstant, r.fittedConstant);
    }
  }
  std::vector<SummaryRow> out;
  for (auto& [depth, row] : rows) out.push_back(row);
  return out;
}

// ---- main theorem ----

double weakTypeRatio(const SparseFamily& family, const StepFunction& f, const StepFunction& w,
                     const StepFunction& majorant) {
  requireSameGrid(family.grid(), f.grid(), "weakTypeRatio");
  requireSameGrid(f.grid(), w.grid(), "weakTypeRatio");
  requireSameGrid(f.grid(), majorant.grid(), "weakTypeRatio");
  const double denominator = weightedIntegral(f, majorant);
  if (!(denominator > 0.0)) throw DegenerateError("weakTypeRatio: \\int f majorant is zero");
  return ratioOf(weakNorm(applySparse(family, f), w, 1.0), denominator, "weakTypeRatio");
}

VerifierResult verifyMainTheorem(const YoungFunction& phi, const Corpus& corpus, const Executor& executor,
                                 double driftLimit) {
  VerifierResult out;
  out.id = "weak/" + phi.spec();
  const CPhiResult c = cPhi(phi, phi.hasSurrogate());
  out.constants.emplace_back(out.id + "/c_phi", c.value);

  std::vector<std::optional<StepFunction>> majorants(corpus.weights.size());
  executor.forEach(majorants.size(),
                   [&](std::size_t i) { majorants[i] = orliczMaximal(corpus.weights[i].w, phi); });

  std::vector<std::optional<VerificationReport>> slots(corpus.instances.size());
  executor.forEach(slots.size(), [&](std::size_t i) {
    const Instance& inst = corpus.instances[i];
    VerificationReport r = instanceReport(out.id, corpus, inst);
    r.parameters.emplace_back("phi", phi.spec());
    if (inst.f.isZero()) {
      r.flags.push_back("zero-function");
      slots[i] = std::move(r);
      return;
    }
    r.lhs = weakNorm(applySparse(inst.family, inst.f), corpus.weightOf(inst), 1.0);
    r.rhs = c.value * weightedIntegral(inst.f, *majorants[inst.weightIndex]);
    r.ratio = ratioOf(r.lhs, r.rhs, "weak-type bound");
    r.fittedConstant = r.ratio;
    slots[i] = std::move(r);
  });
  out.reports = collect(slots);
  addSummary(out, out.id, out.reports);
  out.check(out.id + " finite", std::isfinite(maxRatio(out.reports)), "max ratio " + num(maxRatio(out.reports)));
  driftCheck(out, out.id, out.reports, driftLimit);
  return out;
}

// ---- key lemma ----

CellSet lemmaRegion(const SparseFamily& family, const StepFunction& f) {
  requireSameGrid(family.grid(), f.grid(), "lemmaRegion");
  const StepFunction tf = applySparse(family, f);
  const StepFunction mf = dyadicMaximal(f);
  CellSet e(f.grid());
  for (std::size_t c = 0; c < f.size(); ++c) {
    if (tf[c] > 4.0 && tf[c] <= 8.0 && !(mf[c] > 0.25)) e.insert(c);
  }
  return e;
}

LemmaBasicTerms evaluateLemmaBasic(int k, const LayeredFamily& band, const CubeSums& sums, const StepFunction& w,
                                   const CellSet& region, double orliczIntegral, double growthLog2) {
  if (k < 1) throw DomainError("evaluateLemmaBasic needs k >= 1");
  const SparseFamily& sub = band.family;
  const DyadicGrid& grid = sub.grid();
  requireSameGrid(grid, w.grid(), "evaluateLemmaBasic");
  requireSameGrid(grid, region.grid(), "evaluateLemmaBasic");

  LemmaBasicTerms t;
  t.k = k;
  t.orliczIntegral = orliczIntegral;
  t.growthLog2 = growthLog2;
  t.regionWeight = weightedMeasure(w, region);
  t.remainderBound = std::ldexp(t.regionWeight, -k);

  // Deepest band cube over each cell; members are stored ancestors first.
  std::vector<long> deepest(grid.cellCount(), -1);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const Cube& q = sub[i];
    std::fill_n(deepest.begin() + static_cast<std::ptrdiff_t>(q.firstCell(grid)), q.cellSpan(grid),
                static_cast<long>(i));
  }
  const long long u = k >= 62 ? std::numeric_limits<long long>::max() : (1LL << k);
  const long long cutoff = 2 * (k + 1) >= 62 ? std::numeric_limits<long long>::max() : (1LL << (2 * (k + 1)));

  const double h = grid.cellLength();
  CompensatedAccumulator mainTerm;
  CompensatedAccumulator remainder;
  region.forEach([&](std::size_t c) {
    const long i = deepest[c];
    if (i < 0) return;
    const int d = band.layer[static_cast<std::size_t>(i)];
    t.maxLayer = std::max(t.maxLayer, d);
    if (d > cutoff) t.layerCutoffHolds = false;
    const double wc = w[c] * h;
    for (long j = i; j >= 0; j = sub.parent(static_cast<std::size_t>(j))) {
      const double term = sums.average(sub[static_cast<std::size_t>(j)]) * wc;
      if (d - band.layer[static_cast<std::size_t>(j)] >= u) {
        mainTerm.add(term);
      } else {
        remainder.add(term);
      }
    }
  });
  t.mainTerm = mainTerm.value();
  t.remainder = remainder.value();
  t.lhs = t.mainTerm + t.remainder;

  // Constants are formed in log2 space: growthLog2 reaches thousands for large k.
  const auto fit = [&](double numerator) {
    if (!(numerator > 0.0) || !(orliczIntegral > 0.0)) return 0.0;
    const double log2c = std::log2(numerator) + growthLog2 - std::log2(orliczIntegral);
    return log2c > 1023.0 ? kInf : std::exp2(log2c);
  };
  t.fittedC = fit(t.lhs - t.remainderBound);
  t.fittedMain = fit(t.mainTerm);
  return t;
}

namespace {

struct BandEvaluation {
  std::vector<LemmaBasicTerms> terms;
  bool telescopes = true;
  bool bandExclusion = true;
};

BandEvaluation evaluateBands(const SparseFamily& family, const StepFunction& f, const StepFunction& w,
                             const CellSet& region, double orliczIntegral, const YoungFunction& phi) {
  BandEvaluation out;
  const CubeSums sums(f);
  const AverageSplit split = splitByAverage(family, sums, 4);
  double total = 0.0;
  for (const AverageBand& band : split.bands) {
    if (band.index < 1) {
      // Cubes with <f>_Q > 1/4 lie inside {Mf > 1/4}, so they never meet the region.
      for (std::size_t m : band.members) {
        if (region.countIn(family[m]) != 0) out.bandExclusion = false;
      }
      continue;
    }
    const LayeredFamily layered = layerDecompose(family, band.members);
    const double growth = boundGrowthLog2(phi, std::ldexp(1.0, std::min(band.index, 1000)));
    out.terms.push_back(evaluateLemmaBasic(band.index, layered, sums, w, region, orliczIntegral, growth));
    total += out.terms.back().lhs;
  }
  const StepFunction tf = applySparse(family, f);
  CompensatedAccumulator direct;
  region.forEach([&](std::size_t c) { direct.add(tf[c] * w[c]); });
  const double expected = direct.value() * f.grid().cellLength();
  out.telescopes = std::abs(total - expected) <= 1e-12 * std::max(std::abs(expected), 1e-300) + 1e-300;
  return out;
}

}  // namespace

LemmaBasicInstance lemmaBasicInstance(const SparseFamily& family, const StepFunction& f, const StepFunction& w,
                                      const StepFunction& majorant, const YoungFunction& phi) {
  LemmaBasicInstance out;
  if (f.isZero()) return out;
  const double orliczIntegral = weightedIntegral(f, majorant);

  const CellSet verbatimRegion = lemmaRegion(family, f);
  out.vacuous = verbatimRegion.empty();
  if (!out.vacuous) {
    BandEvaluation v = evaluateBands(family, f, w, verbatimRegion, orliczIntegral, phi);
    out.verbatim = std::move(v.terms);
    out.telescopes = out.telescopes && v.telescopes && v.bandExclusion;
  }

  const double scale = 0.25 / dyadicMaximal(f).maxValue();
  const StepFunction g = scaled(f, scale);
  const StepFunction mg = dyadicMaximal(g);
  CellSet fullRegion(f.grid());
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!(mg[c] > 0.25)) fullRegion.insert(c);
  }
  BandEvaluation full = evaluateBands(family, g, w, fullRegion, weightedIntegral(g, majorant), phi);
  out.full = std::move(full.terms);
  out.telescopes = out.telescopes && full.telescopes && full.bandExclusion;

  const StepFunction tg = applySparse(family, g);
  for (double t : kLemmaLevels) {
    CellSet region(f.grid());
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (tg[c] > t && tg[c] <= 2.0 * t && !(mg[c] > 0.25)) region.insert(c);
    }
    BandEvaluation level = evaluateBands(family, g, w, region, weightedIntegral(g, majorant), phi);
    out.levels.push_back(std::move(level.terms));
    out.telescopes = out.telescopes && level.telescopes && level.bandExclusion;
  }

  out.forEachTerms([&](const LemmaBasicTerms& t) {
    out.fittedC = std::max(out.fittedC, t.fittedC);
    out.fittedMain = std::max(out.fittedMain, t.fittedMain);
  });
  return out;
}

VerifierResult verifyLemmaBasic(const YoungFunction& phi, const Corpus& corpus, const Executor& executor,
                                double driftLimit) {
  VerifierResult out;
  out.id = "lemma/" + phi.spec();
  std::vector<std::optional<StepFunction>> majorants(corpus.weights.size());
  executor.forEach(majorants.size(),
                   [&](std::size_t i) { majorants[i] = orliczMaximal(corpus.weights[i].w, phi); });

  struct Flags {
    bool remainder = true;
    bool cutoff = true;
    bool telescopes = true;
    bool powerMain = true;
    bool regionBound = true;
  };
  std::vector<Flags> flags(corpus.instances.size());
  std::vector<std::optional<VerificationReport>> slots(corpus.instances.size());
  const bool isPower = phi.family() == YoungFamily::Power;
  executor.forEach(slots.size(), [&](std::size_t i) {
    const Instance& inst = corpus.instances[i];
    const Weight& w = corpus.weightOf(inst);
    VerificationReport r = instanceReport(out.id, corpus, inst);
    r.parameters.emplace_back("phi", phi.spec());
    const LemmaBasicInstance li = lemmaBasicInstance(inst.family, inst.f, w, *majorants[inst.weightIndex], phi);
    Flags& fl = flags[i];
    fl.telescopes = li.telescopes;
    if (li.vacuous) r.flags.push_back("vacuous");
    double lhs = 0.0;
    double rhs = 0.0;
    li.forEachTerms([&](const LemmaBasicTerms& t) {
      fl.remainder = fl.remainder && lessOrClose(t.remainder, t.remainderBound, 1e-12);
      fl.cutoff = fl.cutoff && t.layerCutoffHolds;
      if (isPower) fl.powerMain = fl.powerMain && t.fittedMain <= 16.0 / 3.0;
    });
    // The full-grid variant carries the report: both sides with C = 1.
    for (const LemmaBasicTerms& t : li.full) {
      lhs += t.lhs;
      rhs += t.remainderBound + std::exp2(std::log2(t.orliczIntegral) - std::min(t.growthLog2, 2000.0));
    }
    if (!li.verbatim.empty()) {
      // w(E) <= (1/4) \int_E Tf w since Tf > 4 on E.
      double regionWeight = li.verbatim.front().regionWeight;
      double integral = 0.0;
      for (const LemmaBasicTerms& t : li.verbatim) integral += t.lhs;
      fl.regionBound = lessOrClose(regionWeight, 0.25 * integral, 1e-12);
    }
    r.lhs = lhs;
    r.rhs = rhs;
    r.ratio = rhs > 0.0 ? ratioOf(lhs, rhs, "lemma") : 0.0;
    r.fittedConstant = li.fittedC;
    r.extras = {{"fitted_main", li.fittedMain},
                {"bands", static_cast<double>(li.full.size())},
                {"verbatim_bands", static_cast<double>(li.verbatim.size())}};
    slots[i] = std::move(r);
  });
  out.reports = collect(slots);
  addSummary(out, out.id, out.reports);

  std::size_t vacuous = 0;
  for (const auto& r : out.reports) vacuous += std::count(r.flags.begin(), r.flags.end(), "vacuous");
  const auto all = [&](auto member) {
    return std::all_of(flags.begin(), flags.end(), [&](const Flags& f) { return f.*member; });
  };
  out.check(out.id + " remainder <= 2^-k w(E)", all(&Flags::remainder));
  out.check(out.id + " layer cutoff", all(&Flags::cutoff));
  out.check(out.id + " telescoping and band exclusion", all(&Flags::telescopes));
  out.check(out.id + " w(E) <= (1/4) int_E Tf w", all(&Flags::regionBound));
  if (isPower) out.check(out.id + " main term <= 16/3", all(&Flags::powerMain));
  driftCheck(out, out.id, out.reports, driftLimit, true);

  double mainMax = 0.0;
  std::map<int, double> mainByDepth;
  for (const auto& r : out.reports) {
    const double m = r.extras.front().second;
    mainMax = std::max(mainMax, m);
    mainByDepth[r.depth] = std::max(mainByDepth[r.depth], m);
  }
  out.constants.emplace_back(out.id + "/main", mainMax);
  if (!mainByDepth.empty()) {
    out.constants.emplace_back(out.id + "/main-drift", driftOf(mainByDepth.begin()->second, mainByDepth.rbegin()->second));
  }
  out.constants.emplace_back(out.id + "/vacuous", static_cast<double>(vacuous));
  return out;
}

// ---- maximal function estimates ----

VerifierResult verifyFeffermanStein(const Corpus& corpus, const Executor& executor, const std::vector<double>& ps,
                                    double driftLimit) {
  VerifierResult out;
  out.id = "fs";
  for (double p : ps) {
    if (!(p >= 1.0)) throw DomainError("verifyFeffermanStein needs p >= 1");
  }
  std::vector<std::optional<StepFunction>> mw(corpus.weights.size());
  std::vector<std::vector<double>> ap(corpus.weights.size(), std::vector<double>(ps.size()));
  executor.forEach(mw.size(), [&](std::size_t i) {
    const Weight& w = corpus.weights[i].w;
    mw[i] = dyadicMaximal(w);
    for (std::size_t j = 0; j < ps.size(); ++j) ap[i][j] = ps[j] == 1.0 ? a1Constant(w) : apConstant(w, ps[j]);
  });

  const std::size_t perInstance = 1 + ps.size();
  std::vector<std::optional<VerificationReport>> slots(corpus.instances.size() * perInstance);
  std::vector<std::string> ids{"fs"};
  for (double p : ps) ids.push_back("maximal/p=" + num(p));
  executor.forEach(corpus.instances.size(), [&](std::size_t i) {
    const Instance& inst = corpus.instances[i];
    if (inst.f.isZero()) return;
    const Weight& w = corpus.weightOf(inst);
    const StepFunction mf = dyadicMaximal(inst.f);
    VerificationReport r = instanceReport(ids[0], corpus, inst);
    r.lhs = weakNorm(mf, w, 1.0);
    r.rhs = weightedIntegral(inst.f, *mw[inst.weightIndex]);
    r.ratio = ratioOf(r.lhs, r.rhs, "Fefferman-Stein");
    r.fittedConstant = r.ratio;
    slots[i * perInstance] = std::move(r);
    for (std::size_t j = 0; j < ps.size(); ++j) {
      const double p = ps[j];
      VerificationReport s = instanceReport(ids[j + 1], corpus, inst);
      s.parameters.emplace_back("p", num(p));
      s.lhs = std::pow(weakNorm(mf, w, p), p);
      s.rhs = ap[inst.weightIndex][j] * powerIntegral(inst.f, w, p);
      s.ratio = ratioOf(s.lhs, s.rhs, "sharp weak type");
      s.fittedConstant = s.ratio;
      slots[i * perInstance + j + 1] = std::move(s);
    }
  });
  out.reports = collect(slots);
  for (const auto& id : ids) {
    std::vector<VerificationReport> subset;
    for (const auto& r : out.reports) {
      if (r.id == id) subset.push_back(r);
    }
    addSummary(out, id, subset);
    const double m = maxRatio(subset);
    // Both bounds hold with constant 1 on the dyadic grid.
    out.check(id + " ratio <= 1", std::isfinite(m) && m <= 1.0 + 1e-9, "max ratio " + num(m));
    driftCheck(out, id, subset, driftLimit);
  }
  return out;
}

// ---- Orlicz lemma ----

double orliczLemmaRatio(const StepFunction& w, const CellSet& e, const Cube& q, const YoungFunction& phi) {
  const DyadicGrid& grid = w.grid();
  requireSameGrid(grid, e.grid(), "orliczLemmaRatio");
  if (!q.isValidIn(grid)) throw DomainError("orliczLemmaRatio: cube outside the grid");
  const std::size_t inside = e.countIn(q);
  if (inside == 0) throw DegenerateError("orliczLemmaRatio: E is empty");
  if (inside != e.count()) throw DomainError("orliczLemmaRatio: E must lie inside Q");
  std::vector<double> values(q.cellSpan(grid), 0.0);
  const std::size_t first = q.firstCell(grid);
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (e.contains(first + c)) values[c] = w[first + c];
  }
  const double mean = compensatedSum(values) / static_cast<double>(values.size());
  const double norm = luxemburgNormOf(std::span<const double>(values), phi);
  const double y = static_cast<double>(q.cellSpan(grid)) / static_cast<double>(inside);
  double inverse = 0.0;
  if (phi.family() == YoungFamily::Power) {
    inverse = std::exp2(powerInverseComplementaryLog2(phi.parameter(), std::log2(y)));
  } else {
    inverse = inverseComplementary(phi, y);
  }
  return ratioOf(mean * inverse, norm, "Orlicz lemma");
}

VerifierResult verifyOrliczLemma(const YoungFunction& phi, const Corpus& corpus, int casesPerWeight,
                                 std::uint64_t seed) {
  VerifierResult out;
  out.id = "orlicz-lemma/" + phi.spec();
  for (std::size_t wi = 0; wi < corpus.weights.size(); ++wi) {
    const CorpusWeight& cw = corpus.weights[wi];
    const DyadicGrid& grid = cw.w.grid();
    Rng rng(deriveSeed(seed, wi));
    const auto push = [&](const Cube& q, const CellSet& e, const char* kind) {
      VerificationReport r;
      r.id = out.id;
      r.depth = cw.depth;
      r.seed = seed;
      r.parameters = {{"weight", cw.spec},
                      {"weight_seed", std::to_string(cw.seed)},
                      {"cube", toString(q)},
                      {"case", kind},
                      {"fraction", num(e.measure() / q.length())}};
      r.ratio = orliczLemmaRatio(cw.w, e, q, phi);
      r.lhs = r.ratio;
      r.rhs = 1.0;
      r.fittedConstant = r.ratio;
      out.reports.push_back(std::move(r));
    };
    for (int t = 0; t < casesPerWeight; ++t) {
      const int level = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.depth())));
      const Cube q{level, rng.below(std::uint64_t{1} << level)};
      push(q, CellSet::ofCube(grid, q), "full");
      // Random subset with density 2^-j.
      const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.depth() - level + 1)));
      CellSet e(grid);
      const std::size_t first = q.firstCell(grid);
      for (std::size_t c = 0; c < q.cellSpan(grid); ++c) {
        if (rng.bernoulli(std::ldexp(1.0, -j))) e.insert(first + c);
      }
      if (e.empty()) e.insert(first + rng.below(q.cellSpan(grid)));
      push(q, e, "random");
      // Shrinking subcubes: |E|/|Q| -> 0.
      for (int s = 1; level + s <= grid.depth(); s += 2) {
        const Cube sub{level + s, (q.index << s) + rng.below(std::uint64_t{1} << s)};
        push(q, CellSet::ofCube(grid, sub), "subcube");
      }
    }
  }
  addSummary(out, out.id, out.reports);
  const double m = maxRatio(out.reports);
  if (phi.family() == YoungFamily::Power) {
    out.check(out.id + " ratio <= 2", m <= 2.0 * (1.0 + 1e-9), "max ratio " + num(m));
  } else {
    out.check(out.id + " finite", std::isfinite(m), "max ratio " + num(m));
  }
  out.constants.emplace_back(out.id + "/C", m);
  return out;
}

// ---- square function ----

double squareConstant(double p, double a1, double ap, double aInf) {
  if (!(p >= 1.0)) throw DomainError("squareConstant needs p >= 1");
  if (p == 1.0) return a1;
  if (p < 2.0) return std::pow(ap, 1.0 / p);
  return std::sqrt(ap * logK(1, aInf));
}

int splitIndex(double aInf) {
  if (!(aInf >= 0.0) || !std::isfinite(aInf)) throw DomainError("splitIndex needs a finite A_inf constant");
  return static_cast<int>(std::ceil(std::log2(1.0 + aInf))) + 1;
}

SquareSplit squareSplit(const SparseFamily& family, const StepFunction& f, const Weight& w, double p, double ap,
                        double aInf) {
  if (!(p >= 2.0)) throw DomainError("squareSplit needs p >= 2");
  SquareSplit s;
  s.m0 = splitIndex(aInf);
  const StepFunction sf = applySparseSquare(family, f);
  const double level = extremalLevel(sf, w, p);
  if (level == 0.0) return s;
  s.scale = std::sqrt(2.0) / level * (1.0 + 1e-9);
  const StepFunction g = scaled(f, s.scale);
  const StepFunction sg = scaled(sf, s.scale);
  const StepFunction mg = dyadicMaximal(g);
  const CubeSums sums(g);
  const PowerFamily bands = powerDecompose(family, g);

  const DyadicGrid& grid = f.grid();
  std::vector<double> moderate(grid.cellCount(), 0.0);
  std::vector<double> large(grid.cellCount(), 0.0);
  CompensatedAccumulator minkowski;
  double moderateMax = 0.0;
  const double gNorm = powerIntegral(g, w, p);
  for (const PowerBand& band : bands.bands) {
    if (band.m < 0) continue;
    const StepFunction part = sparseSquareSum(family, band.layered.source, sums);
    auto& target = band.m < s.m0 ? moderate : large;
    for (std::size_t c = 0; c < part.size(); ++c) target[c] += part[c];
    if (band.m < s.m0) {
      // ||S_m g||^2_{L^p(w)} = (\int (S_m g)^p w)^{2/p}.
      const double sq = std::pow(powerIntegral(part, w, p / 2.0), 2.0 / p);
      minkowski.add(sq);
      moderateMax = std::max(moderateMax, sq / (ap * std::pow(gNorm, 2.0 / p)));
    }
  }
  const double h = grid.cellLength();
  CompensatedAccumulator lhs, t1, t2, t3;
  for (std::size_t c = 0; c < grid.cellCount(); ++c) {
    const bool inMax = mg[c] > 1.0;
    const bool inModerate = moderate[c] > 1.0;
    const bool inLarge = large[c] > 1.0;
    if (sg[c] * sg[c] > 2.0) {
      lhs.add(w[c] * h);
      if (!(inMax || inModerate || inLarge)) s.contained = false;
    }
    if (inMax) t1.add(w[c] * h);
    if (inModerate) t2.add(w[c] * h);
    if (inLarge) t3.add(w[c] * h);
  }
  s.lhs = lhs.value();
  s.maximalTerm = t1.value();
  s.moderateTerm = t2.value();
  s.largeTerm = t3.value();
  s.minkowskiBound = std::pow(minkowski.value(), p / 2.0);
  s.maximalBound = ap * gNorm;
  s.moderateConstant = moderateMax;
  s.largeBound = ap * std::pow(aInf * std::ldexp(1.0, -s.m0), p) * gNorm;
  return s;
}

VerifierResult verifySquareTheorem(double p, const Corpus& corpus, const Executor& executor, double driftLimit) {
  if (!(p >= 1.0)) throw DomainError("verifySquareTheorem needs p >= 1");
  VerifierResult out;
  out.id = "square/p=" + num(p);
  const auto stats = weightStats(corpus, p, p == 1.0, executor);

  struct Flags {
    bool contained = true;
    bool maximal = true;
    bool moderate = true;
  };
  std::vector<Flags> flags(corpus.instances.size());
  std::vector<std::optional<VerificationReport>> slots(corpus.instances.size());
  executor.forEach(slots.size(), [&](std::size_t i) {
    const Instance& inst = corpus.instances[i];
    if (inst.f.isZero()) return;
    const Weight& w = corpus.weightOf(inst);
    const WeightStats& ws = stats[inst.weightIndex];
    VerificationReport r = instanceReport(out.id, corpus, inst);
    r.parameters.emplace_back("p", num(p));
    const double cp = squareConstant(p, ws.a1, ws.ap, ws.aInf);
    r.lhs = weakNorm(applySparseSquare(inst.family, inst.f), w, p);
    r.rhs = cp * lpNorm(inst.f, w, p);
    r.ratio = ratioOf(r.lhs, r.rhs, "square function bound");
    r.fittedConstant = r.ratio;
    r.extras = {{"C_p", cp}, {"A_p", ws.ap}, {"A_inf", ws.aInf}};
    if (p >= 2.0) {
      const SquareSplit s = squareSplit(inst.family, inst.f, w, p, ws.ap, ws.aInf);
      Flags& fl = flags[i];
      fl.contained = s.contained;
      fl.maximal = lessOrClose(s.maximalTerm, s.maximalBound, 1e-9);
      fl.moderate = lessOrClose(s.moderateTerm, s.minkowskiBound, 1e-9);
      r.extras.insert(r.extras.end(), {{"m0", static_cast<double>(s.m0)},
                                       {"split_lhs", s.lhs},
                                       {"maximal_ratio", s.maximalBound > 0.0 ? s.maximalTerm / s.maximalBound : 0.0},
                                       {"moderate_constant", s.moderateConstant},
                                       {"large_ratio", s.largeBound > 0.0 ? s.largeTerm / s.largeBound : 0.0}});
    }
    slots[i] = std::move(r);
  });
  out.reports = collect(slots);
  addSummary(out, out.id, out.reports);
  out.check(out.id + " finite", std::isfinite(maxRatio(out.reports)), "max ratio " + num(maxRatio(out.reports)));
  driftCheck(out, out.id, out.reports, driftLimit);
  if (p >= 2.0) {
    const auto all = [&](auto member) {
      return std::all_of(flags.begin(), flags.end(), [&](const Flags& f) { return f.*member; });
    };
    out.check(out.id + " split containment", all(&Flags::contained));
    out.check(out.id + " maximal term <= [w]_Ap ||g||^p", all(&Flags::maximal));
    out.check(out.id + " moderate term <= Minkowski bound", all(&Flags::moderate));
    for (const char* name : {"maximal_ratio", "moderate_constant", "large_ratio"}) {
      double m = 0.0;
      for (const auto& r : out.reports) {
        for (const auto& [key, value] : r.extras) {
          if (key == name) m = std::max(m, value);
        }
      }
      out.constants.emplace_back(out.id + "/" + name, m);
    }
  }
  return out;
}

SpikeSweep squareSpikeSweep(int depth, int jMin, int jMax, double p, const Executor& executor) {
  if (!(p >= 1.0)) throw DomainError("squareSpikeSweep needs p >= 1");
  if (jMin < 1 || jMax > depth || jMin > jMax) throw DomainError("squareSpikeSweep needs 1 <= jMin <= jMax <= depth");
  const DyadicGrid grid(depth);
  SpikeSweep out;
  out.rows.resize(static_cast<std::size_t>(jMax - jMin + 1));
  executor.forEach(out.rows.size(), [&](std::size_t n) {
    const int j = jMin + static_cast<int>(n);
    const Weight w = generateWeight(grid, "spike:j=" + std::to_string(j), 0);
    SpikeSweepRow& row = out.rows[n];
    row.j = j;
    row.a2 = apConstant(w, p == 1.0 ? 2.0 : p);
    row.aInf = aInfConstant(w);
    const double a1 = p == 1.0 ? a1Constant(w) : 0.0;

    std::vector<StepFunction> functions;
    const auto ju = static_cast<std::uint64_t>(1);
    functions.push_back(StepFunction::indicator(grid, Cube{j, ju}));  // the neighbour of the spike
    functions.push_back(StepFunction::indicator(grid, Cube{j, 0}));
    functions.push_back(StepFunction::indicator(grid, Cube{j - 1, 0}));
    functions.push_back(StepFunction::constant(grid, 1.0));
    functions.push_back(generateFunction(grid, "cells:count=3", deriveSeed(static_cast<std::uint64_t>(j), 1)));

    std::vector<SparseFamily> families;
    families.push_back(generateSparse(grid, "single", functions[0], 0));
    for (int top : {0, j - 1, j - 2, j - 3}) {
      if (top < 0) continue;
      families.push_back(chainFamily(grid, 0.0, 3, top, depth));
      families.push_back(chainFamily(grid, 1.5 * std::ldexp(1.0, -j), 3, top, depth));
    }
    for (const auto& f : functions) families.push_back(stoppingCubes(f, 8.0));

    for (const auto& f : functions) {
      const double norm = lpNorm(f, w, p);
      for (const auto& family : families) {
        row.best = std::max(row.best, weakNorm(applySparseSquare(family, f), w, p) / norm);
      }
    }
    row.normalized = row.best / squareConstant(p, a1, row.a2, row.aInf);
    row.unnormalized = row.best / std::sqrt(row.a2);
  });
  double lo = kInf;
  double hi = 0.0;
  for (const auto& row : out.rows) {
    lo = std::min(lo, row.normalized);
    hi = std::max(hi, row.normalized);
  }
  out.variation = hi / lo;
  out.unnormalizedGrowth = out.rows.back().unnormalized / out.rows.front().unnormalized;
  out.decades = std::log10(out.rows.back().a2 / out.rows.front().a2);
  return out;
}

// ---- square function lemmas ----

VerifierResult verifyApBoundLemma(double p, const Corpus& corpus, const Executor& executor) {
  if (!(p >= 2.0)) throw DomainError("verifyApBoundLemma needs p >= 2");
  VerifierResult out;
  out.id = "apbound/p=" + num(p);
  const bool exact = p == 2.0;
  const auto stats = weightStats(corpus, p, false, executor);

  struct Flags {
    bool goodControl = true;
    bool cauchySchwarz = true;
    bool cellSum = true;
    bool chain = true;
    double goodControlMin = kInf;
  };
  std::vector<Flags> flags(corpus.instances.size());
  std::vector<std::optional<VerificationReport>> slots(corpus.instances.size());
  executor.forEach(slots.size(), [&](std::size_t i) {
    const Instance& inst = corpus.instances[i];
    if (inst.f.isZero()) return;
    const Weight& w = corpus.weightOf(inst);
    const double ap = stats[inst.weightIndex].ap;
    const DyadicGrid& grid = w.grid();
    VerificationReport r = instanceReport(out.id, corpus, inst);
    r.parameters.emplace_back("p", num(p));
    const PowerFamily bands = powerDecompose(inst.family, inst.f);
    const CubeSums fSums(inst.f);
    const double fNorm = powerIntegral(inst.f, w, p);
    Flags& fl = flags[i];

    std::optional<Weight> sigma;
    std::optional<CubeSums> wSums;
    std::optional<CubeSums> sSums;
    StepFunction f2w = product(product(inst.f, inst.f), w);
    if (exact) {
      sigma = dualWeight(w, 2.0);
      wSums.emplace(w);
      sSums.emplace(*sigma);
    }
    double worst = 0.0;
    for (const PowerBand& band : bands.bands) {
      const StepFunction part = sparseSquareSum(inst.family, band.layered.source, fSums);
      const double normSq = std::pow(powerIntegral(part, w, p / 2.0), 2.0 / p);
      const double ratio = normSq / (ap * std::pow(fNorm, 2.0 / p));
      worst = std::max(worst, ratio);
      if (!exact) continue;

      std::vector<double> cellSum(grid.cellCount(), 0.0);
      double chainSum = 0.0;
      for (std::size_t q = 0; q < band.layered.family.size(); ++q) {
        const Cube& cube = band.layered.family[q];
        const CellSet& e = band.layered.exceptional[q];
        const double len = cube.length();
        const double fe = integralOn(inst.f, e) / len;
        const double f2we = integralOn(f2w, e) / len;
        const double avgF = fSums.average(cube);
        const double avgW = wSums->average(cube);
        const double avgS = sSums->average(cube);
        const double goodRatio = fe / avgF;
        fl.goodControlMin = std::min(fl.goodControlMin, goodRatio);
        if (goodRatio < 0.75 * (1.0 - 1e-12)) fl.goodControl = false;
        if (!lessOrClose(fe * fe, f2we * avgS, 1e-12)) fl.cauchySchwarz = false;
        const double product = avgW * avgS;
        e.forEach([&](std::size_t c) { cellSum[c] += product; });
        chainSum += f2we * avgS * avgW * len;
      }
      for (double v : cellSum) {
        if (!lessOrClose(v, ap, 1e-12)) fl.cellSum = false;
      }
      // ||S_m f||^2 <= (16/9) sum <f 1_E>^2 w(Q) <= (16/9) sum <f^2 1_E w><sigma> w(Q) <= (16/9)[w]_{A_2} ||f||^2.
      if (!lessOrClose(normSq, 16.0 / 9.0 * chainSum, 1e-12) || !lessOrClose(chainSum, ap * fNorm, 1e-12)) {
        fl.chain = false;
      }
    }
    r.lhs = worst * ap * std::pow(fNorm, 2.0 / p);
    r.rhs = ap * std::pow(fNorm, 2.0 / p);
    r.ratio = worst;
    r.fittedConstant = worst;
    if (exact) r.extras = {{"good_control_min", fl.goodControlMin}};
    slots[i] = std::move(r);
  });
  out.reports = collect(slots);
  addSummary(out, out.id, out.reports);
  const double m = maxRatio(out.reports);
  out.constants.emplace_back(out.id + "/C", m);
  if (exact) {
    const auto all = [&](auto member) {
      return std::all_of(flags.begin(), flags.end(), [&](const Flags& f) { return f.*member; });
    };
    double good = kInf;
    for (const auto& f : flags) good = std::min(good, f.goodControlMin);
    out.constants.emplace_back(out.id + "/good_control_min", good);
    out.check(out.id + " good control <f 1_E>_Q >= (3/4) <f>_Q", all(&Flags::goodControl), "min " + num(good));
    out.check(out.id + " Cauchy-Schwarz per cube", all(&Flags::cauchySchwarz));
    out.check(out.id + " sum 1_E <w><sigma> <= [w]_A2 per cell", all(&Flags::cellSum));
    out.check(out.id + " chain", all(&Flags::chain));
    out.check(out.id + " ratio <= 16/9", m <= 16.0 / 9.0 * (1.0 + 1e-12), "max ratio " + num(m));
  } else {
    out.check(out.id + " finite", std::isfinite(m), "max ratio " + num(m));
  }
  return out;
}

namespace {

struct AinftyFlags {
  bool unionBound = true;
  bool levelSets = true;
  bool holder = true;
  bool reverseHolder = true;
  double betaRatio = 0.0;
  long betaCubes = 0;
};

/// Runs the tail lemma on one (family, f, w) for every m0. With `rescale`, f is
/// first scaled as in the square-function split.
std::vector<VerificationReport> ainftyInstance(const VerificationReport& base, const SparseFamily& family,
                                               const StepFunction& f, const Weight& w, double ap, double aInf,
                                               double p, const std::vector<int>& m0s, double reverseHolderC,
                                               bool rescale, AinftyFlags& fl) {
  std::vector<VerificationReport> out;
  if (f.isZero()) return out;
  const DyadicGrid& grid = w.grid();
  const double h = grid.cellLength();
  double scale = 1.0;
  if (rescale) {
    const double level = extremalLevel(applySparseSquare(family, f), w, p);
    if (level > 0.0) scale = std::sqrt(2.0) / level * (1.0 + 1e-9);
  }
  const StepFunction g = scaled(f, scale);
  const CubeSums sums(g);
  const PowerFamily bands = powerDecompose(family, g);
  const double gNorm = powerIntegral(g, w, p);

  for (const PowerBand& band : bands.bands) {
    const std::size_t support = band.support.count();
    int top = 0;
    for (std::size_t c = 0; c < grid.cellCount(); ++c) top = std::max(top, static_cast<int>(band.count[c]));
    for (int n = 1; n <= top; ++n) {
      std::size_t above = 0;
      for (std::size_t c = 0; c < grid.cellCount(); ++c) above += band.count[c] >= n ? 1 : 0;
      // 8^{n-1} |{b_m >= n}| <= |B_m| in integers.
      const int shift = 3 * (n - 1);
      if (shift > 62 || (above << shift) > support) fl.levelSets = false;
      // |{b_m > t}| <= 8^{-floor(t)+1} |B_m| at t = n - 1.
      if (n >= 2 && (above << (3 * (n - 2))) > support) fl.levelSets = false;
    }
  }

  const double r = reverseHolderExponent(aInf, reverseHolderC);
  for (int m0 : m0s) {
    std::vector<double> tail(grid.cellCount(), 0.0);
    std::vector<char> covered(grid.cellCount(), 0);
    for (const PowerBand& band : bands.bands) {
      if (band.m < m0) continue;
      const StepFunction part = sparseSquareSum(family, band.layered.source, sums);
      const double threshold = std::ldexp(1.0, m0 + band.m - 1);
      for (std::size_t c = 0; c < part.size(); ++c) {
        tail[c] += part[c];
        if (band.count[c] > threshold) covered[c] = 1;
      }
      // beta(Q) on each maximal cube: Hoelder with exponents r, r', then reverse Hoelder.
      for (std::size_t q = 0; q < band.layered.family.size(); ++q) {
        if (band.layered.layer[q] != 0) continue;
        const Cube& cube = band.layered.family[q];
        const std::size_t first = cube.firstCell(grid);
        const std::size_t span = cube.cellSpan(grid);
        std::size_t betaCount = 0;
        CompensatedAccumulator wBeta, wr, wq;
        for (std::size_t c = first; c < first + span; ++c) {
          wr.add(std::pow(w[c], r));
          wq.add(w[c]);
          if (band.count[c] > threshold) {
            ++betaCount;
            wBeta.add(w[c]);
          }
        }
        if (betaCount == 0) continue;
        const double n = static_cast<double>(span);
        const double fraction = static_cast<double>(betaCount) / n;
        const double avgWr = std::pow(wr.value() / n, 1.0 / r);
        const double avgW = wq.value() / n;
        const double avgBeta = wBeta.value() / n;
        if (!lessOrClose(avgBeta, std::pow(fraction, 1.0 - 1.0 / r) * avgWr, 1e-12)) fl.holder = false;
        if (!lessOrClose(avgWr, 2.0 * avgW, 1e-12)) fl.reverseHolder = false;
        fl.betaRatio = std::max(fl.betaRatio, avgBeta / (2.0 * std::pow(fraction, 1.0 - 1.0 / r) * avgW));
        ++fl.betaCubes;
      }
    }
    CompensatedAccumulator lhs;
    for (std::size_t c = 0; c < tail.size(); ++c) {
      if (tail[c] > 1.0) {
        lhs.add(w[c] * h);
        if (!covered[c]) fl.unionBound = false;
      }
    }
    VerificationReport rep = base;
    rep.id = base.id + "/m0=" + std::to_string(m0);
    rep.parameters.emplace_back("p", formatShortest(p));
    rep.parameters.emplace_back("m0", std::to_string(m0));
    rep.lhs = lhs.value();
    rep.rhs = ap * std::pow(aInf * std::ldexp(1.0, -m0), p) * gNorm;
    rep.ratio = ratioOf(rep.lhs, rep.rhs, "A_inf lemma");
    rep.fittedConstant = rep.ratio;
    rep.extras = {{"r", r}, {"scale", scale}};
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace

VerifierResult verifyAinftyLemma(const std::vector<int>& m0s, double p, const Corpus& corpus, double reverseHolderC,
                                 const Executor& executor) {
  if (m0s.empty()) throw DomainError("verifyAinftyLemma needs at least one m0");
  for (int m0 : m0s) {
    if (m0 < 1) throw DomainError("verifyAinftyLemma needs m0 >= 1");
  }
  if (!(p > 1.0)) throw DomainError("verifyAinftyLemma needs p > 1");
  VerifierResult out;
  out.id = "ainfty/p=" + num(p);
  const auto stats = weightStats(corpus, p, false, executor);

  // Corpus instances, rescaled as in the split, then deep chains at depth 14
  // with f = 1/2, where the tail set is not empty.
  const DyadicGrid stressGrid(14);
  const std::vector<std::string> stressWeights{"const:1", "power:a=0.5,x0=0.3", "cascade:theta=0.5", "spike:j=6"};
  const std::vector<double> stressPoints{0.05, 0.3, 0.7};
  const std::size_t stressCount = stressWeights.size() * stressPoints.size() * 3;
  const std::size_t total = corpus.instances.size() + stressCount;

  std::vector<AinftyFlags> flags(total);
  std::vector<std::vector<VerificationReport>> slots(total);
  executor.forEach(total, [&](std::size_t i) {
    if (i < corpus.instances.size()) {
      const Instance& inst = corpus.instances[i];
      const WeightStats& ws = stats[inst.weightIndex];
      slots[i] = ainftyInstance(instanceReport(out.id, corpus, inst), inst.family, inst.f, corpus.weightOf(inst), ws.ap,
                                ws.aInf, p, m0s, reverseHolderC, true, flags[i]);
      return;
    }
    const std::size_t k = i - corpus.instances.size();
    const std::string& spec = stressWeights[k / (stressPoints.size() * 3)];
    const double x = stressPoints[(k / 3) % stressPoints.size()];
    const int top = static_cast<int>(k % 3);
    const Weight w = generateWeight(stressGrid, spec, 1);
    const SparseFamily family = chainFamily(stressGrid, x, 3, top, stressGrid.depth());
    VerificationReport base;
    base.id = out.id;
    base.depth = stressGrid.depth();
    base.seed = 1;
    base.parameters = {{"weight", spec}, {"function", "const:0.5"}, {"sparse", "chain:x=" + num(x) + ",step=3,top=" +
                                                                        std::to_string(top)},
                       {"stress", "1"}};
    slots[i] = ainftyInstance(base, family, StepFunction::constant(stressGrid, 0.5), w, apConstant(w, p),
                              aInfConstant(w), p, m0s, reverseHolderC, false, flags[i]);
  });
  for (auto& s : slots) {
    for (auto& rep : s) out.reports.push_back(std::move(rep));
  }
  const auto all = [&](auto member) {
    return std::all_of(flags.begin(), flags.end(), [&](const AinftyFlags& f) { return f.*member; });
  };
  out.check(out.id + " union bound containment", all(&AinftyFlags::unionBound));
  out.check(out.id + " level sets of b_m", all(&AinftyFlags::levelSets));
  out.check(out.id + " Hoelder on beta(Q)", all(&AinftyFlags::holder));
  out.check(out.id + " reverse Hoelder on beta(Q)", all(&AinftyFlags::reverseHolder));
  double beta = 0.0;
  long betaCubes = 0;
  for (const auto& f : flags) {
    beta = std::max(beta, f.betaRatio);
    betaCubes += f.betaCubes;
  }
  out.constants.emplace_back(out.id + "/beta_ratio", beta);
  out.constants.emplace_back(out.id + "/beta_cubes", static_cast<double>(betaCubes));
  for (int m0 : m0s) {
    const std::string id = out.id + "/m0=" + std::to_string(m0);
    std::vector<VerificationReport> subset;
    std::size_t nonzero = 0;
    for (const auto& rep : out.reports) {
      if (rep.id != id) continue;
      subset.push_back(rep);
      nonzero += rep.lhs > 0.0 ? 1 : 0;
    }
    addSummary(out, id, subset);
    const double m = maxRatio(subset);
    out.check(id + " finite", std::isfinite(m), "max ratio " + num(m));
    out.constants.emplace_back(id + "/C", m);
    out.constants.emplace_back(id + "/nonzero", static_cast<double>(nonzero));
  }
  return out;
}

VerifierResult verifyReverseHolder(const Corpus& corpus) {
  VerifierResult out;
  out.id = "reverse-holder";
  std::vector<Weight> weights;
  std::vector<std::string> names;
  for (const auto& cw : corpus.weights) {
    weights.push_back(cw.w);
    names.push_back(cw.spec + " seed " + std::to_string(cw.seed) + " depth " + std::to_string(cw.depth));
  }
  const DyadicGrid spikeGrid(14);
  for (int j = 2; j <= 14; ++j) {
    weights.push_back(generateWeight(spikeGrid, "spike:j=" + std::to_string(j), 0));
    names.push_back("spike:j=" + std::to_string(j) + " depth 14");
  }
  const double c = calibrateReverseHolder(weights);
  out.constants.emplace_back(out.id + "/c", c);
  bool ok = true;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double aInf = aInfConstant(weights[i]);
    const double r = reverseHolderExponent(aInf, c);
    VerificationReport rep;
    rep.id = out.id;
    rep.depth = weights[i].grid().depth();
    rep.parameters = {{"weight", names[i]}, {"r", num(r)}, {"c", num(c)}};
    rep.lhs = reverseHolderCheck(weights[i], r);
    rep.rhs = 2.0;
    rep.ratio = rep.lhs / rep.rhs;
    rep.fittedConstant = rep.lhs;
    ok = ok && rep.lhs <= 2.0;
    out.reports.push_back(std::move(rep));
  }
  addSummary(out, out.id, out.reports);
  out.check(out.id + " <w^r>^{1/r} <= 2<w> with calibrated c", ok, "c = " + num(c));
  return out;
}

VerifierResult verifyStructure(int trials, int minDepth, int maxDepth, std::uint64_t seed, const Executor& executor) {
  if (trials < 0 || minDepth < 1 || maxDepth < minDepth || maxDepth > 22) {
    throw DomainError("verifyStructure needs trials >= 0 and 1 <= minDepth <= maxDepth <= 22");
  }
  VerifierResult out;
  out.id = "structure";
  static const char* kFunctions[] = {"noise:sigma=1", "cells:count=4", "power:a=-0.6,x0=0.3", "cascade:theta=0.6"};
  static const char* kFamilies[] = {"random:density=0.3", "stopping:ratio=8", "random:density=0.05",
                                    "chain:x=0.3,step=3"};

  struct Flags {
    bool sparse = true;
    bool exceptional = true;
    bool deep = true;
    bool reconstruct = true;
  };
  std::vector<Flags> flags(static_cast<std::size_t>(trials));
  std::vector<std::optional<VerificationReport>> slots(static_cast<std::size_t>(trials));
  executor.forEach(slots.size(), [&](std::size_t t) {
    const int depth = minDepth + static_cast<int>(t % static_cast<std::size_t>(maxDepth - minDepth + 1));
    const DyadicGrid grid(depth);
    const std::uint64_t s = deriveSeed(seed, t);
    const char* fSpec = kFunctions[(t / 3) % 4];
    const char* sSpec = kFamilies[t % 4];
    const StepFunction f = generateFunction(grid, fSpec, deriveSeed(s, 1));
    const SparseFamily family = generateSparse(grid, sSpec, f, deriveSeed(s, 2));
    Flags& fl = flags[t];
    fl.sparse = validateSparsity(family).pass;

    double worstEQ = 0.0;
    const CubeSums sums(f);
    const AverageSplit split = splitByAverage(family, sums, 4);
    for (const AverageBand& band : split.bands) {
      const LayeredFamily layered = layerDecompose(family, band.members);
      for (std::size_t i = 0; i < layered.family.size(); ++i) {
        const Cube& q = layered.family[i];
        const double whole = sums.integral(q);
        const double onE = integralOn(f, layered.exceptional[i]);
        if (!(whole <= 8.0 / 3.0 * onE)) fl.exceptional = false;
        worstEQ = std::max(worstEQ, whole / (8.0 / 3.0 * onE));
        const std::size_t span = q.cellSpan(grid);
        for (int u = 1; layered.layer[i] + u < layered.layerCount(); ++u) {
          const std::size_t deep = deepDescendantSet(layered, i, u).count();
          if (3 * u > 62 || (deep << (3 * u)) > span) fl.deep = false;
        }
      }
    }

    const PowerFamily bands = powerDecompose(family, f);
    std::vector<double> total(grid.cellCount(), 0.0);
    for (const PowerBand& band : bands.bands) {
      const StepFunction part = sparseSquareSum(family, band.layered.source, sums);
      for (std::size_t c = 0; c < part.size(); ++c) total[c] += part[c];
    }
    const StepFunction sf = applySparseSquare(family, f);
    for (std::size_t c = 0; c < total.size(); ++c) {
      const double expected = sf[c] * sf[c];
      if (std::abs(total[c] - expected) > 1e-12 * expected) fl.reconstruct = false;
    }

    VerificationReport r;
    r.id = out.id;
    r.depth = depth;
    r.seed = s;
    r.parameters = {{"trial", std::to_string(t)}, {"function", fSpec}, {"sparse", sSpec},
                    {"cubes", std::to_string(family.size())}};
    r.lhs = worstEQ;
    r.rhs = 1.0;
    r.ratio = worstEQ;
    r.fittedConstant = worstEQ;
    slots[t] = std::move(r);
  });
  out.reports = collect(slots);
  addSummary(out, out.id, out.reports);
  const auto all = [&](auto member) {
    return std::all_of(flags.begin(), flags.end(), [&](const Flags& f) { return f.*member; });
  };
  out.check("sparsity", all(&Flags::sparse));
  out.check("\\int_Q f <= (8/3) \\int_{E_Q} f", all(&Flags::exceptional));
  out.check("|Q_u| <= 8^-u |Q|", all(&Flags::deep));
  out.check("sum_m (S_m f)^2 = (Sf)^2", all(&Flags::reconstruct));
  out.constants.emplace_back("structure/eq_ratio", maxRatio(out.reports));
  return out;
}

}  // namespace sparselab
