#pragma once

// Inequality verifiers: each evaluates both sides of an estimate over a corpus,
// fits the implied constant and records hard checks.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparselab/corpus.hpp"
#include "sparselab/dyadic.hpp"
#include "sparselab/orlicz.hpp"
#include "sparselab/parallel.hpp"
#include "sparselab/sparse.hpp"
#include "sparselab/weights.hpp"

namespace sparselab {

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

/// One inequality trial.
struct VerificationReport {
  std::string id;
  std::vector<std::pair<std::string, std::string>> parameters;
  int depth = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double fittedConstant = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> runtimeSeconds;
  std::vector<std::pair<std::string, double>> extras;
  std::vector<std::string> flags;
};

struct SummaryRow {
  std::string id;
  int depth = 0;
  double maxRatio = 0.0;
  double fittedConstant = 0.0;
};

struct VerifierResult {
  std::string id;
  std::vector<VerificationReport> reports;
  std::vector<SummaryRow> summary;
  std::vector<Check> checks;
  /// Named fitted constants, persisted for regression tracking.
  std::vector<std::pair<std::string, double>> constants;

  [[nodiscard]] bool pass() const;
  void check(std::string name, bool ok, std::string detail = {});
  [[nodiscard]] std::optional<double> constant(std::string_view name) const;
};

/// lhs / rhs after checking that both are finite and rhs > 0.
[[nodiscard]] double ratioOf(double lhs, double rhs, const char* what);

/// maxRatio (or fittedConstant) at the deepest summary row over the shallowest; 0/0 counts as 1.
[[nodiscard]] double depthDrift(const std::vector<SummaryRow>& rows, bool fitted = false);

/// Per-depth maxima of report ratios and fitted constants, ascending depth.
[[nodiscard]] std::vector<SummaryRow> summarizeByDepth(const std::string& id,
                                                       const std::vector<VerificationReport>& reports);

inline constexpr double kDriftLimit = 1.5;

// ---- main theorem ----

/// sup_lambda lambda w(Tf > lambda) / \int f majorant.
[[nodiscard]] double weakTypeRatio(const SparseFamily& family, const StepFunction& f, const StepFunction& w,
                                   const StepFunction& majorant);

/// Max over the corpus of weakTypeRatio with majorant M_{phi(L)} w, divided by c_phi.
[[nodiscard]] VerifierResult verifyMainTheorem(const YoungFunction& phi, const Corpus& corpus,
                                               const Executor& executor = serialExecutor(),
                                               double driftLimit = kDriftLimit);

// ---- key lemma ----

/// {4 < Tf <= 8} minus {Mf > 1/4}.
[[nodiscard]] CellSet lemmaRegion(const SparseFamily& family, const StepFunction& f);

struct LemmaBasicTerms {
  int k = 0;
  /// \int_E T_k f w, split exactly into the deep-set part and the rest.
  double lhs = 0.0;
  double mainTerm = 0.0;
  double remainder = 0.0;
  double regionWeight = 0.0;    ///< w(E)
  double remainderBound = 0.0;  ///< 2^{-k} w(E)
  double orliczIntegral = 0.0;  ///< \int f M_{phi(L)} w
  double growthLog2 = 0.0;      ///< log2 of psi^{-1}(2^{2^k}) or its surrogate
  double fittedC = 0.0;         ///< (lhs - 2^{-k} w(E))_+ / (\int f M w / psi^{-1})
  double fittedMain = 0.0;      ///< mainTerm / (\int f M w / psi^{-1})
  int maxLayer = 0;
  bool layerCutoffHolds = true;  ///< no cell of E lies in a cube of layer > 4^{k+1}
};

/// Evaluates the lemma for one band S_k (given as a layered family of cubes with
/// 4^{-k-1} < <f>_Q <= 4^{-k}) on the region E.
[[nodiscard]] LemmaBasicTerms evaluateLemmaBasic(int k, const LayeredFamily& band, const CubeSums& sums,
                                                 const StepFunction& w, const CellSet& region, double orliczIntegral,
                                                 double growthLog2);

/// Thresholds t of the extra regions {t < Tf <= 2t} evaluated after rescaling.
inline constexpr double kLemmaLevels[] = {0.5, 0.25, 0.125};

struct LemmaBasicInstance {
  /// Region built verbatim; empty at desk depths (flagged vacuous).
  std::vector<LemmaBasicTerms> verbatim;
  bool vacuous = true;
  /// f rescaled so that max Mf = 1/4, region {Mf <= 1/4} (the whole grid).
  std::vector<LemmaBasicTerms> full;
  /// Same rescaled f on the regions {t < Tf <= 2t}, one entry per kLemmaLevels value.
  std::vector<std::vector<LemmaBasicTerms>> levels;
  /// sum_k \int_E T_k f w = \int_E Tf w on every region.
  bool telescopes = true;
  double fittedC = 0.0;
  double fittedMain = 0.0;

  template <class Fn>
  void forEachTerms(Fn&& fn) const {
    for (const auto& t : verbatim) fn(t);
    for (const auto& t : full) fn(t);
    for (const auto& level : levels) {
      for (const auto& t : level) fn(t);
    }
  }
};

[[nodiscard]] LemmaBasicInstance lemmaBasicInstance(const SparseFamily& family, const StepFunction& f,
                                                    const StepFunction& w, const StepFunction& majorant,
                                                    const YoungFunction& phi);

[[nodiscard]] VerifierResult verifyLemmaBasic(const YoungFunction& phi, const Corpus& corpus,
                                              const Executor& executor = serialExecutor(),
                                              double driftLimit = kDriftLimit);

// ---- maximal function estimates ----

/// sup_lambda lambda w(Mf > lambda) <= C \int f Mw, plus the sharp weak-type
/// A_p bound lambda^p w(Mf > lambda) <= C [w]_{A_p} ||f||_{L^p(w)}^p for each p
/// (p = 1 uses [w]_{A_1}).
[[nodiscard]] VerifierResult verifyFeffermanStein(const Corpus& corpus, const Executor& executor = serialExecutor(),
                                                  const std::vector<double>& ps = {1.0, 1.5, 2.0, 3.0},
                                                  double driftLimit = kDriftLimit);

// ---- Orlicz lemma ----

/// <w>_Q psi^{-1}(|Q|/|E|) / ||w||_{phi(L),Q} for w supported on E inside Q.
[[nodiscard]] double orliczLemmaRatio(const StepFunction& w, const CellSet& e, const Cube& q, const YoungFunction& phi);

/// Random (w 1_E, E, Q) cases built from the corpus weights; the ratio is at
/// most 2 for Power families.
[[nodiscard]] VerifierResult verifyOrliczLemma(const YoungFunction& phi, const Corpus& corpus, int casesPerWeight = 3,
                                               std::uint64_t seed = 1);

// ---- square function ----

/// [w]_{A_1} for p = 1, [w]_{A_p}^{1/p} for 1 < p < 2,
/// ([w]_{A_p} log_1 [w]_{A_inf})^{1/2} for p >= 2.
[[nodiscard]] double squareConstant(double p, double a1, double ap, double aInf);

/// m_0 = ceil(log2(1 + [w]_{A_inf})) + 1.
[[nodiscard]] int splitIndex(double aInf);

struct SquareSplit {
  double scale = 1.0;  ///< g = scale f puts the extremal level of Sg at sqrt 2
  int m0 = 1;
  double lhs = 0.0;       ///< w((Sg)^2 > 2)
  double maximalTerm = 0.0;  ///< w(Mg > 1)
  double moderateTerm = 0.0;  ///< w(sum_{0 <= m < m0} (S_m g)^2 > 1)
  double largeTerm = 0.0;     ///< w(sum_{m >= m0} (S_m g)^2 > 1)
  bool contained = true;      ///< {(Sg)^2 > 2} inside the union of the three sets
  double minkowskiBound = 0.0;  ///< (sum_{m < m0} ||S_m g||_{L^p(w)}^2)^{p/2}
  double maximalBound = 0.0;    ///< [w]_{A_p} ||g||_{L^p(w)}^p
  double moderateConstant = 0.0;  ///< max_m ||S_m g||^2_{L^p(w)} / ([w]_{A_p} ||g||^2_{L^p(w)})
  double largeBound = 0.0;        ///< [w]_{A_p} ([w]_{A_inf}/2^{m0})^p ||g||^p
};

[[nodiscard]] SquareSplit squareSplit(const SparseFamily& family, const StepFunction& f, const Weight& w, double p,
                                      double ap, double aInf);

[[nodiscard]] VerifierResult verifySquareTheorem(double p, const Corpus& corpus,
                                                 const Executor& executor = serialExecutor(),
                                                 double driftLimit = kDriftLimit);

struct SpikeSweepRow {
  int j = 0;
  double a2 = 0.0;
  double aInf = 0.0;
  double best = 0.0;          ///< max weakNorm(Sf, w, p) / ||f||_{L^p(w)}
  double normalized = 0.0;    ///< best / ([w]_{A_2} log_1 [w]_{A_inf})^{1/2}
  double unnormalized = 0.0;  ///< best / [w]_{A_2}^{1/2}
};

struct SpikeSweep {
  std::vector<SpikeSweepRow> rows;
  double variation = 0.0;  ///< max/min of the normalized column
  double unnormalizedGrowth = 0.0;  ///< last/first of the unnormalized column
  double decades = 0.0;    ///< log10 of the [w]_{A_2} span
};

/// Spike weights spike:j on a depth-`depth` grid for j in [jMin, jMax], with
/// test functions and families placed around the spike.
[[nodiscard]] SpikeSweep squareSpikeSweep(int depth, int jMin, int jMax, double p = 2.0,
                                          const Executor& executor = serialExecutor());

// ---- square function lemmas ----

[[nodiscard]] VerifierResult verifyApBoundLemma(double p, const Corpus& corpus,
                                                const Executor& executor = serialExecutor());

/// Also checks the level sets |{b_m > t}| <= 8^{-floor(t)+1} |B_m|, the union
/// bound over m and the reverse Hoelder conversion on beta(Q) with
/// r = 1 + 1/(c [w]_{A_inf}).
[[nodiscard]] VerifierResult verifyAinftyLemma(const std::vector<int>& m0s, double p, const Corpus& corpus,
                                               double reverseHolderC, const Executor& executor = serialExecutor());

/// Calibrates the reverse Hoelder constant c over the corpus weights plus
/// spike weights, then rechecks every weight.
[[nodiscard]] VerifierResult verifyReverseHolder(const Corpus& corpus);

/// Sparsity, exceptional-set and deep-set bounds and the band reconstruction of
/// (Sf)^2 on seeded families over depths [minDepth, maxDepth].
[[nodiscard]] VerifierResult verifyStructure(int trials, int minDepth, int maxDepth, std::uint64_t seed,
                                             const Executor& executor = serialExecutor());

}  // namespace sparselab
