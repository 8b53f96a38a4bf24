#include "sparselab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "sparselab/corpus.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/io.hpp"
#include "sparselab/report.hpp"
#include "sparselab/search.hpp"
#include "sparselab/spec_parse.hpp"
#include "sparselab/verify.hpp"

namespace sparselab {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string joinSpecs(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ";" : "") + xs[i];
  return out;
}

std::string joinNumbers(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + formatShortest(xs[i]);
  return out;
}

struct Common {
  std::string out = "sparselab-out";
  int jobs = 1;
  bool timing = false;
};

struct CorpusFlags {
  std::string depths = "6,8,10,12";
  std::string seeds = "1..4";
  std::string weights = joinSpecs(CorpusSpec::standard().weights);
  std::string functions = joinSpecs(CorpusSpec::standard().functions);
  std::string sparse = joinSpecs(CorpusSpec::standard().sparse);

  [[nodiscard]] CorpusSpec spec() const {
    CorpusSpec s;
    s.depths = parseIntList(depths);
    s.seeds = parseSeedList(seeds);
    s.weights = splitSpecList(weights);
    s.functions = splitSpecList(functions);
    s.sparse = splitSpecList(sparse);
    for (int d : s.depths) {
      if (d < 1 || d > 20) throw ParseError("--depths: depth " + std::to_string(d) + " outside [1, 20]");
    }
    return s;
  }
};

void addCommon(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Output directory")->envname("SPARSELAB_OUT")->capture_default_str();
  sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
  sub->add_flag("--timing", c.timing, "Record wall time in the outputs (breaks byte-identical reruns)");
}

void addCorpus(CLI::App* sub, CorpusFlags& c) {
  sub->add_option("--depths", c.depths, "Grid depths, e.g. 6,8,10 or 6..12")->capture_default_str();
  sub->add_option("--seeds", c.seeds, "Seed list, e.g. 1..100")->capture_default_str();
  sub->add_option("--weights", c.weights, "Weight generator specs separated by ';'")->capture_default_str();
  sub->add_option("--functions", c.functions, "Function generator specs separated by ';'")->capture_default_str();
  sub->add_option("--sparse", c.sparse, "Sparse family strategies separated by ';'")->capture_default_str();
}

std::unique_ptr<Executor> makeExecutor(int jobs) {
  if (jobs <= 1) return std::make_unique<SerialExecutor>();
  return std::make_unique<ThreadExecutor>(static_cast<std::size_t>(jobs));
}

double secondsSince(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ReportContext contextFor(const std::string& canonical, std::vector<std::uint64_t> seeds, const Common& c) {
  ReportContext ctx;
  ctx.configHash = configHash(canonical);
  ctx.seeds = std::move(seeds);
  ctx.timing = c.timing;
  return ctx;
}

/// Writes <stem>.jsonl, <stem>.csv and <stem>-constants.csv, prints the checks.
int finishVerifiers(const std::string& stem, const std::vector<VerifierResult>& results, ReportContext ctx,
                    const Common& common, Clock::time_point t0, std::ostream& out) {
  std::vector<VerificationReport> reports;
  std::vector<SummaryRow> summary;
  std::vector<std::pair<std::string, double>> constants;
  bool pass = true;
  for (const auto& r : results) {
    reports.insert(reports.end(), r.reports.begin(), r.reports.end());
    summary.insert(summary.end(), r.summary.begin(), r.summary.end());
    constants.insert(constants.end(), r.constants.begin(), r.constants.end());
    pass = pass && r.pass();
  }
  ctx.elapsedSeconds = secondsSince(t0);
  const fs::path dir(common.out);
  emitReport(reports, summary, ReportPaths::in(dir, stem), ctx);
  writeTextFile(dir / (stem + "-constants.csv"), constantsCsv(constants, ctx));
  for (const auto& r : results) {
    for (const auto& c : r.checks) out << (c.pass ? "ok   " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  out << summaryCsv(summary, ctx);
  out << (pass ? "PASS" : "FAIL") << " " << stem << " (" << reports.size() << " reports, config " << ctx.configHash
      << ")\n";
  return pass ? kExitOk : kExitAssertion;
}

/// Nested chain of cubes around 0 every three levels, f concentrated on the
/// first cell, w = 1.
std::string readFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Bound the objective must stay under: the fitted weak-type constant times
/// c_phi for ratio-orlicz, the fitted square constant for square, none for ratio-plain.
std::optional<double> fittedBound(const Objective& objective, const YoungFunction& phi, double p,
                                  const std::string& flag, const Executor& exec) {
  if (flag == "none") return std::nullopt;
  if (flag != "auto") return parseDouble(flag);
  if (objective.kind() == ObjectiveKind::RatioPlain) return std::nullopt;
  const Corpus corpus = buildCorpus(CorpusSpec::standard());
  if (objective.kind() == ObjectiveKind::RatioOrlicz) {
    const VerifierResult r = verifyMainTheorem(phi, corpus, exec);
    return *r.constant(r.id + "/C") * *r.constant(r.id + "/c_phi");
  }
  const VerifierResult r = verifySquareTheorem(p, corpus, exec);
  return *r.constant(r.id + "/C");
}

int parseError(CLI::App& app, const CLI::ParseError& e, std::ostream& out, std::ostream& err) {
  const int code = app.exit(e, out, err);
  return code == 0 ? kExitOk : kExitUsage;
}

}  // namespace

int runSubcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for weak-type bounds of sparse operators on the dyadic grid", "sparselab"};
  app.set_version_flag("--version", std::string(SPARSELAB_VERSION));
  app.set_config("--config", "", "TOML/INI config file; [subcommand] sections set its flags, command-line flags win");
  app.require_subcommand(1, 1);
  app.allow_config_extras(CLI::config_extras_mode::error);

  Common common;
  CorpusFlags corpus;
  std::function<int()> action;
  const auto t0 = Clock::now();

  // ---- orlicz-norm ----
  std::string family = "power:r=2";
  std::string weightSpec;
  int depth = 6;
  std::string cube = "0,0";
  std::uint64_t seed = 1;
  {
    auto* sub = app.add_subcommand("orlicz-norm", "Luxemburg norm of a generated weight on one cube");
    sub->add_option("--family", family, "Young function, e.g. power:r=2, llog:eps=0.5")->capture_default_str();
    sub->add_option("--weight", weightSpec, "Weight generator spec, e.g. const:3")->required();
    sub->add_option("--depth", depth, "Grid depth")->check(CLI::Range(1, 20))->capture_default_str();
    sub->add_option("--cube", cube, "Cube as level,index")->capture_default_str();
    sub->add_option("--seed", seed, "Generator seed")->capture_default_str();
    addCommon(sub, common);
    sub->callback([&] {
      action = [&] {
        const YoungFunction phi = parseYoungFunction(family);
        const DyadicGrid grid(depth);
        const auto parts = parseIntList(cube);
        if (parts.size() != 2 || parts[0] < 0 || parts[0] > depth || parts[1] < 0 ||
            static_cast<std::uint64_t>(parts[1]) >= (std::uint64_t{1} << parts[0])) {
          throw ParseError("--cube must be level,index inside the grid");
        }
        const Cube q{parts[0], static_cast<std::uint64_t>(parts[1])};
        const Weight w = generateWeight(grid, weightSpec, seed);
        const double norm = luxemburgNorm(w.function(), q, phi);
        VerificationReport r;
        r.id = "orlicz-norm";
        r.parameters = {{"phi", phi.spec()}, {"weight", weightSpec}, {"cube", cube}};
        r.depth = depth;
        r.lhs = norm;
        r.seed = seed;
        const ReportContext ctx = contextFor(
            "orlicz-norm\nphi=" + phi.spec() + "\nweight=" + weightSpec + "\ndepth=" + std::to_string(depth) +
                "\ncube=" + cube + "\nseed=" + std::to_string(seed) + "\n",
            {seed}, common);
        emitReport({r}, ReportPaths::in(common.out, "orlicz-norm"), ctx);
        out << format17(norm) << "\n";
        return kExitOk;
      };
    });
  }

  // ---- cphi ----
  bool surrogate = false;
  {
    auto* sub = app.add_subcommand("cphi", "Operator constant c_phi = sum_k 1/psi^{-1}(2^{2^k})");
    sub->add_option("--family", family, "Young function")->capture_default_str();
    sub->add_flag("--surrogate", surrogate, "Use the closed-form surrogate for psi^{-1} (log families)");
    addCommon(sub, common);
    sub->callback([&] {
      action = [&] {
        const YoungFunction phi = parseYoungFunction(family);
        const CPhiResult c = cPhi(phi, surrogate);
        VerificationReport r;
        r.id = "cphi";
        r.parameters = {{"phi", phi.spec()}, {"surrogate", surrogate ? "true" : "false"}};
        r.lhs = c.value;
        r.extras = {{"truncation_k", static_cast<double>(c.truncationK)}};
        if (c.tailEstimate) r.extras.emplace_back("tail_estimate", *c.tailEstimate);
        if (c.rangeLimited) r.flags.push_back("range-limited");
        const ReportContext ctx =
            contextFor("cphi\nphi=" + phi.spec() + "\nsurrogate=" + (surrogate ? "1" : "0") + "\n", {}, common);
        emitReport({r}, ReportPaths::in(common.out, "cphi"), ctx);
        out << "c_phi=" << format17(c.value) << " k=" << c.truncationK;
        if (c.tailEstimate) out << " tail=" << format17(*c.tailEstimate);
        if (c.rangeLimited) out << " range-limited";
        out << "\n";
        return kExitOk;
      };
    });
  }

  // ---- corpus verifiers ----
  const auto corpusRun = [&](const std::string& stem, const std::string& extra,
                             const std::function<std::vector<VerifierResult>(const Corpus&, const Executor&)>& run) {
    const CorpusSpec spec = corpus.spec();
    const auto exec = makeExecutor(common.jobs);
    const Corpus built = buildCorpus(spec);
    const std::vector<VerifierResult> results = run(built, *exec);
    return finishVerifiers(stem, results, contextFor(stem + "\n" + spec.canonical() + extra, spec.seeds, common),
                           common, t0, out);
  };

  {
    auto* sub = app.add_subcommand("verify-weak", "Weak-type bound of T against the Orlicz maximal majorant");
    sub->add_option("--family", family, "Young function")->capture_default_str();
    addCorpus(sub, corpus);
    addCommon(sub, common);
    sub->callback([&] {
      action = [&] {
        const YoungFunction phi = parseYoungFunction(family);
        return corpusRun("verify-weak", "phi=" + phi.spec() + "\n", [&](const Corpus& c, const Executor& e) {
          return std::vector<VerifierResult>{verifyMainTheorem(phi, c, e)};
        });
      };
    });
  }
  {
    auto* sub = app.add_subcommand("verify-lemma", "Band-by-band estimate behind the weak-type bound");
    sub->add_option("--family", family, "Young function")->capture_default_str();
    addCorpus(sub, corpus);
    addCommon(sub, common);
    sub->callback([&] {
      action = [&] {
        const YoungFunction phi = parseYoungFunction(family);
        return corpusRun("verify-lemma", "phi=" + phi.spec() + "\n", [&](const Corpus& c, const Executor& e) {
          return std::vector<VerifierResult>{verifyLemmaBasic(phi, c, e), verifyOrliczLemma(phi, c)};
        });
      };
    });
  }
  std::string ps = "1,1.5,2,3";
  {
    auto* sub = app.add_subcommand("verify-fs", "Weak (1,1) bound of M against Mw and the sharp weak A_p bound");
    sub->add_option("--ps", ps, "Exponents for the A_p bound")->capture_default_str();
    addCorpus(sub, corpus);
    addCommon(sub, common);
    sub->callback([&] {
      action = [&] {
        const auto pv = parseDoubleList(ps);
        return corpusRun("verify-fs", "ps=" + joinNumbers(pv) + "\n", [&](const Corpus& c, const Executor& e) {
          return std::vector<VerifierResult>{verifyFeffermanStein(c, e, pv)};
        });
      };
    });
  }
  double p = 2.0;
  int spikeDepth = 14;
  std::string spikeJ = "2..14";
  {
    auto* sub = app.add_subcommand("verify-square", "Weak L^p(w) bound of the sparse square function");
    sub->add_option("--p", p, "Exponent")->check(CLI::Range(1.0, 100.0))->capture_default_str();
    sub->add_option("--spike-depth", spikeDepth, "Grid depth of the spike-weight sweep (p = 2 only)")
        ->check(CLI::Range(4, 20))
        ->capture_default_str();
    sub->add_option("--spike-j", spikeJ, "Spike levels of the sweep, e.g. 2..14")->capture_default_str();
    addCorpus(sub, corpus);
    addCommon(sub, common);
    sub->callback([&] {
      action = [&] {
        const auto js = parseIntList(spikeJ);
        if (js.empty()) throw ParseError("--spike-j is empty");
        const int jMin = *std::min_element(js.begin(), js.end());
        const int jMax = *std::max_element(js.begin(), js.end());
        if (jMin < 1 || jMax > spikeDepth) throw ParseError("--spike-j must lie in [1, spike-depth]");
        const std::string extra = "p=" + formatShortest(p) + "\nspike=" + std::to_string(spikeDepth) + ":" +
                                  std::to_string(jMin) + ".." + std::to_string(jMax) + "\n";
        return corpusRun("verify-square", extra, [&](const Corpus& c, const Executor& e) {
          std::vector<VerifierResult> results{verifySquareTheorem(p, c, e)};
          if (p == 2.0) {
            const SpikeSweep sweep = squareSpikeSweep(spikeDepth, jMin, jMax, p, e);
            VerifierResult s;
            s.id = "square-spike/p=2";
            for (const auto& row : sweep.rows) {
              VerificationReport r;
              r.id = s.id;
              r.depth = spikeDepth;
              r.parameters = {{"weight", "spike:j=" + std::to_string(row.j)}};
              r.lhs = row.best;
              r.rhs = row.best / row.normalized;
              r.ratio = row.normalized;
              r.fittedConstant = row.normalized;
              r.extras = {{"a2", row.a2}, {"ainf", row.aInf}, {"unnormalized", row.unnormalized}};
              s.reports.push_back(std::move(r));
            }
            s.check("spike sweep spans 3 decades of [w]_A2", sweep.decades >= 3.0, formatShortest(sweep.decades));
            s.check("normalized ratio varies by at most 3x", sweep.variation <= 3.0, formatShortest(sweep.variation));
            s.constants = {{s.id + "/variation", sweep.variation},
                           {s.id + "/unnormalized-growth", sweep.unnormalizedGrowth},
                           {s.id + "/decades", sweep.decades}};
            results.push_back(std::move(s));
          }
          return results;
        });
      };
    });
  }
  std::string m0s = "1..6";
  std::string rhc = "auto";
  {
    auto* sub = app.add_subcommand("verify-ainfty", "Large-band estimate with exponential level sets of b_m");
    sub->add_option("--p", p, "Exponent")->check(CLI::Range(1.0, 100.0))->capture_default_str();
    sub->add_option("--m0s", m0s, "Split indices m0 to test")->capture_default_str();
    sub->add_option("--rh-c", rhc, "Reverse Hoelder constant c, or auto to calibrate on the corpus")
        ->capture_default_str();
    addCorpus(sub, corpus);
    addCommon(sub, common);
    sub->callback([&] {
      action = [&] {
        const auto ms = parseIntList(m0s);
        return corpusRun("verify-ainfty", "p=" + formatShortest(p) + "\nm0s=" + m0s + "\nrh-c=" + rhc + "\n",
                         [&](const Corpus& c, const Executor& e) {
                           std::vector<VerifierResult> results;
                           double cr = 0.0;
                           if (rhc == "auto") {
                             results.push_back(verifyReverseHolder(c));
                             cr = *results.back().constant("reverse-holder/c");
                           } else {
                             cr = parseDouble(rhc);
                           }
                           results.push_back(verifyAinftyLemma(ms, p, c, cr, e));
                           return results;
                         });
      };
    });
  }
  {
    auto* sub = app.add_subcommand("verify-apbound", "Moderate-band estimate: good control and the per-cube chain");
    sub->add_option("--p", p, "Exponent")->check(CLI::Range(1.0, 100.0))->capture_default_str();
    addCorpus(sub, corpus);
    addCommon(sub, common);
    sub->callback([&] {
      action = [&] {
        return corpusRun("verify-apbound", "p=" + formatShortest(p) + "\n", [&](const Corpus& c, const Executor& e) {
          return std::vector<VerifierResult>{verifyApBoundLemma(p, c, e)};
        });
      };
    });
  }

  // ---- search ----
  std::string objectiveKind = "ratio-orlicz";
  std::size_t iters = 1000;
  SearchConfig config;
  std::string start = "trivial";
  std::string bound = "auto";
  std::string depths = "6..14";
  const auto addSearchFlags = [&](CLI::App* sub) {
    sub->add_option("--iters", iters, "Iterations per chain")->capture_default_str();
    sub->add_option("--seed", seed, "Search seed")->capture_default_str();
    sub->add_option("--restarts", config.restarts, "Independent chains")->check(CLI::Range(1, 1 << 20))
        ->capture_default_str();
    sub->add_option("--sigma", config.sigma, "Standard deviation of log(scale factor)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--toggle", config.toggleProbability, "Probability of a cube toggle move")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sub->add_option("--scramble", config.scramble, "Random moves applied before chains r >= 1")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--bound", bound, "Fitted bound: auto, none or a number; exceeding it writes a witness")
        ->capture_default_str();
  };
  const auto searchCanonical = [&] {
    return "iters=" + std::to_string(iters) + "\nseed=" + std::to_string(seed) + "\nrestarts=" +
           std::to_string(config.restarts) + "\nsigma=" + formatShortest(config.sigma) +
           "\ntoggle=" + formatShortest(config.toggleProbability) + "\nscramble=" + std::to_string(config.scramble) +
           "\nbound=" + bound + "\n";
  };
  {
    auto* sub = app.add_subcommand("search", "Hill climbing for large weak-type ratios");
    sub->add_option("--objective", objectiveKind, "ratio-orlicz, ratio-plain or square")
        ->check(CLI::IsMember({"ratio-orlicz", "ratio-plain", "square"}))
        ->capture_default_str();
    sub->add_option("--family", family, "Young function of ratio-orlicz")->capture_default_str();
    sub->add_option("--p", p, "Exponent of square")->check(CLI::Range(1.0, 100.0))->capture_default_str();
    sub->add_option("--depth", depth, "Grid depth")->check(CLI::Range(1, 20))->capture_default_str();
    sub->add_option("--start", start, "Seed instance: trivial, chain, or a witness JSON file")->capture_default_str();
    addSearchFlags(sub);
    addCommon(sub, common);
    sub->callback([&] {
      action = [&] {
        const YoungFunction phi = parseYoungFunction(family);
        const Objective objective = Objective::parse(objectiveKind, phi, p);
        const DyadicGrid grid(depth);
        SearchInstance seedInstance = SearchInstance::trivial(grid);
        if (start == "chain") {
          seedInstance = SearchInstance::chain(grid);
        } else if (start != "trivial") {
          seedInstance = witnessFromJson(readFile(start)).instance;
          if (seedInstance.f.grid().depth() != depth) throw ParseError("--start witness depth differs from --depth");
        }
        const auto exec = makeExecutor(common.jobs);
        const std::optional<double> limit = fittedBound(objective, phi, p, bound, *exec);
        const SearchState state = searchWithRestarts(objective, seedInstance, iters, seed, config, *exec);
        const std::string canonical = "search\nobjective=" + objective.spec() + "\ndepth=" + std::to_string(depth) +
                                      "\nstart=" + start + "\n" + searchCanonical();
        ReportContext ctx = contextFor(canonical, {seed}, common);
        ctx.elapsedSeconds = secondsSince(t0);
        VerificationReport r;
        r.id = "search/" + objective.spec();
        r.parameters = {{"start", start}};
        r.depth = depth;
        r.lhs = state.bestValue;
        r.rhs = limit.value_or(std::nan(""));
        r.ratio = state.bestValue;
        r.fittedConstant = state.bestValue;
        r.seed = seed;
        r.extras = {{"iterations", static_cast<double>(state.iterations)},
                    {"accepted", static_cast<double>(state.accepted)},
                    {"cubes", static_cast<double>(state.best.family.size())}};
        const fs::path dir(common.out);
        emitReport({r}, ReportPaths::in(dir, "search"), ctx);
        std::string trace = csvPreamble(ctx) + "iteration,best\n";
        for (std::size_t i = 0; i < state.trace.size(); ++i) {
          trace += std::to_string(i) + "," + format17(state.trace[i]) + "\n";
        }
        writeTextFile(dir / "search-trace.csv", trace);
        writeTextFile(dir / "search-best.json",
                      witnessJson(state.best, objective, state.bestValue, seed, ctx.configHash) + "\n");
        out << "best=" << format17(state.bestValue) << " accepted=" << state.accepted
            << " iterations=" << state.iterations;
        if (limit) out << " bound=" << format17(*limit);
        out << "\n";
        if (limit && state.bestValue > *limit) {
          const fs::path witness = dir / ("witness-search-" + ctx.configHash + ".json");
          writeTextFile(witness, witnessJson(state.best, objective, state.bestValue, seed, ctx.configHash) + "\n");
          out << "FAIL bound exceeded, witness written to " << witness.string() << "\n";
          return kExitAssertion;
        }
        return kExitOk;
      };
    });
  }
  {
    auto* sub = app.add_subcommand("mw-probe", "Plain Mw against M_{L(log L)^{1/2}} w on the same searched instances");
    sub->add_option("--depths", depths, "Increasing depths")->capture_default_str();
    addSearchFlags(sub);
    addCommon(sub, common);
    sub->callback([&] {
      action = [&] {
        const auto ds = parseIntList(depths);
        for (int d : ds) {
          if (d < 1 || d > 20) throw ParseError("--depths: depth " + std::to_string(d) + " outside [1, 20]");
        }
        const YoungFunction phi = YoungFunction::llogEps(0.5);
        const auto exec = makeExecutor(common.jobs);
        const std::optional<double> limit = fittedBound(Objective::ratioOrlicz(phi), phi, 2.0, bound, *exec);
        const std::vector<ProbeRow> rows = mwProbe(ds, iters, seed, config, *exec);
        ReportContext ctx = contextFor("mw-probe\ndepths=" + depths + "\n" + searchCanonical(), {seed}, common);
        ctx.elapsedSeconds = secondsSince(t0);
        const fs::path dir(common.out);
        const std::string csv = probeCsv(rows, ctx);
        writeTextFile(dir / "mw-probe.csv", csv);
        out << csv;
        int code = kExitOk;
        if (limit) {
          for (const auto& row : rows) {
            if (row.orliczBest > *limit && row.orliczArgmax) {
              const fs::path witness = dir / ("witness-mw-probe-depth" + std::to_string(row.depth) + ".json");
              writeTextFile(witness, witnessJson(*row.orliczArgmax, Objective::ratioOrlicz(phi), row.orliczBest, seed,
                                                 ctx.configHash) +
                                         "\n");
              out << "FAIL orlicz column " << format17(row.orliczBest) << " above bound " << format17(*limit)
                  << " at depth " << row.depth << ", witness " << witness.string() << "\n";
              code = kExitAssertion;
            }
          }
          if (code == kExitOk) out << "PASS orlicz column within bound " << format17(*limit) << "\n";
        }
        return code;
      };
    });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return parseError(app, e, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    return action ? action() : kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAssertion;
  }
}

}  // namespace sparselab
