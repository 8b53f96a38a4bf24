#pragma once

// JSON-lines and CSV emission. Every file starts with the config hash, the seed
// list and the version, and all numbers use 17 significant digits.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparselab/search.hpp"
#include "sparselab/verify.hpp"

namespace sparselab {

struct ReportContext {
  std::string configHash;
  std::vector<std::uint64_t> seeds;
  std::string version = SPARSELAB_VERSION;
  /// Runtimes are written only when set; they break byte-identical reruns.
  bool timing = false;
  /// Wall time of the whole run, written to the CSV preamble when timing is set.
  std::optional<double> elapsedSeconds;
};

/// hex64(fnv1a64(canonical)).
[[nodiscard]] std::string configHash(std::string_view canonical);

/// "# config_hash=..\n# seeds=..\n# version=..\n", plus "# elapsed_seconds=.." under timing.
[[nodiscard]] std::string csvPreamble(const ReportContext& ctx);

[[nodiscard]] std::string reportJsonLine(const VerificationReport& report, const ReportContext& ctx);

/// Preamble, then "id,depth,max_ratio,fitted_constant" and one row per entry.
[[nodiscard]] std::string summaryCsv(const std::vector<SummaryRow>& rows, const ReportContext& ctx);

/// Preamble, then "depth,plainM_best,orlicz_best".
[[nodiscard]] std::string probeCsv(const std::vector<ProbeRow>& rows, const ReportContext& ctx);

/// Per-id summarizeByDepth, ids in order of first appearance.
[[nodiscard]] std::vector<SummaryRow> summarize(const std::vector<VerificationReport>& reports);

/// Preamble, then "name,value" and one row per constant.
[[nodiscard]] std::string constantsCsv(const std::vector<std::pair<std::string, double>>& constants,
                                       const ReportContext& ctx);

/// Reads the name,value rows of a constants CSV, skipping the preamble and header.
[[nodiscard]] std::vector<std::pair<std::string, double>> parseConstantsCsv(std::string_view text);

struct ReportPaths {
  std::filesystem::path jsonl;
  std::filesystem::path csv;

  /// <dir>/<stem>.jsonl and <dir>/<stem>.csv
  [[nodiscard]] static ReportPaths in(const std::filesystem::path& dir, const std::string& stem);
};

/// Writes one JSON line per report and the summary CSV. Throws Error on I/O failure.
void emitReport(const std::vector<VerificationReport>& reports, const std::vector<SummaryRow>& summary,
                const ReportPaths& paths, const ReportContext& ctx);
void emitReport(const std::vector<VerificationReport>& reports, const ReportPaths& paths, const ReportContext& ctx);

/// Creates parent directories as needed. Throws Error on failure.
void writeTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace sparselab
