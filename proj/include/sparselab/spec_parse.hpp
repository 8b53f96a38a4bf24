#pragma once

// Parsing of "kind:key=value,..." spec strings and numeric list flags.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparselab/orlicz.hpp"

namespace sparselab {

/// "kind", "kind:value" or "kind:key=value,key=value".
class SpecString {
 public:
  [[nodiscard]] static SpecString parse(std::string_view text);

  [[nodiscard]] const std::string& kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& text() const noexcept { return text_; }
  [[nodiscard]] bool has(std::string_view key) const;

  /// Value of `key`; a lone positional value answers for `primaryKey`.
  [[nodiscard]] std::optional<std::string> raw(std::string_view key, bool primaryKey = false) const;
  [[nodiscard]] double number(std::string_view key, std::optional<double> fallback = std::nullopt,
                              bool primaryKey = false) const;
  [[nodiscard]] std::int64_t integer(std::string_view key, std::optional<std::int64_t> fallback = std::nullopt,
                                     bool primaryKey = false) const;

  /// Throws ParseError for keys outside `allowed`, or a positional value when
  /// no primary key is allowed.
  void requireKeys(std::initializer_list<std::string_view> allowed, bool allowPositional = false) const;

 private:
  std::string text_;
  std::string kind_;
  std::vector<std::pair<std::string, std::string>> params_;
  std::optional<std::string> positional_;
};

[[nodiscard]] double parseDouble(std::string_view text);
[[nodiscard]] std::int64_t parseInteger(std::string_view text);

/// "power:r=2" / "power:2", "llog:eps=0.5", "llog2:alpha=1.5", "llog2log3:alpha=1.5".
[[nodiscard]] YoungFunction parseYoungFunction(std::string_view text);

/// Comma-separated items, each "a" or "a..b" (inclusive). Order is kept.
[[nodiscard]] std::vector<std::uint64_t> parseSeedList(std::string_view text);
[[nodiscard]] std::vector<int> parseIntList(std::string_view text);
[[nodiscard]] std::vector<double> parseDoubleList(std::string_view text);

/// Splits on ';' at the top level; used for lists of spec strings that
/// themselves contain commas.
[[nodiscard]] std::vector<std::string> splitSpecList(std::string_view text);

}  // namespace sparselab
