#pragma once

// Number formatting and (de)serialization of step functions and cell sets.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "sparselab/dyadic.hpp"

namespace sparselab {

/// Shortest decimal that round-trips.
[[nodiscard]] std::string formatShortest(double x);
/// printf "%.17g"; non-finite values become "inf", "-inf" or "nan".
[[nodiscard]] std::string format17(double x);
/// JSON number for finite values, JSON null otherwise.
[[nodiscard]] std::string jsonNumber(double x);
/// Quoted JSON string with escapes.
[[nodiscard]] std::string jsonString(std::string_view s);

/// {"depth":N,"values":[...]} with 17 significant digits.
[[nodiscard]] std::string stepFunctionToJson(const StepFunction& f);
[[nodiscard]] StepFunction stepFunctionFromJson(std::string_view text);

/// Little-endian binary: magic "SLSF", uint32 depth, 2^depth float64 values.
void writeStepFunctionBinary(std::ostream& out, const StepFunction& f);
[[nodiscard]] StepFunction readStepFunctionBinary(std::istream& in);

/// {"depth":N,"cells":"<hex>"}.
[[nodiscard]] std::string cellSetToJson(const CellSet& s);
[[nodiscard]] CellSet cellSetFromJson(std::string_view text);

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;
[[nodiscard]] std::string hex64(std::uint64_t x);

}  // namespace sparselab
