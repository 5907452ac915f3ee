#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vybench {

// Thrown for any malformed or unusable input data. The CLI maps it to exit
// code 2; usage errors (bad flags) map to exit code 1.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

namespace diag {

// Diagnostics go to stderr by default, one line each, prefixed WARN: or
// ERROR:. Tests may install a sink to capture them.
using Sink = std::function<void(std::string_view line)>;

void set_sink(Sink sink);
void reset_sink();
void warn(const std::string& message);
void error(const std::string& message);

}  // namespace diag

// Rounds to `digits` significant decimal digits. Used for all numbers that
// end up in JSON reports so that re-runs are byte-identical.
double round_sig(double value, int digits = 12);

// FNV-1a, for config hashes in report manifests. Stable across platforms,
// unlike std::hash.
std::uint64_t fnv1a64(std::string_view bytes);

std::string to_hex(std::uint64_t value);

}  // namespace vybench
