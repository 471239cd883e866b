#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ioncool {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Shortest-roundtrip-ish fixed formatting ("%.15g") used for every number
/// written to disk, so output is byte-stable across runs.
std::string format_number(double v);

/// `digits` significant digits in %g style.
std::string format_significant(double v, int digits);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Column-oriented CSV table. Cells are stored preformatted.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

/// Writes `# <comment>` (if any), the header row, then the rows; LF endings.
void write_csv(std::ostream& os, const Table& table, std::string_view comment = {});

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Each index is visited exactly once; callers write results
/// into pre-sized slots so assembly order stays canonical.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Resolves a thread-count request: a value >= 0 is used as given (0 = auto);
/// a negative value means "unset" and falls back to IONCOOL_THREADS.
unsigned resolve_threads(int requested);

}  // namespace ioncool
