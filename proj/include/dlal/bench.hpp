#ifndef DLAL_BENCH_HPP
#define DLAL_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dlal/stdlib.hpp"
#include "dlal/stratify.hpp"

namespace dlal {

struct StrategyRun {
  std::string label;  // "lo", "ri", "random:SEED"
  std::size_t steps = 0;
  bool complete = false;
  bool within = false;  // steps <= |t|^(2^d)
};

struct BenchRow {
  std::string name;
  std::size_t term_size = 0;
  std::size_t deriv_size = 0;
  std::size_t depth = 0;
  std::string bound;  // |t|^(2^d), "inf" when it overflows
  std::vector<StrategyRun> runs;
  std::vector<LevelRecord> levels;
  std::size_t lla_steps = 0;
  bool ok = true;
  std::vector<std::string> problems;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  bool ok = true;
};

// Runs every DLAL-certified program of the corpus under each strategy and
// seed, recording step counts against the |t|^(2^d) bound, the level trace
// and the lambda-LA simulation length.
BenchReport bench(const std::vector<NamedProgram>& corpus,
                  const std::vector<Strategy>& strategies,
                  const std::vector<uint64_t>& seeds);

std::string report_to_json(const BenchReport& r);
std::string report_to_text(const BenchReport& r);

}  // namespace dlal

#endif
