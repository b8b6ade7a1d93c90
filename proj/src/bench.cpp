#include "dlal/bench.hpp"

#include <cmath>
#include <sstream>

#include "dlal/lla.hpp"
#include "json.hpp"

namespace dlal {

namespace {
std::string bound_string(std::size_t base, std::size_t depth) {
  if (base <= 1) return "1";
  long double lg = std::log2(static_cast<long double>(base)) * std::exp2((long double)depth);
  if (lg >= 63.0L) return "inf";
  unsigned long long b = 1;
  for (unsigned long long i = 0; i < (1ULL << depth); ++i) b *= base;
  return std::to_string(b);
}

std::size_t fuel_for(std::size_t dsize, std::size_t depth) {
  // |D|^(2^(d+1)) capped to something runnable
  long double lg =
      std::log2(static_cast<long double>(dsize)) * std::exp2((long double)(depth + 1));
  if (lg >= 31.0L) return 2'000'000'000u;
  unsigned long long b = 1;
  for (unsigned long long i = 0; i < (1ULL << (depth + 1)); ++i) b *= dsize;
  return static_cast<std::size_t>(b);
}
}  // namespace

BenchReport bench(const std::vector<NamedProgram>& corpus,
                  const std::vector<Strategy>& strategies,
                  const std::vector<uint64_t>& seeds) {
  BenchReport report;
  for (const auto& prog : corpus) {
    if (prog.system != CertSystem::Dlal || !prog.certificate) continue;
    BenchRow row;
    row.name = prog.name;
    row.term_size = term_size(prog.term);
    row.deriv_size = deriv_size(prog.certificate);
    row.depth = deriv_depth_ndlal(prog.certificate);
    row.bound = bound_string(row.term_size, row.depth);

    NdlalCheckedPtr checked;
    try {
      checked = check_ndlal(prog.certificate);
    } catch (const check_error& e) {
      row.ok = false;
      row.problems.push_back(std::string("certificate: ") + e.what());
      report.rows.push_back(row);
      report.ok = false;
      continue;
    }

    std::size_t fuel = fuel_for(row.deriv_size, row.depth);
    auto run_one = [&](Strategy st, uint64_t seed, const std::string& label) {
      StrategyRun r;
      r.label = label;
      ReductionTrace tr = normalize(prog.term, st, fuel, seed);
      r.steps = tr.step_count();
      r.complete = tr.complete;
      r.within = within_bound(r.steps, row.term_size, row.depth);
      if (!r.complete || !r.within) {
        row.ok = false;
        row.problems.push_back("strategy " + label +
                               (r.complete ? " exceeded the step bound" : " ran out of fuel"));
      }
      row.runs.push_back(r);
    };
    for (Strategy st : strategies) {
      if (st == Strategy::Random) {
        for (uint64_t seed : seeds)
          run_one(st, seed, "random:" + std::to_string(seed));
      } else {
        run_one(st, 0, st == Strategy::LeftmostOutermost ? "lo" : "ri");
      }
    }

    try {
      StratifyOptions opts;
      opts.policy = BoundPolicy::Warn;
      LevelTrace lt = normalize_levels(decorate(checked), opts);
      row.levels = lt.levels;
      if (!lt.ok) {
        row.ok = false;
        for (const auto& w : lt.warnings) row.problems.push_back("levels: " + w);
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.problems.push_back(std::string("levels: ") + e.what());
    }

    try {
      LlaPtr emb = embed(checked);
      TermPtr cur = erase(emb);
      std::size_t steps = 0;
      std::size_t guard = 0;
      while (true) {
        auto rs = redex_paths(cur);
        if (rs.empty()) break;
        auto [next, k] = simulate_step(emb, rs.front());
        emb = next;
        steps += k;
        cur = beta_step(cur, rs.front());
        if (!alpha_eq(erase(emb), cur)) {
          row.ok = false;
          row.problems.push_back("simulation diagram mismatch");
          break;
        }
        if (++guard > fuel) break;
      }
      row.lla_steps = steps;
      if (!within_bound(steps, row.deriv_size, row.depth + 1)) {
        row.ok = false;
        row.problems.push_back("lambda-LA steps exceed |D|^(2^(d+1))");
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.problems.push_back(std::string("simulation: ") + e.what());
    }

    if (!row.ok) report.ok = false;
    report.rows.push_back(row);
  }
  return report;
}

std::string report_to_json(const BenchReport& r) {
  nlohmann::json j;
  j["ok"] = r.ok;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json rj;
    rj["name"] = row.name;
    rj["term_size"] = row.term_size;
    rj["deriv_size"] = row.deriv_size;
    rj["depth"] = row.depth;
    rj["bound"] = row.bound;
    rj["lla_steps"] = row.lla_steps;
    rj["ok"] = row.ok;
    rj["runs"] = nlohmann::json::array();
    for (const auto& run : row.runs)
      rj["runs"].push_back({{"strategy", run.label},
                            {"steps", run.steps},
                            {"complete", run.complete},
                            {"within_bound", run.within}});
    rj["levels"] = nlohmann::json::array();
    for (const auto& lv : row.levels)
      rj["levels"].push_back({{"level", lv.level},
                              {"entry_size", lv.entry_size},
                              {"steps", lv.steps},
                              {"exit_size", lv.exit_size}});
    if (!row.problems.empty()) rj["problems"] = row.problems;
    j["rows"].push_back(rj);
  }
  return j.dump(1);
}

std::string report_to_text(const BenchReport& r) {
  std::ostringstream os;
  os << "program              |t|   |D|  d  bound         lla    strategies\n";
  for (const auto& row : r.rows) {
    os << (row.ok ? "  " : "! ");
    os.width(18);
    os << std::left << row.name << std::right << ' ';
    os.width(5);
    os << row.term_size << ' ';
    os.width(5);
    os << row.deriv_size << ' ';
    os.width(2);
    os << row.depth << "  ";
    os.width(12);
    os << std::left << row.bound << std::right << ' ';
    os.width(6);
    os << row.lla_steps << "  ";
    for (const auto& run : row.runs)
      os << run.label << '=' << run.steps << (run.within ? "" : "[FAIL]") << ' ';
    os << '\n';
    for (const auto& p : row.problems) os << "      " << p << '\n';
  }
  os << (r.ok ? "all rows within bounds\n" : "FAIL: some rows violated their bounds\n");
  return os.str();
}

}  // namespace dlal
