#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dlal/bench.hpp"
#include "dlal/infer.hpp"
#include "dlal/lla.hpp"
#include "dlal/stdlib.hpp"
#include "dlal/stratify.hpp"
#include "json.hpp"

using namespace dlal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Input {
  std::string inline_term;
  std::string file;

  std::string text() const {
    if (!file.empty()) return slurp(file);
    return inline_term;
  }
  void add_to(CLI::App* cmd) {
    cmd->add_option("term", inline_term, "inline term");
    cmd->add_option("--file", file, "read the input from a file");
  }
  bool valid() const { return inline_term.empty() != file.empty(); }
};

Strategy strategy_of(const std::string& s) {
  if (s == "lo") return Strategy::LeftmostOutermost;
  if (s == "ri") return Strategy::RightmostInnermost;
  if (s == "random") return Strategy::Random;
  throw CLI::ValidationError("--strategy must be lo, ri or random");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dlal: a dual light affine logic toolkit"};
  app.require_subcommand(1);

  std::string format = "human";
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"human", "json"}));

  // parse -----------------------------------------------------------------
  auto* cmd_parse = app.add_subcommand("parse", "parse a term and print it back");
  Input parse_in;
  parse_in.add_to(cmd_parse);

  // size ------------------------------------------------------------------
  auto* cmd_size = app.add_subcommand("size", "term size |t|");
  Input size_in;
  size_in.add_to(cmd_size);

  // normalize ---------------------------------------------------------------
  auto* cmd_norm = app.add_subcommand("normalize", "beta-normalize under a strategy");
  Input norm_in;
  norm_in.add_to(cmd_norm);
  std::string strategy = "lo";
  uint64_t seed = 0;
  std::size_t fuel = 1000000;
  cmd_norm->add_option("--strategy", strategy, "lo | ri | random");
  cmd_norm->add_option("--seed", seed, "seed for the random strategy");
  cmd_norm->add_option("--fuel", fuel, "maximum number of steps");

  // check -------------------------------------------------------------------
  auto* cmd_check = app.add_subcommand("check", "check a derivation certificate");
  std::string cert_path;
  cmd_check->add_option("--cert", cert_path, "certificate JSON file")->required();
  std::string system = "dlal";
  cmd_check->add_option("--system", system, "dlal | lal")
      ->check(CLI::IsMember({"dlal", "lal"}));

  // translate -----------------------------------------------------------------
  auto* cmd_tr = app.add_subcommand("translate", "Proposition 6: NDLAL certificate to NLAL");
  std::string tr_cert;
  cmd_tr->add_option("--cert", tr_cert, "NDLAL certificate JSON file")->required();

  // stratify ------------------------------------------------------------------
  auto* cmd_strat = app.add_subcommand("stratify", "decorate and normalize level by level");
  std::string strat_cert;
  cmd_strat->add_option("--cert", strat_cert, "NDLAL certificate JSON file")->required();

  // infer ---------------------------------------------------------------------
  auto* cmd_infer = app.add_subcommand("infer", "propositional DLAL type inference");
  Input infer_in;
  infer_in.add_to(cmd_infer);
  int level_cap = 8;
  cmd_infer->add_option("--level-cap", level_cap, "stage-2 search depth");

  // lla -----------------------------------------------------------------------
  auto* cmd_lla = app.add_subcommand("lla", "embed a certificate into lambda-LA");
  std::string lla_cert;
  cmd_lla->add_option("--cert", lla_cert, "NDLAL certificate JSON file")->required();
  bool lla_drive = false;
  cmd_lla->add_flag("--simulate", lla_drive, "drive the erasure to normal form");

  // bench -----------------------------------------------------------------------
  auto* cmd_bench = app.add_subcommand("bench", "bound verification over a corpus");
  std::string corpus_path = "corpus";
  cmd_bench->add_option("--corpus", corpus_path, "corpus directory");
  std::vector<uint64_t> seeds{1, 2, 3, 4, 5};
  cmd_bench->add_option("--seed", seeds, "random-strategy seeds");

  // export-corpus ----------------------------------------------------------------
  auto* cmd_export = app.add_subcommand("export-corpus", "write the built-in corpus to disk");
  std::string export_dir = "corpus";
  cmd_export->add_option("--out", export_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_parse->parsed()) {
      if (!parse_in.valid()) {
        std::cerr << "parse: provide exactly one of an inline term or --file\n";
        return kExitUsage;
      }
      TermPtr t = parse_term(parse_in.text());
      if (format == "json") {
        nlohmann::json j;
        j["term"] = print_term(t);
        j["size"] = term_size(t);
        std::cout << j.dump() << "\n";
      } else {
        std::cout << print_term(t) << "\n";
      }
      return kExitOk;
    }

    if (cmd_size->parsed()) {
      if (!size_in.valid()) {
        std::cerr << "size: provide exactly one of an inline term or --file\n";
        return kExitUsage;
      }
      TermPtr t = parse_term(size_in.text());
      if (format == "json")
        std::cout << nlohmann::json{{"size", term_size(t)}}.dump() << "\n";
      else
        std::cout << term_size(t) << "\n";
      return kExitOk;
    }

    if (cmd_norm->parsed()) {
      if (!norm_in.valid()) {
        std::cerr << "normalize: provide exactly one of an inline term or --file\n";
        return kExitUsage;
      }
      TermPtr t = parse_term(norm_in.text());
      ReductionTrace tr = normalize(t, strategy_of(strategy), fuel, seed);
      if (format == "json") {
        std::cout << trace_to_json(tr) << "\n";
      } else {
        std::cout << print_term(tr.final) << "\n";
        std::cout << "steps: " << tr.step_count() << (tr.complete ? "" : " (fuel exhausted)")
                  << "\n";
      }
      return tr.complete ? kExitOk : kExitDomain;
    }

    if (cmd_check->parsed()) {
      nlohmann::json j = nlohmann::json::parse(slurp(cert_path));
      nlohmann::json cert = j.contains("certificate") ? j["certificate"] : j;
      if (j.contains("system")) system = j["system"].get<std::string>();
      DerivPtr d = deriv_from_json_text(cert.dump(), system == "lal");
      if (system == "lal") {
        NlalCheckedPtr c = check_nlal(d);
        if (format == "json") {
          nlohmann::json out;
          out["context"] = print_context(c->ctx);
          out["subject"] = print_term(c->subject);
          out["type"] = print_type(c->type);
          out["size"] = deriv_size(d);
          out["depth"] = deriv_depth_nlal(d);
          std::cout << out.dump() << "\n";
        } else {
          std::cout << print_context(c->ctx) << " |- " << print_term(c->subject) << " : "
                    << print_type(c->type) << "\n";
        }
      } else {
        NdlalCheckedPtr c = check_ndlal(d);
        if (format == "json") {
          nlohmann::json out;
          out["context"] = print_context(c->ctx);
          out["subject"] = print_term(c->subject);
          out["type"] = print_type(c->type);
          out["size"] = deriv_size(d);
          out["depth"] = deriv_depth_ndlal(d);
          std::cout << out.dump() << "\n";
        } else {
          std::cout << print_context(c->ctx) << " |- " << print_term(c->subject) << " : "
                    << print_type(c->type) << "\n";
        }
      }
      return kExitOk;
    }

    if (cmd_tr->parsed()) {
      nlohmann::json j = nlohmann::json::parse(slurp(tr_cert));
      nlohmann::json cert = j.contains("certificate") ? j["certificate"] : j;
      DerivPtr d = deriv_from_json_text(cert.dump(), false);
      NdlalCheckedPtr c = check_ndlal(d);
      DerivPtr lal = translate_to_lal(c);
      NlalCheckedPtr lc = check_nlal(lal);
      if (format == "json") {
        nlohmann::json out;
        out["system"] = "lal";
        out["type"] = print_type(lc->type);
        out["certificate"] = nlohmann::json::parse(deriv_to_json(lal));
        std::cout << out.dump(1) << "\n";
      } else {
        std::cout << print_context(lc->ctx) << " |- " << print_term(lc->subject) << " : "
                  << print_type(lc->type) << "\n";
      }
      return kExitOk;
    }

    if (cmd_strat->parsed()) {
      nlohmann::json j = nlohmann::json::parse(slurp(strat_cert));
      nlohmann::json cert = j.contains("certificate") ? j["certificate"] : j;
      DerivPtr d = deriv_from_json_text(cert.dump(), false);
      NdlalCheckedPtr c = check_ndlal(d);
      StratPtr st = decorate(c);
      StratifyOptions opts;
      opts.policy = BoundPolicy::Warn;
      LevelTrace lt = normalize_levels(st, opts);
      if (format == "json") {
        std::cout << level_trace_to_json(lt) << "\n";
      } else {
        std::cout << print_strat(st) << "\n";
        std::cout << level_trace_to_csv(lt);
        std::cout << "final: " << print_term(erase_annotations(lt.final)) << "\n";
        for (const auto& w : lt.warnings) std::cout << "warning: " << w << "\n";
      }
      return lt.ok ? kExitOk : kExitDomain;
    }

    if (cmd_infer->parsed()) {
      if (!infer_in.valid()) {
        std::cerr << "infer: provide exactly one of an inline term or --file\n";
        return kExitUsage;
      }
      TermPtr t = parse_term(infer_in.text());
      InferOptions opts;
      opts.level_cap = level_cap;
      std::vector<InferResult> rs;
      try {
        rs = infer(t, opts);
      } catch (const type_error& e) {
        std::cerr << "not simply typable: " << e.what() << "\n";
        return kExitDomain;
      }
      if (format == "json") {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& r : rs) {
          nlohmann::json rj;
          rj["type"] = print_type(r.type);
          rj["certificate"] = nlohmann::json::parse(deriv_to_json(r.script));
          rj["phi"] = r.phi;
          rj["levels"] = r.levels;
          out.push_back(rj);
        }
        std::cout << out.dump(1) << "\n";
      } else {
        for (const auto& r : rs) std::cout << print_type(r.type) << "\n";
        if (rs.empty()) std::cout << "no DLAL typing found\n";
      }
      return rs.empty() ? kExitDomain : kExitOk;
    }

    if (cmd_lla->parsed()) {
      nlohmann::json j = nlohmann::json::parse(slurp(lla_cert));
      nlohmann::json cert = j.contains("certificate") ? j["certificate"] : j;
      DerivPtr d = deriv_from_json_text(cert.dump(), false);
      NdlalCheckedPtr c = check_ndlal(d);
      LlaPtr emb = embed(c);
      nlohmann::json out;
      out["term"] = print_lla(emb);
      out["size"] = lla_size(emb);
      out["depth"] = lla_depth(emb);
      if (lla_drive) {
        TermPtr cur = erase(emb);
        std::size_t beta_steps = 0, lla_steps = 0;
        for (;;) {
          auto rs = redex_paths(cur);
          if (rs.empty()) break;
          auto [next, k] = simulate_step(emb, rs.front());
          emb = next;
          lla_steps += k;
          ++beta_steps;
          cur = beta_step(cur, rs.front());
        }
        out["beta_steps"] = beta_steps;
        out["lla_steps"] = lla_steps;
        out["normal_form"] = print_term(cur);
      }
      if (format == "json")
        std::cout << out.dump(1) << "\n";
      else {
        std::cout << out["term"].get<std::string>() << "\n";
        if (lla_drive)
          std::cout << "beta steps: " << out["beta_steps"] << ", lambda-LA steps: "
                    << out["lla_steps"] << "\n";
      }
      return kExitOk;
    }

    if (cmd_bench->parsed()) {
      std::vector<NamedProgram> corpus = load_corpus(corpus_path);
      BenchReport r = bench(corpus,
                            {Strategy::LeftmostOutermost, Strategy::RightmostInnermost,
                             Strategy::Random},
                            seeds);
      std::cout << (format == "json" ? report_to_json(r) : report_to_text(r));
      return r.ok ? kExitOk : kExitDomain;
    }

    if (cmd_export->parsed()) {
      save_corpus(stdlib_corpus(), export_dir);
      std::cout << "corpus written to " << export_dir << "\n";
      return kExitOk;
    }
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const check_error& e) {
    std::cerr << "check error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const resource_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
