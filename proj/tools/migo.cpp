#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "migo/corpus.hpp"
#include "migo/explore.hpp"
#include "migo/infer.hpp"
#include "migo/parser.hpp"
#include "migo/pretty.hpp"
#include "migo/validate.hpp"
#include "migo/verify.hpp"

namespace {

constexpr const char* kVersion = "migo 0.1.0";

// exit codes: 0 fenced+live+safe, 1 violation, 2 not fenced, 3 parse error
constexpr int kExitViolation = 1;
constexpr int kExitUnfenced = 2;
constexpr int kExitParse = 3;

migo::Program load_program(const std::string& path) {
  migo::Program prog = migo::parse_program(migo::read_file(path));
  auto diags = migo::validate(prog);
  if (!diags.empty()) {
    for (const auto& d : diags) std::cerr << "error: " << d.message << "\n";
    throw migo::ParseError("program is not well formed", 0, 0);
  }
  return prog;
}

migo::TypeSystem load_types(const std::string& path) {
  return migo::parse_type_system(migo::read_file(path));
}

void write_out(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

int run_verify(const migo::TypeSystem& sys, std::optional<int> k, bool use_auto, bool json,
               bool witness) {
  migo::VerificationConfig cfg;
  if (k && use_auto) throw CLI::ValidationError("-k and --auto are mutually exclusive");
  if (k) cfg.k = *k;
  migo::VerificationReport rep = migo::verify(sys, cfg);
  if (json)
    std::cout << migo::report_to_json(rep);
  else
    std::cout << migo::report_to_text(rep, witness);
  return rep.exit_code();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"MiGo behavioural-type verifier: liveness and channel safety"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // run
  std::string run_file;
  int run_steps = 64;
  std::uint64_t run_seed = 0;
  auto* cmd_run = app.add_subcommand("run", "execute a program with a random scheduler");
  cmd_run->add_option("file", run_file)->required();
  cmd_run->add_option("--steps", run_steps);
  cmd_run->add_option("--seed", run_seed);

  // explore
  std::string ex_file, ex_dot;
  int ex_depth = 16;
  std::size_t ex_budget = 200000;
  auto* cmd_explore = app.add_subcommand("explore", "bounded exhaustive state exploration");
  cmd_explore->add_option("file", ex_file)->required();
  cmd_explore->add_option("--depth", ex_depth)->required();
  cmd_explore->add_option("--dot", ex_dot);
  cmd_explore->add_option("--budget", ex_budget);

  // infer
  std::string inf_file, inf_out;
  auto* cmd_infer = app.add_subcommand("infer", "infer the behavioural type system");
  cmd_infer->add_option("file", inf_file)->required();
  cmd_infer->add_option("-o,--output", inf_out);

  // fence
  std::string fen_file;
  auto* cmd_fence = app.add_subcommand("fence", "check the fencing restriction");
  cmd_fence->add_option("file", fen_file)->required();

  // lts
  std::string lts_file, lts_dot;
  int lts_k = 2;
  auto* cmd_lts = app.add_subcommand("lts", "dump the bounded symbolic state graph");
  cmd_lts->add_option("file", lts_file)->required();
  cmd_lts->add_option("-k", lts_k)->required();
  cmd_lts->add_option("--dot", lts_dot);

  // verify
  std::string ver_file;
  std::optional<int> ver_k;
  bool ver_auto = false, ver_json = false, ver_witness = false;
  auto* cmd_verify = app.add_subcommand("verify", "k-liveness and k-safety of a type system");
  cmd_verify->add_option("file", ver_file)->required();
  auto* optk = cmd_verify->add_option("-k", [&ver_k](const CLI::results_t& res) {
    ver_k = std::stoi(res[0]);
    return true;
  }, "explicit bound");
  auto* opta = cmd_verify->add_flag("--auto", ver_auto, "heuristic bound with a 1..k sweep");
  optk->excludes(opta);
  cmd_verify->add_flag("--json", ver_json);
  cmd_verify->add_flag("--witness", ver_witness);

  // check = infer + verify
  std::string chk_file;
  std::optional<int> chk_k;
  bool chk_auto = false, chk_json = false, chk_witness = false;
  auto* cmd_check = app.add_subcommand("check", "infer types from a program and verify them");
  cmd_check->add_option("file", chk_file)->required();
  auto* coptk = cmd_check->add_option("-k", [&chk_k](const CLI::results_t& res) {
    chk_k = std::stoi(res[0]);
    return true;
  }, "explicit bound");
  auto* copta = cmd_check->add_flag("--auto", chk_auto);
  coptk->excludes(copta);
  cmd_check->add_flag("--json", chk_json);
  cmd_check->add_flag("--witness", chk_witness);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitParse;
  }

  try {
    if (cmd_run->parsed()) {
      migo::Program prog = load_program(run_file);
      auto trace = migo::run_random(prog, run_steps, run_seed);
      std::cout << "0: " << migo::pretty(migo::normalize_state(prog.main)) << "\n";
      for (size_t i = 0; i < trace.size(); ++i)
        std::cout << (i + 1) << ": " << migo::show_label(trace[i].label) << "  "
                  << trace[i].state << "\n";
      if (static_cast<int>(trace.size()) < run_steps) std::cout << "stuck or terminated\n";
      return 0;
    }
    if (cmd_explore->parsed()) {
      migo::Program prog = load_program(ex_file);
      migo::StateGraph g = migo::explore(prog, ex_depth, ex_budget);
      if (g.budget_exceeded) {
        std::cerr << "state budget exceeded\n";
      }
      std::cout << "states: " << g.nodes.size() << ", transitions: " << g.transition_count()
                << (g.complete() ? "" : " (frontier remains)") << "\n";
      if (!ex_dot.empty()) write_out(ex_dot, migo::to_dot(g));
      return g.budget_exceeded ? kExitViolation : 0;
    }
    if (cmd_infer->parsed()) {
      migo::Program prog = load_program(inf_file);
      migo::TypeSystem sys = migo::infer(prog);
      std::string text = migo::pretty(sys);
      if (inf_out.empty())
        std::cout << text;
      else
        write_out(inf_out, text);
      return 0;
    }
    if (cmd_fence->parsed()) {
      migo::TypeSystem sys = load_types(fen_file);
      migo::FenceVerdict v = migo::is_fenced(sys);
      if (v.fenced) {
        std::cout << "fenced\n";
        return 0;
      }
      std::cout << "not fenced: equation " << v.failing_equation << "\n";
      if (v.failure)
        for (const auto& line : v.failure->judgement_path) std::cout << "  " << line << "\n";
      return kExitUnfenced;
    }
    if (cmd_lts->parsed()) {
      migo::TypeSystem sys = load_types(lts_file);
      migo::TypeGraph g = migo::reachable(sys, lts_k);
      std::cout << "states: " << g.nodes.size() << ", transitions: " << g.transition_count()
                << "\n";
      if (!lts_dot.empty()) {
        std::ostringstream os;
        os << "digraph lts {\n  node [shape=box, fontname=\"monospace\"];\n";
        auto escape = [](const std::string& s) {
          std::string r;
          for (char c : s) {
            if (c == '"' || c == '\\') r.push_back('\\');
            r.push_back(c);
          }
          return r;
        };
        std::hash<std::string> h;
        for (size_t u = 0; u < g.nodes.size(); ++u)
          os << "  n" << u << " [label=\"" << std::hex
             << (h(migo::serial(g.nodes[u].state.term)) & 0xffffff) << std::dec << "\\n"
             << escape(migo::pretty(g.nodes[u].state.term)) << "\"];\n";
        for (size_t u = 0; u < g.nodes.size(); ++u)
          for (const auto& [label, v] : g.nodes[u].edges)
            os << "  n" << u << " -> n" << v << " [label=\"" << escape(migo::show_label(label))
               << "\"];\n";
        os << "}\n";
        write_out(lts_dot, os.str());
      }
      return 0;
    }
    if (cmd_verify->parsed()) {
      migo::TypeSystem sys = load_types(ver_file);
      return run_verify(sys, ver_k, ver_auto, ver_json, ver_witness);
    }
    if (cmd_check->parsed()) {
      migo::Program prog = load_program(chk_file);
      migo::TypeSystem sys = migo::infer(prog);
      return run_verify(sys, chk_k, chk_auto, chk_json, chk_witness);
    }
  } catch (const migo::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const migo::TypeError& e) {
    std::cerr << "type error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return 0;
}
