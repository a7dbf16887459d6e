// cfspanner: evaluate context-free document spanners defined by extraction
// grammars. Subcommands: eval, transform, check, bench.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cfspanner/enumerate.hpp"
#include "json.hpp"

using json = nlohmann::json;
using namespace cfspanner;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitResource = 3;
constexpr int kExitMismatch = 4;

struct CliError {
  int code;
  std::string msg;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitUsage, "cannot open file: " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Grammar load_grammar(const std::string& path) {
  try {
    return parse_grammar(read_file(path));
  } catch (const ParseError& e) {
    throw CliError{kExitParse, path + ": " + e.what()};
  }
}

Doc load_doc(const std::string& doc_path, const std::string& text,
             bool text_set) {
  std::string bytes = text_set ? text : read_file(doc_path);
  // A trailing newline in a document file is almost always an editor
  // artifact; strip exactly one.
  if (!text_set && !bytes.empty() && bytes.back() == '\n') bytes.pop_back();
  try {
    return utf8_decode(bytes);
  } catch (const std::exception& e) {
    throw CliError{kExitParse, std::string("document: ") + e.what()};
  }
}

json mapping_json(const SpanMapping& m, const Grammar& g) {
  json o = json::object();  // nlohmann objects iterate key-sorted
  for (int v = 0; v < g.num_vars(); ++v)
    o[g.vars[v]] = {m.spans[v].begin, m.spans[v].end};
  return o;
}

std::uint64_t oracle_budget(std::uint64_t flag_value) {
  if (flag_value) return flag_value;
  if (const char* env = std::getenv("CFSPANNER_ORACLE_BUDGET"))
    return std::strtoull(env, nullptr, 10);
  return kDefaultOracleBudget;
}

int cmd_eval(const std::string& grammar_path, const std::string& doc_path,
             const std::string& text, bool text_set, const std::string& mode,
             std::uint64_t limit, const std::string& dump_stage,
             bool check_duplicates, std::uint64_t budget_flag) {
  Grammar g = load_grammar(grammar_path);
  Doc d = load_doc(doc_path, text, text_set);
  std::uint64_t budget = oracle_budget(budget_flag);

  if (!dump_stage.empty()) {
    Preprocessed pp = preprocess(g, d);
    if (pp.eps_document)
      throw CliError{kExitUsage, "--dump-stage needs a nonempty document"};
    std::cout << (dump_stage == "adjusted" ? dump_adjusted(pp.ag)
                                           : dump_decorated(pp.dg));
    return 0;
  }

  auto run_enum = [&] {
    std::vector<SpanMapping> out = spanner_enumerate(g, d);
    return out;
  };
  auto run_naive = [&] { return naive_evaluate(g, d, budget); };

  if (mode == "naive") {
    std::uint64_t count = 0;
    for (const auto& m : run_naive()) {
      if (limit && count++ >= limit) break;
      std::cout << mapping_json(m, g).dump() << "\n";
    }
    return 0;
  }
  if (mode == "enum") {
    auto all = run_enum();
    std::set<SpanMapping> seen;
    std::uint64_t dups = 0, count = 0;
    for (const auto& m : all) {
      if (check_duplicates && !seen.insert(m).second) {
        ++dups;
        continue;
      }
      if (limit && count >= limit) continue;
      ++count;
      std::cout << mapping_json(m, g).dump() << "\n";
    }
    if (dups) {
      std::cerr << "error: " << dups << " duplicate mapping(s) emitted\n";
      return kExitMismatch;
    }
    return 0;
  }
  if (mode == "compare") {
    auto enum_out = run_enum();
    std::set<SpanMapping> enum_set(enum_out.begin(), enum_out.end());
    auto naive_set = run_naive();
    if (enum_set != naive_set) {
      std::cerr << "compare mismatch:\n";
      for (const auto& m : naive_set)
        if (!enum_set.count(m))
          std::cerr << "  missing from enum: " << mapping_to_string(m, g)
                    << "\n";
      for (const auto& m : enum_set)
        if (!naive_set.count(m))
          std::cerr << "  extra in enum:    " << mapping_to_string(m, g)
                    << "\n";
      return kExitMismatch;
    }
    if (check_duplicates && enum_out.size() != enum_set.size()) {
      std::cerr << "error: enum emitted duplicates\n";
      return kExitMismatch;
    }
    for (const auto& m : naive_set)
      std::cout << mapping_json(m, g).dump() << "\n";
    return 0;
  }
  throw CliError{kExitUsage, "unknown mode: " + mode};
}

int cmd_transform(const std::string& grammar_path, const std::string& target) {
  Grammar g = load_grammar(grammar_path);
  Grammar out;
  if (target == "cnf") {
    out = to_cnf(g);
  } else if (target == "functional") {
    out = functionalize(to_cnf(g)).grammar;
  } else if (target == "useless") {
    out = remove_useless(g);
  } else if (target.rfind("project:", 0) == 0) {
    std::vector<std::string> keep;
    std::stringstream ss(target.substr(8));
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) keep.push_back(item);
    out = project(g, keep);
  } else if (target.rfind("union:", 0) == 0) {
    out = union_grammars(g, load_grammar(target.substr(6)));
  } else {
    throw CliError{kExitUsage, "unknown transform target: " + target};
  }
  std::cout << serialize_grammar(out);
  return 0;
}

int cmd_check(const std::string& grammar_path) {
  Grammar g = load_grammar(grammar_path);
  json rep;
  rep["variables"] = g.vars;
  rep["nonterminals"] = g.nonterminals.size();
  rep["productions"] = g.productions.size();
  rep["size"] = g.size();
  rep["declared_unambiguous"] = g.declared_unambiguous;
  rep["regular_form"] = is_regular_form(g);
  rep["empty_language"] = remove_useless(g).empty_language();
  rep["matches_empty_document"] = empty_doc_mapping(g).has_value();
  // Bounded functionality probe: every ref-word derivable within 14 steps
  // must be valid for X.
  bool functional = true;
  for (const auto& r : derive_refwords(g, 14))
    if (!is_valid(r, g.num_vars())) {
      functional = false;
      break;
    }
  rep["functional_bounded_check"] = functional;
  std::cout << rep.dump(2) << "\n";
  return 0;
}

int cmd_bench(const std::string& grammar_path,
              const std::vector<std::string>& doc_paths,
              const std::vector<std::string>& texts, int repeats) {
  Grammar g = load_grammar(grammar_path);
  std::vector<Doc> docs;
  for (const auto& p : doc_paths) docs.push_back(load_doc(p, "", false));
  for (const auto& t : texts) docs.push_back(load_doc("", t, true));
  if (docs.empty()) throw CliError{kExitUsage, "bench needs a document"};

  json series = json::array();
  for (const Doc& d : docs) {
    json entry;
    entry["doc_length"] = d.size();
    for (int rep = 0; rep < std::max(repeats, 1); ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      Preprocessed pp = preprocess(g, d);
      auto t1 = std::chrono::steady_clock::now();
      std::uint64_t outputs = 0;
      DelayStats stats;
      if (pp.eps_document) {
        outputs = pp.eps_mapping ? 1 : 0;
      } else {
        MappingStream stream(pp.dg, pp.jump, pp.skippable, pp.stable);
        while (stream.next()) ++outputs;
        stats = stream.stats();
      }
      auto t2 = std::chrono::steady_clock::now();
      auto ms = [](auto a, auto b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
      };
      entry["preprocess_ms"] = ms(t0, t1);
      entry["enumerate_ms"] = ms(t1, t2);
      entry["stage_ms"] = {{"normalize", pp.t_normalize * 1e3},
                           {"adjust", pp.t_adjust * 1e3},
                           {"decorate", pp.t_decorate * 1e3},
                           {"stable", pp.t_stable * 1e3},
                           {"jump", pp.t_jump * 1e3}};
      entry["adjust_work"] = pp.eps_document ? 0 : pp.ag.construction_work;
      entry["jump_work"] = pp.eps_document ? 0 : pp.jump.construction_work;
      entry["outputs"] = outputs;
      entry["total_steps"] = stats.total_steps;
      entry["max_step_delay"] = stats.max_delay;
      entry["mean_step_delay"] =
          outputs ? static_cast<double>(stats.total_steps) / outputs : 0.0;
    }
    series.push_back(entry);
  }
  json rep;
  rep["grammar"] = grammar_path;
  rep["repeats"] = std::max(repeats, 1);
  rep["series"] = series;
  std::cout << rep.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"context-free document spanner engine"};
  app.require_subcommand(1);

  std::string grammar_path, doc_path, text, mode = "enum", dump_stage, target;
  bool text_set = false, check_duplicates = false;
  std::uint64_t limit = 0, budget_flag = 0;
  int repeats = 1;
  std::vector<std::string> bench_docs, bench_texts;

  auto* eval = app.add_subcommand("eval", "evaluate a spanner on a document");
  eval->add_option("--grammar,-g", grammar_path, "grammar file (.eg)")
      ->required();
  auto* doc_opt = eval->add_option("--doc,-d", doc_path, "document file");
  eval->add_option("--text,-t", text, "inline document text")
      ->excludes(doc_opt);
  eval->add_option("--mode,-m", mode, "enum | naive | compare")
      ->check(CLI::IsMember({"enum", "naive", "compare"}));
  eval->add_option("--limit", limit, "stop after N mappings");
  eval->add_option("--dump-stage", dump_stage, "adjusted | decorated")
      ->check(CLI::IsMember({"adjusted", "decorated"}));
  eval->add_flag("--check-duplicates", check_duplicates,
                 "verify the enumeration emits no duplicate mapping");
  eval->add_option("--oracle-budget", budget_flag,
                   "cap on (|d|+2)^(2k) for the naive oracle");

  auto* transform =
      app.add_subcommand("transform", "normalize or combine grammars");
  transform->add_option("--grammar,-g", grammar_path, "grammar file (.eg)")
      ->required();
  transform
      ->add_option("--target", target,
                   "cnf | functional | useless | project:<vars> | union:<path>")
      ->required();

  auto* check = app.add_subcommand("check", "inspect a grammar");
  check->add_option("--grammar,-g", grammar_path, "grammar file (.eg)")
      ->required();

  auto* bench = app.add_subcommand("bench", "preprocessing/delay benchmark");
  bench->add_option("--grammar,-g", grammar_path, "grammar file (.eg)")
      ->required();
  bench->add_option("--doc,-d", bench_docs, "document file (repeatable)");
  bench->add_option("--text,-t", bench_texts, "inline document (repeatable)");
  bench->add_option("--repeats", repeats, "repetitions per document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    text_set = eval->count("--text") > 0;
    if (eval->parsed()) {
      if (!text_set && doc_path.empty())
        throw CliError{kExitUsage, "eval needs --doc or --text"};
      return cmd_eval(grammar_path, doc_path, text, text_set, mode, limit,
                      dump_stage, check_duplicates, budget_flag);
    }
    if (transform->parsed()) return cmd_transform(grammar_path, target);
    if (check->parsed()) return cmd_check(grammar_path);
    if (bench->parsed())
      return cmd_bench(grammar_path, bench_docs, bench_texts, repeats);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.msg << "\n";
    return e.code;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
