#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wfwl/database.hpp"
#include "wfwl/error.hpp"
#include "wfwl/query.hpp"

namespace wfwl::cli {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct BuildArgs {
  std::string tbox, abox, out, policy = "sorted";
  bool no_materialize = false;
  bool keep_superseded = false;
};

struct QueryArgs {
  std::string db, file, inline_text, entailment = "rdfs", format = "tsv";
  bool explain = false;
};

int cmd_build(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  BuildOptions options;
  options.policy = dict_policy_from_string(a.policy);
  options.materialize = !a.no_materialize;
  options.drop_superseded = !a.keep_superseded;
  auto start = Clock::now();
  BuildReport report;
  Database db = Database::build_files(a.tbox, a.abox, options, &report);
  std::string bytes = db.serialize();
  double build_ms = ms_since(start);
  std::ofstream file(a.out, std::ios::binary);
  if (!file || !file.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw IngestError("cannot write " + a.out);
  out << "triples\t" << report.stored_triples << "\n"
      << "materialized\t" << report.materialized << "\n"
      << "bytes\t" << bytes.size() << "\n";
  err << "input_triples=" << report.input_triples << "\n"
      << "tbox_triples=" << report.tbox_triples << "\n"
      << "ignored_tbox_triples=" << report.ignored_tbox_triples << "\n"
      << "abox_triples=" << report.abox_triples << "\n"
      << "dropped_top_typings=" << report.dropped_top_typings << "\n"
      << "materialized=" << report.materialized << "\n"
      << "superseded=" << report.superseded << "\n"
      << "stored_triples=" << report.stored_triples << "\n"
      << "serialized_bytes=" << bytes.size() << "\n"
      << "build_ms=" << build_ms << "\n";
  return kOk;
}

int cmd_query(const QueryArgs& a, std::ostream& out, std::ostream& err) {
  if (a.file.empty() == a.inline_text.empty()) {
    err << "error: exactly one of --query and --inline is required\n";
    return kInputError;
  }
  if (a.format != "tsv" && a.format != "json") {
    err << "error: unknown format: " << a.format << "\n";
    return kInputError;
  }
  Entailment entailment = entailment_from_string(a.entailment);
  std::string text = a.file.empty() ? a.inline_text : read_file(a.file);
  auto load_start = Clock::now();
  Database db = Database::load(a.db);
  double load_ms = ms_since(load_start);
  QueryEngine engine(db);
  ExecStats stats;
  auto start = Clock::now();
  ResultTable table = engine.execute(text, entailment, &stats);
  double query_ms = ms_since(start);
  out << (a.format == "json" ? format_json(table) : format_tsv(table));
  err << "load_ms=" << load_ms << "\n"
      << "query_ms=" << query_ms << "\n"
      << "rows=" << table.rows.size() << "\n"
      << "store_probes=" << stats.store_probes << "\n"
      << "intermediate_rows=" << stats.intermediate_rows << "\n"
      << "unsatisfiable=" << (stats.unsatisfiable ? 1 : 0) << "\n";
  if (a.explain)
    for (std::size_t i = 0; i < stats.plan.size(); ++i) err << "plan." << i << "=" << stats.plan[i] << "\n";
  return stats.unsatisfiable ? kUnsatisfiable : kOk;
}

void print_hierarchy(std::ostream& out, std::string_view label, const Hierarchy& h) {
  std::size_t elements = 0, leaves = 0, multi = 0, depth = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    auto id = static_cast<std::int32_t>(i);
    const auto& n = h.node(id);
    if (!h.is_element(id)) continue;
    ++elements;
    if (n.children.empty()) ++leaves;
    if (!n.other_parents.empty()) ++multi;
    std::size_t d = 0;
    for (auto p = id; p > 0; p = h.node(p).parent) ++d;
    depth = std::max(depth, d);
  }
  out << label << ".elements\t" << elements << "\n"
      << label << ".leaves\t" << leaves << "\n"
      << label << ".multiple_inheritance\t" << multi << "\n"
      << label << ".max_depth\t" << depth << "\n";
}

int cmd_info(const std::string& path, std::ostream& out) {
  std::string bytes = read_file(path);
  Database db = Database::deserialize(bytes);
  const auto& st = db.stats();
  out << "format_version\t" << Database::kFormatVersion << "\n"
      << "file_bytes\t" << bytes.size() << "\n"
      << "dict_policy\t" << to_string(db.dictionary().policy()) << "\n"
      << "instances\t" << db.dictionary().size() << "\n"
      << "triples\t" << st.n_triples << "\n"
      << "subjects\t" << st.n_subjects << "\n"
      << "objects\t" << st.n_objects << "\n"
      << "predicates\t" << st.n_predicates << "\n"
      << "type_triples\t" << st.n_type_triples << "\n"
      << "materialized\t" << st.n_materialized << "\n"
      << "superseded\t" << st.n_superseded << "\n";
  print_hierarchy(out, "concepts", db.ontology().concepts());
  print_hierarchy(out, "properties", db.ontology().properties());
  for (const auto& s : Database::sections(bytes)) out << "section." << s.name << "\t" << s.length << "\n";
  return kOk;
}

int cmd_dump(const std::string& path, std::ostream& out) {
  Database db = Database::load(path);
  for (const auto& t : db.dump()) out << to_ntriples(t) << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compressed RDF store with prefix-coded hierarchies"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build a database from N-Triples files");
  b->add_option("--tbox", build.tbox, "Schema N-Triples file")->required();
  b->add_option("--abox", build.abox, "Data N-Triples file")->required();
  b->add_option("--out", build.out, "Output database file")->required();
  b->add_option("--dict-policy", build.policy, "Instance id order")->check(CLI::IsMember({"sorted", "first_seen"}));
  b->add_flag("--no-materialize", build.no_materialize, "Skip domain/range typing");
  b->add_flag("--keep-superseded", build.keep_superseded, "Keep type triples made redundant by more specific ones");

  QueryArgs query;
  auto* q = app.add_subcommand("query", "Run a SPARQL query");
  q->add_option("--db", query.db, "Database file")->required();
  auto* qf = q->add_option("--query", query.file, "Query file");
  auto* qi = q->add_option("--inline", query.inline_text, "Query text");
  qf->excludes(qi);
  q->add_option("--entailment", query.entailment, "simple or rdfs")->check(CLI::IsMember({"simple", "rdfs"}));
  q->add_option("--format", query.format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}));
  q->add_flag("--explain", query.explain, "Print the join order to stderr");

  std::string info_db;
  auto* i = app.add_subcommand("info", "Print statistics and section sizes");
  i->add_option("--db", info_db, "Database file")->required();

  std::string dump_db;
  auto* d = app.add_subcommand("dump", "Print every stored triple");
  d->add_option("--db", dump_db, "Database file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (b->parsed()) return cmd_build(build, out, err);
    if (q->parsed()) return cmd_query(query, out, err);
    if (i->parsed()) return cmd_info(info_db, out);
    if (d->parsed()) return cmd_dump(dump_db, out);
  } catch (const QueryError& e) {
    err << "query error: " << e.what() << "\n";
    return kQueryError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kInputError;
  } catch (const IngestError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInputError;
}

}  // namespace wfwl::cli
