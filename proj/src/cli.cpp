#include "gsmat/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gsmat/error.hpp"
#include "gsmat/generator.hpp"
#include "gsmat/ntriples.hpp"
#include "gsmat/planner.hpp"
#include "gsmat/query.hpp"

namespace gsmat {

namespace {

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw StoreError(StoreErrorKind::io, "cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs `body`, mapping exceptions to exit codes and a message on `err`.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_code::parse;
  } catch (const StoreError& e) {
    err << "store error: " << e.what() << '\n';
    return exit_code::store_io;
  } catch (const LookupError& e) {
    err << "lookup error: " << e.what() << '\n';
    return exit_code::store_io;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return exit_code::resource;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  }
}

}  // namespace

Store ingest_ntriples(std::istream& in) {
  TermDictionary dict;
  std::vector<EncodedTriple> triples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto raw = parse_ntriples(line, line_no);
    if (!raw) continue;
    EncodedTriple t;
    t.s = dict.encode_node(raw->s);
    t.p = dict.encode_predicate(raw->p);
    t.o = dict.encode_node(raw->o);
    triples.push_back(t);
  }
  return Store::build(std::move(dict), std::move(triples));
}

ExecutionResult run_query(const Store& store, const std::string& query_text, const ExecOptions& options) {
  const QueryGraph graph = parse_query(query_text);
  const Plan plan = plan_query(bind_constants(graph, store.dictionary()), store.stats());
  return execute(plan, store, options);
}

void write_bindings(std::ostream& out, const BindingTable& table, const TermDictionary& dict) {
  std::string line;
  for (std::size_t c = 0; c < table.width(); ++c) {
    if (c) line += '\t';
    line += table.schema()[c];
  }
  out << line << '\n';
  for (std::size_t r = 0; r < table.size(); ++r) {
    line.clear();
    for (std::size_t c = 0; c < table.width(); ++c) {
      if (c) line += '\t';
      line += escape_line(dict.decode_node(table.at(r, c)));
    }
    out << line << '\n';
  }
}

std::vector<BenchRow> run_bench(const Store& store, const std::vector<std::filesystem::path>& queries,
                                std::size_t runs, std::size_t workers, std::uint64_t row_budget) {
  if (runs == 0) throw std::invalid_argument("runs must be >= 1");
  ExecOptions seq;
  seq.row_budget = row_budget;
  ExecOptions par = seq;
  par.mode = ExecMode::parallel;
  par.workers = workers;
  const Executor seq_exec(store, seq);
  const Executor par_exec(store, par);

  std::vector<BenchRow> rows;
  for (const auto& file : queries) {
    BenchRow row;
    row.query = file.filename().string();
    try {
      const Plan plan = plan_query(bind_constants(parse_query(read_file(file)), store.dictionary()), store.stats());
      auto time_runs = [&](const Executor& exec, std::uint64_t& result_rows) {
        double total = 0.0;
        for (std::size_t i = 0; i < runs; ++i) {
          const auto start = std::chrono::steady_clock::now();
          const auto result = exec.execute(plan);
          total += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
          result_rows = result.table.size();
          row.intermediate = result.report.intermediate_total;
        }
        return total / static_cast<double>(runs);
      };
      row.sequential_ms = time_runs(seq_exec, row.sequential_rows);
      row.parallel_ms = time_runs(par_exec, row.parallel_rows);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_bench(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "query\tsequential_ms\tparallel_ms\tintermediate\tsequential_rows\tparallel_rows\tstatus\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& r : rows) {
    out << r.query << '\t' << r.sequential_ms << '\t' << r.parallel_ms << '\t' << r.intermediate << '\t'
        << r.sequential_rows << '\t' << r.parallel_rows << '\t' << (r.error.empty() ? "ok" : escape_line(r.error))
        << '\n';
  }
}

int cmd_build(const std::filesystem::path& input, const std::filesystem::path& out_dir, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw StoreError(StoreErrorKind::io, "cannot read " + input.string());
    const Store store = ingest_ntriples(in);
    store.persist(out_dir);
    out << store.triple_count() << " triples, " << store.predicate_count() << " predicates, " << store.node_count()
        << " nodes\n";
    return exit_code::ok;
  });
}

int cmd_query(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (config.queries.size() != 1) throw std::invalid_argument("query takes exactly one query file");
    const Store store = Store::load(config.store);
    const QueryGraph graph = parse_query(read_file(config.queries.front()));
    const Plan plan = plan_query(bind_constants(graph, store.dictionary()), store.stats());
    for (const auto& w : plan.warnings) err << "warning: " << w << '\n';
    if (config.explain) {
      out << explain(plan);
      return exit_code::ok;
    }
    ExecOptions options;
    options.mode = config.mode;
    options.workers = config.workers;
    options.row_budget = config.row_budget;
    const auto result = execute(plan, store, options);
    if (config.format == OutputFormat::count) {
      out << result.table.size() << '\n';
    } else {
      write_bindings(out, result.table, store.dictionary());
    }
    if (config.report) err << format_report(result.report);
    return exit_code::ok;
  });
}

int cmd_stats(const std::filesystem::path& store_dir, bool histogram, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Store store = Store::load(store_dir);
    out << read_file(store_dir / "stats.tsv");
    if (histogram) {
      out << "#degree\tnodes\tpercent\n" << std::fixed << std::setprecision(4);
      for (const auto& b : store.degree_histogram()) {
        out << (b.overflow ? ">" : "<=") << (b.overflow ? b.upper - 1 : b.upper) << '\t' << b.nodes << '\t'
            << b.percent << '\n';
      }
    }
    return exit_code::ok;
  });
}

int cmd_gen(std::uint64_t triples, std::uint64_t predicates, double zipf_s, std::uint64_t seed,
            const std::filesystem::path& out_file, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    GeneratorConfig config;
    config.triples = triples;
    config.predicates = predicates;
    config.zipf_s = zipf_s;
    config.seed = seed;
    const auto generated = generate_triples(config);
    std::ofstream file(out_file, std::ios::binary | std::ios::trunc);
    if (!file) throw StoreError(StoreErrorKind::io, "cannot write " + out_file.string());
    write_ntriples(file, config, generated);
    if (!file) throw StoreError(StoreErrorKind::io, "write failed: " + out_file.string());
    out << generated.size() << " triples written to " << out_file.string() << '\n';
    return exit_code::ok;
  });
}

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Store store = Store::load(config.store);
    std::vector<std::filesystem::path> files;
    for (const auto& q : config.queries) {
      if (std::filesystem::is_directory(q)) {
        for (const auto& entry : std::filesystem::directory_iterator(q)) {
          if (entry.is_regular_file() && entry.path().extension() == ".rq") files.push_back(entry.path());
        }
      } else {
        files.push_back(q);
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::invalid_argument("no .rq query files found");
    const auto rows = run_bench(store, files, config.runs, config.workers, config.row_budget);
    write_bench(out, rows);
    for (const auto& r : rows) {
      if (!r.error.empty()) err << r.query << ": " << r.error << '\n';
    }
    return exit_code::ok;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse-matrix RDF store and SPARQL BGP engine", "gsmat"};
  app.require_subcommand(1);

  std::filesystem::path input, out_path;
  RunConfig config;
  std::string mode_name;
  std::string format_name = "tsv";
  bool histogram = false;
  std::uint64_t triples = 0, predicates = 0;
  double zipf_s = 1.0;

  auto* build = app.add_subcommand("build", "Build a store from an N-Triples file");
  build->add_option("--input", input, "N-Triples file")->required();
  build->add_option("--out", out_path, "Store directory")->required();

  auto* query = app.add_subcommand("query", "Run a SPARQL BGP query");
  query->add_option("--store", config.store, "Store directory")->required();
  std::filesystem::path query_file;
  query->add_option("--query", query_file, "Query file")->required();
  query->add_option("--workers", config.workers, "Worker threads (>1 selects parallel mode)")
      ->check(CLI::PositiveNumber);
  query->add_option("--mode", mode_name, "sequential or parallel")->check(CLI::IsMember({"sequential", "parallel"}));
  query->add_option("--format", format_name, "tsv or count")->check(CLI::IsMember({"tsv", "count"}));
  query->add_option("--row-budget", config.row_budget, "Maximum rows reserved by one join");
  query->add_flag("--explain", config.explain, "Print the plan instead of running it");
  query->add_flag("--report", config.report, "Print the execution report to stderr");

  auto* stats = app.add_subcommand("stats", "Print predicate statistics");
  stats->add_option("--store", config.store, "Store directory")->required();
  stats->add_flag("--histogram", histogram, "Also print the node degree histogram");

  auto* gen = app.add_subcommand("gen", "Generate synthetic N-Triples");
  gen->add_option("--triples", triples, "Number of distinct triples")->required()->check(CLI::PositiveNumber);
  gen->add_option("--predicates", predicates, "Number of predicates")->required()->check(CLI::PositiveNumber);
  gen->add_option("--zipf", zipf_s, "Zipf exponent of predicate frequencies")->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", config.seed, "Random seed");
  gen->add_option("--out", out_path, "Output file")->required();

  auto* bench = app.add_subcommand("bench", "Time queries in sequential and parallel mode");
  bench->add_option("--store", config.store, "Store directory")->required();
  std::filesystem::path query_dir;
  bench->add_option("--queries", query_dir, "Directory of .rq files")->required();
  bench->add_option("--runs", config.runs, "Runs per query and mode")->check(CLI::PositiveNumber);
  std::size_t bench_workers = 8;
  bench->add_option("--workers", bench_workers, "Workers for the parallel column")->check(CLI::PositiveNumber);
  bench->add_option("--row-budget", config.row_budget, "Maximum rows reserved by one join");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  if (*build) return cmd_build(input, out_path, out, err);
  if (*query) {
    config.queries = {query_file};
    config.mode = config.workers > 1 ? ExecMode::parallel : ExecMode::sequential;
    if (mode_name == "parallel") config.mode = ExecMode::parallel;
    if (mode_name == "sequential") config.mode = ExecMode::sequential;
    config.format = format_name == "count" ? OutputFormat::count : OutputFormat::tsv;
    return cmd_query(config, out, err);
  }
  if (*stats) return cmd_stats(config.store, histogram, out, err);
  if (*gen) return cmd_gen(triples, predicates, zipf_s, config.seed, out_path, out, err);
  if (*bench) {
    config.queries = {query_dir};
    config.workers = bench_workers;
    return cmd_bench(config, out, err);
  }
  return exit_code::usage;
}

}  // namespace gsmat
