#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gsmat/executor.hpp"
#include "gsmat/storage.hpp"

namespace gsmat {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int parse = 2;
inline constexpr int store_io = 3;
inline constexpr int resource = 4;
}  // namespace exit_code

enum class OutputFormat { tsv, count };

struct RunConfig {
  std::filesystem::path store;
  std::vector<std::filesystem::path> queries;
  ExecMode mode = ExecMode::sequential;
  std::size_t workers = 1;
  OutputFormat format = OutputFormat::tsv;
  std::size_t runs = 10;
  std::uint64_t seed = 42;
  std::uint64_t row_budget = kDefaultRowBudget;
  bool explain = false;
  bool report = false;
};

// Reads N-Triples, assigning ids in first-occurrence order. ParseError
// carries the offending line number.
Store ingest_ntriples(std::istream& in);

// Plans and runs one query text against a store.
ExecutionResult run_query(const Store& store, const std::string& query_text, const ExecOptions& options);

// Header line of projected variables followed by one decoded row per binding.
void write_bindings(std::ostream& out, const BindingTable& table, const TermDictionary& dict);

struct BenchRow {
  std::string query;
  double sequential_ms = 0.0;
  double parallel_ms = 0.0;
  std::uint64_t intermediate = 0;
  std::uint64_t sequential_rows = 0;
  std::uint64_t parallel_rows = 0;
  std::string error;  // empty on success
};

// Mean wall time over `runs` executions in each mode, one row per query file
// (sorted by name). Failures are reported per row; other queries still run.
std::vector<BenchRow> run_bench(const Store& store, const std::vector<std::filesystem::path>& queries,
                                std::size_t runs, std::size_t workers, std::uint64_t row_budget);
void write_bench(std::ostream& out, const std::vector<BenchRow>& rows);

// Subcommands. Each returns a process exit code and never throws.
int cmd_build(const std::filesystem::path& input, const std::filesystem::path& out_dir, std::ostream& out,
              std::ostream& err);
int cmd_query(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_stats(const std::filesystem::path& store, bool histogram, std::ostream& out, std::ostream& err);
int cmd_gen(std::uint64_t triples, std::uint64_t predicates, double zipf_s, std::uint64_t seed,
            const std::filesystem::path& out_file, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);

// Full command line: `gsmat <build|query|stats|gen|bench> ...`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gsmat
