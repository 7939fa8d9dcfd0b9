#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsmat/binding_table.hpp"
#include "gsmat/planner.hpp"
#include "gsmat/storage.hpp"
#include "gsmat/thread_pool.hpp"

namespace gsmat {

inline constexpr std::uint64_t kDefaultRowBudget = 100'000'000;

// Right-hand side of a sparse-matrix join: a relation sorted on its first
// column with an AuxArray over that column. Either a view over one
// orientation of a stored predicate matrix or an owned, re-sorted copy of a
// binding table.
class JoinOperand {
 public:
  static JoinOperand from_matrix(const PredicateMatrix& m, Orientation o, std::string key_var,
                                 std::string other_var);
  static JoinOperand from_table(const BindingTable& table, std::string_view key_var);

  const std::vector<std::string>& schema() const { return schema_; }
  std::size_t width() const { return schema_.size(); }
  std::size_t size() const { return width() ? rows_.size() / width() : 0; }
  std::span<const NodeId> rows() const { return rows_; }
  std::span<const NodeId> row(std::size_t i) const { return rows_.subspan(i * width(), width()); }
  const AuxArray& index() const { return *index_; }

 private:
  std::vector<std::string> schema_;
  std::span<const NodeId> rows_;
  const AuxArray* index_ = nullptr;
  std::shared_ptr<const std::vector<NodeId>> owned_rows_;
  std::shared_ptr<const AuxArray> owned_index_;
};

// Output space reservation for one join. Left rows are grouped by a column
// (the join key unless told otherwise); group g may emit at most counts[g]
// rows, written from offsets[g]. counts[g] is the exact number of matches on
// the first join variable, hence an upper bound once the remaining join
// variables are checked.
struct PreallocPlan {
  std::vector<std::uint64_t> counts;   // N
  std::vector<std::uint64_t> offsets;  // P, exclusive prefix sums of N
  std::uint64_t total = 0;             // sum of N (saturating)
  std::vector<NodeId> group_keys;      // value of the grouping column per group
  std::vector<std::size_t> order;      // left row indices, grouped
  std::vector<std::size_t> group_begin;  // group g covers order[group_begin[g] .. group_begin[g+1])
};

PreallocPlan preallocate(const BindingTable& left, const JoinOperand& right, std::string_view first_var);
PreallocPlan preallocate(const BindingTable& left, const JoinOperand& right, std::string_view first_var,
                         std::string_view group_var);

// Earliest column of `left` whose variable is in `join_vars`.
std::string first_join_variable(const BindingTable& left, std::span<const std::string> join_vars);

struct JoinTrace {
  std::string first_var;
  std::vector<std::string> join_vars;
  PreallocPlan prealloc;
  std::vector<std::uint64_t> emitted;  // rows actually written per group
  bool cross_product = false;
};

using JoinObserver = std::function<void(const BindingTable& left, const JoinOperand& right, const JoinTrace&)>;

struct JoinOptions {
  std::uint64_t row_budget = kDefaultRowBudget;
  const JoinObserver* observer = nullptr;
};

// Joins `left` with `right` on `join_vars`. The operand must be keyed on the
// first join variable (the one that appears earliest in the left schema).
// Output schema: left columns, then the operand's non-join columns. Rows come
// out grouped by the key in ascending order, left order kept within a group.
// Empty `join_vars` gives the cross product. Throws ResourceError when the
// reserved output exceeds the row budget.
BindingTable sm_join(const BindingTable& left, const JoinOperand& right, std::span<const std::string> join_vars,
                     const JoinOptions& options = {});

// Convenience overload for two plain tables.
BindingTable sm_join(const BindingTable& left, const BindingTable& right, std::span<const std::string> join_vars,
                     const JoinOptions& options = {});

// Same rows in the same order as sm_join. Each key group is filled by one
// worker into its reserved slice; a compaction pass closes the gaps left by
// rows that failed a secondary join variable.
BindingTable parallel_sm_join(const BindingTable& left, const JoinOperand& right,
                              std::span<const std::string> join_vars, ThreadPool& pool,
                              const JoinOptions& options = {});
BindingTable parallel_sm_join(const BindingTable& left, const JoinOperand& right,
                              std::span<const std::string> join_vars, std::size_t workers,
                              const JoinOptions& options = {});

// Join result with the join variables dropped and identical remaining rows
// merged, each carrying the number of join witnesses. For two binary
// relations joined on A.col = B.row this is the sparse matrix product A * B.
struct CountedTable {
  std::vector<std::string> schema;
  std::map<std::vector<NodeId>, std::uint64_t> rows;
};

CountedTable sm_join_counts(const BindingTable& left, const BindingTable& right,
                            std::span<const std::string> join_vars);

// Matches of one encoded pattern. Schema: the pattern's distinct variables in
// (s, o) order.
BindingTable scan(const BoundPattern& pattern, const Store& store);

enum class ExecMode { sequential, parallel };

struct ExecOptions {
  ExecMode mode = ExecMode::sequential;
  std::size_t workers = 1;
  std::uint64_t row_budget = kDefaultRowBudget;
  JoinObserver observer;  // called after every join when set
};

struct StepReport {
  std::size_t ordinal = 0;
  std::string pattern;
  std::uint64_t estimate = 0;
  std::uint64_t rows = 0;            // intermediate result size after this step
  std::uint64_t prealloc_total = 0;  // 0 for the first step
  bool prepared = false;             // first use of this predicate's matrix
  double millis = 0.0;
};

struct ExecutionReport {
  std::vector<StepReport> steps;
  std::size_t preparations = 0;
  std::size_t uses = 0;
  std::uint64_t intermediate_total = 0;  // sum of per-step rows
  double total_millis = 0.0;
};

std::string format_report(const ExecutionReport& report);

struct ExecutionResult {
  BindingTable table;  // projected
  ExecutionReport report;
};

// Per-execution registry of predicate matrices: a predicate referenced by k
// plan steps is prepared once and used k times.
class MatrixCache {
 public:
  explicit MatrixCache(const Store& store) : store_(&store) {}

  // nullptr for predicates the store does not hold; `fresh` reports whether
  // this call performed the preparation.
  const PredicateMatrix* acquire(PredId pid, bool* fresh = nullptr);

  std::size_t preparations() const { return prepared_.size(); }
  std::size_t uses() const { return uses_; }

 private:
  const Store* store_;
  std::map<PredId, const PredicateMatrix*> prepared_;
  std::size_t uses_ = 0;
};

// Runs plans against one store. Holds the worker pool for parallel mode so
// repeated executions do not respawn threads.
class Executor {
 public:
  Executor(const Store& store, ExecOptions options = {});

  ExecutionResult execute(const Plan& plan) const;

 private:
  const Store* store_;
  ExecOptions options_;
  std::unique_ptr<ThreadPool> pool_;
};

ExecutionResult execute(const Plan& plan, const Store& store, const ExecOptions& options = {});

}  // namespace gsmat
