#include "gsmat/executor.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <sstream>

#include "gsmat/error.hpp"
#include "gsmat/saturating.hpp"

namespace gsmat {

// Below this many reserved rows a parallel join fills its groups on the
// calling thread; waking workers costs more than the join itself.
constexpr std::uint64_t kParallelCutoff = 16384;

JoinOperand JoinOperand::from_matrix(const PredicateMatrix& m, Orientation o, std::string key_var,
                                     std::string other_var) {
  if (key_var == other_var) throw ContractViolation("join operand: key and payload variable coincide");
  JoinOperand op;
  op.schema_ = {std::move(key_var), std::move(other_var)};
  op.rows_ = m.pairs(o);
  op.index_ = &m.index(o);
  return op;
}

JoinOperand JoinOperand::from_table(const BindingTable& table, std::string_view key_var) {
  const auto key = table.column(key_var);
  if (!key) throw ContractViolation("join operand: table lacks key variable " + std::string(key_var));
  const std::size_t w = table.width();
  std::vector<std::size_t> cols{*key};
  for (std::size_t c = 0; c < w; ++c) {
    if (c != *key) cols.push_back(c);
  }
  std::vector<std::size_t> order(table.size());
  std::iota(order.begin(), order.end(), 0);
  if (table.sorted_by() != *key) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return table.at(a, *key) < table.at(b, *key); });
  }
  auto rows = std::make_shared<std::vector<NodeId>>();
  rows->reserve(table.size() * w);
  for (std::size_t r : order) {
    for (std::size_t c : cols) rows->push_back(table.at(r, c));
  }
  JoinOperand op;
  for (std::size_t c : cols) op.schema_.push_back(table.schema()[c]);
  op.owned_index_ = std::make_shared<AuxArray>(AuxArray::build(*rows, w));
  op.owned_rows_ = std::move(rows);
  op.rows_ = *op.owned_rows_;
  op.index_ = op.owned_index_.get();
  return op;
}

std::string first_join_variable(const BindingTable& left, std::span<const std::string> join_vars) {
  for (const auto& v : left.schema()) {
    if (std::find(join_vars.begin(), join_vars.end(), v) != join_vars.end()) return v;
  }
  throw ContractViolation("join: no join variable occurs in the left schema");
}

namespace {

std::size_t require_column(const BindingTable& t, std::string_view var, const char* side) {
  if (auto c = t.column(var)) return *c;
  throw ContractViolation(std::string("join: ") + side + " side lacks variable " + std::string(var));
}

std::size_t require_column(const JoinOperand& op, std::string_view var) {
  for (std::size_t i = 0; i < op.width(); ++i) {
    if (op.schema()[i] == var) return i;
  }
  throw ContractViolation("join: right side lacks variable " + std::string(var));
}

// Groups left rows on `group_col` and counts first-variable matches. When the
// grouping column is the key column, runs[g] is the operand's run for the
// group key (num == 0 when absent).
PreallocPlan build_prealloc(const BindingTable& left, const JoinOperand& right, std::size_t key_col,
                            std::size_t group_col, std::vector<AuxEntry>* runs) {
  PreallocPlan plan;
  const std::size_t n = left.size();
  plan.order.resize(n);
  std::iota(plan.order.begin(), plan.order.end(), 0);
  if (left.sorted_by() != group_col) {
    std::stable_sort(plan.order.begin(), plan.order.end(), [&](std::size_t a, std::size_t b) {
      return left.at(a, group_col) < left.at(b, group_col);
    });
  }
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId g = left.at(plan.order[i], group_col);
    if (plan.group_keys.empty() || plan.group_keys.back() != g) {
      plan.group_keys.push_back(g);
      plan.group_begin.push_back(i);
    }
  }
  plan.group_begin.push_back(n);

  const std::size_t groups = plan.group_keys.size();
  plan.counts.assign(groups, 0);
  plan.offsets.assign(groups, 0);
  if (runs) runs->assign(groups, AuxEntry{});
  const auto& index = right.index();
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t b = plan.group_begin[g];
    const std::size_t e = plan.group_begin[g + 1];
    std::uint64_t count = 0;
    if (group_col == key_col) {
      if (auto run = index.find(plan.group_keys[g])) {
        count = sat_mul(run->num, e - b);
        if (runs) (*runs)[g] = *run;
      }
    } else {
      for (std::size_t i = b; i < e; ++i) {
        if (auto run = index.find(left.at(plan.order[i], key_col))) count = sat_add(count, run->num);
      }
    }
    plan.counts[g] = count;
    plan.offsets[g] = plan.total;
    plan.total = sat_add(plan.total, count);
  }
  return plan;
}

void check_budget(std::uint64_t total, std::uint64_t budget) {
  if (total > budget) {
    throw ResourceError("join would produce up to " + (total == kSaturated ? std::string("2^64") : std::to_string(total)) +
                        " rows, over the budget of " + std::to_string(budget));
  }
}

// Column bookkeeping shared by the sequential and parallel joins.
struct JoinShape {
  std::size_t key_col = 0;
  std::vector<std::pair<std::size_t, std::size_t>> secondary;  // (left col, operand col)
  std::vector<std::size_t> extra;                              // operand cols appended to the output
  std::vector<std::string> schema;

  JoinShape(const BindingTable& left, const JoinOperand& right, std::span<const std::string> join_vars,
            const std::string& first) {
    key_col = require_column(left, first, "left");
    if (right.width() == 0 || right.schema()[0] != first) {
      throw ContractViolation("join: operand is not keyed on the first join variable " + first);
    }
    for (const auto& v : join_vars) {
      const std::size_t lc = require_column(left, v, "left");
      const std::size_t rc = require_column(right, v);
      if (v != first) secondary.emplace_back(lc, rc);
    }
    schema = left.schema();
    for (std::size_t c = 0; c < right.width(); ++c) {
      if (std::find(join_vars.begin(), join_vars.end(), right.schema()[c]) == join_vars.end()) {
        extra.push_back(c);
        schema.push_back(right.schema()[c]);
      }
    }
  }

  std::size_t out_width() const { return schema.size(); }

  // Writes every full match of group g starting at `out`; returns rows written.
  std::size_t fill_group(const BindingTable& left, const JoinOperand& right, const PreallocPlan& plan,
                         const AuxEntry& run, std::size_t g, NodeId* out) const {
    std::size_t written = 0;
    const std::size_t w = out_width();
    const std::size_t lw = left.width();
    for (std::size_t i = plan.group_begin[g]; i < plan.group_begin[g + 1]; ++i) {
      const auto lrow = left.row(plan.order[i]);
      for (std::size_t j = run.begin(); j < run.end(); ++j) {
        const auto rrow = right.row(j);
        bool ok = true;
        for (const auto& [lc, rc] : secondary) {
          if (lrow[lc] != rrow[rc]) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        NodeId* dst = out + written * w;
        std::copy(lrow.begin(), lrow.end(), dst);
        for (std::size_t k = 0; k < extra.size(); ++k) dst[lw + k] = rrow[extra[k]];
        ++written;
      }
    }
    return written;
  }
};

BindingTable cross_product(const BindingTable& left, const std::vector<std::string>& right_schema,
                           std::span<const NodeId> right_rows, std::size_t right_count, const JoinOptions& options,
                           const JoinOperand* operand_for_trace) {
  std::vector<std::string> schema = left.schema();
  for (const auto& v : right_schema) {
    if (std::find(schema.begin(), schema.end(), v) != schema.end()) {
      throw ContractViolation("cross product: variable " + v + " on both sides");
    }
    schema.push_back(v);
  }
  const std::uint64_t total = sat_mul(left.size(), right_count);
  check_budget(total, options.row_budget);
  const std::size_t rw = right_schema.size();
  std::vector<NodeId> data;
  data.reserve(total * schema.size());
  for (std::size_t i = 0; i < left.size(); ++i) {
    const auto lrow = left.row(i);
    for (std::size_t j = 0; j < right_count; ++j) {
      data.insert(data.end(), lrow.begin(), lrow.end());
      data.insert(data.end(), right_rows.begin() + j * rw, right_rows.begin() + (j + 1) * rw);
    }
  }
  BindingTable out(std::move(schema), std::move(data), total);
  if (options.observer && *options.observer) {
    JoinTrace trace;
    trace.cross_product = true;
    trace.prealloc.counts = {total};
    trace.prealloc.offsets = {0};
    trace.prealloc.total = total;
    trace.emitted = {total};
    static const JoinOperand empty_operand;
    (*options.observer)(left, operand_for_trace ? *operand_for_trace : empty_operand, trace);
  }
  return out;
}

void notify(const JoinOptions& options, const BindingTable& left, const JoinOperand& right,
            std::span<const std::string> join_vars, const std::string& first, PreallocPlan plan,
            std::vector<std::uint64_t> emitted) {
  if (!options.observer || !*options.observer) return;
  JoinTrace trace;
  trace.first_var = first;
  trace.join_vars.assign(join_vars.begin(), join_vars.end());
  trace.prealloc = std::move(plan);
  trace.emitted = std::move(emitted);
  (*options.observer)(left, right, trace);
}

}  // namespace

PreallocPlan preallocate(const BindingTable& left, const JoinOperand& right, std::string_view first_var) {
  return preallocate(left, right, first_var, first_var);
}

PreallocPlan preallocate(const BindingTable& left, const JoinOperand& right, std::string_view first_var,
                         std::string_view group_var) {
  if (right.width() == 0 || right.schema()[0] != first_var) {
    throw ContractViolation("preallocate: operand is not keyed on " + std::string(first_var));
  }
  const std::size_t key_col = require_column(left, first_var, "left");
  const std::size_t group_col = require_column(left, group_var, "left");
  return build_prealloc(left, right, key_col, group_col, nullptr);
}

BindingTable sm_join(const BindingTable& left, const JoinOperand& right, std::span<const std::string> join_vars,
                     const JoinOptions& options) {
  if (join_vars.empty()) return cross_product(left, right.schema(), right.rows(), right.size(), options, &right);
  const std::string first = first_join_variable(left, join_vars);
  const JoinShape shape(left, right, join_vars, first);

  std::vector<AuxEntry> runs;
  PreallocPlan plan = build_prealloc(left, right, shape.key_col, shape.key_col, &runs);
  check_budget(plan.total, options.row_budget);

  const std::size_t w = shape.out_width();
  std::vector<NodeId> data(plan.total * w);
  std::vector<std::uint64_t> emitted(plan.counts.size(), 0);
  std::size_t rows = 0;
  for (std::size_t g = 0; g < plan.counts.size(); ++g) {
    if (runs[g].num == 0) continue;
    emitted[g] = shape.fill_group(left, right, plan, runs[g], g, data.data() + rows * w);
    rows += emitted[g];
  }
  data.resize(rows * w);

  BindingTable out(shape.schema, std::move(data), rows);
  out.mark_sorted_by(shape.key_col);
  notify(options, left, right, join_vars, first, std::move(plan), std::move(emitted));
  return out;
}

BindingTable sm_join(const BindingTable& left, const BindingTable& right, std::span<const std::string> join_vars,
                     const JoinOptions& options) {
  if (join_vars.empty()) return cross_product(left, right.schema(), right.data(), right.size(), options, nullptr);
  const std::string first = first_join_variable(left, join_vars);
  return sm_join(left, JoinOperand::from_table(right, first), join_vars, options);
}

BindingTable parallel_sm_join(const BindingTable& left, const JoinOperand& right,
                              std::span<const std::string> join_vars, ThreadPool& pool, const JoinOptions& options) {
  if (join_vars.empty()) return cross_product(left, right.schema(), right.rows(), right.size(), options, &right);
  const std::string first = first_join_variable(left, join_vars);
  const JoinShape shape(left, right, join_vars, first);

  std::vector<AuxEntry> runs;
  PreallocPlan plan = build_prealloc(left, right, shape.key_col, shape.key_col, &runs);
  check_budget(plan.total, options.row_budget);

  const std::size_t w = shape.out_width();
  const std::size_t groups = plan.counts.size();
  std::vector<NodeId> data(plan.total * w);
  std::vector<std::uint64_t> emitted(groups, 0);

  auto fill_range = [&](std::size_t gb, std::size_t ge) {
    for (std::size_t g = gb; g < ge; ++g) {
      if (runs[g].num == 0) continue;
      emitted[g] = shape.fill_group(left, right, plan, runs[g], g, data.data() + plan.offsets[g] * w);
    }
  };

  if (pool.size() == 1 || plan.total < kParallelCutoff) {
    fill_range(0, groups);
  } else {
    // Chunk boundaries balance reserved rows rather than group counts.
    const std::size_t chunks = std::min<std::size_t>(groups, pool.size() * 4);
    std::vector<std::size_t> bounds{0};
    const std::uint64_t per_chunk = plan.total / chunks + 1;
    for (std::size_t g = 0; g < groups; ++g) {
      if (plan.offsets[g] >= per_chunk * bounds.size() && g > bounds.back()) bounds.push_back(g);
    }
    bounds.push_back(groups);
    pool.parallel_for(bounds.size() - 1, [&](std::size_t c) { fill_range(bounds[c], bounds[c + 1]); });
  }

  // Compaction: slices only ever move towards the front.
  std::size_t rows = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    if (emitted[g] > plan.counts[g]) throw ContractViolation("parallel join: group overflowed its reservation");
    if (rows != plan.offsets[g] && emitted[g] > 0) {
      auto src = data.begin() + plan.offsets[g] * w;
      std::copy(src, src + emitted[g] * w, data.begin() + rows * w);
    }
    rows += emitted[g];
  }
  data.resize(rows * w);

  BindingTable out(shape.schema, std::move(data), rows);
  out.mark_sorted_by(shape.key_col);
  notify(options, left, right, join_vars, first, std::move(plan), std::move(emitted));
  return out;
}

BindingTable parallel_sm_join(const BindingTable& left, const JoinOperand& right,
                              std::span<const std::string> join_vars, std::size_t workers,
                              const JoinOptions& options) {
  ThreadPool pool(workers);
  return parallel_sm_join(left, right, join_vars, pool, options);
}

CountedTable sm_join_counts(const BindingTable& left, const BindingTable& right,
                            std::span<const std::string> join_vars) {
  const BindingTable joined = sm_join(left, right, join_vars);
  CountedTable out;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < joined.width(); ++c) {
    if (std::find(join_vars.begin(), join_vars.end(), joined.schema()[c]) == join_vars.end()) {
      keep.push_back(c);
      out.schema.push_back(joined.schema()[c]);
    }
  }
  std::vector<NodeId> key(keep.size());
  for (std::size_t r = 0; r < joined.size(); ++r) {
    for (std::size_t k = 0; k < keep.size(); ++k) key[k] = joined.at(r, keep[k]);
    ++out.rows[key];
  }
  return out;
}

namespace {

BindingTable scan_matrix(const BoundPattern& pattern, const PredicateMatrix* m) {
  BindingTable empty(pattern.variables());
  if (pattern.matches_nothing() || !m || m->empty()) return empty;
  const auto& s = pattern.s;
  const auto& o = pattern.o;

  if (s.is_variable() && o.is_variable()) {
    const auto so = m->so_pairs();
    if (s.var != o.var) {
      BindingTable t({s.var, o.var}, std::vector<NodeId>(so.begin(), so.end()));
      t.mark_sorted_by(0);
      return t;
    }
    std::vector<NodeId> loops;
    for (std::size_t i = 0; i < m->size(); ++i) {
      if (so[2 * i] == so[2 * i + 1]) loops.push_back(so[2 * i]);
    }
    BindingTable t({s.var}, std::move(loops));
    t.mark_sorted_by(0);
    return t;
  }

  // At least one constant: read the run of the constant endpoint.
  const Orientation orient = s.is_variable() ? Orientation::os : Orientation::so;
  const NodeId key = s.is_variable() ? o.id : s.id;
  const auto run = m->index(orient).find(key);
  if (!run) return empty;
  const auto pairs = m->pairs(orient);
  const NodeSlot& free = s.is_variable() ? s : o;
  if (free.is_variable()) {
    std::vector<NodeId> values;
    values.reserve(run->num);
    for (std::size_t i = run->begin(); i < run->end(); ++i) values.push_back(pairs[2 * i + 1]);
    BindingTable t({free.var}, std::move(values));
    t.mark_sorted_by(0);
    return t;
  }
  for (std::size_t i = run->begin(); i < run->end(); ++i) {
    if (pairs[2 * i + 1] == o.id) return BindingTable::unit();
  }
  return empty;
}

JoinOperand make_operand(const BoundPattern& pattern, const PredicateMatrix& m, const std::string& key) {
  if (pattern.s.is_variable() && pattern.o.is_variable() && pattern.s.var != pattern.o.var) {
    return pattern.s.var == key ? JoinOperand::from_matrix(m, Orientation::so, pattern.s.var, pattern.o.var)
                                : JoinOperand::from_matrix(m, Orientation::os, pattern.o.var, pattern.s.var);
  }
  return JoinOperand::from_table(scan_matrix(pattern, &m), key);
}

std::vector<std::string> joined_schema(const BindingTable& left, const BoundPattern& pattern) {
  auto schema = left.schema();
  for (const auto& v : pattern.variables()) {
    if (std::find(schema.begin(), schema.end(), v) == schema.end()) schema.push_back(v);
  }
  return schema;
}

}  // namespace

BindingTable scan(const BoundPattern& pattern, const Store& store) {
  return scan_matrix(pattern, store.find_matrix(pattern.pred));
}

const PredicateMatrix* MatrixCache::acquire(PredId pid, bool* fresh) {
  if (fresh) *fresh = false;
  const PredicateMatrix* m = store_->find_matrix(pid);
  if (!m) return nullptr;
  ++uses_;
  if (prepared_.emplace(pid, m).second && fresh) *fresh = true;
  return m;
}

std::string format_report(const ExecutionReport& report) {
  std::ostringstream out;
  out << "#step\tordinal\tpattern\testimate\trows\tprealloc\tprepared\tmillis\n";
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    const auto& s = report.steps[i];
    out << i + 1 << '\t' << s.ordinal << '\t' << s.pattern << '\t' << s.estimate << '\t' << s.rows << '\t'
        << s.prealloc_total << '\t' << (s.prepared ? "yes" : "no") << '\t' << s.millis << '\n';
  }
  out << "#preparations\t" << report.preparations << "\n#uses\t" << report.uses << "\n#intermediate\t"
      << report.intermediate_total << "\n#millis\t" << report.total_millis << '\n';
  return out.str();
}

Executor::Executor(const Store& store, ExecOptions options) : store_(&store), options_(std::move(options)) {
  if (options_.workers == 0) throw ContractViolation("executor: worker count must be at least 1");
  if (options_.mode == ExecMode::parallel) pool_ = std::make_unique<ThreadPool>(options_.workers);
}

ExecutionResult Executor::execute(const Plan& plan) const {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  ExecutionResult result;
  auto& report = result.report;
  if (plan.steps.empty()) {
    result.table = BindingTable(plan.projection);
    return result;
  }

  MatrixCache cache(*store_);
  std::uint64_t last_prealloc = 0;
  const JoinObserver record = [&](const BindingTable& l, const JoinOperand& r, const JoinTrace& t) {
    last_prealloc = t.prealloc.total;
    if (options_.observer) options_.observer(l, r, t);
  };
  JoinOptions jopts;
  jopts.row_budget = options_.row_budget;
  jopts.observer = &record;

  BindingTable rt;
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const auto step_start = Clock::now();
    const auto& step = plan.steps[k];
    const auto& pattern = step.pattern;
    StepReport sr;
    sr.ordinal = pattern.source.ordinal;
    sr.pattern = to_string(pattern.source);
    sr.estimate = step.estimate;
    const PredicateMatrix* m = pattern.pred != kNoPred ? cache.acquire(pattern.pred, &sr.prepared) : nullptr;

    if (k == 0) {
      rt = scan_matrix(pattern, m);
    } else if (rt.empty() || pattern.matches_nothing() || !m) {
      rt = BindingTable(joined_schema(rt, pattern));
    } else {
      std::vector<std::string> join_vars;
      for (const auto& v : pattern.variables()) {
        if (rt.column(v)) join_vars.push_back(v);
      }
      last_prealloc = 0;
      if (join_vars.empty()) {
        rt = sm_join(rt, scan_matrix(pattern, m), join_vars, jopts);
      } else {
        const std::string first = first_join_variable(rt, join_vars);
        const JoinOperand operand = make_operand(pattern, *m, first);
        rt = options_.mode == ExecMode::parallel ? parallel_sm_join(rt, operand, join_vars, *pool_, jopts)
                                                 : sm_join(rt, operand, join_vars, jopts);
      }
      sr.prealloc_total = last_prealloc;
    }
    sr.rows = rt.size();
    sr.millis = std::chrono::duration<double, std::milli>(Clock::now() - step_start).count();
    report.intermediate_total = sat_add(report.intermediate_total, sr.rows);
    report.steps.push_back(std::move(sr));
  }

  result.table = rt.project(plan.projection, plan.distinct);
  report.preparations = cache.preparations();
  report.uses = cache.uses();
  report.total_millis = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return result;
}

ExecutionResult execute(const Plan& plan, const Store& store, const ExecOptions& options) {
  return Executor(store, options).execute(plan);
}

}  // namespace gsmat
