#include <gtest/gtest.h>

#include <random>
#include <set>

#include "gsmat/error.hpp"
#include "gsmat/executor.hpp"
#include "gsmat/planner.hpp"
#include "gsmat/thread_pool.hpp"
#include "test_support.hpp"

using namespace gsmat;
namespace t = gsmat::testing;

namespace {

using Rows = std::vector<std::vector<NodeId>>;

BoundPattern bound(const Store& store, const std::string& pattern) {
  return bind_constants(parse_query("SELECT * { " + pattern + " }"), store.dictionary()).patterns.at(0);
}

Plan plan_text(const Store& store, const std::string& text) {
  return plan_query(bind_constants(parse_query(text), store.dictionary()), store.stats());
}

// A = {(i,k),(i,l)}, B = {(k,r),(k,t),(l,s),(l,t)} with i=1, k=2, l=3, r=4, s=5, t=6.
BindingTable table_a() { return BindingTable({"?row", "?k"}, {1, 2, 1, 3}); }
BindingTable table_b() { return BindingTable({"?k", "?col"}, {2, 4, 2, 6, 3, 5, 3, 6}); }

}  // namespace

TEST(Scan, Examples) {
  const auto store = t::store_from(t::dg_triples());
  auto a = scan(bound(store, "?x <likes> ?w"), store);
  EXPECT_EQ(a.schema(), (std::vector<std::string>{"?x", "?w"}));
  EXPECT_EQ(a.sorted_rows(), (Rows{{1, 2}, {1, 3}, {6, 3}}));
  auto b = scan(bound(store, "<A> <likes> ?w"), store);
  EXPECT_EQ(b.schema(), (std::vector<std::string>{"?w"}));
  EXPECT_EQ(b.sorted_rows(), (Rows{{2}, {3}}));
  EXPECT_EQ(scan(bound(store, "?x <likes> ?x"), store).size(), 0u);
  EXPECT_EQ(scan(bound(store, "?x <related> <h>"), store).sorted_rows(), (Rows{{4}, {7}}));
  auto c = scan(bound(store, "<A> <likes> <I2>"), store);
  EXPECT_EQ(c.width(), 0u);
  EXPECT_EQ(c.size(), 1u);
  EXPECT_EQ(scan(bound(store, "<A> <likes> <B>"), store).size(), 0u);
  EXPECT_EQ(scan(bound(store, "?x <nope> ?y"), store).size(), 0u);
  EXPECT_EQ(scan(bound(store, "<Z> <likes> ?y"), store).size(), 0u);
}

TEST(SmJoin, RowColumnExample) {
  const std::vector<std::string> on{"?k"};
  const auto out = sm_join(table_a(), table_b(), on);
  EXPECT_EQ(out.schema(), (std::vector<std::string>{"?row", "?k", "?col"}));
  EXPECT_EQ(out.sorted_rows(), (Rows{{1, 2, 4}, {1, 2, 6}, {1, 3, 5}, {1, 3, 6}}));
}

TEST(SmJoin, MatchCountIsSparseProduct) {
  const std::vector<std::string> on{"?k"};
  const auto c = sm_join_counts(table_a(), table_b(), on);
  EXPECT_EQ(c.schema, (std::vector<std::string>{"?row", "?col"}));
  const std::map<std::vector<NodeId>, std::uint64_t> expected{{{1, 4}, 1}, {{1, 5}, 1}, {{1, 6}, 2}};
  EXPECT_EQ(c.rows, expected);
}

TEST(SmJoin, MatchCountAgreesWithDenseProduct) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 8;
    std::vector<std::vector<int>> a(n, std::vector<int>(n)), b = a;
    std::vector<NodeId> fa, fb;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (rng() % 3 == 0) { a[i][j] = 1; fa.insert(fa.end(), {i + 1, j + 1}); }
        if (rng() % 3 == 0) { b[i][j] = 1; fb.insert(fb.end(), {i + 1, j + 1}); }
      }
    }
    const std::vector<std::string> on{"?k"};
    const auto c = sm_join_counts(BindingTable({"?i", "?k"}, fa), BindingTable({"?k", "?j"}, fb), on);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        std::uint64_t dense = 0;
        for (std::size_t k = 0; k < n; ++k) dense += a[i][k] * b[k][j];
        auto it = c.rows.find({i + 1, j + 1});
        ASSERT_EQ(it == c.rows.end() ? 0 : it->second, dense);
      }
    }
  }
}

TEST(SmJoin, WorkedExampleChain) {
  const auto store = t::store_from(t::dg_triples());
  const auto& m1 = store.matrix_for(1);
  const auto& m2 = store.matrix_for(2);
  auto left = scan(bound(store, "?x <likes> ?w"), store);
  const std::vector<std::string> w{"?w"}, x{"?x"}, yz{"?y", "?z"};
  left = sm_join(left, JoinOperand::from_matrix(m1, Orientation::os, "?w", "?z"), w);
  EXPECT_EQ(left.size(), 5u);
  left = sm_join(left, JoinOperand::from_matrix(m2, Orientation::so, "?x", "?y"), x);
  left = sm_join(left, JoinOperand::from_table(scan(bound(store, "?y <follows> ?z"), store), "?z"), yz);
  EXPECT_EQ(left.schema(), (std::vector<std::string>{"?x", "?w", "?z", "?y"}));
  EXPECT_EQ(left.sorted_rows(), (Rows{{1, 3, 6, 4}}));
}

TEST(SmJoin, EmptyLeftAndArity) {
  const std::vector<std::string> on{"?k"};
  const auto out = sm_join(BindingTable({"?row", "?k"}), table_b(), on);
  EXPECT_EQ(out.size(), 0u);
  EXPECT_EQ(out.width(), 3u);
  const std::vector<std::string> none;
  const auto cross = sm_join(table_a(), BindingTable({"?z"}, {7, 8, 9}), none);
  EXPECT_EQ(cross.size(), 6u);
  EXPECT_EQ(cross.width(), 3u);
}

TEST(SmJoin, OutputGroupedByKeyAscending) {
  const BindingTable left({"?a", "?k"}, {1, 9, 2, 3, 3, 9, 4, 3});
  const BindingTable right({"?k", "?b"}, {3, 10, 9, 20});
  const std::vector<std::string> on{"?k"};
  const auto out = sm_join(left, right, on);
  EXPECT_EQ(std::vector<NodeId>(out.data().begin(), out.data().end()),
            (std::vector<NodeId>{2, 3, 10, 4, 3, 10, 1, 9, 20, 3, 9, 20}));
  EXPECT_EQ(out.sorted_by(), 1u);
}

TEST(Prealloc, RowGroupedExample) {
  const auto a = table_a();
  const auto op = JoinOperand::from_table(table_b(), "?k");
  const auto plan = preallocate(a, op, "?k", "?row");
  EXPECT_EQ(plan.counts, (std::vector<std::uint64_t>{4}));
  EXPECT_EQ(plan.offsets, (std::vector<std::uint64_t>{0}));
  EXPECT_EQ(plan.total, 4u);
  const auto by_key = preallocate(a, op, "?k");
  EXPECT_EQ(by_key.counts, (std::vector<std::uint64_t>{2, 2}));
  EXPECT_EQ(by_key.offsets, (std::vector<std::uint64_t>{0, 2}));
}

TEST(Prealloc, EmptyLeft) {
  const auto plan = preallocate(BindingTable({"?row", "?k"}), JoinOperand::from_table(table_b(), "?k"), "?k");
  EXPECT_TRUE(plan.counts.empty());
  EXPECT_TRUE(plan.offsets.empty());
  EXPECT_EQ(plan.total, 0u);
}

TEST(Prealloc, FirstWorkedJoin) {
  const auto store = t::store_from(t::dg_triples());
  const auto left = scan(bound(store, "?x <likes> ?w"), store);
  const auto op = JoinOperand::from_matrix(store.matrix_for(1), Orientation::os, "?w", "?z");
  const auto plan = preallocate(left, op, "?w");
  // Pairs of likes-edges sharing an object, counted directly.
  std::uint64_t expected = 0;
  for (const auto& a : t::dg_triples()) {
    for (const auto& b : t::dg_triples()) expected += a.p == "likes" && b.p == "likes" && a.o == b.o;
  }
  EXPECT_EQ(expected, 5u);
  EXPECT_EQ(plan.total, expected);
  const std::vector<std::string> w{"?w"};
  EXPECT_EQ(sm_join(left, op, w).size(), 5u);
}

TEST(ParallelJoin, MatchesSequentialOrderWithOneWorker) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const auto store = t::store_from(t::random_store(rng, 200, 3000, 2, 4));
    const auto left = scan(bound(store, "?a <p1> ?b"), store);
    const auto right = scan(bound(store, "?b <p2> ?c"), store);
    const auto op = JoinOperand::from_table(right, "?b");
    const std::vector<std::string> on{"?b"};
    const auto seq = sm_join(left, op, on);
    ASSERT_EQ(parallel_sm_join(left, op, on, 1).data().size(), seq.data().size());
    auto same = [&](const BindingTable& x) {
      return std::equal(x.data().begin(), x.data().end(), seq.data().begin(), seq.data().end());
    };
    ASSERT_TRUE(same(parallel_sm_join(left, op, on, 1)));
    for (std::size_t workers : {2, 3, 8}) {
      ThreadPool pool(workers);
      ASSERT_TRUE(same(parallel_sm_join(left, op, on, pool)));
    }
  }
}

TEST(ParallelJoin, LargeJoinWithSecondaryFilter) {
  // Large enough to take the threaded path; the secondary variable filters
  // rows so compaction has gaps to close.
  BindingTable left({"?a", "?b"});
  BindingTable right({"?a", "?b", "?c"});
  std::mt19937_64 rng(43);
  for (NodeId i = 0; i < 40000; ++i) left.append(std::vector<NodeId>{1 + rng() % 500, 1 + rng() % 3});
  for (NodeId i = 0; i < 20000; ++i) right.append(std::vector<NodeId>{1 + rng() % 500, 1 + rng() % 3, i});
  const auto op = JoinOperand::from_table(right, "?a");
  const std::vector<std::string> on{"?a", "?b"};
  std::vector<std::string> problems;
  const JoinObserver obs = [&](const BindingTable& l, const JoinOperand& r, const JoinTrace& tr) {
    if (auto e = t::check_prealloc(l, r, tr); !e.empty()) problems.push_back(e);
  };
  JoinOptions opts;
  opts.observer = &obs;
  const auto seq = sm_join(left, op, on, opts);
  for (std::size_t workers : {1, 2, 8}) {
    const auto par = parallel_sm_join(left, op, on, workers, opts);
    ASSERT_TRUE(std::equal(par.data().begin(), par.data().end(), seq.data().begin(), seq.data().end()));
  }
  EXPECT_TRUE(problems.empty()) << problems.front();
  EXPECT_GT(seq.size(), 0u);
}

TEST(Execute, WorkedExample) {
  const auto store = t::store_from(t::dg_triples());
  const auto plan = plan_text(store, t::kSquareQuery);
  for (ExecMode mode : {ExecMode::sequential, ExecMode::parallel}) {
    const auto result = execute(plan, store, {.mode = mode, .workers = 4});
    EXPECT_EQ(result.table.schema(), (std::vector<std::string>{"?x", "?y", "?z", "?w"}));
    EXPECT_EQ(result.table.sorted_rows(), (Rows{{1, 4, 6, 3}}));
    EXPECT_EQ(result.report.preparations, 2u);
    EXPECT_EQ(result.report.uses, 4u);
    std::vector<std::uint64_t> rows;
    for (const auto& s : result.report.steps) rows.push_back(s.rows);
    EXPECT_EQ(rows, (std::vector<std::uint64_t>{3, 5, 5, 1}));
  }
}

TEST(Execute, UnknownPredicateFirst) {
  const auto store = t::store_from(t::dg_triples());
  const auto result = execute(plan_text(store, "SELECT * { ?a <nope> ?b . ?b <likes> ?c }"), store);
  EXPECT_EQ(result.table.size(), 0u);
  EXPECT_EQ(result.table.schema(), (std::vector<std::string>{"?a", "?b", "?c"}));
}

TEST(Execute, CacheCounts) {
  const auto store = t::store_from(t::dg_triples());
  const auto r = execute(plan_text(store, "SELECT * { ?a <likes> ?b . ?a <follows> ?c . ?c <related> ?d }"), store);
  EXPECT_EQ(r.report.preparations, 3u);
  EXPECT_EQ(r.report.uses, 3u);
  Plan empty;
  EXPECT_EQ(execute(empty, store).report.preparations, 0u);
  MatrixCache cache(store);
  bool fresh = false;
  EXPECT_NE(cache.acquire(1, &fresh), nullptr);
  EXPECT_TRUE(fresh);
  cache.acquire(1, &fresh);
  EXPECT_FALSE(fresh);
  EXPECT_EQ(cache.acquire(42), nullptr);
  EXPECT_EQ(cache.preparations(), 1u);
}

TEST(Execute, RowBudget) {
  const auto store = t::store_from(t::dg_triples());
  const auto plan = plan_text(store, t::kSquareQuery);
  EXPECT_THROW(execute(plan, store, {.row_budget = 4}), ResourceError);
  EXPECT_NO_THROW(execute(plan, store, {.row_budget = 5}));
  EXPECT_THROW(execute(plan_text(store, "SELECT * { ?a <follows> ?b . ?c <follows> ?d }"), store,
                       {.row_budget = 15}),
               ResourceError);
}

TEST(Execute, ReportFormat) {
  const auto store = t::store_from(t::dg_triples());
  const auto r = execute(plan_text(store, t::kSquareQuery), store);
  const auto text = format_report(r.report);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 4 + 4);
  EXPECT_NE(text.find("#preparations\t2"), std::string::npos);
}

TEST(Execute, DictionaryCommutes) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 40; ++trial) {
    const auto raw = t::random_store(rng, 100, 500);
    const auto store = t::store_from(raw);
    const auto q = t::random_query(rng, raw, 1 + rng() % 4);
    const auto graph = parse_query(q.text);
    const auto expected = t::oracle_evaluate(raw, graph);
    if (!expected) continue;
    const auto result =
        execute(plan_query(bind_constants(graph, store.dictionary()), store.stats()), store).table;
    ASSERT_EQ(t::decode_bag(result, store.dictionary()), *expected) << q.text;
  }
}

TEST(Execute, RandomQueriesMatchOracle) {
  std::mt19937_64 rng(45);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const auto raw = t::random_store(rng, 200, 500);
    const auto store = t::store_from(raw);
    const auto q = t::random_query(rng, raw, 1 + rng() % 6);
    const auto graph = parse_query(q.text);
    const auto expected = t::oracle_evaluate(raw, graph);
    if (!expected) continue;
    ++checked;
    const auto plan = plan_query(bind_constants(graph, store.dictionary()), store.stats());
    std::vector<std::string> problems;
    ExecOptions opts;
    opts.observer = [&](const BindingTable& l, const JoinOperand& r, const JoinTrace& tr) {
      if (auto e = t::check_prealloc(l, r, tr); !e.empty()) problems.push_back(e);
    };
    for (std::size_t workers : {1, 2, 8}) {
      opts.mode = workers == 1 ? ExecMode::sequential : ExecMode::parallel;
      opts.workers = workers;
      const auto got = execute(plan, store, opts).table;
      ASSERT_EQ(got.schema(), graph.projection);
      ASSERT_EQ(t::decode_bag(got, store.dictionary()), *expected) << q.text;
    }
    ASSERT_TRUE(problems.empty()) << problems.front() << "\n" << q.text;
  }
  EXPECT_GT(checked, 100);
}

TEST(Oracle, WorkedExample) {
  const auto bag = t::oracle_evaluate(t::dg_triples(), parse_query(t::kSquareQuery));
  ASSERT_TRUE(bag);
  EXPECT_EQ(*bag, (t::Bag{{"A", "B", "C", "I2"}}));
  const auto two = t::oracle_evaluate(t::dg_triples(), parse_query("SELECT ?x WHERE { ?x <likes> ?w }"));
  EXPECT_EQ(*two, (t::Bag{{"A"}, {"A"}, {"C"}}));
  const auto distinct =
      t::oracle_evaluate(t::dg_triples(), parse_query("SELECT DISTINCT ?x WHERE { ?x <likes> ?w }"));
  EXPECT_EQ(*distinct, (t::Bag{{"A"}, {"C"}}));
}
