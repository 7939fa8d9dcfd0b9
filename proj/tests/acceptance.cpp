// Acceptance suite: one PASS/FAIL line per criterion. Run with a criterion
// number to execute only that one.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "gsmat/cli.hpp"
#include "gsmat/error.hpp"
#include "gsmat/executor.hpp"
#include "gsmat/planner.hpp"
#include "test_support.hpp"

using namespace gsmat;
namespace t = gsmat::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

#define REQUIRE(cond, why)   \
  do {                       \
    if (!(cond)) {           \
      out.fail(why);         \
      return out;            \
    }                        \
  } while (0)

// Shared random workload for criteria 3, 4 and 6.
struct Trial {
  std::size_t store_index;
  std::string query;
  t::Bag expected;
};

struct Workload {
  std::vector<std::vector<RawTriple>> raw;
  std::vector<Store> stores;
  std::vector<Trial> trials;
};

constexpr std::size_t kStores = 60;
constexpr std::size_t kQueriesPerStore = 5;

const Workload& workload() {
  static const Workload w = [] {
    Workload w;
    std::mt19937_64 rng(20240611);
    for (std::size_t i = 0; i < kStores; ++i) {
      w.raw.push_back(t::random_store(rng, 50, 1000, 2, 8));
      w.stores.push_back(t::store_from(w.raw.back()));
      for (std::size_t k = 0; k < kQueriesPerStore;) {
        const auto q = t::random_query(rng, w.raw.back(), 1 + rng() % 6, 2);
        if (q.constants > 2) continue;
        auto expected = t::oracle_evaluate(w.raw.back(), parse_query(q.text), 200'000);
        if (!expected) continue;  // result too large for the nested-loop oracle
        w.trials.push_back({i, q.text, std::move(*expected)});
        ++k;
      }
    }
    return w;
  }();
  return w;
}

struct ModeRun {
  ExecMode mode;
  std::size_t workers;
  const char* name;
};

constexpr ModeRun kModes[] = {{ExecMode::sequential, 1, "sequential"},
                              {ExecMode::parallel, 1, "parallel/1"},
                              {ExecMode::parallel, 2, "parallel/2"},
                              {ExecMode::parallel, 8, "parallel/8"}};

// ---------------------------------------------------------------------------

Outcome worked_example() {
  Outcome out;
  const auto start = Clock::now();
  std::ifstream nt(t::fixture("dg.nt"));
  const auto store = ingest_ntriples(nt);
  const auto graph = parse_query(t::kSquareQuery);
  const auto plan = plan_query(bind_constants(graph, store.dictionary()), store.stats());

  std::vector<std::string> order;
  for (const auto& s : plan.steps) order.push_back(to_string(s.pattern.source));
  REQUIRE(order == (std::vector<std::string>{"?x <likes> ?w", "?z <likes> ?w", "?x <follows> ?y",
                                             "?y <follows> ?z"}),
          "plan order differs");

  for (const auto& m : {ExecMode::sequential, ExecMode::parallel}) {
    const auto result = execute(plan, store, {.mode = m, .workers = 8});
    REQUIRE(result.table.size() == 1, "expected exactly one binding");
    REQUIRE(t::decode_bag(result.table, store.dictionary()) == (t::Bag{{"A", "B", "C", "I2"}}),
            "binding differs from (A, B, C, I2)");
  }
  // Internal order of the last join: (?x, ?w, ?z, ?y) = (1, 3, 6, 4) -> (A, I2, C, B).
  const auto raw = execute(Plan{plan.steps, {"?x", "?w", "?z", "?y"}, false, {}}, store).table;
  REQUIRE(raw.sorted_rows() == (std::vector<std::vector<NodeId>>{{1, 3, 6, 4}}), "encoded row differs");

  std::size_t so_ints = 0, os_ints = 0;
  for (const auto& mtx : store.matrices()) {
    so_ints += mtx.so_pairs().size();
    os_ints += mtx.os_pairs().size();
  }
  REQUIRE(so_ints == 18 && os_ints == 18, "expected 18 pair integers per orientation");
  const double secs = seconds_since(start);
  REQUIRE(secs < 1.0, "took " + std::to_string(secs) + " s");
  out.detail = "1 binding (A,B,C,I2), plan 3,4,1,2, 18 units, " + std::to_string(secs * 1000) + " ms";
  return out;
}

Outcome sparse_product() {
  Outcome out;
  // i=1 k=2 l=3 r=4 s=5 t=6
  const BindingTable a({"?row", "?k"}, {1, 2, 1, 3});
  const BindingTable b({"?k", "?col"}, {2, 4, 2, 6, 3, 5, 3, 6});
  const std::vector<std::string> on{"?k"};
  const auto c = sm_join_counts(a, b, on);
  const std::map<std::vector<NodeId>, std::uint64_t> expected{{{1, 4}, 1}, {{1, 5}, 1}, {{1, 6}, 2}};
  REQUIRE(c.rows == expected, "counts differ from {(i,r,1),(i,s,1),(i,t,2)}");
  out.detail = "{(i,r,1),(i,s,1),(i,t,2)}";
  return out;
}

// Criteria 3 and 4 run over the same executions.
struct OracleStats {
  Outcome equivalence;
  Outcome prealloc;
};

const OracleStats& oracle_runs() {
  static const OracleStats stats = [] {
    OracleStats s;
    const auto start = Clock::now();
    const auto& w = workload();
    std::size_t joins = 0, executions = 0, nonempty = 0, with_constants = 0;
    std::set<std::size_t> lengths;
    for (const auto& trial : w.trials) {
      const auto& store = w.stores[trial.store_index];
      const auto graph = parse_query(trial.query);
      lengths.insert(graph.patterns.size());
      nonempty += !trial.expected.empty();
      with_constants += std::any_of(graph.patterns.begin(), graph.patterns.end(),
                                    [](const auto& p) { return !p.s.is_variable() || !p.o.is_variable(); });
      const auto plan = plan_query(bind_constants(graph, store.dictionary()), store.stats());
      for (const auto& mode : kModes) {
        ExecOptions opts{.mode = mode.mode, .workers = mode.workers};
        opts.observer = [&](const BindingTable& l, const JoinOperand& r, const JoinTrace& tr) {
          ++joins;
          if (auto e = t::check_prealloc(l, r, tr); !e.empty()) s.prealloc.fail(e + " in\n" + trial.query);
        };
        ++executions;
        try {
          const auto got = execute(plan, store, opts).table;
          if (t::decode_bag(got, store.dictionary()) != trial.expected) {
            s.equivalence.fail(std::string(mode.name) + " differs from oracle on\n" + trial.query);
          }
        } catch (const std::exception& e) {
          s.equivalence.fail(std::string(mode.name) + " threw " + e.what() + " on\n" + trial.query);
        }
      }
    }
    const double secs = seconds_since(start);
    if (w.trials.size() < 200) s.equivalence.fail("only " + std::to_string(w.trials.size()) + " trials");
    if (lengths != std::set<std::size_t>{1, 2, 3, 4, 5, 6}) s.equivalence.fail("pattern counts 1..6 not all covered");
    if (secs >= 60.0) s.equivalence.fail("suite took " + std::to_string(secs) + " s");
    if (s.equivalence.pass) {
      s.equivalence.detail = std::to_string(w.trials.size()) + " trials on " + std::to_string(kStores) +
                             " stores, " + std::to_string(executions) + " executions, " +
                             std::to_string(nonempty) + " non-empty, " + std::to_string(with_constants) +
                             " with constants, " + std::to_string(secs) + " s";
    }
    if (s.prealloc.pass) s.prealloc.detail = std::to_string(joins) + " joins checked";
    if (joins == 0) s.prealloc.fail("no joins observed");
    return s;
  }();
  return stats;
}

Outcome oracle_equivalence() { return oracle_runs().equivalence; }
Outcome prealloc_invariants() { return oracle_runs().prealloc; }

CostBounds bounds_oracle(const std::vector<std::uint64_t>& c) {
  unsigned __int128 upper = c.size() == 1 ? c[0] : 0, product = c[0];
  std::uint64_t lower = c.size() == 1 ? c[0] : 0, running_min = c[0];
  for (std::size_t k = 1; k < c.size(); ++k) {
    product *= c[k];
    upper += product;
    running_min = std::min(running_min, c[k]);
    lower += running_min;
  }
  return {lower, upper > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(upper)};
}

Outcome planner_properties() {
  Outcome out;
  std::mt19937_64 rng(77);
  std::size_t graphs = 0;
  while (graphs < 200) {
    const auto raw = t::random_store(rng, 50, 1000, 2, 8);
    const auto store = t::store_from(raw);
    for (int g = 0; g < 10; ++g, ++graphs) {
      const std::size_t edges = 1 + rng() % 8;
      std::string text = "SELECT * {";
      std::size_t vars = 1;
      for (std::size_t e = 0; e < edges; ++e) {
        // One endpoint is an existing variable; the other is an existing
        // variable, a fresh one, or a constant.
        const std::size_t a = rng() % vars;
        std::string s = "?v" + std::to_string(a), o;
        switch (rng() % 6) {
          case 0: o = "<" + raw[rng() % raw.size()].o + ">"; break;
          case 1: case 2: o = "?v" + std::to_string(rng() % vars); break;
          default: o = "?v" + std::to_string(vars++);
        }
        if (rng() % 2) std::swap(s, o);
        text += " " + s + " <" + raw[rng() % raw.size()].p + "> " + o + " .";
      }
      text += " }";
      const auto bound = bind_constants(parse_query(text), store.dictionary());
      const auto plan = plan_query(bound, store.stats());

      std::vector<std::size_t> ords;
      for (const auto& st : plan.steps) ords.push_back(st.pattern.source.ordinal);
      std::sort(ords.begin(), ords.end());
      for (std::size_t i = 0; i < ords.size(); ++i) REQUIRE(ords[i] == i + 1, "not a permutation:\n" + text);

      std::uint64_t min_est = UINT64_MAX;
      for (const auto& p : bound.patterns) min_est = std::min(min_est, estimate_cardinality(p, store.stats()));
      REQUIRE(plan.steps[0].estimate == min_est, "first step not minimal:\n" + text);

      REQUIRE(plan.warnings.empty(), "connected graph produced a warning:\n" + text + "\n" + explain(plan));
      std::set<std::string> seen;
      for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto vs = plan.steps[i].pattern.variables();
        if (i > 0) {
          bool shares = false;
          for (const auto& v : vs) shares |= seen.count(v) > 0;
          REQUIRE(shares && !plan.steps[i].join_vars.empty(), "step shares no variable:\n" + text);
        }
        seen.insert(vs.begin(), vs.end());
      }
      REQUIRE(explain(plan_query(bound, store.stats())) == explain(plan), "planning not deterministic");
    }
  }

  std::size_t lists = 0, perms = 0;
  for (std::size_t len = 1; len <= 6; ++len) {
    for (int trial = 0; trial < 50; ++trial, ++lists) {
      std::vector<std::uint64_t> c(len);
      for (auto& x : c) x = rng() % (trial % 2 ? 10 : 100000);
      std::sort(c.begin(), c.end());
      const auto best = delta_bounds(c).upper;
      REQUIRE(best == bounds_oracle(c).upper, "delta_bounds disagrees with direct sums");
      auto perm = c;
      do {
        ++perms;
        REQUIRE(best <= delta_bounds(perm).upper, "ascending order not minimal");
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
  out.detail = std::to_string(graphs) + " graphs, " + std::to_string(lists) + " cardinality lists, " +
               std::to_string(perms) + " permutations";
  return out;
}

Outcome persistence_round_trip() {
  Outcome out;
  const auto& w = workload();
  std::size_t queries = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& store = w.stores[i];
    t::TempDir a, b;
    store.persist(a.path());
    const auto loaded = Store::load(a.path());
    loaded.persist(b.path());
    REQUIRE(t::read_dir(a.path()) == t::read_dir(b.path()), "store " + std::to_string(i) + " not byte-identical");
    for (const auto& trial : w.trials) {
      if (trial.store_index != i) continue;
      ++queries;
      const auto before = run_query(store, trial.query, {}).table;
      const auto after = run_query(loaded, trial.query, {}).table;
      REQUIRE(t::decode_bag(before, store.dictionary()) == t::decode_bag(after, loaded.dictionary()),
              "bags differ after reload:\n" + trial.query);
      REQUIRE(before.sorted_rows() == after.sorted_rows(), "ids differ after reload");
    }
  }
  out.detail = "20 stores, " + std::to_string(queries) + " queries";
  return out;
}

Outcome performance_smoke() {
  Outcome out;
  t::TempDir dir;
  GeneratorConfig config{.triples = 1'000'000, .predicates = 8, .zipf_s = 1.0, .seed = 7};
  {
    std::ofstream nt(dir / "data.nt");
    write_ntriples(nt, config, generate_triples(config));
  }
  std::ostringstream msg, err;
  auto start = Clock::now();
  const int code = cmd_build(dir / "data.nt", dir / "store", msg, err);
  const double build_secs = seconds_since(start);
  REQUIRE(code == 0, "build failed: " + err.str());
  REQUIRE(build_secs < 60.0, "build took " + std::to_string(build_secs) + " s");
  const auto store = Store::load(dir / "store");
  REQUIRE(store.triple_count() == 1'000'000, "store holds " + std::to_string(store.triple_count()) + " triples");

  const std::string pre = "PREFIX e: <http://example.org/>\n";
  const std::string star = pre + "SELECT * WHERE { ?s e:p1 ?a . ?s e:p2 ?b . ?s e:p3 ?c . ?s e:p4 ?d . }";
  start = Clock::now();
  const auto star_rows = run_query(store, star, {}).table.size();
  const double star_secs = seconds_since(start);
  REQUIRE(star_secs < 2.0, "star query took " + std::to_string(star_secs) + " s");
  REQUIRE(star_rows > 0, "star query returned nothing");

  const std::vector<std::pair<std::string, std::string>> suite{
      {"star4.rq", star},
      {"star3.rq", pre + "SELECT * WHERE { ?s e:p1 ?a . ?s e:p2 ?b . ?s e:p5 ?c . }"},
      {"chain2.rq", pre + "SELECT * WHERE { ?a e:p2 ?b . ?b e:p3 ?c . }"},
      {"chain3.rq", pre + "SELECT * WHERE { ?a e:p3 ?b . ?b e:p4 ?c . ?c e:p5 ?d . }"},
      {"snow.rq", pre + "SELECT * WHERE { ?s e:p2 ?o . ?s e:p4 ?x . ?o e:p6 ?y . ?o e:p7 ?z . }"},
      {"scan.rq", pre + "SELECT * WHERE { ?s e:p1 ?o . }"},
  };
  std::filesystem::create_directories(dir / "queries");
  std::vector<std::filesystem::path> files;
  for (const auto& [name, text] : suite) {
    std::ofstream(dir / "queries" / name) << text;
    files.push_back(dir / "queries" / name);
  }
  const auto rows = run_bench(store, files, 5, 8, kDefaultRowBudget);
  std::ostringstream table;
  write_bench(table, rows);
  double worst = 0;
  for (const auto& r : rows) {
    REQUIRE(r.error.empty(), r.query + ": " + r.error);
    REQUIRE(r.sequential_rows == r.parallel_rows, r.query + ": row counts differ");
    const double ratio = r.parallel_ms / std::max(r.sequential_ms, 1e-9);
    worst = std::max(worst, ratio);
    REQUIRE(r.parallel_ms <= 1.5 * r.sequential_ms, r.query + ": parallel/sequential = " + std::to_string(ratio) +
                                                        "\n" + table.str());
  }
  std::ostringstream d;
  d.precision(3);
  d << "build " << build_secs << " s, star " << star_secs * 1000 << " ms (" << star_rows
    << " rows), worst parallel/sequential " << worst << "\n"
    << table.str();
  out.detail = d.str();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"worked example", worked_example},
      {"sparse product", sparse_product},
      {"oracle equivalence", oracle_equivalence},
      {"prealloc invariants", prealloc_invariants},
      {"planner properties", planner_properties},
      {"persistence round trip", persistence_round_trip},
      {"performance smoke", performance_smoke},
  };
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
