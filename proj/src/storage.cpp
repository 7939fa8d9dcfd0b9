#include "gsmat/storage.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "gsmat/error.hpp"

namespace gsmat {

AuxArray AuxArray::build(std::span<const NodeId> rows, std::size_t width, std::size_t key_col) {
  if (width == 0 || key_col >= width || rows.size() % width != 0) {
    throw ContractViolation("aux array: bad table shape");
  }
  AuxArray aux;
  const std::size_t n = rows.size() / width;
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId key = rows[i * width + key_col];
    if (!aux.entries_.empty() && aux.entries_.back().row == key) {
      ++aux.entries_.back().num;
      continue;
    }
    if (!aux.entries_.empty() && key < aux.entries_.back().row) {
      throw ContractViolation("aux array: input not sorted on key column (row " + std::to_string(i + 1) + ")");
    }
    aux.entries_.push_back({key, 1, i + 1});
  }
  return aux;
}

std::optional<AuxEntry> AuxArray::find(NodeId key) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const AuxEntry& e, NodeId k) { return e.row < k; });
  if (it == entries_.end() || it->row != key) return std::nullopt;
  return *it;
}

bool AuxArray::tiles(std::size_t total) const {
  std::uint64_t next = 1;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.num == 0 || e.rpos != next) return false;
    if (i > 0 && entries_[i - 1].row >= e.row) return false;
    next += e.num;
  }
  return next - 1 == total;
}

PredicateMatrix::PredicateMatrix(PredId pid, std::vector<NodeId> so_pairs) : pid_(pid), so_(std::move(so_pairs)) {
  const std::size_t n = size();
  std::vector<std::pair<NodeId, NodeId>> swapped(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(std::pair(so_[2 * i - 2], so_[2 * i - 1]) < std::pair(so_[2 * i], so_[2 * i + 1]))) {
      throw ContractViolation("predicate matrix: (s, o) pairs not strictly sorted");
    }
    swapped[i] = {so_[2 * i + 1], so_[2 * i]};
  }
  std::sort(swapped.begin(), swapped.end());
  os_.resize(so_.size());
  for (std::size_t i = 0; i < n; ++i) {
    os_[2 * i] = swapped[i].first;
    os_[2 * i + 1] = swapped[i].second;
  }
  so_index_ = AuxArray::build(so_, 2);
  os_index_ = AuxArray::build(os_, 2);
}

PredicateStats::PredicateStats(std::vector<PredicateStat> rows) : rows_(std::move(rows)) {
  std::sort(rows_.begin(), rows_.end(), [](const auto& a, const auto& b) { return a.pid < b.pid; });
}

const PredicateStat* PredicateStats::find(PredId pid) const {
  auto it = std::lower_bound(rows_.begin(), rows_.end(), pid,
                             [](const PredicateStat& r, PredId p) { return r.pid < p; });
  return it != rows_.end() && it->pid == pid ? &*it : nullptr;
}

std::vector<std::uint64_t> default_degree_buckets(std::uint64_t node_count) {
  if (node_count == 0) return {};
  int digits = 0;
  for (std::uint64_t v = node_count; v; v /= 10) ++digits;
  std::vector<std::uint64_t> bounds;
  for (int k = std::max(0, digits - 2); k >= 0; --k) {
    std::uint64_t scale = 1;
    for (int i = 0; i < k; ++i) scale *= 10;
    const std::uint64_t b = (node_count + scale - 1) / scale;
    if (bounds.empty() || bounds.back() < b) bounds.push_back(b);
  }
  return bounds;
}

Store::Store(TermDictionary dict, std::vector<PredicateMatrix> matrices)
    : dict_(std::move(dict)), matrices_(std::move(matrices)) {
  std::vector<PredicateStat> rows;
  for (const auto& m : matrices_) {
    triple_count_ += m.size();
    if (m.empty()) continue;
    rows.push_back({m.pid(), m.size(), m.so_index().size(), m.os_index().size()});
  }
  stats_ = PredicateStats(std::move(rows));
}

Store Store::build(TermDictionary dict, std::vector<EncodedTriple> triples) {
  const std::size_t nodes = dict.node_count();
  const std::size_t preds = dict.predicate_count();
  for (const auto& t : triples) {
    if (t.s == kNoNode || t.s > nodes || t.o == kNoNode || t.o > nodes || t.p == kNoPred || t.p > preds) {
      throw LookupError("encoded triple (" + std::to_string(t.s) + ", " + std::to_string(t.p) + ", " +
                        std::to_string(t.o) + ") uses an id outside the dictionary");
    }
  }
  std::sort(triples.begin(), triples.end(),
            [](const EncodedTriple& a, const EncodedTriple& b) {
              return std::tie(a.p, a.s, a.o) < std::tie(b.p, b.s, b.o);
            });
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());

  std::vector<PredicateMatrix> matrices;
  matrices.reserve(preds);
  std::size_t i = 0;
  for (PredId pid = 1; pid <= preds; ++pid) {
    std::vector<NodeId> so;
    const std::size_t start = i;
    while (i < triples.size() && triples[i].p == pid) ++i;
    so.reserve(2 * (i - start));
    for (std::size_t j = start; j < i; ++j) {
      so.push_back(triples[j].s);
      so.push_back(triples[j].o);
    }
    matrices.emplace_back(pid, std::move(so));
  }
  return Store(std::move(dict), std::move(matrices));
}

const PredicateMatrix* Store::find_matrix(PredId pid) const {
  if (pid == kNoPred || pid > matrices_.size()) return nullptr;
  return &matrices_[pid - 1];
}

const PredicateMatrix& Store::matrix_for(PredId pid) const {
  if (const auto* m = find_matrix(pid)) return *m;
  throw LookupError("unknown predicate id " + std::to_string(pid));
}

std::vector<std::uint64_t> Store::node_degrees() const {
  std::vector<std::uint64_t> degree(node_count() + 1, 0);
  for (const auto& m : matrices_) {
    for (NodeId id : m.so_pairs()) ++degree[id];
  }
  return degree;
}

std::vector<HistogramBucket> Store::degree_histogram(std::span<const std::uint64_t> bounds) const {
  std::vector<HistogramBucket> buckets;
  for (auto b : bounds) {
    if (!buckets.empty() && b <= buckets.back().upper) throw ContractViolation("histogram bounds must increase");
    buckets.push_back({b, false, 0, 0.0});
  }
  const auto degree = node_degrees();
  std::uint64_t max_degree = 0;
  for (std::size_t id = 1; id < degree.size(); ++id) max_degree = std::max(max_degree, degree[id]);
  if (node_count() > 0 && (buckets.empty() || max_degree > buckets.back().upper)) {
    buckets.push_back({max_degree, true, 0, 0.0});
  }
  for (std::size_t id = 1; id < degree.size(); ++id) {
    auto it = std::lower_bound(buckets.begin(), buckets.end(), degree[id],
                               [](const HistogramBucket& b, std::uint64_t d) { return b.upper < d; });
    ++it->nodes;
  }
  const std::size_t total = node_count();
  for (auto& b : buckets) b.percent = total ? 100.0 * static_cast<double>(b.nodes) / static_cast<double>(total) : 0.0;
  return buckets;
}

std::vector<HistogramBucket> Store::degree_histogram() const {
  const auto bounds = default_degree_buckets(node_count());
  return degree_histogram(bounds);
}

}  // namespace gsmat
