#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gsmat/dictionary.hpp"
#include "gsmat/ids.hpp"

namespace gsmat {

// One run of equal keys in a sorted pair list.
struct AuxEntry {
  NodeId row = kNoNode;    // key value
  std::uint64_t num = 0;   // pairs carrying the key
  std::uint64_t rpos = 0;  // 1-based offset of the first such pair

  std::size_t begin() const { return rpos - 1; }
  std::size_t end() const { return rpos - 1 + num; }

  friend bool operator==(const AuxEntry&, const AuxEntry&) = default;
};

// Row index over the non-empty rows of a sorted relation: the CSR row pointer
// restricted to keys that actually occur.
class AuxArray {
 public:
  AuxArray() = default;

  // `rows` is a row-major table of `width` columns, non-decreasing on
  // `key_col`. Throws ContractViolation when the keys are out of order.
  static AuxArray build(std::span<const NodeId> rows, std::size_t width, std::size_t key_col = 0);

  std::optional<AuxEntry> find(NodeId key) const;
  const std::vector<AuxEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Runs tile [0, total) in order with no gaps.
  bool tiles(std::size_t total) const;

 private:
  std::vector<AuxEntry> entries_;
};

enum class Orientation { so, os };

// Edge set of one predicate as a sparse boolean matrix, held in both
// subject-major and object-major order. Pairs are stored interleaved:
// element 2i is the key column, 2i+1 the other endpoint.
class PredicateMatrix {
 public:
  PredicateMatrix() = default;
  // `so_pairs` must be strictly sorted by (s, o).
  PredicateMatrix(PredId pid, std::vector<NodeId> so_pairs);

  PredId pid() const { return pid_; }
  std::size_t size() const { return so_.size() / 2; }
  bool empty() const { return so_.empty(); }

  std::span<const NodeId> pairs(Orientation o) const { return o == Orientation::so ? so_ : os_; }
  const AuxArray& index(Orientation o) const { return o == Orientation::so ? so_index_ : os_index_; }

  std::span<const NodeId> so_pairs() const { return so_; }
  std::span<const NodeId> os_pairs() const { return os_; }
  const AuxArray& so_index() const { return so_index_; }
  const AuxArray& os_index() const { return os_index_; }

  std::pair<NodeId, NodeId> so_pair(std::size_t i) const { return {so_[2 * i], so_[2 * i + 1]}; }

 private:
  PredId pid_ = kNoPred;
  std::vector<NodeId> so_;
  std::vector<NodeId> os_;
  AuxArray so_index_;
  AuxArray os_index_;
};

struct PredicateStat {
  PredId pid = kNoPred;
  std::uint64_t cardinality = 0;
  std::uint64_t distinct_subjects = 0;
  std::uint64_t distinct_objects = 0;

  friend bool operator==(const PredicateStat&, const PredicateStat&) = default;
};

// Statistics for every non-empty predicate, ordered by pid.
class PredicateStats {
 public:
  PredicateStats() = default;
  explicit PredicateStats(std::vector<PredicateStat> rows);

  const PredicateStat* find(PredId pid) const;
  const std::vector<PredicateStat>& rows() const { return rows_; }

 private:
  std::vector<PredicateStat> rows_;
};

struct HistogramBucket {
  std::uint64_t upper = 0;  // inclusive upper degree bound
  bool overflow = false;    // catch-all for degrees above the last bound
  std::uint64_t nodes = 0;
  double percent = 0.0;
};

// Bounds ceil(n / 10^k) for k = digits(n) - 2 down to 0, i.e. the
// "fraction of the node count" axis used for sparsity plots.
std::vector<std::uint64_t> default_degree_buckets(std::uint64_t node_count);

class Store {
 public:
  Store() = default;

  // Encoded triples must use ids valid in `dict` (LookupError otherwise).
  // Duplicates are dropped.
  static Store build(TermDictionary dict, std::vector<EncodedTriple> triples);

  const TermDictionary& dictionary() const { return dict_; }
  std::size_t triple_count() const { return triple_count_; }
  std::size_t node_count() const { return dict_.node_count(); }
  std::size_t predicate_count() const { return matrices_.size(); }

  // Throws LookupError for an unknown predicate.
  const PredicateMatrix& matrix_for(PredId pid) const;
  const PredicateMatrix* find_matrix(PredId pid) const;
  const std::vector<PredicateMatrix>& matrices() const { return matrices_; }
  const PredicateStats& stats() const { return stats_; }

  // Total degree (in + out) per node id; index 0 is unused.
  std::vector<std::uint64_t> node_degrees() const;
  // Buckets are (bound[i-1], bound[i]]; an overflow bucket is appended when
  // some degree exceeds the last bound.
  std::vector<HistogramBucket> degree_histogram(std::span<const std::uint64_t> bounds) const;
  std::vector<HistogramBucket> degree_histogram() const;

  // Directory layout: meta, nodes.dict, preds.dict, p<ID>.so, p<ID>.os, stats.tsv.
  void persist(const std::filesystem::path& dir) const;
  static Store load(const std::filesystem::path& dir);

 private:
  Store(TermDictionary dict, std::vector<PredicateMatrix> matrices);

  TermDictionary dict_;
  std::vector<PredicateMatrix> matrices_;  // index pid - 1
  PredicateStats stats_;
  std::size_t triple_count_ = 0;
};

}  // namespace gsmat
