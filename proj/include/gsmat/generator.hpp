#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gsmat {

struct GeneratorConfig {
  std::uint64_t triples = 1000;
  std::uint64_t predicates = 8;
  double zipf_s = 1.0;       // predicate frequency exponent
  std::uint64_t seed = 42;
  std::uint64_t nodes = 0;   // 0: max(4, triples / 3)
  double object_zipf_s = 1.0;
  std::string base = "http://example.org/";
};

// 0-based (subject, predicate rank, object) indices. Predicate rank 0 is the
// most frequent.
struct GeneratedTriple {
  std::uint64_t s = 0;
  std::uint64_t p = 0;
  std::uint64_t o = 0;
};

// Distinct synthetic triples: predicates drawn Zipf(zipf_s) by rank, subjects
// uniformly (bounded out-degree), objects Zipf(object_zipf_s) over a shuffled
// node order (heavy-tailed in-degree). Deterministic for a fixed config.
// Throws std::invalid_argument for zero counts or a negative exponent.
std::vector<GeneratedTriple> generate_triples(const GeneratorConfig& config);

// Writes N-Triples lines `<base>n<i> <base>p<k> <base>n<j> .` with 1-based k.
void write_ntriples(std::ostream& out, const GeneratorConfig& config, const std::vector<GeneratedTriple>& triples);

}  // namespace gsmat
