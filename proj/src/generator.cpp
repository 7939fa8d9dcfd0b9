#include "gsmat/generator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace gsmat {

namespace {

// Uniform double in [0, 1) from the top 53 bits; the standard distributions
// are not bit-reproducible across library implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return static_cast<std::uint64_t>(unit(rng) * n) % n; }

class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double s) : cdf_(n) {
    double sum = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
      sum += 1.0 / std::pow(static_cast<double>(k + 1), s);
      cdf_[k] = sum;
    }
    for (auto& c : cdf_) c /= sum;
  }

  std::uint64_t operator()(std::mt19937_64& rng) const {
    const double u = unit(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::uint64_t>(it - cdf_.begin(), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace

std::vector<GeneratedTriple> generate_triples(const GeneratorConfig& config) {
  if (config.triples == 0 || config.predicates == 0) throw std::invalid_argument("triples and predicates must be >= 1");
  if (!(config.zipf_s >= 0.0) || !(config.object_zipf_s >= 0.0)) {
    throw std::invalid_argument("zipf exponents must be >= 0");
  }
  const std::uint64_t nodes = config.nodes ? config.nodes : std::max<std::uint64_t>(4, config.triples / 3);
  const long double capacity = static_cast<long double>(nodes) * nodes * config.predicates;
  if (capacity < config.triples) throw std::invalid_argument("not enough nodes for that many distinct triples");

  std::mt19937_64 rng(config.seed);
  const ZipfSampler pred_rank(config.predicates, config.zipf_s);
  const ZipfSampler object_rank(nodes, config.object_zipf_s);
  std::vector<std::uint64_t> shuffle(nodes);
  for (std::uint64_t i = 0; i < nodes; ++i) shuffle[i] = i;
  for (std::uint64_t i = nodes - 1; i > 0; --i) std::swap(shuffle[i], shuffle[below(rng, i + 1)]);

  struct Hash {
    std::size_t operator()(const GeneratedTriple& t) const noexcept {
      return std::hash<std::uint64_t>{}((t.s * 0x9e3779b97f4a7c15ull) ^ (t.p << 48) ^ (t.o * 0xc2b2ae3d27d4eb4full));
    }
  };
  struct Eq {
    bool operator()(const GeneratedTriple& a, const GeneratedTriple& b) const {
      return a.s == b.s && a.p == b.p && a.o == b.o;
    }
  };
  std::unordered_set<GeneratedTriple, Hash, Eq> seen;
  seen.reserve(config.triples);
  std::vector<GeneratedTriple> out;
  out.reserve(config.triples);
  while (out.size() < config.triples) {
    GeneratedTriple t{below(rng, nodes), pred_rank(rng), shuffle[object_rank(rng)]};
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

void write_ntriples(std::ostream& out, const GeneratorConfig& config, const std::vector<GeneratedTriple>& triples) {
  std::string line;
  for (const auto& t : triples) {
    line.clear();
    line += '<';
    line += config.base;
    line += 'n';
    line += std::to_string(t.s);
    line += "> <";
    line += config.base;
    line += 'p';
    line += std::to_string(t.p + 1);
    line += "> <";
    line += config.base;
    line += 'n';
    line += std::to_string(t.o);
    line += "> .\n";
    out << line;
  }
}

}  // namespace gsmat
