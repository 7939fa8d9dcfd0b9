#pragma once

#include <cstdint>

namespace gsmat {

// Node ids (subjects and objects share one namespace) and predicate ids are
// dense and 1-based; 0 never names a term.
using NodeId = std::uint64_t;
using PredId = std::uint64_t;

inline constexpr NodeId kNoNode = 0;
inline constexpr PredId kNoPred = 0;

struct EncodedTriple {
  NodeId s = kNoNode;
  PredId p = kNoPred;
  NodeId o = kNoNode;

  friend bool operator==(const EncodedTriple&, const EncodedTriple&) = default;
  friend auto operator<=>(const EncodedTriple&, const EncodedTriple&) = default;
};

}  // namespace gsmat
