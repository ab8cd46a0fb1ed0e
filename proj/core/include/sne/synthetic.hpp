// Planted two-community signed benchmark: the only structure in the graph is
// the edge sign (positive inside a community, negative across), so a model
// that ignores signs has nothing to learn from.
#pragma once

#include <cstdint>

#include "sne/graph.hpp"

namespace sne {

struct SyntheticConfig {
  std::uint32_t community_size = 200;  // nodes per community; two communities
  double p_intra = 0.05;  // chance an intra-community pair gets a +1 edge
  double p_inter = 0.05;  // chance an inter-community pair gets a -1 edge
  std::uint64_t seed = 1;

  void validate() const;
};

// Undirected graph over 2*community_size nodes labeled "0", "1", ...; node
// class = community id (0 or 1). Pairs are visited in a fixed order, so the
// result is deterministic given the seed.
SignedGraph make_two_community_graph(const SyntheticConfig& cfg);

}  // namespace sne
