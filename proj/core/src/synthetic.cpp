#include "sne/synthetic.hpp"

#include <stdexcept>
#include <string>

#include "sne/rng.hpp"

namespace sne {

void SyntheticConfig::validate() const {
  if (community_size < 1)
    throw std::invalid_argument("community_size must be >= 1");
  if (p_intra < 0 || p_intra > 1 || p_inter < 0 || p_inter > 1)
    throw std::invalid_argument("edge probabilities must be in [0,1]");
}

SignedGraph make_two_community_graph(const SyntheticConfig& cfg) {
  cfg.validate();
  const NodeId n = 2 * cfg.community_size;

  SignedGraph graph(/*directed=*/false);
  for (NodeId v = 0; v < n; ++v) {
    graph.intern(std::to_string(v));
    graph.set_node_class(v, v < cfg.community_size ? 0 : 1);
  }

  Rng rng(mix_seed(cfg.seed ^ seed_tag::synthetic, n));
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const bool same = (u < cfg.community_size) == (v < cfg.community_size);
      if (same) {
        if (rng.next_unit() < cfg.p_intra) graph.add_edge(u, v, Sign::Positive);
      } else {
        if (rng.next_unit() < cfg.p_inter) graph.add_edge(u, v, Sign::Negative);
      }
    }
  }
  return graph;
}

}  // namespace sne
