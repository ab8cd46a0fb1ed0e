#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sne/graph.hpp"
#include "sne/rng.hpp"

namespace sne {

struct WalkConfig {
  int walk_length = 40;     // L: steps per walk, so at most L+1 nodes
  int walks_per_node = 20;  // t
  int window_path_len = 3;  // l: each sample has l path nodes plus a target
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument
};

// One training example: a context path, the sign of each traversed edge
// (signs[i] belongs to the edge path[i] -> path[i+1], the last one to
// path.back() -> target), and the target node.
struct WalkSample {
  std::vector<NodeId> path;
  std::vector<Sign> signs;
  NodeId target = 0;
  friend bool operator==(const WalkSample&, const WalkSample&) = default;
};

struct Walk {
  std::vector<NodeId> nodes;
  std::vector<Sign> signs;  // signs[i] is the sign of (nodes[i], nodes[i+1])
};

// Uniform walk over out-neighbors, truncated at dead ends.
Walk random_walk(const SignedGraph& graph, NodeId start, int max_steps, Rng& rng);

// The rng stream a walk draws from: one independent stream per
// (start node, walk index), so corpus order is position-independent.
inline Rng walk_rng(std::uint64_t seed, NodeId start, int walk_index) {
  return Rng(mix_seed(seed ^ seed_tag::walk, start, static_cast<std::uint64_t>(walk_index)));
}

// Visits every sample in deterministic corpus order: start nodes ascending,
// walks_per_node walks each, sliding windows in walk order. Walks shorter
// than l+1 nodes yield nothing.
void for_each_sample(const SignedGraph& graph, const WalkConfig& cfg,
                     const std::function<void(const WalkSample&)>& fn);

std::vector<WalkSample> generate_samples(const SignedGraph& graph, const WalkConfig& cfg);

// Corpus text format: one sample per line,
//   <n1>:<s1> <n2>:<s2> ... <nl>:<sl> <target>
// with node ids dense and s in {+,-}.
std::string sample_to_line(const WalkSample& sample);
WalkSample sample_from_line(const std::string& line, const std::string& file,
                            std::size_t line_no);

void corpus_to_file(std::span<const WalkSample> samples, const std::string& path);
void write_corpus(const SignedGraph& graph, const WalkConfig& cfg, const std::string& path);
std::vector<WalkSample> corpus_from_file(const std::string& path);

// Streaming reader for corpora too large to hold in memory.
class CorpusReader {
 public:
  explicit CorpusReader(std::string path);
  std::optional<WalkSample> next();
  void rewind();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace sne
