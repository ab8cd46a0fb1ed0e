#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace sne {

// Dense node index in [0, num_nodes). Ids are assigned in order of first
// appearance in the input edge list.
using NodeId = std::uint32_t;

enum class Sign : std::int8_t { Positive = 1, Negative = -1 };

inline int sign_value(Sign s) { return static_cast<int>(s); }
inline Sign flip(Sign s) { return s == Sign::Positive ? Sign::Negative : Sign::Positive; }
inline char sign_char(Sign s) { return s == Sign::Positive ? '+' : '-'; }

struct Neighbor {
  NodeId node;
  Sign sign;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// One record per input edge, in file order. Undirected edges appear once
// here and twice in the adjacency.
struct EdgeRecord {
  NodeId src;
  NodeId dst;
  Sign sign;
  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

struct GraphStats {
  std::size_t num_nodes = 0;
  std::size_t positive_edges = 0;
  std::size_t negative_edges = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// How to resolve two input lines that give the same ordered pair opposite
// signs: refuse the file, or drop both edges and count them.
enum class ConflictPolicy { Error, Drop };

class SignedGraph {
 public:
  explicit SignedGraph(bool directed = false) : directed_(directed) {}

  bool directed() const { return directed_; }
  std::size_t num_nodes() const { return labels_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  // Returns the existing id for `label` or assigns the next dense id.
  NodeId intern(const std::string& label);
  std::optional<NodeId> find(const std::string& label) const;
  const std::string& label(NodeId u) const { return labels_[u]; }

  // Appends one edge record; undirected graphs mirror it in the adjacency.
  // Callers are responsible for dedup and self-loop policy.
  void add_edge(NodeId u, NodeId v, Sign s);

  std::span<const Neighbor> out_neighbors(NodeId u) const {
    return {out_[u].data(), out_[u].size()};
  }
  std::span<const EdgeRecord> edges() const { return {edges_.data(), edges_.size()}; }

  // Sign of the stored edge u->v (undirected adjacency is mirrored, so
  // either endpoint works). Linear in deg(u).
  std::optional<Sign> edge_sign(NodeId u, NodeId v) const;

  void set_node_class(NodeId u, int cls);
  std::optional<int> node_class(NodeId u) const;
  std::size_t num_classed() const { return num_classed_; }

  // load-time counters
  std::size_t duplicate_edges() const { return duplicate_edges_; }
  std::size_t self_loops() const { return self_loops_; }
  std::size_t conflict_pairs() const { return conflict_pairs_; }

  friend bool operator==(const SignedGraph& a, const SignedGraph& b) {
    return a.directed_ == b.directed_ && a.labels_ == b.labels_ && a.edges_ == b.edges_;
  }

 private:
  friend SignedGraph load_edge_list(const std::string&, bool, ConflictPolicy);

  bool directed_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> label_to_id_;
  std::vector<std::vector<Neighbor>> out_;
  std::vector<EdgeRecord> edges_;
  std::vector<std::optional<int>> classes_;
  std::size_t num_classed_ = 0;
  std::size_t duplicate_edges_ = 0;
  std::size_t self_loops_ = 0;
  std::size_t conflict_pairs_ = 0;
};

// Reads a signed edge list: one `<src> <dst> <sign>` per line, sign in
// {1,-1}, '#' comments, tabs or spaces. Duplicate ordered pairs with the
// same sign keep the first occurrence; sign conflicts follow `conflicts`.
// Self-loops are dropped and counted. A file with no edge lines is an error.
SignedGraph load_edge_list(const std::string& path, bool directed,
                           ConflictPolicy conflicts = ConflictPolicy::Error);

// Reads `<node-label> <class>` lines into graph.node_class. Unknown labels
// are an error.
void load_node_classes(const std::string& path, SignedGraph& graph);

GraphStats degree_stats(const SignedGraph& graph);

// Writes stored edges in insertion order, `<src> <dst> <sign>` per line.
// Reloading reproduces the graph (including id assignment) whenever the
// original file had no dropped lines.
void write_edge_list(const SignedGraph& graph, const std::string& path);

}  // namespace sne
