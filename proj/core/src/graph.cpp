#include "sne/graph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace sne {
namespace {

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::uint64_t pair_key(NodeId a, NodeId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

NodeId SignedGraph::intern(const std::string& label) {
  auto it = label_to_id_.find(label);
  if (it != label_to_id_.end()) return it->second;
  NodeId id = static_cast<NodeId>(labels_.size());
  labels_.push_back(label);
  label_to_id_.emplace(label, id);
  out_.emplace_back();
  classes_.emplace_back();
  return id;
}

std::optional<NodeId> SignedGraph::find(const std::string& label) const {
  auto it = label_to_id_.find(label);
  if (it == label_to_id_.end()) return std::nullopt;
  return it->second;
}

void SignedGraph::add_edge(NodeId u, NodeId v, Sign s) {
  edges_.push_back({u, v, s});
  out_[u].push_back({v, s});
  if (!directed_ && u != v) out_[v].push_back({u, s});
}

std::optional<Sign> SignedGraph::edge_sign(NodeId u, NodeId v) const {
  for (const Neighbor& n : out_[u]) {
    if (n.node == v) return n.sign;
  }
  return std::nullopt;
}

void SignedGraph::set_node_class(NodeId u, int cls) {
  if (!classes_[u].has_value()) ++num_classed_;
  classes_[u] = cls;
}

std::optional<int> SignedGraph::node_class(NodeId u) const { return classes_[u]; }

SignedGraph load_edge_list(const std::string& path, bool directed, ConflictPolicy conflicts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);

  SignedGraph g(directed);

  // pair -> index of its kept record, or npos once conflict-dropped
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::unordered_map<std::uint64_t, std::size_t> seen;
  std::vector<EdgeRecord> records;
  std::vector<bool> dropped;

  std::string line;
  std::size_t line_no = 0;
  std::size_t edge_lines = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    auto fields = split_ws(line);
    if (fields.size() != 3)
      throw ParseError(path, line_no,
                       "expected 3 fields <src> <dst> <sign>, got " +
                           std::to_string(fields.size()));
    Sign sign;
    if (fields[2] == "1")
      sign = Sign::Positive;
    else if (fields[2] == "-1")
      sign = Sign::Negative;
    else
      throw ParseError(path, line_no, "sign must be 1 or -1, got '" + fields[2] + "'");
    ++edge_lines;

    NodeId u = g.intern(fields[0]);
    NodeId v = g.intern(fields[1]);
    if (u == v) {
      ++g.self_loops_;
      continue;
    }
    // Dedup key: ordered pair for directed graphs, unordered otherwise.
    NodeId a = u, b = v;
    if (!directed && a > b) std::swap(a, b);
    std::uint64_t key = pair_key(a, b);

    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, records.size());
      records.push_back({u, v, sign});
      dropped.push_back(false);
      continue;
    }
    if (it->second != npos && records[it->second].sign == sign) {
      ++g.duplicate_edges_;
      continue;
    }
    // Every further line for an already-conflicted pair counts as a conflict.
    ++g.conflict_pairs_;
    if (conflicts == ConflictPolicy::Error)
      throw ParseError(path, line_no,
                       "conflicting sign for pair (" + fields[0] + ", " + fields[1] +
                           "); pass conflict policy 'drop' to drop both");
    if (it->second != npos) {
      dropped[it->second] = true;
      it->second = npos;
    }
  }
  if (edge_lines == 0)
    throw std::runtime_error("edge list has no edges: " + path);

  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!dropped[i]) g.add_edge(records[i].src, records[i].dst, records[i].sign);
  }
  return g;
}

void load_node_classes(const std::string& path, SignedGraph& graph) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open class file: " + path);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    auto fields = split_ws(line);
    if (fields.size() != 2)
      throw ParseError(path, line_no,
                       "expected 2 fields <node> <class>, got " +
                           std::to_string(fields.size()));
    auto id = graph.find(fields[0]);
    if (!id)
      throw ParseError(path, line_no, "unknown node label '" + fields[0] + "'");
    std::size_t pos = 0;
    int cls = 0;
    try {
      cls = std::stoi(fields[1], &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != fields[1].size())
      throw ParseError(path, line_no, "class must be an integer, got '" + fields[1] + "'");
    graph.set_node_class(*id, cls);
  }
}

GraphStats degree_stats(const SignedGraph& graph) {
  GraphStats s;
  s.num_nodes = graph.num_nodes();
  for (const EdgeRecord& e : graph.edges()) {
    if (e.sign == Sign::Positive)
      ++s.positive_edges;
    else
      ++s.negative_edges;
  }
  return s;
}

void write_edge_list(const SignedGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list: " + path);
  for (const EdgeRecord& e : graph.edges()) {
    out << graph.label(e.src) << ' ' << graph.label(e.dst) << ' '
        << sign_value(e.sign) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sne
