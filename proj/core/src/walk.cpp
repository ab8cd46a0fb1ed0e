#include "sne/walk.hpp"

#include <charconv>
#include <stdexcept>

namespace sne {

void WalkConfig::validate() const {
  if (walk_length < 1) throw std::invalid_argument("walk_length must be >= 1");
  if (walks_per_node < 1) throw std::invalid_argument("walks_per_node must be >= 1");
  if (window_path_len < 1 || window_path_len > walk_length)
    throw std::invalid_argument("window_path_len must be in [1, walk_length]");
}

Walk random_walk(const SignedGraph& graph, NodeId start, int max_steps, Rng& rng) {
  Walk w;
  w.nodes.reserve(static_cast<std::size_t>(max_steps) + 1);
  w.signs.reserve(static_cast<std::size_t>(max_steps));
  w.nodes.push_back(start);
  NodeId cur = start;
  for (int step = 0; step < max_steps; ++step) {
    auto nbrs = graph.out_neighbors(cur);
    if (nbrs.empty()) break;
    const Neighbor& next = nbrs[rng.next_below(nbrs.size())];
    w.signs.push_back(next.sign);
    w.nodes.push_back(next.node);
    cur = next.node;
  }
  return w;
}

void for_each_sample(const SignedGraph& graph, const WalkConfig& cfg,
                     const std::function<void(const WalkSample&)>& fn) {
  cfg.validate();
  const std::size_t l = static_cast<std::size_t>(cfg.window_path_len);
  WalkSample sample;
  sample.path.resize(l);
  sample.signs.resize(l);
  for (NodeId u = 0; u < graph.num_nodes(); ++u) {
    for (int j = 0; j < cfg.walks_per_node; ++j) {
      Rng rng = walk_rng(cfg.seed, u, j);
      Walk w = random_walk(graph, u, cfg.walk_length, rng);
      if (w.nodes.size() < l + 1) continue;
      for (std::size_t off = 0; off + l < w.nodes.size(); ++off) {
        for (std::size_t i = 0; i < l; ++i) {
          sample.path[i] = w.nodes[off + i];
          sample.signs[i] = w.signs[off + i];
        }
        sample.target = w.nodes[off + l];
        fn(sample);
      }
    }
  }
}

std::vector<WalkSample> generate_samples(const SignedGraph& graph, const WalkConfig& cfg) {
  std::vector<WalkSample> out;
  for_each_sample(graph, cfg, [&](const WalkSample& s) { out.push_back(s); });
  return out;
}

std::string sample_to_line(const WalkSample& sample) {
  std::string line;
  for (std::size_t i = 0; i < sample.path.size(); ++i) {
    line += std::to_string(sample.path[i]);
    line += ':';
    line += sign_char(sample.signs[i]);
    line += ' ';
  }
  line += std::to_string(sample.target);
  return line;
}

namespace {

NodeId parse_node_id(std::string_view tok, const std::string& file, std::size_t line_no) {
  NodeId id = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(file, line_no, "bad node id '" + std::string(tok) + "'");
  return id;
}

}  // namespace

WalkSample sample_from_line(const std::string& line, const std::string& file,
                            std::size_t line_no) {
  WalkSample s;
  std::size_t pos = 0;
  std::vector<std::string_view> toks;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ') ++end;
    if (end > pos) toks.emplace_back(line.data() + pos, end - pos);
    pos = end;
  }
  if (toks.size() < 2)
    throw ParseError(file, line_no, "sample line needs at least one path node and a target");
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    std::string_view tok = toks[i];
    std::size_t colon = tok.find(':');
    if (colon == std::string_view::npos || colon + 2 != tok.size())
      throw ParseError(file, line_no, "bad path token '" + std::string(tok) + "'");
    char sc = tok[colon + 1];
    if (sc != '+' && sc != '-')
      throw ParseError(file, line_no, "bad sign '" + std::string(1, sc) + "'");
    s.path.push_back(parse_node_id(tok.substr(0, colon), file, line_no));
    s.signs.push_back(sc == '+' ? Sign::Positive : Sign::Negative);
  }
  s.target = parse_node_id(toks.back(), file, line_no);
  return s;
}

void corpus_to_file(std::span<const WalkSample> samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus: " + path);
  for (const WalkSample& s : samples) out << sample_to_line(s) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_corpus(const SignedGraph& graph, const WalkConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus: " + path);
  for_each_sample(graph, cfg, [&](const WalkSample& s) { out << sample_to_line(s) << '\n'; });
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<WalkSample> corpus_from_file(const std::string& path) {
  std::vector<WalkSample> out;
  CorpusReader reader(path);
  while (auto s = reader.next()) out.push_back(std::move(*s));
  return out;
}

CorpusReader::CorpusReader(std::string path) : path_(std::move(path)), in_(path_) {
  if (!in_) throw std::runtime_error("cannot open corpus: " + path_);
}

std::optional<WalkSample> CorpusReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    bool blank = true;
    for (char c : line)
      if (c != ' ' && c != '\t' && c != '\r') blank = false;
    if (blank) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return sample_from_line(line, path_, line_no_);
  }
  return std::nullopt;
}

void CorpusReader::rewind() {
  in_.clear();
  in_.seekg(0);
  line_no_ = 0;
}

}  // namespace sne
