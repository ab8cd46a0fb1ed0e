#include "sne/model_io.hpp"

#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace sne {

using detail::fmt_double;
using detail::parse_double;

namespace {

void write_vec(std::ostream& out, std::span<const double> v) {
  for (double x : v) out << ' ' << fmt_double(x);
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

std::string next_content_line(std::istream& in, const std::string& path, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return line;
  }
  throw std::runtime_error(path + ": unexpected end of file at line " +
                           std::to_string(line_no));
}

}  // namespace

void write_embeddings(const SneModel& model, std::span<const std::string> labels,
                      ReprMode mode, const std::string& path) {
  if (labels.size() != model.num_nodes)
    throw std::invalid_argument("label/model node count mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embeddings: " + path);
  out << model.num_nodes << ' ' << representation_dim(model, mode) << ' '
      << repr_mode_name(mode) << '\n';
  for (NodeId v = 0; v < model.num_nodes; ++v) {
    out << labels[v];
    write_vec(out, node_representation(model, v, mode));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_embeddings(const SneModel& model, const SignedGraph& graph, ReprMode mode,
                      const std::string& path) {
  if (graph.num_nodes() != model.num_nodes)
    throw std::invalid_argument("graph/model node count mismatch");
  std::vector<std::string> labels;
  labels.reserve(graph.num_nodes());
  for (NodeId v = 0; v < graph.num_nodes(); ++v) labels.push_back(graph.label(v));
  write_embeddings(model, labels, mode, path);
}

EmbeddingTable read_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings: " + path);
  std::size_t line_no = 0;

  auto header = tokens_of(next_content_line(in, path, line_no));
  if (header.size() != 3 || (header[2] != "s" && header[2] != "st"))
    throw std::runtime_error(path + ": header must be '<num_nodes> <dim> <mode>'");
  std::size_t n = 0;
  EmbeddingTable table;
  try {
    n = std::stoull(header[0]);
    table.dim = std::stoi(header[1]);
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": non-numeric embedding header");
  }
  table.mode = parse_repr_mode(header[2]);
  table.labels.reserve(n);
  table.vectors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto toks = tokens_of(next_content_line(in, path, line_no));
    if (toks.size() != 1 + static_cast<std::size_t>(table.dim))
      throw ParseError(path, line_no,
                       "expected label plus " + std::to_string(table.dim) + " values");
    std::vector<double> vec(table.dim);
    for (int d = 0; d < table.dim; ++d) vec[d] = parse_double(toks[1 + d]);
    table.index.emplace(toks[0], table.labels.size());
    table.labels.push_back(toks[0]);
    table.vectors.push_back(std::move(vec));
  }
  return table;
}

namespace {

void write_rows(std::ostream& out, const std::vector<std::string>& labels,
                std::span<const double> data, int dim) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << labels[i];
    write_vec(out, data.subspan(i * dim, dim));
    out << '\n';
  }
}

void read_rows(std::istream& in, const std::string& path, std::size_t& line_no,
               const std::string& section, std::vector<std::string>* labels_out,
               const std::vector<std::string>* labels_expect, std::vector<double>& data,
               std::size_t n, int dim) {
  auto head = next_content_line(in, path, line_no);
  if (head != section)
    throw std::runtime_error(path + ": expected section '" + section + "', got '" + head + "'");
  data.resize(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto toks = tokens_of(next_content_line(in, path, line_no));
    if (toks.size() != 1 + static_cast<std::size_t>(dim))
      throw ParseError(path, line_no, "bad row in section " + section);
    if (labels_out) labels_out->push_back(toks[0]);
    if (labels_expect && (*labels_expect)[i] != toks[0])
      throw ParseError(path, line_no, "label order mismatch in section " + section);
    for (int d = 0; d < dim; ++d) data[i * dim + d] = parse_double(toks[1 + d]);
  }
}

std::vector<double> read_labeled_vec(std::istream& in, const std::string& path,
                                     std::size_t& line_no, const std::string& name, int dim) {
  auto toks = tokens_of(next_content_line(in, path, line_no));
  if (toks.size() != 1 + static_cast<std::size_t>(dim) || toks[0] != name)
    throw ParseError(path, line_no, "expected '" + name + "' with " + std::to_string(dim) +
                                        " values");
  std::vector<double> v(dim);
  for (int d = 0; d < dim; ++d) v[d] = parse_double(toks[1 + d]);
  return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  const SneModel& m = ckpt.model;
  if (ckpt.labels.size() != m.num_nodes)
    throw std::invalid_argument("checkpoint labels/model mismatch");

  // write to a temp file then rename so an interrupted save never leaves a
  // truncated checkpoint behind
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + tmp);
    out << m.num_nodes << ' ' << m.dim << " checkpoint\n";
    out << "meta " << (m.unsigned_ablation ? 1 : 0) << ' ' << fmt_double(ckpt.state.eta)
        << ' ' << fmt_double(ckpt.state.eps) << ' ' << ckpt.epochs_done << ' '
        << ckpt.samples_done << ' ' << fmt_double(ckpt.epoch_nll_sum) << '\n';
    out << "epoch_nll";
    for (double v : ckpt.epoch_mean_nll) out << ' ' << fmt_double(v);
    out << '\n';

    out << "src\n";
    write_rows(out, ckpt.labels, m.src, m.dim);
    out << "tgt\n";
    write_rows(out, ckpt.labels, m.tgt, m.dim);
    out << "c_pos";
    write_vec(out, m.c_pos);
    out << '\n';
    out << "c_neg";
    write_vec(out, m.context(Sign::Negative));
    out << '\n';
    out << "bias\n";
    for (std::size_t i = 0; i < m.num_nodes; ++i)
      out << ckpt.labels[i] << ' ' << fmt_double(m.bias[i]) << '\n';

    const AdagradState& st = ckpt.state;
    out << "adagrad_src\n";
    write_rows(out, ckpt.labels, st.src_acc, m.dim);
    out << "adagrad_tgt\n";
    write_rows(out, ckpt.labels, st.tgt_acc, m.dim);
    out << "adagrad_c_pos";
    write_vec(out, st.c_pos_acc);
    out << '\n';
    out << "adagrad_c_neg";
    write_vec(out, m.unsigned_ablation ? std::span<const double>(st.c_pos_acc)
                                       : std::span<const double>(st.c_neg_acc));
    out << '\n';
    out << "adagrad_bias\n";
    for (std::size_t i = 0; i < m.num_nodes; ++i)
      out << ckpt.labels[i] << ' ' << fmt_double(st.bias_acc[i]) << '\n';
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move checkpoint into place: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::size_t line_no = 0;

  auto header = tokens_of(next_content_line(in, path, line_no));
  if (header.size() != 3 || header[2] != "checkpoint")
    throw std::runtime_error(path + ": not a checkpoint file");

  Checkpoint ckpt;
  std::size_t n = 0;
  int dim = 0;
  bool ablation = false;
  double eta = 0, eps = 0;
  try {
    n = std::stoull(header[0]);
    dim = std::stoi(header[1]);
    auto meta = tokens_of(next_content_line(in, path, line_no));
    if (meta.size() != 7 || meta[0] != "meta")
      throw std::runtime_error(path + ": bad meta line");
    ablation = meta[1] == "1";
    eta = parse_double(meta[2]);
    eps = parse_double(meta[3]);
    ckpt.epochs_done = std::stoull(meta[4]);
    ckpt.samples_done = std::stoull(meta[5]);
    ckpt.epoch_nll_sum = parse_double(meta[6]);
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": bad checkpoint header");
  }

  auto nll = tokens_of(next_content_line(in, path, line_no));
  if (nll.empty() || nll[0] != "epoch_nll")
    throw std::runtime_error(path + ": bad epoch_nll line");
  for (std::size_t i = 1; i < nll.size(); ++i)
    ckpt.epoch_mean_nll.push_back(parse_double(nll[i]));

  SneModel& m = ckpt.model;
  m.dim = dim;
  m.num_nodes = n;
  m.unsigned_ablation = ablation;
  read_rows(in, path, line_no, "src", &ckpt.labels, nullptr, m.src, n, dim);
  read_rows(in, path, line_no, "tgt", nullptr, &ckpt.labels, m.tgt, n, dim);
  m.c_pos = read_labeled_vec(in, path, line_no, "c_pos", dim);
  auto c_neg = read_labeled_vec(in, path, line_no, "c_neg", dim);
  if (!ablation) m.c_neg = std::move(c_neg);

  auto bias_head = next_content_line(in, path, line_no);
  if (bias_head != "bias") throw std::runtime_error(path + ": expected bias section");
  m.bias.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto toks = tokens_of(next_content_line(in, path, line_no));
    if (toks.size() != 2 || toks[0] != ckpt.labels[i])
      throw ParseError(path, line_no, "bad bias row");
    m.bias[i] = parse_double(toks[1]);
  }

  AdagradState& st = ckpt.state;
  st.eta = eta;
  st.eps = eps;
  read_rows(in, path, line_no, "adagrad_src", nullptr, &ckpt.labels, st.src_acc, n, dim);
  read_rows(in, path, line_no, "adagrad_tgt", nullptr, &ckpt.labels, st.tgt_acc, n, dim);
  st.c_pos_acc = read_labeled_vec(in, path, line_no, "adagrad_c_pos", dim);
  auto c_neg_acc = read_labeled_vec(in, path, line_no, "adagrad_c_neg", dim);
  if (!ablation) st.c_neg_acc = std::move(c_neg_acc);

  auto ab_head = next_content_line(in, path, line_no);
  if (ab_head != "adagrad_bias") throw std::runtime_error(path + ": expected adagrad_bias");
  st.bias_acc.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto toks = tokens_of(next_content_line(in, path, line_no));
    if (toks.size() != 2 || toks[0] != ckpt.labels[i])
      throw ParseError(path, line_no, "bad adagrad_bias row");
    st.bias_acc[i] = parse_double(toks[1]);
  }
  return ckpt;
}

}  // namespace sne
