#include "sne/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace sne {

SneModel SneModel::init(std::size_t num_nodes, int dim, std::uint64_t seed,
                        bool unsigned_ablation) {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (num_nodes == 0) throw std::invalid_argument("model needs at least one node");
  SneModel m;
  m.dim = dim;
  m.num_nodes = num_nodes;
  m.unsigned_ablation = unsigned_ablation;
  Rng rng(mix_seed(seed ^ seed_tag::init, num_nodes, static_cast<std::uint64_t>(dim)));
  const double half = 0.5 / dim;
  m.src.resize(num_nodes * dim);
  m.tgt.resize(num_nodes * dim);
  for (double& x : m.src) x = rng.next_uniform(-half, half);
  for (double& x : m.tgt) x = rng.next_uniform(-half, half);
  m.c_pos.resize(dim);
  for (double& x : m.c_pos) x = 1.0 + rng.next_uniform(-0.01, 0.01);
  if (!unsigned_ablation) {
    m.c_neg.resize(dim);
    for (double& x : m.c_neg) x = 1.0 + rng.next_uniform(-0.01, 0.01);
  }
  m.bias.assign(num_nodes, 0.0);
  return m;
}

std::vector<double> predict_embedding(const SneModel& model, const WalkSample& sample) {
  std::vector<double> h(model.dim, 0.0);
  for (std::size_t i = 0; i < sample.path.size(); ++i) {
    auto c = model.context(sample.signs[i]);
    auto s = model.src_row(sample.path[i]);
    for (int d = 0; d < model.dim; ++d) h[d] += c[d] * s[d];
  }
  return h;
}

double score(const SneModel& model, std::span<const double> h, NodeId v) {
  auto t = model.tgt_row(v);
  double acc = model.bias[v];
  for (int d = 0; d < model.dim; ++d) acc += h[d] * t[d];
  return acc;
}

namespace {

// softmax over {target} + negatives after subtracting corrections from the
// negatives' scores; fills gradients for every touched parameter.
LossGrad softmax_core(const SneModel& model, const WalkSample& sample,
                      std::span<const NodeId> negatives,
                      std::span<const double> neg_log_correction) {
  const int dim = model.dim;
  LossGrad out;

  std::vector<double> h = predict_embedding(model, sample);

  const std::size_t n_cand = negatives.size() + 1;
  std::vector<double> scores(n_cand);
  scores[0] = score(model, h, sample.target);
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    double corr = neg_log_correction.empty() ? 0.0 : neg_log_correction[i];
    scores[1 + i] = score(model, h, negatives[i]) - corr;
  }

  const double max_s = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp(s - max_s);
  const double log_z = max_s + std::log(z);
  out.loss = log_z - scores[0];

  // dL/ds_c = p_c - [c == target]
  std::vector<double> dscore(n_cand);
  for (std::size_t c = 0; c < n_cand; ++c) dscore[c] = std::exp(scores[c] - log_z);
  dscore[0] -= 1.0;

  // tgt rows, biases, and dL/dh = sum_c dscore_c * tgt[cand_c]
  std::vector<double> dh(dim, 0.0);
  out.grads.tgt.reserve(n_cand);
  out.grads.bias.reserve(n_cand);
  for (std::size_t c = 0; c < n_cand; ++c) {
    NodeId v = (c == 0) ? sample.target : negatives[c - 1];
    auto t = model.tgt_row(v);
    RowGrad rg{v, std::vector<double>(dim)};
    for (int d = 0; d < dim; ++d) {
      rg.grad[d] = dscore[c] * h[d];
      dh[d] += dscore[c] * t[d];
    }
    out.grads.tgt.push_back(std::move(rg));
    out.grads.bias.emplace_back(v, dscore[c]);
  }

  // src rows (aggregated per node) and signed-type vectors
  std::vector<double> dc_pos(dim, 0.0), dc_neg(dim, 0.0);
  bool touched_pos = false, touched_neg = false;
  for (std::size_t i = 0; i < sample.path.size(); ++i) {
    const NodeId u = sample.path[i];
    const bool use_pos = sample.signs[i] == Sign::Positive || model.unsigned_ablation;
    auto c = model.context(sample.signs[i]);
    auto s = model.src_row(u);

    RowGrad* rg = nullptr;
    for (RowGrad& g : out.grads.src)
      if (g.node == u) rg = &g;
    if (!rg) {
      out.grads.src.push_back({u, std::vector<double>(dim, 0.0)});
      rg = &out.grads.src.back();
    }
    std::vector<double>& dc = use_pos ? dc_pos : dc_neg;
    (use_pos ? touched_pos : touched_neg) = true;
    for (int d = 0; d < dim; ++d) {
      rg->grad[d] += c[d] * dh[d];
      dc[d] += s[d] * dh[d];
    }
  }
  if (touched_pos) out.grads.c_pos = std::move(dc_pos);
  if (touched_neg) out.grads.c_neg = std::move(dc_neg);
  return out;
}

std::vector<NodeId> all_but_target(std::size_t num_nodes, NodeId target) {
  std::vector<NodeId> out;
  out.reserve(num_nodes - 1);
  for (NodeId v = 0; v < num_nodes; ++v)
    if (v != target) out.push_back(v);
  return out;
}

}  // namespace

double full_softmax_nll(const SneModel& model, const WalkSample& sample) {
  std::vector<double> h = predict_embedding(model, sample);
  double max_s = -std::numeric_limits<double>::infinity();
  std::vector<double> scores(model.num_nodes);
  for (NodeId v = 0; v < model.num_nodes; ++v) {
    scores[v] = score(model, h, v);
    max_s = std::max(max_s, scores[v]);
  }
  double z = 0.0;
  for (double s : scores) z += std::exp(s - max_s);
  return max_s + std::log(z) - scores[sample.target];
}

LossGrad full_softmax_nll_grad(const SneModel& model, const WalkSample& sample) {
  auto negatives = all_but_target(model.num_nodes, sample.target);
  LossGrad out = softmax_core(model, sample, negatives, {});
  out.used_full_softmax = true;
  return out;
}

LossGrad softmax_nll_grad_with_candidates(const SneModel& model, const WalkSample& sample,
                                          std::span<const NodeId> negatives,
                                          std::span<const double> neg_log_correction) {
  return softmax_core(model, sample, negatives, neg_log_correction);
}

NegativeSampler NegativeSampler::uniform(std::size_t num_nodes) {
  return NegativeSampler(num_nodes, NegDistribution::Uniform);
}

NegativeSampler NegativeSampler::log_uniform_by_degree(const SignedGraph& graph) {
  const std::size_t n = graph.num_nodes();
  NegativeSampler s(n, NegDistribution::LogUniformByDegreeRank);

  std::vector<std::size_t> degree(n, 0);
  for (const EdgeRecord& e : graph.edges()) {
    ++degree[e.src];
    ++degree[e.dst];
  }
  s.node_by_rank_.resize(n);
  std::iota(s.node_by_rank_.begin(), s.node_by_rank_.end(), NodeId{0});
  std::stable_sort(s.node_by_rank_.begin(), s.node_by_rank_.end(),
                   [&](NodeId a, NodeId b) { return degree[a] > degree[b]; });

  const double denom = std::log(static_cast<double>(n) + 1.0);
  s.log_q_.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    double q = (std::log(static_cast<double>(r) + 2.0) -
                std::log(static_cast<double>(r) + 1.0)) /
               denom;
    s.log_q_[s.node_by_rank_[r]] = std::log(q);
  }
  return s;
}

NegativeSampler NegativeSampler::for_graph(const SignedGraph& graph, NegDistribution dist) {
  return dist == NegDistribution::Uniform ? uniform(graph.num_nodes())
                                          : log_uniform_by_degree(graph);
}

void NegativeSampler::draw_distinct(int k, NodeId exclude, Rng& rng,
                                    std::vector<NodeId>& out) const {
  out.clear();
  out.reserve(k);
  // dense bitmap for small graphs, hash set when that would dominate
  const bool dense = num_nodes_ <= 65536;
  std::vector<bool> taken_dense;
  std::unordered_set<NodeId> taken_sparse;
  if (dense) {
    taken_dense.assign(num_nodes_, false);
    taken_dense[exclude] = true;
  } else {
    taken_sparse.reserve(static_cast<std::size_t>(k) * 2);
    taken_sparse.insert(exclude);
  }

  int drawn = 0;
  while (drawn < k) {
    NodeId v;
    if (dist_ == NegDistribution::Uniform) {
      v = static_cast<NodeId>(rng.next_below(num_nodes_));
    } else {
      // inverse transform for the log-uniform rank distribution
      double u = rng.next_unit();
      auto rank = static_cast<std::size_t>(
          std::exp(u * std::log(static_cast<double>(num_nodes_) + 1.0)) - 1.0);
      if (rank >= num_nodes_) rank = num_nodes_ - 1;
      v = node_by_rank_[rank];
    }
    if (dense) {
      if (taken_dense[v]) continue;
      taken_dense[v] = true;
    } else {
      if (!taken_sparse.insert(v).second) continue;
    }
    out.push_back(v);
    ++drawn;
  }
}

double NegativeSampler::log_proposal(NodeId v) const {
  if (dist_ == NegDistribution::Uniform)
    return -std::log(static_cast<double>(num_nodes_) - 1.0);
  return log_q_[v];
}

LossGrad sampled_softmax_nll_grad(const SneModel& model, const WalkSample& sample,
                                  const SampledSoftmaxConfig& cfg,
                                  const NegativeSampler& sampler, Rng& rng) {
  if (cfg.num_samples < 1) throw std::invalid_argument("num_samples must be >= 1");
  if (static_cast<std::size_t>(cfg.num_samples) >= model.num_nodes)
    return full_softmax_nll_grad(model, sample);

  std::vector<NodeId> negatives;
  sampler.draw_distinct(cfg.num_samples, sample.target, rng, negatives);

  std::vector<double> corrections;
  if (cfg.log_correction) {
    const double log_k = std::log(static_cast<double>(cfg.num_samples));
    corrections.resize(negatives.size());
    for (std::size_t i = 0; i < negatives.size(); ++i)
      corrections[i] = log_k + sampler.log_proposal(negatives[i]);
  }
  return softmax_core(model, sample, negatives, corrections);
}

AdagradState AdagradState::init(const SneModel& model, double eta, double eps) {
  AdagradState st;
  st.eta = eta;
  st.eps = eps;
  st.src_acc.assign(model.src.size(), 0.0);
  st.tgt_acc.assign(model.tgt.size(), 0.0);
  st.bias_acc.assign(model.bias.size(), 0.0);
  st.c_pos_acc.assign(model.c_pos.size(), 0.0);
  st.c_neg_acc.assign(model.c_neg.size(), 0.0);
  return st;
}

namespace {

void adagrad_apply(std::span<double> x, std::span<double> acc, std::span<const double> g,
                   double eta, double eps) {
  for (std::size_t d = 0; d < g.size(); ++d) {
    acc[d] += g[d] * g[d];
    x[d] -= eta * g[d] / (std::sqrt(acc[d]) + eps);
  }
}

}  // namespace

void adagrad_step(SneModel& model, AdagradState& state, const Gradients& grads) {
  const std::size_t dim = static_cast<std::size_t>(model.dim);
  for (const RowGrad& rg : grads.src) {
    std::span<double> acc(state.src_acc.data() + rg.node * dim, dim);
    adagrad_apply(model.src_row(rg.node), acc, rg.grad, state.eta, state.eps);
  }
  for (const RowGrad& rg : grads.tgt) {
    std::span<double> acc(state.tgt_acc.data() + rg.node * dim, dim);
    adagrad_apply(model.tgt_row(rg.node), acc, rg.grad, state.eta, state.eps);
  }
  for (const auto& [v, g] : grads.bias) {
    state.bias_acc[v] += g * g;
    model.bias[v] -= state.eta * g / (std::sqrt(state.bias_acc[v]) + state.eps);
  }
  if (!grads.c_pos.empty())
    adagrad_apply(model.c_pos, state.c_pos_acc, grads.c_pos, state.eta, state.eps);
  if (!grads.c_neg.empty())
    adagrad_apply(model.c_neg, state.c_neg_acc, grads.c_neg, state.eta, state.eps);
}

ReprMode parse_repr_mode(const std::string& s) {
  if (s == "s") return ReprMode::SourceOnly;
  if (s == "st") return ReprMode::Concatenated;
  throw std::invalid_argument("representation mode must be 's' or 'st', got '" + s + "'");
}

std::string repr_mode_name(ReprMode mode) {
  return mode == ReprMode::SourceOnly ? "s" : "st";
}

int representation_dim(const SneModel& model, ReprMode mode) {
  return mode == ReprMode::SourceOnly ? model.dim : 2 * model.dim;
}

std::vector<double> node_representation(const SneModel& model, NodeId v, ReprMode mode) {
  auto s = model.src_row(v);
  std::vector<double> out(s.begin(), s.end());
  if (mode == ReprMode::Concatenated) {
    auto t = model.tgt_row(v);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

}  // namespace sne
