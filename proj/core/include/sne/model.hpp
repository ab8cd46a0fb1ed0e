#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sne/graph.hpp"
#include "sne/rng.hpp"
#include "sne/walk.hpp"

namespace sne {

// Log-bilinear signed-embedding parameters. Each node has a source row
// (its role as a path predecessor) and a target row (its role as the
// predicted node), plus a scalar bias. The two signed-type vectors select
// how a path node contributes depending on the sign of the edge it was
// left through. In unsigned-ablation mode both signs share one vector:
// c_neg stays empty and context() returns c_pos for either sign.
struct SneModel {
  int dim = 0;
  std::size_t num_nodes = 0;
  bool unsigned_ablation = false;
  std::vector<double> src;    // num_nodes x dim, row-major
  std::vector<double> tgt;    // num_nodes x dim, row-major
  std::vector<double> c_pos;  // dim
  std::vector<double> c_neg;  // dim, empty under unsigned_ablation
  std::vector<double> bias;   // num_nodes

  // src, tgt ~ U(-0.5/d, 0.5/d); signed-type vectors start at all-ones
  // plus U(-0.01, 0.01) noise; biases zero.
  static SneModel init(std::size_t num_nodes, int dim, std::uint64_t seed,
                       bool unsigned_ablation = false);

  std::span<double> src_row(NodeId u) {
    return {src.data() + static_cast<std::size_t>(u) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> src_row(NodeId u) const {
    return {src.data() + static_cast<std::size_t>(u) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<double> tgt_row(NodeId u) {
    return {tgt.data() + static_cast<std::size_t>(u) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> tgt_row(NodeId u) const {
    return {tgt.data() + static_cast<std::size_t>(u) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<double> context(Sign s) {
    return (s == Sign::Positive || unsigned_ablation) ? std::span<double>(c_pos)
                                                      : std::span<double>(c_neg);
  }
  std::span<const double> context(Sign s) const {
    return (s == Sign::Positive || unsigned_ablation) ? std::span<const double>(c_pos)
                                                      : std::span<const double>(c_neg);
  }
};

// Predicted target embedding: h = sum_i context(signs[i]) .* src[path[i]].
std::vector<double> predict_embedding(const SneModel& model, const WalkSample& sample);

// Bilinear score of candidate v against a predicted embedding:
// dot(h, tgt[v]) + bias[v].
double score(const SneModel& model, std::span<const double> h, NodeId v);

// Sparse gradient of one sample loss. Rows are aggregated per node (a node
// appearing twice in a path contributes one summed row). c_pos/c_neg are
// empty when untouched; under unsigned ablation everything lands in c_pos.
struct RowGrad {
  NodeId node;
  std::vector<double> grad;
};
struct Gradients {
  std::vector<RowGrad> src;
  std::vector<RowGrad> tgt;
  std::vector<std::pair<NodeId, double>> bias;
  std::vector<double> c_pos;
  std::vector<double> c_neg;
};

struct LossGrad {
  double loss = 0;
  Gradients grads;
  bool used_full_softmax = false;
};

// -log p(target | path, signs) with the normalizer over all of V,
// max-shifted before exponentiation.
double full_softmax_nll(const SneModel& model, const WalkSample& sample);
LossGrad full_softmax_nll_grad(const SneModel& model, const WalkSample& sample);

// Softmax restricted to {target} + negatives, with neg_log_correction[i]
// subtracted from negative i's score (the sampled-softmax estimator's
// ln(k q(v)) term; pass zeros to disable). Candidates must be distinct and
// must not contain the target. This is the one code path behind both the
// sampled and the full loss.
LossGrad softmax_nll_grad_with_candidates(const SneModel& model, const WalkSample& sample,
                                          std::span<const NodeId> negatives,
                                          std::span<const double> neg_log_correction);

enum class NegDistribution { Uniform, LogUniformByDegreeRank };

struct SampledSoftmaxConfig {
  int num_samples = 512;  // k
  NegDistribution distribution = NegDistribution::Uniform;
  bool log_correction = true;
};

// Draws distinct negatives excluding the target and exposes the proposal
// log-probability needed for the correction term. LogUniform ranks nodes
// by total degree, ties by id.
class NegativeSampler {
 public:
  static NegativeSampler uniform(std::size_t num_nodes);
  static NegativeSampler log_uniform_by_degree(const SignedGraph& graph);
  static NegativeSampler for_graph(const SignedGraph& graph, NegDistribution dist);

  std::size_t num_nodes() const { return num_nodes_; }
  NegDistribution distribution() const { return dist_; }

  void draw_distinct(int k, NodeId exclude, Rng& rng, std::vector<NodeId>& out) const;
  // ln q(v); for the uniform proposal q = 1/(num_nodes-1) (the target is
  // excluded from the support).
  double log_proposal(NodeId v) const;

 private:
  NegativeSampler(std::size_t num_nodes, NegDistribution dist)
      : num_nodes_(num_nodes), dist_(dist) {}

  std::size_t num_nodes_;
  NegDistribution dist_;
  std::vector<NodeId> node_by_rank_;
  std::vector<double> log_q_;  // per node, LogUniform only
};

// Draws k negatives and returns the sampled-softmax loss and its exact
// gradients. k >= |V| falls back to the full softmax (flagged on the
// result).
LossGrad sampled_softmax_nll_grad(const SneModel& model, const WalkSample& sample,
                                  const SampledSoftmaxConfig& cfg,
                                  const NegativeSampler& sampler, Rng& rng);

struct AdagradState {
  double eta = 0.1;
  double eps = 1e-8;
  std::vector<double> src_acc, tgt_acc, bias_acc;
  std::vector<double> c_pos_acc, c_neg_acc;

  static AdagradState init(const SneModel& model, double eta = 0.1, double eps = 1e-8);
};

// Sparse Adagrad: for each touched parameter, acc += g^2 then
// x -= eta * g / (sqrt(acc) + eps). Untouched parameters keep their value
// and accumulator.
void adagrad_step(SneModel& model, AdagradState& state, const Gradients& grads);

enum class ReprMode { SourceOnly, Concatenated };

// "s" -> SourceOnly, "st" -> Concatenated
ReprMode parse_repr_mode(const std::string& s);
std::string repr_mode_name(ReprMode mode);
int representation_dim(const SneModel& model, ReprMode mode);

std::vector<double> node_representation(const SneModel& model, NodeId v, ReprMode mode);

}  // namespace sne
