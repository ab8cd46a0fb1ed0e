#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sne/model.hpp"
#include "sne/model_io.hpp"
#include "sne/walk.hpp"

namespace sne {

struct TrainConfig {
  int dim = 100;
  WalkConfig walk;                // walk.seed is overridden by seed
  SampledSoftmaxConfig softmax;   // k = 512 by default
  double learning_rate = 0.1;
  double adagrad_eps = 1e-8;
  int epochs = 5;
  std::uint64_t seed = 1;
  bool unsigned_ablation = false;
  bool shuffle = false;           // reference mode visits corpus order
  int threads = 1;                // >1 enables the racy parallel mode
  std::uint64_t checkpoint_every = 0;  // samples between checkpoints, 0 = off
  std::string checkpoint_path;
  std::string corpus_path;        // stream samples from file instead of walking

  void validate() const;
};

struct TrainReport {
  std::vector<double> epoch_mean_nll;
  double wall_seconds = 0;
  std::uint64_t samples_processed = 0;
  std::uint64_t corpus_samples = 0;
};

struct TrainResult {
  SneModel model;
  AdagradState state;
  TrainReport report;
};

// Runs the full pipeline: corpus (generated from walks or streamed from
// cfg.corpus_path), sampled-softmax gradients, Adagrad, for cfg.epochs
// passes. Sequential mode is bitwise deterministic given the seed.
TrainResult train(const SignedGraph& graph, const TrainConfig& cfg);

// Continue from a checkpoint written by a previous run with the same
// graph and config.
TrainResult train(const SignedGraph& graph, const TrainConfig& cfg, const Checkpoint& resume);

// Negative-draw stream for one sample visit; exposed so tests can replay
// which negatives a training step saw.
inline Rng negatives_rng(std::uint64_t seed, std::uint64_t epoch, std::uint64_t position) {
  return Rng(mix_seed(seed ^ seed_tag::negatives, epoch, position));
}

std::vector<std::pair<int, double>> training_loss_curve(const TrainReport& report);
void write_loss_csv(const TrainReport& report, const std::string& path);

}  // namespace sne
