#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sne/model.hpp"

namespace sne {

// Embedding text format: header `<num_nodes> <dim> <mode>` where dim is the
// representation length (d for mode s, 2d for mode st), then one line per
// node: `<label> <f1> ... <fdim>`, full precision.
void write_embeddings(const SneModel& model, const SignedGraph& graph, ReprMode mode,
                      const std::string& path);
void write_embeddings(const SneModel& model, std::span<const std::string> labels,
                      ReprMode mode, const std::string& path);

struct EmbeddingTable {
  int dim = 0;
  ReprMode mode = ReprMode::SourceOnly;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> vectors;
  std::unordered_map<std::string, std::size_t> index;

  const std::vector<double>* find(const std::string& label) const {
    auto it = index.find(label);
    return it == index.end() ? nullptr : &vectors[it->second];
  }
};

EmbeddingTable read_embeddings(const std::string& path);

// Everything needed to resume training: parameters, Adagrad accumulators,
// node labels, and progress counters.
struct Checkpoint {
  SneModel model;
  AdagradState state;
  std::vector<std::string> labels;
  std::uint64_t epochs_done = 0;
  std::uint64_t samples_done = 0;   // within the current epoch
  double epoch_nll_sum = 0;         // partial sum for the current epoch
  std::vector<double> epoch_mean_nll;  // completed epochs
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sne
