// Evaluation suite: edge-feature operators, balanced 3-class link datasets,
// stratified k-fold cross-validation, and a small deterministic one-vs-rest
// logistic regression so results do not depend on an external learner.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sne/graph.hpp"
#include "sne/model.hpp"
#include "sne/model_io.hpp"

namespace sne {

// ---------------------------------------------------------------------------
// edge-feature operators

enum class EdgeOperator { Average, Hadamard, L1Weight, L2Weight };

// accepts "average", "hadamard", "l1", "l2"
EdgeOperator parse_edge_operator(std::string_view name);
std::string_view edge_operator_name(EdgeOperator op);

// Combine two equal-length node representations into one edge feature.
// Average: (u+v)/2, Hadamard: u*v, L1Weight: |u-v|, L2Weight: (u-v)^2.
std::vector<double> compose_edge_feature(std::span<const double> u,
                                         std::span<const double> v, EdgeOperator op);

// ---------------------------------------------------------------------------
// balanced link-prediction dataset

enum class LinkClass : int { Positive = 0, Negative = 1, Fake = 2 };

struct LinkExample {
  NodeId u = 0;
  NodeId v = 0;
  LinkClass cls = LinkClass::Positive;

  bool operator==(const LinkExample&) const = default;
};

struct LinkDataset {
  std::vector<LinkExample> examples;       // negatives, then positives, then fakes
  std::array<std::size_t, 3> class_counts{};  // indexed by LinkClass value

  bool operator==(const LinkDataset&) const = default;
};

// Balanced three-way dataset: every negative edge, an equal number of
// positive edges sampled without replacement, and an equal number of fake
// (non-adjacent) pairs found by rejection sampling. Deterministic given seed.
// Errors if the graph has no negative edge, fewer positives than negatives,
// or not enough non-adjacent pairs to draw fakes from.
LinkDataset build_link_dataset(const SignedGraph& graph, std::uint64_t seed);

// ---------------------------------------------------------------------------
// k-fold splitting

// Shuffles [0,n) and deals indices round-robin; fold sizes differ by <= 1.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k,
                                                  std::uint64_t seed);

// Stratified variant: shuffles within each class, then deals round-robin with
// a global counter so both the folds and every class stay balanced to +-1.
std::vector<std::vector<std::size_t>> kfold_split(const std::vector<int>& labels,
                                                  int k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// features, standardization, logistic regression

struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  static FeatureMatrix zeros(std::size_t rows, std::size_t cols) {
    return {rows, cols, std::vector<double>(rows * cols, 0.0)};
  }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
};

// Per-column mean/scale transform. Fit on training rows only; the scale of a
// constant column is forced to 1 so applying it is a no-op there.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const FeatureMatrix& x, std::span<const std::size_t> rows);
  void apply(std::span<double> feature) const;

  bool operator==(const Standardizer&) const = default;
};

struct LogRegConfig {
  double lambda = 1e-4;  // L2 strength; intercept is never penalized
  int iters = 500;       // full-batch gradient-descent steps
  double step = 0.1;     // base step; decays as step/sqrt(t)
};

// One-vs-rest logistic regression. Prediction is argmax of the per-class
// linear scores, ties broken toward the lowest class id.
struct LogRegModel {
  std::vector<int> classes;                  // sorted distinct class ids
  std::vector<std::vector<double>> weights;  // one weight vector per class
  std::vector<double> intercepts;

  std::vector<double> scores(std::span<const double> feature) const;
  int predict(std::span<const double> feature) const;
};

// Deterministic full-batch gradient descent on the mean binary log-loss plus
// (lambda/2)*|w|^2 per class. Errors if fewer than two classes are present.
LogRegModel train_logreg(const FeatureMatrix& x, const std::vector<int>& labels,
                         const LogRegConfig& cfg = {});

// ---------------------------------------------------------------------------
// cross-validation

struct EvalOptions {
  int folds = 10;
  LogRegConfig logreg;
};

struct EvalReport {
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
  std::vector<int> classes;  // sorted distinct class ids
  std::vector<std::vector<std::uint64_t>> confusion;  // [true][predicted], all folds

  bool operator==(const EvalReport&) const = default;
};

// Per-fold internals, exposed so tests can check that standardization was fit
// on training rows only.
struct FoldInfo {
  Standardizer standardizer;
  std::vector<std::size_t> test_indices;
};

// Stratified k-fold CV: per fold, fit standardizer on the training rows, train
// logistic regression on them, score the held-out rows. Mean accuracy is the
// arithmetic mean over folds.
EvalReport cross_validate(const FeatureMatrix& x, const std::vector<int>& labels,
                          const EvalOptions& opt, std::uint64_t seed,
                          std::vector<FoldInfo>* fold_info = nullptr);

// ---------------------------------------------------------------------------
// end-to-end evaluations

// Node classification over all nodes that carry a class label.
EvalReport evaluate_node_classification(const SneModel& model, const SignedGraph& graph,
                                        ReprMode mode, const EvalOptions& opt,
                                        std::uint64_t seed);
EvalReport evaluate_node_classification(const EmbeddingTable& table,
                                        const SignedGraph& graph, const EvalOptions& opt,
                                        std::uint64_t seed);

// Three-class link prediction over a balanced dataset built from the graph.
// Directed edges compose features in (u,v) order; undirected pairs are
// ordered by node id first.
EvalReport evaluate_link_prediction(const SneModel& model, const SignedGraph& graph,
                                    ReprMode mode, EdgeOperator op,
                                    const EvalOptions& opt, std::uint64_t seed);
EvalReport evaluate_link_prediction(const EmbeddingTable& table, const SignedGraph& graph,
                                    EdgeOperator op, const EvalOptions& opt,
                                    std::uint64_t seed);

// "fold,accuracy" rows (1-based) followed by a "mean,<value>" summary line.
std::string report_to_csv(const EvalReport& report);
void write_report_csv(const EvalReport& report, const std::string& path);

// Square table with class ids as both header row and first column.
std::string confusion_to_csv(const EvalReport& report);
void write_confusion_csv(const EvalReport& report, const std::string& path);

}  // namespace sne
