#include "sne/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "sne/rng.hpp"
#include "text_util.hpp"

namespace sne {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::uint64_t pack_pair(NodeId a, NodeId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::vector<int> distinct_classes(const std::vector<int>& labels) {
  std::vector<int> classes(labels);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

}  // namespace

// ---------------------------------------------------------------------------
// edge-feature operators

EdgeOperator parse_edge_operator(std::string_view name) {
  if (name == "average") return EdgeOperator::Average;
  if (name == "hadamard") return EdgeOperator::Hadamard;
  if (name == "l1") return EdgeOperator::L1Weight;
  if (name == "l2") return EdgeOperator::L2Weight;
  throw std::invalid_argument("unknown edge operator: " + std::string(name));
}

std::string_view edge_operator_name(EdgeOperator op) {
  switch (op) {
    case EdgeOperator::Average: return "average";
    case EdgeOperator::Hadamard: return "hadamard";
    case EdgeOperator::L1Weight: return "l1";
    case EdgeOperator::L2Weight: return "l2";
  }
  return "?";
}

std::vector<double> compose_edge_feature(std::span<const double> u,
                                         std::span<const double> v, EdgeOperator op) {
  if (u.size() != v.size())
    throw std::invalid_argument("edge operator needs equal-length representations");
  std::vector<double> out(u.size());
  switch (op) {
    case EdgeOperator::Average:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = 0.5 * (u[i] + v[i]);
      break;
    case EdgeOperator::Hadamard:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * v[i];
      break;
    case EdgeOperator::L1Weight:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::abs(u[i] - v[i]);
      break;
    case EdgeOperator::L2Weight:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = (u[i] - v[i]) * (u[i] - v[i]);
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// balanced link-prediction dataset

LinkDataset build_link_dataset(const SignedGraph& graph, std::uint64_t seed) {
  const auto& records = graph.edges();
  std::vector<std::size_t> pos_idx;
  std::vector<std::size_t> neg_idx;
  for (std::size_t i = 0; i < records.size(); ++i)
    (records[i].sign == Sign::Positive ? pos_idx : neg_idx).push_back(i);

  if (neg_idx.empty())
    throw std::runtime_error("link dataset needs at least one negative edge");
  if (pos_idx.size() < neg_idx.size())
    throw std::runtime_error("link dataset needs at least as many positive edges as negative");
  const std::size_t per_class = neg_idx.size();

  // undirected pairs are canonicalized low-id first; directed pairs keep order
  auto canonical = [&](NodeId a, NodeId b) {
    if (!graph.directed() && a > b) std::swap(a, b);
    return std::pair<NodeId, NodeId>(a, b);
  };

  LinkDataset ds;
  ds.examples.reserve(3 * per_class);
  for (std::size_t i : neg_idx) {
    auto [u, v] = canonical(records[i].src, records[i].dst);
    ds.examples.push_back({u, v, LinkClass::Negative});
  }

  Rng rng(mix_seed(seed ^ seed_tag::link, graph.num_nodes(), records.size()));
  for (std::size_t i = 0; i < per_class; ++i) {  // partial Fisher-Yates
    std::size_t j = i + static_cast<std::size_t>(rng.next_below(pos_idx.size() - i));
    std::swap(pos_idx[i], pos_idx[j]);
    auto [u, v] = canonical(records[pos_idx[i]].src, records[pos_idx[i]].dst);
    ds.examples.push_back({u, v, LinkClass::Positive});
  }

  std::unordered_set<std::uint64_t> adjacent;
  adjacent.reserve(records.size() * 2);
  for (const auto& r : records) {
    auto [u, v] = canonical(r.src, r.dst);
    adjacent.insert(pack_pair(u, v));
  }
  const std::uint64_t n = graph.num_nodes();
  const std::uint64_t total = graph.directed() ? n * (n - 1) : n * (n - 1) / 2;
  if (total - adjacent.size() < per_class)
    throw std::runtime_error("not enough non-adjacent pairs to draw fake edges from");

  std::unordered_set<std::uint64_t> used;
  used.reserve(per_class * 2);
  const std::uint64_t max_attempts =
      std::max<std::uint64_t>(200 * static_cast<std::uint64_t>(per_class), 100000);
  std::uint64_t attempts = 0;
  for (std::size_t made = 0; made < per_class;) {
    if (++attempts > max_attempts)
      throw std::runtime_error("fake-edge rejection sampling exceeded its retry budget");
    auto u = static_cast<NodeId>(rng.next_below(n));
    auto v = static_cast<NodeId>(rng.next_below(n));
    if (u == v) continue;
    auto [a, b] = canonical(u, v);
    const std::uint64_t key = pack_pair(a, b);
    if (adjacent.contains(key) || !used.insert(key).second) continue;
    ds.examples.push_back({a, b, LinkClass::Fake});
    ++made;
  }

  ds.class_counts = {per_class, per_class, per_class};
  return ds;
}

// ---------------------------------------------------------------------------
// k-fold splitting

namespace {

void check_folds(std::size_t n, int k) {
  if (k < 1) throw std::invalid_argument("fold count must be >= 1");
  if (static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("more folds than examples");
}

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.next_below(i)]);
}

}  // namespace

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k,
                                                  std::uint64_t seed) {
  check_folds(n, k);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(seed ^ seed_tag::fold, n, static_cast<std::uint64_t>(k)));
  shuffle_indices(order, rng);

  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  return folds;
}

std::vector<std::vector<std::size_t>> kfold_split(const std::vector<int>& labels,
                                                  int k, std::uint64_t seed) {
  check_folds(labels.size(), k);
  Rng rng(mix_seed(seed ^ seed_tag::fold, labels.size(), static_cast<std::uint64_t>(k)));
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t dealt = 0;  // global counter keeps overall fold sizes within +-1
  for (int c : distinct_classes(labels)) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) idx.push_back(i);
    shuffle_indices(idx, rng);
    for (std::size_t i : idx) folds[dealt++ % k].push_back(i);
  }
  return folds;
}

// ---------------------------------------------------------------------------
// standardization

Standardizer Standardizer::fit(const FeatureMatrix& x,
                               std::span<const std::size_t> rows) {
  if (rows.empty()) throw std::invalid_argument("cannot standardize zero rows");
  Standardizer s;
  s.mean.assign(x.cols, 0.0);
  s.scale.assign(x.cols, 0.0);
  const double inv_m = 1.0 / static_cast<double>(rows.size());
  for (std::size_t r : rows) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < x.cols; ++c) s.mean[c] += row[c];
  }
  for (std::size_t c = 0; c < x.cols; ++c) s.mean[c] *= inv_m;
  for (std::size_t r : rows) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < x.cols; ++c) {
      const double d = row[c] - s.mean[c];
      s.scale[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < x.cols; ++c) {
    s.scale[c] = std::sqrt(s.scale[c] * inv_m);
    if (s.scale[c] < 1e-12) s.scale[c] = 1.0;  // constant column: leave centered only
  }
  return s;
}

void Standardizer::apply(std::span<double> feature) const {
  if (feature.size() != mean.size())
    throw std::invalid_argument("standardizer dimension mismatch");
  for (std::size_t c = 0; c < feature.size(); ++c)
    feature[c] = (feature[c] - mean[c]) / scale[c];
}

// ---------------------------------------------------------------------------
// logistic regression

std::vector<double> LogRegModel::scores(std::span<const double> feature) const {
  std::vector<double> out(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    double z = intercepts[c];
    const auto& w = weights[c];
    for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * feature[i];
    out[c] = z;
  }
  return out;
}

int LogRegModel::predict(std::span<const double> feature) const {
  const std::vector<double> s = scores(feature);
  std::size_t best = 0;
  for (std::size_t c = 1; c < s.size(); ++c)
    if (s[c] > s[best]) best = c;  // strict: ties stay at the lowest class id
  return classes[best];
}

LogRegModel train_logreg(const FeatureMatrix& x, const std::vector<int>& labels,
                         const LogRegConfig& cfg) {
  if (x.rows != labels.size())
    throw std::invalid_argument("feature/label row count mismatch");
  if (x.rows == 0) throw std::invalid_argument("cannot train on zero rows");

  LogRegModel model;
  model.classes = distinct_classes(labels);
  if (model.classes.size() < 2)
    throw std::invalid_argument("logistic regression needs at least two classes");
  model.weights.assign(model.classes.size(), std::vector<double>(x.cols, 0.0));
  model.intercepts.assign(model.classes.size(), 0.0);

  const double inv_m = 1.0 / static_cast<double>(x.rows);
  std::vector<double> grad(x.cols);
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    auto& w = model.weights[c];
    double& b = model.intercepts[c];
    for (int t = 1; t <= cfg.iters; ++t) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double grad_b = 0.0;
      for (std::size_t r = 0; r < x.rows; ++r) {
        auto row = x.row(r);
        double z = b;
        for (std::size_t i = 0; i < x.cols; ++i) z += w[i] * row[i];
        const double err = sigmoid(z) - (labels[r] == model.classes[c] ? 1.0 : 0.0);
        for (std::size_t i = 0; i < x.cols; ++i) grad[i] += err * row[i];
        grad_b += err;
      }
      const double step = cfg.step / std::sqrt(static_cast<double>(t));
      for (std::size_t i = 0; i < x.cols; ++i)
        w[i] -= step * (grad[i] * inv_m + cfg.lambda * w[i]);
      b -= step * grad_b * inv_m;  // intercept unregularized
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// cross-validation

EvalReport cross_validate(const FeatureMatrix& x, const std::vector<int>& labels,
                          const EvalOptions& opt, std::uint64_t seed,
                          std::vector<FoldInfo>* fold_info) {
  if (x.rows != labels.size())
    throw std::invalid_argument("feature/label row count mismatch");
  const auto folds = kfold_split(labels, opt.folds, seed);

  EvalReport report;
  report.classes = distinct_classes(labels);
  report.confusion.assign(report.classes.size(),
                          std::vector<std::uint64_t>(report.classes.size(), 0));
  auto class_pos = [&](int cls) {
    return static_cast<std::size_t>(
        std::lower_bound(report.classes.begin(), report.classes.end(), cls) -
        report.classes.begin());
  };
  if (fold_info) fold_info->clear();

  std::vector<char> in_test(x.rows);
  for (const auto& test : folds) {
    std::fill(in_test.begin(), in_test.end(), 0);
    for (std::size_t i : test) in_test[i] = 1;
    std::vector<std::size_t> train_rows;
    train_rows.reserve(x.rows - test.size());
    for (std::size_t i = 0; i < x.rows; ++i)
      if (!in_test[i]) train_rows.push_back(i);

    const Standardizer st = Standardizer::fit(x, train_rows);
    FeatureMatrix xtrain = FeatureMatrix::zeros(train_rows.size(), x.cols);
    std::vector<int> ytrain(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      auto src = x.row(train_rows[i]);
      std::copy(src.begin(), src.end(), xtrain.row(i).begin());
      st.apply(xtrain.row(i));
      ytrain[i] = labels[train_rows[i]];
    }
    const LogRegModel lr = train_logreg(xtrain, ytrain, opt.logreg);

    std::size_t correct = 0;
    std::vector<double> feature(x.cols);
    for (std::size_t i : test) {
      auto src = x.row(i);
      std::copy(src.begin(), src.end(), feature.begin());
      st.apply(feature);
      const int pred = lr.predict(feature);
      if (pred == labels[i]) ++correct;
      ++report.confusion[class_pos(labels[i])][class_pos(pred)];
    }
    report.fold_accuracy.push_back(static_cast<double>(correct) /
                                   static_cast<double>(test.size()));
    if (fold_info) fold_info->push_back({st, test});
  }

  double sum = 0.0;
  for (double a : report.fold_accuracy) sum += a;
  report.mean_accuracy = sum / static_cast<double>(report.fold_accuracy.size());
  return report;
}

// ---------------------------------------------------------------------------
// end-to-end evaluations

namespace {

struct ClassedNodes {
  std::vector<NodeId> nodes;
  std::vector<int> labels;
};

ClassedNodes collect_classed_nodes(const SignedGraph& graph) {
  ClassedNodes out;
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    if (auto cls = graph.node_class(v)) {
      out.nodes.push_back(v);
      out.labels.push_back(*cls);
    }
  }
  if (out.nodes.empty())
    throw std::runtime_error("node classification needs node classes");
  return out;
}

template <typename ReprFn>
EvalReport eval_nodes_impl(const SignedGraph& graph, std::size_t dim, ReprFn repr,
                           const EvalOptions& opt, std::uint64_t seed) {
  const ClassedNodes classed = collect_classed_nodes(graph);
  FeatureMatrix x = FeatureMatrix::zeros(classed.nodes.size(), dim);
  for (std::size_t i = 0; i < classed.nodes.size(); ++i) {
    const std::vector<double> r = repr(classed.nodes[i]);
    std::copy(r.begin(), r.end(), x.row(i).begin());
  }
  return cross_validate(x, classed.labels, opt, seed);
}

template <typename ReprFn>
EvalReport eval_links_impl(const SignedGraph& graph, std::size_t dim, ReprFn repr,
                           EdgeOperator op, const EvalOptions& opt,
                           std::uint64_t seed) {
  const LinkDataset ds = build_link_dataset(graph, seed);
  FeatureMatrix x = FeatureMatrix::zeros(ds.examples.size(), dim);
  std::vector<int> y(ds.examples.size());
  for (std::size_t i = 0; i < ds.examples.size(); ++i) {
    const auto& ex = ds.examples[i];
    const std::vector<double> feat = compose_edge_feature(repr(ex.u), repr(ex.v), op);
    std::copy(feat.begin(), feat.end(), x.row(i).begin());
    y[i] = static_cast<int>(ex.cls);
  }
  return cross_validate(x, y, opt, seed);
}

std::vector<double> table_repr(const EmbeddingTable& table, const SignedGraph& graph,
                               NodeId v) {
  const std::vector<double>* vec = table.find(graph.label(v));
  if (!vec)
    throw std::runtime_error("embedding table is missing node " + graph.label(v));
  return *vec;
}

}  // namespace

EvalReport evaluate_node_classification(const SneModel& model, const SignedGraph& graph,
                                        ReprMode mode, const EvalOptions& opt,
                                        std::uint64_t seed) {
  return eval_nodes_impl(
      graph, representation_dim(model, mode),
      [&](NodeId v) { return node_representation(model, v, mode); }, opt, seed);
}

EvalReport evaluate_node_classification(const EmbeddingTable& table,
                                        const SignedGraph& graph, const EvalOptions& opt,
                                        std::uint64_t seed) {
  return eval_nodes_impl(
      graph, table.dim, [&](NodeId v) { return table_repr(table, graph, v); }, opt,
      seed);
}

EvalReport evaluate_link_prediction(const SneModel& model, const SignedGraph& graph,
                                    ReprMode mode, EdgeOperator op,
                                    const EvalOptions& opt, std::uint64_t seed) {
  return eval_links_impl(
      graph, representation_dim(model, mode),
      [&](NodeId v) { return node_representation(model, v, mode); }, op, opt, seed);
}

EvalReport evaluate_link_prediction(const EmbeddingTable& table, const SignedGraph& graph,
                                    EdgeOperator op, const EvalOptions& opt,
                                    std::uint64_t seed) {
  return eval_links_impl(
      graph, table.dim, [&](NodeId v) { return table_repr(table, graph, v); }, op, opt,
      seed);
}

// ---------------------------------------------------------------------------
// report output

std::string report_to_csv(const EvalReport& report) {
  std::string out = "fold,accuracy\n";
  for (std::size_t i = 0; i < report.fold_accuracy.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += detail::fmt_double(report.fold_accuracy[i]);
    out += '\n';
  }
  out += "mean,";
  out += detail::fmt_double(report.mean_accuracy);
  out += '\n';
  return out;
}

void write_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report csv: " + path);
  out << report_to_csv(report);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string confusion_to_csv(const EvalReport& report) {
  std::string out = "class";
  for (int c : report.classes) {
    out += ',';
    out += std::to_string(c);
  }
  out += '\n';
  for (std::size_t r = 0; r < report.classes.size(); ++r) {
    out += std::to_string(report.classes[r]);
    for (std::size_t c = 0; c < report.classes.size(); ++c) {
      out += ',';
      out += std::to_string(report.confusion[r][c]);
    }
    out += '\n';
  }
  return out;
}

void write_confusion_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write confusion csv: " + path);
  out << confusion_to_csv(report);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sne
