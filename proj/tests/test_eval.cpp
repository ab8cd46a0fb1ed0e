#include "sne/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "sne/rng.hpp"
#include "sne/synthetic.hpp"
#include "test_util.hpp"

using namespace sne;

namespace {

SignedGraph community_graph(std::uint32_t size, double p_in, double p_out,
                            std::uint64_t seed) {
  SyntheticConfig sc;
  sc.community_size = size;
  sc.p_intra = p_in;
  sc.p_inter = p_out;
  sc.seed = seed;
  return make_two_community_graph(sc);
}

FeatureMatrix random_features(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  FeatureMatrix x = FeatureMatrix::zeros(rows, cols);
  Rng rng(seed);
  for (auto& v : x.data) v = rng.next_uniform(-1.0, 1.0);
  return x;
}

std::vector<int> alternating_labels(std::size_t n, int num_classes) {
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % num_classes);
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// edge operators

TEST_CASE("edge operators match the hand-computed table") {
  const std::vector<double> u = {1, 2};
  const std::vector<double> v = {3, -4};
  CHECK(compose_edge_feature(u, v, EdgeOperator::Average) == std::vector<double>{2, -1});
  CHECK(compose_edge_feature(u, v, EdgeOperator::Hadamard) == std::vector<double>{3, -8});
  CHECK(compose_edge_feature(u, v, EdgeOperator::L1Weight) == std::vector<double>{2, 6});
  CHECK(compose_edge_feature(u, v, EdgeOperator::L2Weight) == std::vector<double>{4, 36});
}

TEST_CASE("difference operators vanish on identical endpoints") {
  const std::vector<double> u = {0.5, -1.5, 2.0};
  CHECK(compose_edge_feature(u, u, EdgeOperator::L1Weight) ==
        std::vector<double>{0, 0, 0});
  CHECK(compose_edge_feature(u, u, EdgeOperator::L2Weight) ==
        std::vector<double>{0, 0, 0});
}

TEST_CASE("edge operators are symmetric in their endpoints") {
  Rng rng(42);
  std::vector<double> u(6), v(6);
  for (auto& z : u) z = rng.next_uniform(-2, 2);
  for (auto& z : v) z = rng.next_uniform(-2, 2);
  for (EdgeOperator op : {EdgeOperator::Average, EdgeOperator::Hadamard,
                          EdgeOperator::L1Weight, EdgeOperator::L2Weight})
    CHECK(compose_edge_feature(u, v, op) == compose_edge_feature(v, u, op));

  // squared difference is the square of the absolute difference
  const auto l1 = compose_edge_feature(u, v, EdgeOperator::L1Weight);
  const auto l2 = compose_edge_feature(u, v, EdgeOperator::L2Weight);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(l2[i] == l1[i] * l1[i]);
}

TEST_CASE("edge operator names round-trip and bad input is rejected") {
  for (EdgeOperator op : {EdgeOperator::Average, EdgeOperator::Hadamard,
                          EdgeOperator::L1Weight, EdgeOperator::L2Weight})
    CHECK(parse_edge_operator(edge_operator_name(op)) == op);
  CHECK_THROWS_AS(parse_edge_operator("cosine"), std::invalid_argument);

  const std::vector<double> u = {1, 2};
  const std::vector<double> w = {1, 2, 3};
  CHECK_THROWS_AS(compose_edge_feature(u, w, EdgeOperator::Average),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// link dataset

TEST_CASE("link dataset is balanced, ordered, and honest about adjacency") {
  const SignedGraph g = community_graph(20, 0.3, 0.15, 5);
  const LinkDataset ds = build_link_dataset(g, 7);

  std::size_t negatives = 0;
  for (const auto& e : g.edges())
    if (e.sign == Sign::Negative) ++negatives;
  REQUIRE(negatives > 0);
  CHECK(ds.class_counts[0] == negatives);
  CHECK(ds.class_counts[1] == negatives);
  CHECK(ds.class_counts[2] == negatives);
  REQUIRE(ds.examples.size() == 3 * negatives);

  // section order: negatives, positives, fakes
  for (std::size_t i = 0; i < ds.examples.size(); ++i) {
    const LinkClass expect = i < negatives            ? LinkClass::Negative
                             : i < 2 * negatives      ? LinkClass::Positive
                                                      : LinkClass::Fake;
    CHECK(ds.examples[i].cls == expect);
  }

  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& ex : ds.examples) {
    CHECK(ex.u < ex.v);  // undirected pairs are canonicalized
    CHECK(seen.emplace(ex.u, ex.v).second);  // no duplicates anywhere
    const auto sign = g.edge_sign(ex.u, ex.v);
    switch (ex.cls) {
      case LinkClass::Negative: CHECK(sign == Sign::Negative); break;
      case LinkClass::Positive: CHECK(sign == Sign::Positive); break;
      case LinkClass::Fake: CHECK(!sign.has_value()); break;
    }
  }

  CHECK(build_link_dataset(g, 7) == ds);         // deterministic
  CHECK(build_link_dataset(g, 8) != ds);         // seed moves the sampled classes
}

TEST_CASE("a triangle leaves no room for fake edges") {
  SignedGraph g(/*directed=*/false);
  g.intern("a");
  g.intern("b");
  g.intern("c");
  g.add_edge(0, 1, Sign::Positive);
  g.add_edge(0, 2, Sign::Positive);
  g.add_edge(1, 2, Sign::Negative);
  CHECK_THROWS_WITH_AS(build_link_dataset(g, 1),
                       doctest::Contains("non-adjacent"), std::runtime_error);
}

TEST_CASE("degenerate sign mixes are rejected") {
  SignedGraph all_pos(/*directed=*/false);
  all_pos.intern("a");
  all_pos.intern("b");
  all_pos.add_edge(0, 1, Sign::Positive);
  CHECK_THROWS_WITH_AS(build_link_dataset(all_pos, 1),
                       doctest::Contains("negative"), std::runtime_error);

  SignedGraph mostly_neg(/*directed=*/false);
  mostly_neg.intern("a");
  mostly_neg.intern("b");
  mostly_neg.intern("c");
  mostly_neg.add_edge(0, 1, Sign::Negative);
  mostly_neg.add_edge(0, 2, Sign::Negative);
  mostly_neg.add_edge(1, 2, Sign::Positive);
  CHECK_THROWS_WITH_AS(build_link_dataset(mostly_neg, 1),
                       doctest::Contains("as many positive"), std::runtime_error);
}

// ---------------------------------------------------------------------------
// k-fold splits

TEST_CASE("plain k-fold partitions with sizes within one") {
  const auto folds = kfold_split(103, 10, 3);
  REQUIRE(folds.size() == 10);
  std::vector<std::size_t> sizes;
  for (const auto& f : folds) sizes.push_back(f.size());
  CHECK(std::count(sizes.begin(), sizes.end(), 11) == 3);
  CHECK(std::count(sizes.begin(), sizes.end(), 10) == 7);

  std::vector<char> hit(103, 0);
  for (const auto& f : folds)
    for (std::size_t i : f) {
      REQUIRE(i < 103);
      CHECK(!hit[i]);
      hit[i] = 1;
    }
  CHECK(std::all_of(hit.begin(), hit.end(), [](char c) { return c == 1; }));

  CHECK(kfold_split(103, 10, 3) == folds);
  CHECK(kfold_split(103, 10, 4) != folds);
  CHECK(kfold_split(5, 5, 1).size() == 5);  // singleton folds
  CHECK_THROWS_AS(kfold_split(4, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(kfold_split(4, 0, 1), std::invalid_argument);
}

TEST_CASE("stratified folds balance every class") {
  const std::vector<int> labels = alternating_labels(100, 2);
  const auto folds = kfold_split(labels, 10, 9);
  REQUIRE(folds.size() == 10);
  for (const auto& f : folds) {
    CHECK(f.size() == 10);
    std::size_t zeros = 0;
    for (std::size_t i : f) zeros += labels[i] == 0 ? 1 : 0;
    CHECK(zeros == 5);
  }

  // uneven classes still land within one per fold
  std::vector<int> skew(30, 0);
  std::fill(skew.begin() + 23, skew.end(), 1);  // 23 vs 7
  const auto sf = kfold_split(skew, 5, 2);
  for (const auto& f : sf) {
    std::size_t ones = 0;
    for (std::size_t i : f) ones += skew[i] == 1 ? 1 : 0;
    CHECK(ones >= 1);
    CHECK(ones <= 2);
    CHECK(f.size() == 6);
  }
}

// ---------------------------------------------------------------------------
// standardizer and logistic regression

TEST_CASE("standardizer computes per-column mean and population scale") {
  FeatureMatrix x = FeatureMatrix::zeros(4, 2);
  // column 0: 1,3,5,7 over all rows; column 1 constant
  for (std::size_t r = 0; r < 4; ++r) {
    x.row(r)[0] = 1.0 + 2.0 * static_cast<double>(r);
    x.row(r)[1] = 9.0;
  }
  const std::vector<std::size_t> rows = {0, 1, 2, 3};
  const Standardizer s = Standardizer::fit(x, rows);
  CHECK(s.mean[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(s.scale[0] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(s.mean[1] == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(s.scale[1] == 1.0);  // constant column: centering only

  std::vector<double> f = {6.0, 9.0};
  s.apply(f);
  CHECK(f[0] == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(f[1] == 0.0);

  // fitting on a subset ignores the excluded rows
  const std::vector<std::size_t> head = {0, 1};
  CHECK(Standardizer::fit(x, head).mean[0] == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<double> bad = {1.0};
  CHECK_THROWS_AS(s.apply(bad), std::invalid_argument);
  CHECK_THROWS_AS(Standardizer::fit(x, std::vector<std::size_t>{}),
                  std::invalid_argument);
}

TEST_CASE("logistic regression separates what is separable") {
  const std::size_t n = 40;
  FeatureMatrix x = FeatureMatrix::zeros(n, 2);
  std::vector<int> y(n);
  Rng rng(11);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    x.row(i)[0] = (cls == 0 ? -2.0 : 2.0) + rng.next_uniform(-0.5, 0.5);
    x.row(i)[1] = rng.next_uniform(-1, 1);
    y[i] = cls;
  }
  const LogRegModel m = train_logreg(x, y);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) correct += m.predict(x.row(i)) == y[i] ? 1 : 0;
  CHECK(correct == n);
  CHECK(m.classes == std::vector<int>{0, 1});
}

TEST_CASE("prediction ties break toward the lowest class id") {
  LogRegModel m;
  m.classes = {2, 5};
  m.weights = {{0.0}, {0.0}};
  m.intercepts = {0.7, 0.7};
  const std::vector<double> f = {1.0};
  CHECK(m.predict(f) == 2);
}

TEST_CASE("logistic regression input validation") {
  FeatureMatrix x = FeatureMatrix::zeros(3, 1);
  CHECK_THROWS_AS(train_logreg(x, {0, 0, 0}), std::invalid_argument);  // one class
  CHECK_THROWS_AS(train_logreg(x, {0, 1}), std::invalid_argument);     // row mismatch
  FeatureMatrix empty = FeatureMatrix::zeros(0, 1);
  CHECK_THROWS_AS(train_logreg(empty, {}), std::invalid_argument);
}

TEST_CASE("heavy regularization collapses to the majority class") {
  const std::size_t n = 50;
  FeatureMatrix x = random_features(n, 3, 12);
  std::vector<int> y(n, 0);
  for (std::size_t i = 0; i < n; i += 5) y[i] = 1;  // 10 of 50
  LogRegConfig cfg;
  cfg.lambda = 1000.0;
  const LogRegModel m = train_logreg(x, y, cfg);
  for (std::size_t i = 0; i < n; ++i) CHECK(m.predict(x.row(i)) == 0);
}

TEST_CASE("gradient descent reaches first-order optimality") {
  const std::size_t n = 30;
  FeatureMatrix x = random_features(n, 2, 13);
  const std::vector<int> y = alternating_labels(n, 2);
  LogRegConfig cfg;
  cfg.lambda = 1.0;  // strongly convex: the optimum is sharp and close
  cfg.iters = 10000;
  const LogRegModel m = train_logreg(x, y, cfg);

  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    std::vector<double> grad(x.cols, 0.0);
    double grad_b = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      auto row = x.row(r);
      double z = m.intercepts[c];
      for (std::size_t i = 0; i < x.cols; ++i) z += m.weights[c][i] * row[i];
      const double p = 1.0 / (1.0 + std::exp(-z));
      const double err = p - (y[r] == m.classes[c] ? 1.0 : 0.0);
      for (std::size_t i = 0; i < x.cols; ++i) grad[i] += err * row[i];
      grad_b += err;
    }
    for (std::size_t i = 0; i < x.cols; ++i) {
      const double g = grad[i] / static_cast<double>(n) + cfg.lambda * m.weights[c][i];
      CHECK(std::abs(g) < 1e-5);
    }
    CHECK(std::abs(grad_b / static_cast<double>(n)) < 1e-5);
  }
}

// ---------------------------------------------------------------------------
// cross-validation

TEST_CASE("cross-validation is deterministic and accounts for every row") {
  const std::size_t n = 60;
  FeatureMatrix x = random_features(n, 4, 21);
  const std::vector<int> y = alternating_labels(n, 3);
  EvalOptions opt;
  opt.folds = 5;

  const EvalReport a = cross_validate(x, y, opt, 31);
  const EvalReport b = cross_validate(x, y, opt, 31);
  CHECK(a == b);
  REQUIRE(a.fold_accuracy.size() == 5);
  CHECK(a.classes == std::vector<int>{0, 1, 2});

  double mean = 0;
  for (double f : a.fold_accuracy) mean += f;
  CHECK(a.mean_accuracy == doctest::Approx(mean / 5.0).epsilon(1e-12));

  std::uint64_t total = 0;
  for (const auto& row : a.confusion)
    for (std::uint64_t c : row) total += c;
  CHECK(total == n);  // each example predicted exactly once
}

TEST_CASE("standardization never sees the held-out fold") {
  const std::size_t n = 40;
  FeatureMatrix x = random_features(n, 3, 22);
  const std::vector<int> y = alternating_labels(n, 2);
  EvalOptions opt;
  opt.folds = 4;

  std::vector<FoldInfo> before;
  cross_validate(x, y, opt, 5, &before);
  REQUIRE(before.size() == 4);

  // corrupt one row that fold 0 holds out
  FeatureMatrix x2 = x;
  const std::size_t victim = before[0].test_indices[0];
  for (double& v : x2.row(victim)) v += 1000.0;

  std::vector<FoldInfo> after;
  cross_validate(x2, y, opt, 5, &after);

  CHECK(after[0].test_indices == before[0].test_indices);
  CHECK(after[0].standardizer == before[0].standardizer);  // bitwise: not in its train
  // every other fold trains on the victim row, so its standardizer moves
  for (std::size_t f = 1; f < 4; ++f)
    CHECK(after[f].standardizer != before[f].standardizer);
}

TEST_CASE("labels independent of features score at chance") {
  const std::size_t n = 400;
  FeatureMatrix x = random_features(n, 4, 23);
  const std::vector<int> y = alternating_labels(n, 2);
  EvalOptions opt;
  const EvalReport r = cross_validate(x, y, opt, 6);
  CHECK(r.mean_accuracy > 0.45);
  CHECK(r.mean_accuracy < 0.55);
}

TEST_CASE("class-revealing features score nearly perfectly") {
  const std::size_t n = 100;
  FeatureMatrix x = FeatureMatrix::zeros(n, 2);
  const std::vector<int> y = alternating_labels(n, 2);
  for (std::size_t i = 0; i < n; ++i) x.row(i)[y[i]] = 1.0;  // one-hot of the label
  EvalOptions opt;
  const EvalReport r = cross_validate(x, y, opt, 7);
  CHECK(r.mean_accuracy > 0.99);
}

// ---------------------------------------------------------------------------
// end-to-end evaluations

TEST_CASE("node classification with class-aligned rows is nearly perfect") {
  const SignedGraph g = community_graph(30, 0.2, 0.1, 8);
  SneModel m = SneModel::init(g.num_nodes(), 2, 1);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto row = m.src_row(v);
    row[0] = row[1] = 0.0;
    row[*g.node_class(v)] = 1.0;
  }
  EvalOptions opt;
  const EvalReport r =
      evaluate_node_classification(m, g, ReprMode::SourceOnly, opt, 9);
  CHECK(r.mean_accuracy > 0.99);
}

TEST_CASE("node classification requires class labels") {
  SignedGraph g(/*directed=*/false);
  g.intern("a");
  g.intern("b");
  g.add_edge(0, 1, Sign::Positive);
  const SneModel m = SneModel::init(2, 2, 1);
  EvalOptions opt;
  opt.folds = 1;
  CHECK_THROWS_WITH_AS(
      evaluate_node_classification(m, g, ReprMode::SourceOnly, opt, 1),
      doctest::Contains("node classes"), std::runtime_error);
}

TEST_CASE("an embedding table evaluates exactly like its source model") {
  const SignedGraph g = community_graph(25, 0.2, 0.12, 10);
  SneModel m = SneModel::init(g.num_nodes(), 4, 2);
  Rng rng(55);
  for (auto& v : m.src) v = rng.next_uniform(-1, 1);
  for (auto& v : m.tgt) v = rng.next_uniform(-1, 1);

  // round-trip through the text format, then evaluate both paths
  testutil::TempDir tmp;
  const std::string path = tmp.path("table.emb");
  write_embeddings(m, g, ReprMode::SourceOnly, path);
  const EmbeddingTable table = read_embeddings(path);

  EvalOptions opt;
  opt.folds = 5;
  const EvalReport via_model =
      evaluate_node_classification(m, g, ReprMode::SourceOnly, opt, 3);
  const EvalReport via_table = evaluate_node_classification(table, g, opt, 3);
  CHECK(via_model == via_table);

  const EvalReport lm = evaluate_link_prediction(m, g, ReprMode::SourceOnly,
                                                 EdgeOperator::Hadamard, opt, 3);
  const EvalReport lt =
      evaluate_link_prediction(table, g, EdgeOperator::Hadamard, opt, 3);
  CHECK(lm == lt);
  CHECK(lm.classes == std::vector<int>{0, 1, 2});
}

TEST_CASE("a table missing a node is reported by label") {
  const SignedGraph g = community_graph(5, 0.5, 0.5, 11);
  EmbeddingTable table;
  table.dim = 2;
  table.labels = {"0"};
  table.vectors = {{1.0, 2.0}};
  table.index.emplace("0", 0);
  EvalOptions opt;
  opt.folds = 2;
  CHECK_THROWS_WITH_AS(evaluate_node_classification(table, g, opt, 1),
                       doctest::Contains("missing node"), std::runtime_error);
}

TEST_CASE("random embeddings predict link classes at chance") {
  const SignedGraph g = community_graph(40, 0.15, 0.1, 12);
  EmbeddingTable table;
  table.dim = 8;
  Rng rng(66);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    table.labels.push_back(g.label(v));
    std::vector<double> vec(8);
    for (auto& z : vec) z = rng.next_uniform(-1, 1);
    table.index.emplace(table.labels.back(), v);
    table.vectors.push_back(std::move(vec));
  }
  EvalOptions opt;
  const EvalReport r =
      evaluate_link_prediction(table, g, EdgeOperator::Hadamard, opt, 13);
  CHECK(r.mean_accuracy > 1.0 / 3.0 - 0.06);
  CHECK(r.mean_accuracy < 1.0 / 3.0 + 0.06);
}

// ---------------------------------------------------------------------------
// report output

TEST_CASE("csv outputs match the documented shapes") {
  EvalReport r;
  r.fold_accuracy = {0.5, 0.75};
  r.mean_accuracy = 0.625;
  r.classes = {0, 2};
  r.confusion = {{3, 1}, {0, 4}};
  CHECK(report_to_csv(r) == "fold,accuracy\n1,0.5\n2,0.75\nmean,0.625\n");
  CHECK(confusion_to_csv(r) == "class,0,2\n0,3,1\n2,0,4\n");
}
