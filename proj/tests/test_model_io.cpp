#include "sne/model_io.hpp"

#include <string>
#include <vector>

#include "doctest.h"
#include "sne/model.hpp"
#include "sne/rng.hpp"
#include "test_util.hpp"

using namespace sne;
using testutil::TempDir;

namespace {

SneModel noisy_model(std::size_t n, int dim, std::uint64_t seed,
                     bool ablation = false) {
  SneModel m = SneModel::init(n, dim, seed, ablation);
  Rng rng(mix_seed(seed, 0xdead));
  for (auto& x : m.src) x = rng.next_uniform(-10, 10);
  for (auto& x : m.tgt) x = rng.next_uniform(-10, 10);
  for (auto& x : m.bias) x = rng.next_uniform(-3, 3);
  return m;
}

std::vector<std::string> labels_for(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("n" + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("embedding files round-trip exactly in both modes") {
  TempDir tmp;
  const SneModel m = noisy_model(7, 3, 11);
  const auto labels = labels_for(7);

  for (ReprMode mode : {ReprMode::SourceOnly, ReprMode::Concatenated}) {
    const std::string path = tmp.path(repr_mode_name(mode) + ".emb");
    write_embeddings(m, labels, mode, path);
    const EmbeddingTable t = read_embeddings(path);

    CHECK(t.dim == representation_dim(m, mode));
    CHECK(t.mode == mode);
    REQUIRE(t.labels.size() == 7);
    for (NodeId v = 0; v < 7; ++v) {
      CHECK(t.labels[v] == labels[v]);
      CHECK(t.vectors[v] == node_representation(m, v, mode));  // bitwise
    }
    const auto* row = t.find("n3");
    REQUIRE(row != nullptr);
    CHECK(*row == node_representation(m, 3, mode));
    CHECK(t.find("absent") == nullptr);
  }
}

TEST_CASE("embedding header carries the representation length") {
  TempDir tmp;
  const SneModel m = noisy_model(4, 5, 12);
  const std::string path = tmp.path("st.emb");
  write_embeddings(m, labels_for(4), ReprMode::Concatenated, path);

  const std::string text = testutil::read_file(path);
  CHECK(text.substr(0, text.find('\n')) == "4 10 st");
}

TEST_CASE("graph-sourced embeddings use graph labels in id order") {
  TempDir tmp;
  SignedGraph g(/*directed=*/false);
  g.intern("alpha");
  g.intern("beta");
  g.add_edge(0, 1, Sign::Positive);
  const SneModel m = noisy_model(2, 2, 13);

  const std::string path = tmp.path("g.emb");
  write_embeddings(m, g, ReprMode::SourceOnly, path);
  const EmbeddingTable t = read_embeddings(path);
  CHECK(t.labels == std::vector<std::string>{"alpha", "beta"});
}

TEST_CASE("malformed embedding files are rejected") {
  TempDir tmp;
  const std::string path = tmp.path("bad.emb");

  testutil::write_file(path, "2 2 q\na 1 2\nb 3 4\n");
  CHECK_THROWS_AS(read_embeddings(path), std::runtime_error);

  testutil::write_file(path, "2 2 s\na 1 2\n");  // one row short
  CHECK_THROWS_AS(read_embeddings(path), std::runtime_error);

  testutil::write_file(path, "2 2 s\na 1 2\nb 3\n");  // short row
  CHECK_THROWS_AS(read_embeddings(path), std::runtime_error);

  testutil::write_file(path, "2 2 s\na 1 2\nb 3 x\n");  // non-numeric
  CHECK_THROWS_AS(read_embeddings(path), std::runtime_error);

  CHECK_THROWS_AS(read_embeddings(tmp.path("missing.emb")), std::runtime_error);
}

TEST_CASE("checkpoints restore training state bitwise") {
  TempDir tmp;
  Checkpoint c;
  c.model = noisy_model(5, 4, 21);
  c.state = AdagradState::init(c.model, 0.05, 1e-9);
  Rng rng(22);
  for (auto& a : c.state.src_acc) a = rng.next_uniform(0, 2);
  for (auto& a : c.state.tgt_acc) a = rng.next_uniform(0, 2);
  for (auto& a : c.state.bias_acc) a = rng.next_uniform(0, 2);
  for (auto& a : c.state.c_pos_acc) a = rng.next_uniform(0, 2);
  for (auto& a : c.state.c_neg_acc) a = rng.next_uniform(0, 2);
  c.labels = labels_for(5);
  c.epochs_done = 2;
  c.samples_done = 17;
  c.epoch_nll_sum = 123.456789012345;
  c.epoch_mean_nll = {1.5, 1.25};

  const std::string path = tmp.path("ck.bin");
  save_checkpoint(c, path);
  const Checkpoint r = load_checkpoint(path);

  CHECK(r.model.dim == c.model.dim);
  CHECK(r.model.num_nodes == c.model.num_nodes);
  CHECK(r.model.unsigned_ablation == c.model.unsigned_ablation);
  CHECK(r.model.src == c.model.src);
  CHECK(r.model.tgt == c.model.tgt);
  CHECK(r.model.c_pos == c.model.c_pos);
  CHECK(r.model.c_neg == c.model.c_neg);
  CHECK(r.model.bias == c.model.bias);
  CHECK(r.state.eta == c.state.eta);
  CHECK(r.state.eps == c.state.eps);
  CHECK(r.state.src_acc == c.state.src_acc);
  CHECK(r.state.tgt_acc == c.state.tgt_acc);
  CHECK(r.state.bias_acc == c.state.bias_acc);
  CHECK(r.state.c_pos_acc == c.state.c_pos_acc);
  CHECK(r.state.c_neg_acc == c.state.c_neg_acc);
  CHECK(r.labels == c.labels);
  CHECK(r.epochs_done == c.epochs_done);
  CHECK(r.samples_done == c.samples_done);
  CHECK(r.epoch_nll_sum == c.epoch_nll_sum);
  CHECK(r.epoch_mean_nll == c.epoch_mean_nll);
}

TEST_CASE("ablation checkpoints keep the empty negative context") {
  TempDir tmp;
  Checkpoint c;
  c.model = noisy_model(3, 2, 31, /*ablation=*/true);
  c.state = AdagradState::init(c.model);
  c.labels = labels_for(3);

  const std::string path = tmp.path("ab.bin");
  save_checkpoint(c, path);
  const Checkpoint r = load_checkpoint(path);
  CHECK(r.model.unsigned_ablation);
  CHECK(r.model.c_neg.empty());
  CHECK(r.state.c_neg_acc.empty());
  CHECK(r.model.c_pos == c.model.c_pos);
}

TEST_CASE("corrupt checkpoints are rejected") {
  TempDir tmp;
  Checkpoint c;
  c.model = noisy_model(3, 2, 41);
  c.state = AdagradState::init(c.model);
  c.labels = labels_for(3);
  const std::string path = tmp.path("ok.bin");
  save_checkpoint(c, path);

  const std::string blob = testutil::read_file(path);
  testutil::write_file(tmp.path("trunc.bin"), blob.substr(0, blob.size() / 2));
  CHECK_THROWS_AS(load_checkpoint(tmp.path("trunc.bin")), std::runtime_error);

  testutil::write_file(tmp.path("junk.bin"), "not a checkpoint at all");
  CHECK_THROWS_AS(load_checkpoint(tmp.path("junk.bin")), std::runtime_error);

  CHECK_THROWS_AS(load_checkpoint(tmp.path("missing.bin")), std::runtime_error);
}
