#include "sne/trainer.hpp"

#include <chrono>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "text_util.hpp"

namespace sne {

void TrainConfig::validate() const {
  walk.validate();
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (learning_rate < 0) throw std::invalid_argument("learning_rate must be >= 0");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (softmax.num_samples < 1) throw std::invalid_argument("neg samples must be >= 1");
  if (shuffle && !corpus_path.empty())
    throw std::invalid_argument("shuffle requires an in-memory corpus, not --corpus");
  if (threads > 1 && !corpus_path.empty())
    throw std::invalid_argument("parallel mode requires an in-memory corpus");
  if (checkpoint_every > 0 && checkpoint_path.empty())
    throw std::invalid_argument("checkpoint_every needs a checkpoint path");
  if (checkpoint_every > 0 && threads > 1)
    throw std::invalid_argument("checkpointing is only supported in sequential mode");
}

namespace {

std::vector<std::string> graph_labels(const SignedGraph& graph) {
  std::vector<std::string> labels;
  labels.reserve(graph.num_nodes());
  for (NodeId v = 0; v < graph.num_nodes(); ++v) labels.push_back(graph.label(v));
  return labels;
}

struct TrainState {
  SneModel model;
  AdagradState ada;
  std::uint64_t first_epoch = 0;
  std::uint64_t first_epoch_start = 0;
  double first_epoch_nll_sum = 0;
  std::vector<double> epoch_mean_nll;
};

TrainResult run_training(const SignedGraph& graph, const TrainConfig& cfg, TrainState st) {
  const auto t0 = std::chrono::steady_clock::now();
  NegativeSampler sampler = NegativeSampler::for_graph(graph, cfg.softmax.distribution);
  const std::vector<std::string> labels = graph_labels(graph);
  std::uint64_t visited = 0;  // this run only; drives the checkpoint cadence

  std::vector<WalkSample> corpus;
  std::optional<CorpusReader> reader;
  std::uint64_t corpus_size = 0;
  if (cfg.corpus_path.empty()) {
    WalkConfig wc = cfg.walk;
    wc.seed = cfg.seed;
    corpus = generate_samples(graph, wc);
    corpus_size = corpus.size();
    if (corpus_size == 0)
      throw std::runtime_error(
          "corpus is empty: every walk is shorter than the window (path length too "
          "long for this graph?)");
  } else {
    reader.emplace(cfg.corpus_path);
  }

  auto save = [&](std::uint64_t epoch, std::uint64_t done_in_epoch, double nll_sum) {
    Checkpoint ckpt;
    ckpt.model = st.model;
    ckpt.state = st.ada;
    ckpt.labels = labels;
    ckpt.epochs_done = epoch;
    ckpt.samples_done = done_in_epoch;
    ckpt.epoch_nll_sum = nll_sum;
    ckpt.epoch_mean_nll = st.epoch_mean_nll;
    save_checkpoint(ckpt, cfg.checkpoint_path);
  };

  for (std::uint64_t epoch = st.first_epoch; epoch < static_cast<std::uint64_t>(cfg.epochs);
       ++epoch) {
    const std::uint64_t start = (epoch == st.first_epoch) ? st.first_epoch_start : 0;
    double nll_sum = (epoch == st.first_epoch) ? st.first_epoch_nll_sum : 0.0;
    std::uint64_t seen = start;

    if (reader) {
      // streaming: one sequential pass over the file per epoch
      reader->rewind();
      for (std::uint64_t i = 0; i < start; ++i) {
        if (!reader->next())
          throw std::runtime_error("corpus shorter than checkpoint position");
      }
      while (auto sample = reader->next()) {
        Rng rng = negatives_rng(cfg.seed, epoch, seen);
        LossGrad lg = sampled_softmax_nll_grad(st.model, *sample, cfg.softmax, sampler, rng);
        adagrad_step(st.model, st.ada, lg.grads);
        nll_sum += lg.loss;
        ++seen;
        ++visited;
        if (cfg.checkpoint_every && visited % cfg.checkpoint_every == 0)
          save(epoch, seen, nll_sum);
      }
      if (epoch == st.first_epoch) {
        corpus_size = seen;
        if (corpus_size == 0) throw std::runtime_error("corpus file is empty");
      } else if (seen != corpus_size) {
        throw std::runtime_error("corpus file changed size between epochs");
      }
    } else {
      std::vector<std::uint64_t> order(corpus_size);
      std::iota(order.begin(), order.end(), 0);
      if (cfg.shuffle) {
        Rng srng(mix_seed(cfg.seed ^ seed_tag::shuffle, epoch));
        for (std::uint64_t i = corpus_size; i > 1; --i) {
          std::uint64_t j = srng.next_below(i);
          std::swap(order[i - 1], order[j]);
        }
      }

      if (cfg.threads == 1) {
        for (std::uint64_t p = start; p < corpus_size; ++p) {
          const WalkSample& sample = corpus[order[p]];
          Rng rng = negatives_rng(cfg.seed, epoch, p);
          LossGrad lg = sampled_softmax_nll_grad(st.model, sample, cfg.softmax, sampler, rng);
          adagrad_step(st.model, st.ada, lg.grads);
          nll_sum += lg.loss;
          ++visited;
          if (cfg.checkpoint_every && visited % cfg.checkpoint_every == 0)
            save(epoch, p + 1, nll_sum);
        }
      } else {
        // Hogwild-style shards: updates race on purpose, results are
        // nondeterministic. Loss partials are summed in shard order.
        const int nthreads = cfg.threads;
        std::vector<double> partial(nthreads, 0.0);
        std::vector<std::thread> workers;
        workers.reserve(nthreads);
        for (int w = 0; w < nthreads; ++w) {
          const std::uint64_t lo = start + (corpus_size - start) * w / nthreads;
          const std::uint64_t hi = start + (corpus_size - start) * (w + 1) / nthreads;
          workers.emplace_back([&, w, lo, hi] {
            double local = 0.0;
            for (std::uint64_t p = lo; p < hi; ++p) {
              const WalkSample& sample = corpus[order[p]];
              Rng rng = negatives_rng(cfg.seed, epoch, p);
              LossGrad lg =
                  sampled_softmax_nll_grad(st.model, sample, cfg.softmax, sampler, rng);
              adagrad_step(st.model, st.ada, lg.grads);
              local += lg.loss;
            }
            partial[w] = local;
          });
        }
        for (auto& t : workers) t.join();
        for (double v : partial) nll_sum += v;
        visited += corpus_size - start;
      }
    }
    st.epoch_mean_nll.push_back(nll_sum / static_cast<double>(corpus_size));
  }

  if (!cfg.checkpoint_path.empty())
    save(cfg.epochs, 0, 0.0);

  TrainResult result;
  result.model = std::move(st.model);
  result.state = std::move(st.ada);
  result.report.epoch_mean_nll = std::move(st.epoch_mean_nll);
  result.report.samples_processed = corpus_size * static_cast<std::uint64_t>(cfg.epochs);
  result.report.corpus_samples = corpus_size;
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace

TrainResult train(const SignedGraph& graph, const TrainConfig& cfg) {
  cfg.validate();
  if (graph.num_edges() == 0)
    throw std::runtime_error("graph has no edges: nothing to train on");

  TrainState st;
  st.model = SneModel::init(graph.num_nodes(), cfg.dim, cfg.seed, cfg.unsigned_ablation);
  st.ada = AdagradState::init(st.model, cfg.learning_rate, cfg.adagrad_eps);
  return run_training(graph, cfg, std::move(st));
}

TrainResult train(const SignedGraph& graph, const TrainConfig& cfg, const Checkpoint& resume) {
  cfg.validate();
  if (graph.num_edges() == 0)
    throw std::runtime_error("graph has no edges: nothing to train on");
  if (resume.model.num_nodes != graph.num_nodes())
    throw std::invalid_argument("checkpoint node count does not match graph");
  if (resume.model.dim != cfg.dim)
    throw std::invalid_argument("checkpoint dim does not match config");
  if (resume.model.unsigned_ablation != cfg.unsigned_ablation)
    throw std::invalid_argument("checkpoint ablation mode does not match config");
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    if (resume.labels[v] != graph.label(v))
      throw std::invalid_argument("checkpoint labels do not match graph");
  }

  TrainState st;
  st.model = resume.model;
  st.ada = resume.state;
  st.ada.eta = cfg.learning_rate;
  st.ada.eps = cfg.adagrad_eps;
  st.first_epoch = resume.epochs_done;
  st.first_epoch_start = resume.samples_done;
  st.first_epoch_nll_sum = resume.epoch_nll_sum;
  st.epoch_mean_nll = resume.epoch_mean_nll;
  return run_training(graph, cfg, std::move(st));
}

std::vector<std::pair<int, double>> training_loss_curve(const TrainReport& report) {
  std::vector<std::pair<int, double>> curve;
  curve.reserve(report.epoch_mean_nll.size());
  for (std::size_t i = 0; i < report.epoch_mean_nll.size(); ++i)
    curve.emplace_back(static_cast<int>(i) + 1, report.epoch_mean_nll[i]);
  return curve;
}

void write_loss_csv(const TrainReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write loss csv: " + path);
  out << "epoch,mean_nll\n";
  for (const auto& [epoch, nll] : training_loss_curve(report))
    out << epoch << ',' << detail::fmt_double(nll) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sne
