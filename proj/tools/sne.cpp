// sne: signed-network embedding pipeline driver.
//
// Subcommands cover the full workflow: stats | walk | train | export |
// eval-nodes | eval-links | sweep | synth. Every command is deterministic
// given its flags and --seed, so identical invocations produce byte-identical
// output files.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sne/eval.hpp"
#include "sne/graph.hpp"
#include "sne/model_io.hpp"
#include "sne/synthetic.hpp"
#include "sne/trainer.hpp"
#include "sne/walk.hpp"

namespace {

using namespace sne;

struct GraphFlags {
  std::string edges;
  bool directed = false;
  std::string conflicts = "error";
};

void add_graph_flags(CLI::App& cmd, GraphFlags& g) {
  cmd.add_option("--edges", g.edges, "signed edge list: <src> <dst> <1|-1> per line")
      ->required()
      ->check(CLI::ExistingFile);
  cmd.add_flag("--directed", g.directed, "treat edges as directed");
  cmd.add_option("--resolve-conflicts", g.conflicts,
                 "same pair with both signs: error out or drop the pair")
      ->check(CLI::IsMember({"error", "drop"}));
}

SignedGraph load_graph(const GraphFlags& g) {
  const auto policy =
      g.conflicts == "drop" ? ConflictPolicy::Drop : ConflictPolicy::Error;
  return load_edge_list(g.edges, g.directed, policy);
}

void report_drops(const SignedGraph& g) {
  if (g.self_loops())
    std::fprintf(stderr, "note: dropped %zu self-loop(s)\n", g.self_loops());
  if (g.duplicate_edges())
    std::fprintf(stderr, "note: ignored %zu duplicate edge line(s)\n",
                 g.duplicate_edges());
  if (g.conflict_pairs())
    std::fprintf(stderr, "note: dropped %zu sign-conflicted pair(s)\n",
                 g.conflict_pairs());
}

// --config support. CLI11 reads config files only on the app it parses from,
// never on a subcommand, so the file is spliced into the argument list by
// hand before parsing: each `key=value` line becomes `--key=value` right
// after the subcommand name. Keys already present on the command line are
// skipped, which is what makes explicit flags override the file.
void add_config_flag(CLI::App& cmd, std::string& path) {
  cmd.add_option("--config", path, "read flag defaults from a key=value file")
      ->check(CLI::ExistingFile);
}

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  return s.substr(begin, s.find_last_not_of(" \t\r\n") - begin + 1);
}

std::string config_path_in(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

void splice_config_defaults(std::vector<std::string>& args) {
  if (args.empty() || args.front().empty() || args.front().front() == '-')
    return;  // no subcommand to apply defaults to
  const std::string path = config_path_in(args);
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) return;  // the option's ExistingFile check reports this
  std::set<std::string> given;  // "--key" tokens already on the command line
  for (const auto& arg : args)
    if (arg.rfind("--", 0) == 0) given.insert(arg.substr(0, arg.find('=')));
  std::vector<std::string> defaults;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string item = trimmed(line);
    if (item.empty() || item.front() == '#') continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ConfigError(path + ':' + std::to_string(line_no) +
                             ": expected key=value");
    const std::string flag = "--" + trimmed(item.substr(0, eq));
    if (!given.count(flag))
      defaults.push_back(flag + '=' + trimmed(item.substr(eq + 1)));
  }
  args.insert(args.begin() + 1, defaults.begin(), defaults.end());
}

void add_walk_flags(CLI::App& cmd, WalkConfig& w) {
  cmd.add_option("--walk-len", w.walk_length, "steps per random walk (L)");
  cmd.add_option("--walks-per-node", w.walks_per_node, "walks started per node (t)");
  cmd.add_option("--path-len", w.window_path_len, "context path length (l)");
}

struct EvalFlags {
  EvalOptions opt;
  std::uint64_t seed = 1;
  std::string out;
  std::string confusion_out;
};

void add_eval_flags(CLI::App& cmd, EvalFlags& e) {
  cmd.add_option("--folds", e.opt.folds, "cross-validation folds");
  cmd.add_option("--lambda", e.opt.logreg.lambda, "logistic-regression L2 strength");
  cmd.add_option("--iters", e.opt.logreg.iters, "logistic-regression iterations");
  cmd.add_option("--seed", e.seed, "fold-split and dataset seed");
  cmd.add_option("--out", e.out, "write per-fold accuracy CSV here");
  cmd.add_option("--confusion-out", e.confusion_out, "write confusion-matrix CSV here");
}

void add_cv_flags(CLI::App& cmd, EvalOptions& opt) {
  cmd.add_option("--folds", opt.folds, "cross-validation folds");
  cmd.add_option("--lambda", opt.logreg.lambda, "logistic-regression L2 strength");
  cmd.add_option("--iters", opt.logreg.iters, "logistic-regression iterations");
}

void finish_eval(const EvalReport& report, const EvalFlags& flags) {
  if (!flags.out.empty()) write_report_csv(report, flags.out);
  if (!flags.confusion_out.empty()) write_confusion_csv(report, flags.confusion_out);
  std::printf("mean accuracy %.4f over %zu folds\n", report.mean_accuracy,
              report.fold_accuracy.size());
}

// ---------------------------------------------------------------------------

void run_stats(const GraphFlags& gf) {
  const SignedGraph g = load_graph(gf);
  const GraphStats s = degree_stats(g);
  std::printf("%zu nodes, %zu positive, %zu negative\n", s.num_nodes,
              s.positive_edges, s.negative_edges);
  report_drops(g);
}

struct WalkFlags {
  GraphFlags graph;
  WalkConfig cfg;
  std::string out;
};

void run_walk(const WalkFlags& f) {
  const SignedGraph g = load_graph(f.graph);
  write_corpus(g, f.cfg, f.out);
  std::printf("wrote corpus to %s\n", f.out.c_str());
}

struct TrainFlags {
  GraphFlags graph;
  TrainConfig cfg;
  std::string mode = "st";
  std::string neg_dist = "uniform";
  bool no_correction = false;
  std::string out;
  std::string loss_csv;
  std::string resume;
};

void add_train_flags(CLI::App& cmd, TrainFlags& f) {
  add_graph_flags(cmd, f.graph);
  cmd.add_option("--dim", f.cfg.dim, "embedding dimension d");
  add_walk_flags(cmd, f.cfg.walk);
  cmd.add_option("--neg-samples", f.cfg.softmax.num_samples,
                 "sampled-softmax negatives k");
  cmd.add_option("--neg-dist", f.neg_dist, "negative-sampling distribution")
      ->check(CLI::IsMember({"uniform", "degree"}));
  cmd.add_flag("--no-correction", f.no_correction,
               "drop the ln(k q) proposal correction from sampled scores");
  cmd.add_option("--lr", f.cfg.learning_rate, "Adagrad base learning rate");
  cmd.add_option("--epochs", f.cfg.epochs, "passes over the corpus");
  cmd.add_option("--seed", f.cfg.seed, "seed for init, walks, and negatives");
  cmd.add_option("--mode", f.mode, "representation written to --out: s or st")
      ->check(CLI::IsMember({"s", "st"}));
  cmd.add_flag("--unsigned-ablation", f.cfg.unsigned_ablation,
               "tie the positive and negative context vectors (sign-blind)");
  cmd.add_flag("--shuffle", f.cfg.shuffle, "shuffle sample order each epoch");
  cmd.add_option("--threads", f.cfg.threads,
                 "workers; >1 is the racy nondeterministic mode");
  cmd.add_option("--corpus", f.cfg.corpus_path,
                 "stream samples from this corpus file instead of walking")
      ->check(CLI::ExistingFile);
  cmd.add_option("--checkpoint-out", f.cfg.checkpoint_path, "checkpoint file");
  cmd.add_option("--checkpoint-every", f.cfg.checkpoint_every,
                 "samples between checkpoints (0 = only final)");
  cmd.add_option("--resume", f.resume, "resume training from this checkpoint")
      ->check(CLI::ExistingFile);
}

TrainResult run_train_common(const SignedGraph& g, TrainFlags& f) {
  f.cfg.softmax.distribution = f.neg_dist == "degree"
                                   ? NegDistribution::LogUniformByDegreeRank
                                   : NegDistribution::Uniform;
  f.cfg.softmax.log_correction = !f.no_correction;
  return f.resume.empty() ? train(g, f.cfg)
                          : train(g, f.cfg, load_checkpoint(f.resume));
}

void run_train(TrainFlags& f) {
  const SignedGraph g = load_graph(f.graph);
  report_drops(g);
  const TrainResult res = run_train_common(g, f);
  write_embeddings(res.model, g, parse_repr_mode(f.mode), f.out);
  if (!f.loss_csv.empty()) write_loss_csv(res.report, f.loss_csv);
  const auto& nll = res.report.epoch_mean_nll;
  std::printf("trained %llu samples (%llu per epoch) in %.1fs, mean NLL %.4f -> %.4f\n",
              static_cast<unsigned long long>(res.report.samples_processed),
              static_cast<unsigned long long>(res.report.corpus_samples),
              res.report.wall_seconds, nll.front(), nll.back());
  std::printf("wrote embeddings to %s\n", f.out.c_str());
}

struct ExportFlags {
  std::string checkpoint;
  std::string mode = "st";
  std::string out;
};

void run_export(const ExportFlags& f) {
  const Checkpoint ckpt = load_checkpoint(f.checkpoint);
  write_embeddings(ckpt.model, ckpt.labels, parse_repr_mode(f.mode), f.out);
  std::printf("wrote embeddings to %s\n", f.out.c_str());
}

struct EvalNodesFlags {
  GraphFlags graph;
  std::string classes;
  std::string embeddings;
  EvalFlags eval;
};

void run_eval_nodes(const EvalNodesFlags& f) {
  SignedGraph g = load_graph(f.graph);
  load_node_classes(f.classes, g);
  const EmbeddingTable table = read_embeddings(f.embeddings);
  finish_eval(evaluate_node_classification(table, g, f.eval.opt, f.eval.seed), f.eval);
}

struct EvalLinksFlags {
  GraphFlags graph;
  std::string embeddings;
  std::string op = "hadamard";
  EvalFlags eval;
};

void run_eval_links(const EvalLinksFlags& f) {
  const SignedGraph g = load_graph(f.graph);
  const EmbeddingTable table = read_embeddings(f.embeddings);
  finish_eval(evaluate_link_prediction(table, g, parse_edge_operator(f.op),
                                       f.eval.opt, f.eval.seed),
              f.eval);
}

struct SweepFlags {
  TrainFlags train;
  std::string classes;
  std::string param = "dim";
  std::vector<int> values;
  std::string task = "nodes";
  std::string op = "hadamard";
  EvalFlags eval;  // eval.out reused as the sweep CSV path
};

void run_sweep(SweepFlags& f) {
  f.eval.seed = f.train.cfg.seed;  // one seed drives training and evaluation
  SignedGraph g = load_graph(f.train.graph);
  if (f.task == "nodes") {
    if (f.classes.empty())
      throw std::runtime_error("sweep --task nodes needs --classes");
    load_node_classes(f.classes, g);
  }

  std::string csv = "value,mean_accuracy\n";
  for (int value : f.values) {
    TrainFlags run = f.train;
    if (f.param == "dim" || f.param == "d")
      run.cfg.dim = value;
    else if (f.param == "neg-samples" || f.param == "k")
      run.cfg.softmax.num_samples = value;
    else
      run.cfg.walk.window_path_len = value;  // path-len / l

    const TrainResult res = run_train_common(g, run);
    const ReprMode mode = parse_repr_mode(f.train.mode);
    const EvalReport report =
        f.task == "nodes"
            ? evaluate_node_classification(res.model, g, mode, f.eval.opt, f.eval.seed)
            : evaluate_link_prediction(res.model, g, mode, parse_edge_operator(f.op),
                                       f.eval.opt, f.eval.seed);
    csv += std::to_string(value);
    csv += ',';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", report.mean_accuracy);
    csv += buf;
    csv += '\n';
    std::printf("%s=%d -> mean accuracy %.4f\n", f.param.c_str(), value,
                report.mean_accuracy);
  }

  std::ofstream out(f.eval.out);
  if (!out) throw std::runtime_error("cannot write sweep csv: " + f.eval.out);
  out << csv;
}

struct SynthFlags {
  SyntheticConfig cfg;
  std::string out;
  std::string classes_out;
};

void run_synth(const SynthFlags& f) {
  const SignedGraph g = make_two_community_graph(f.cfg);
  write_edge_list(g, f.out);
  if (!f.classes_out.empty()) {
    std::ofstream out(f.classes_out);
    if (!out) throw std::runtime_error("cannot write classes: " + f.classes_out);
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      out << g.label(v) << ' ' << *g.node_class(v) << '\n';
  }
  const GraphStats s = degree_stats(g);
  std::printf("%zu nodes, %zu positive, %zu negative\n", s.num_nodes,
              s.positive_edges, s.negative_edges);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signed-network embeddings: walk, train, export, evaluate"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  std::string config_path;  // shared slot: only one subcommand ever parses

  auto* stats = app.add_subcommand("stats", "print node and signed-edge counts");
  add_config_flag(*stats, config_path);
  GraphFlags stats_flags;
  add_graph_flags(*stats, stats_flags);
  stats->callback([&] { run_stats(stats_flags); });

  auto* walk = app.add_subcommand("walk", "write a random-walk sample corpus");
  add_config_flag(*walk, config_path);
  WalkFlags walk_flags;
  add_graph_flags(*walk, walk_flags.graph);
  add_walk_flags(*walk, walk_flags.cfg);
  walk->add_option("--seed", walk_flags.cfg.seed, "walk seed");
  walk->add_option("--out", walk_flags.out, "corpus output file")->required();
  walk->callback([&] { run_walk(walk_flags); });

  auto* train = app.add_subcommand("train", "train embeddings on a signed graph");
  add_config_flag(*train, config_path);
  TrainFlags train_flags;
  add_train_flags(*train, train_flags);
  train->add_option("--out", train_flags.out, "embedding output file")->required();
  train->add_option("--loss-csv", train_flags.loss_csv, "per-epoch mean NLL CSV");
  train->callback([&] { run_train(train_flags); });

  auto* exp = app.add_subcommand("export", "write embeddings from a checkpoint");
  add_config_flag(*exp, config_path);
  ExportFlags export_flags;
  exp->add_option("--checkpoint", export_flags.checkpoint, "checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  exp->add_option("--mode", export_flags.mode, "representation: s or st")
      ->check(CLI::IsMember({"s", "st"}));
  exp->add_option("--out", export_flags.out, "embedding output file")->required();
  exp->callback([&] { run_export(export_flags); });

  auto* nodes = app.add_subcommand("eval-nodes",
                                   "node classification from an embedding file");
  add_config_flag(*nodes, config_path);
  EvalNodesFlags nodes_flags;
  add_graph_flags(*nodes, nodes_flags.graph);
  nodes->add_option("--classes", nodes_flags.classes, "node class file")
      ->required()
      ->check(CLI::ExistingFile);
  nodes->add_option("--embeddings", nodes_flags.embeddings, "embedding file")
      ->required()
      ->check(CLI::ExistingFile);
  add_eval_flags(*nodes, nodes_flags.eval);
  nodes->callback([&] { run_eval_nodes(nodes_flags); });

  auto* links = app.add_subcommand(
      "eval-links", "3-class link prediction from an embedding file");
  add_config_flag(*links, config_path);
  EvalLinksFlags links_flags;
  add_graph_flags(*links, links_flags.graph);
  links->add_option("--embeddings", links_flags.embeddings, "embedding file")
      ->required()
      ->check(CLI::ExistingFile);
  links->add_option("--op", links_flags.op, "edge-feature operator")
      ->check(CLI::IsMember({"average", "hadamard", "l1", "l2"}));
  add_eval_flags(*links, links_flags.eval);
  links->callback([&] { run_eval_links(links_flags); });

  auto* sweep = app.add_subcommand(
      "sweep", "train and evaluate across one hyperparameter's values");
  add_config_flag(*sweep, config_path);
  SweepFlags sweep_flags;
  add_train_flags(*sweep, sweep_flags.train);
  sweep->add_option("--classes", sweep_flags.classes,
                    "node class file (for --task nodes)")
      ->check(CLI::ExistingFile);
  sweep->add_option("--param", sweep_flags.param, "hyperparameter to vary")
      ->check(CLI::IsMember({"dim", "d", "neg-samples", "k", "path-len", "l"}));
  sweep->add_option("--values", sweep_flags.values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--task", sweep_flags.task, "evaluation task")
      ->check(CLI::IsMember({"nodes", "links"}));
  sweep->add_option("--op", sweep_flags.op, "edge operator for --task links")
      ->check(CLI::IsMember({"average", "hadamard", "l1", "l2"}));
  add_cv_flags(*sweep, sweep_flags.eval.opt);
  sweep->add_option("--out", sweep_flags.eval.out, "value-vs-accuracy CSV")->required();
  sweep->callback([&] { run_sweep(sweep_flags); });

  auto* synth = app.add_subcommand(
      "synth", "generate a planted two-community signed benchmark");
  add_config_flag(*synth, config_path);
  SynthFlags synth_flags;
  synth->add_option("--community-size", synth_flags.cfg.community_size,
                    "nodes per community");
  synth->add_option("--p-in", synth_flags.cfg.p_intra,
                    "intra-community positive-edge probability");
  synth->add_option("--p-out", synth_flags.cfg.p_inter,
                    "inter-community negative-edge probability");
  synth->add_option("--seed", synth_flags.cfg.seed, "generator seed");
  synth->add_option("--out", synth_flags.out, "edge-list output file")->required();
  synth->add_option("--classes-out", synth_flags.classes_out,
                    "node community file (<node> <class> per line)");
  synth->callback([&] { run_synth(synth_flags); });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    splice_config_defaults(args);
    std::reverse(args.begin(), args.end());  // CLI11 parses back to front
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0; usage errors exit 2
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
