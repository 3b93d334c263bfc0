#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rerank/config.hpp"
#include "rerank/encoder.hpp"
#include "rerank/error.hpp"
#include "rerank/evaluation.hpp"
#include "rerank/parallel.hpp"
#include "rerank/pool.hpp"
#include "rerank/similarity.hpp"
#include "rerank/sweep.hpp"
#include "rerank/synthetic.hpp"
#include "rerank/training.hpp"

namespace rerank {

namespace {

struct CommonOpts {
  std::string pools;
  std::string scores;
  std::string checkpoint;
  std::string config_file;
  std::string out;
  std::string validation;
  std::vector<std::string> sets;
  std::vector<std::string> grids;
  std::uint64_t seed = 0;
  int workers = 1;
  bool force = false;
  CLI::Option* seed_opt = nullptr;
};

void add_config_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_file, "key=value config file")
      ->envname("RERANK_CONFIG");
  cmd->add_option("--set", o.sets, "config override key=value (repeatable)")
      ->envname("RERANK_SET");
  o.seed_opt = cmd->add_option("--seed", o.seed, "seed for all derived randomness")
                   ->envname("RERANK_SEED");
}

TrainConfig resolve_config(const CommonOpts& o) {
  TrainConfig cfg;
  if (!o.config_file.empty()) apply_settings(cfg, read_config_file(o.config_file));
  for (const std::string& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    }
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed_opt != nullptr && o.seed_opt->count() > 0) cfg.seed = o.seed;
  std::cerr << "resolved config: " << describe_config(cfg) << "\n";
  return cfg;
}

void ensure_writable(const std::filesystem::path& path, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw std::invalid_argument("refusing to overwrite " + path.string() +
                                " (pass --force)");
  }
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw DataError("write failed for " + path.string());
}

// To the file when --out was given, else to stdout.
void emit(const std::string& out, bool force, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
    return;
  }
  ensure_writable(out, force);
  write_text(out, content);
}

Corpus load_corpus(const CommonOpts& o) {
  Corpus corpus = load_pools(o.pools);
  if (!o.scores.empty()) attach_scores(o.scores, corpus);
  return corpus;
}

std::string cache_label(const Corpus& corpus, bool semantic) {
  std::size_t cached = 0;
  for (const CandidatePool& pool : corpus) {
    if (semantic ? pool.cached_semantic.has_value() : pool.cached_quality.has_value()) {
      ++cached;
    }
  }
  if (corpus.empty() || cached == corpus.size()) return "sidecar";
  if (cached == 0) return "computed";
  return "mixed";
}

std::vector<RankedPool> rank_pools(const Corpus& corpus,
                                   const std::vector<std::vector<double>>& scores,
                                   const TrainConfig& cfg, int workers) {
  const QualityMetric metric = quality_metric(cfg.metric);
  const HashedBowEmbedder embedder(HashedBowEmbedder::kDefaultDim, cfg.tokenizer);
  std::vector<RankedPool> ranked(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    ranked[i].order = ranking_order(scores[i]);
    ranked[i].lexical = pool_qualities(corpus[i], metric, cfg.tokenizer);
    ranked[i].semantic = pool_semantics(corpus[i], embedder, cfg.tokenizer);
  });
  return ranked;
}

int cmd_analyze(const CommonOpts& o) {
  const Corpus corpus = load_corpus(o);
  const TrainConfig cfg = resolve_config(o);
  std::vector<std::vector<double>> identity(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    identity[i].assign(corpus[i].candidates.size(), 0.0);  // order irrelevant here
  }
  const std::vector<RankedPool> ranked = rank_pools(corpus, identity, cfg, o.workers);
  const ZDistribution z = z_distribution(ranked);
  const IdenticalScoreStats ident =
      identical_score_stats(corpus, quality_metric(cfg.metric), cfg.tokenizer);

  nlohmann::ordered_json j;
  j["pools"] = corpus.size();
  j["z_histogram"] = z.histogram;
  j["z_share_above_one"] = z.share_above_one;
  j["identical_pools"] = ident.pools_with_duplicates;
  j["identical_score_rate"] = ident.rate;
  j["lexical_source"] = cache_label(corpus, false);
  j["semantic_source"] = cache_label(corpus, true);
  emit(o.out, o.force, j.dump(2) + "\n");
  return 0;
}

int cmd_train(const CommonOpts& o) {
  const Corpus corpus = load_corpus(o);
  const Corpus validation = o.validation.empty() ? Corpus{} : load_pools(o.validation);
  const TrainConfig cfg = resolve_config(o);

  const std::filesystem::path ckpt_path = o.out;
  const std::filesystem::path log_path = o.out + ".log.jsonl";
  ensure_writable(ckpt_path, o.force);
  ensure_writable(log_path, o.force);

  const TrainResult result = train(corpus, cfg, validation);
  save_checkpoint(ckpt_path, result.best);

  std::string log;
  for (const TrainLogEntry& e : result.log) {
    nlohmann::ordered_json rec;
    rec["step"] = e.step;
    rec["rank_loss"] = e.rank_loss;
    rec["ctr_loss"] = e.ctr_loss;
    rec["combined"] = e.combined;
    if (e.val_metric) {
      rec["val_metric"] = *e.val_metric;
    } else {
      rec["val_metric"] = nullptr;
    }
    log += rec.dump() + "\n";
  }
  write_text(log_path, log);

  std::cerr << "initial loss: " << result.initial_loss
            << ", final loss: " << result.final_loss
            << ", steps: " << result.last.step
            << ", best step: " << result.best.step << "\n";
  return 0;
}

int cmd_rank(const CommonOpts& o) {
  const Checkpoint cp = load_checkpoint(o.checkpoint);
  const auto scorer = make_scorer(cp);
  const Corpus corpus = load_pools(o.pools);
  std::cerr << "resolved config: " << describe_config(cp.config) << "\n";

  std::vector<std::vector<double>> scores(corpus.size());
  parallel_for(corpus.size(), o.workers, [&](std::size_t i) {
    scores[i] = scorer->score(corpus[i]);
  });

  std::string out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CandidatePool& pool = corpus[i];
    const std::vector<std::size_t> order = ranking_order(scores[i]);
    nlohmann::ordered_json rec;
    rec["id"] = pool.document.id;
    rec["document"] = pool.document.text;
    rec["sentences"] = pool.document.sentences;
    rec["reference"] = pool.reference;
    rec["candidates"] = pool.candidates;
    rec["scores"] = scores[i];
    rec["order"] = order;
    rec["selected"] = select_best(scores[i]);
    out += rec.dump() + "\n";
  }
  emit(o.out, o.force, out);
  return 0;
}

int cmd_evaluate(const CommonOpts& o) {
  Corpus corpus = load_corpus(o);
  const TrainConfig cfg = resolve_config(o);

  std::vector<std::vector<double>> scores(corpus.size());
  if (!o.checkpoint.empty()) {
    const auto scorer = make_scorer(load_checkpoint(o.checkpoint));
    parallel_for(corpus.size(), o.workers, [&](std::size_t i) {
      scores[i] = scorer->score(corpus[i]);
    });
  } else {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (!corpus[i].model_scores) {
        throw DataError("evaluate: pool \"" + corpus[i].document.id +
                        "\" carries no scores; pass --checkpoint or rank first");
      }
      scores[i] = *corpus[i].model_scores;
    }
  }

  const std::vector<RankedPool> ranked = rank_pools(corpus, scores, cfg, o.workers);
  const RankingReport report = aggregate_report(corpus, ranked, cfg.metric, cfg.tokenizer);
  const std::string report_json = render_report_json(report);

  if (o.out.empty()) {
    std::cout << report_json;
    return 0;
  }
  std::filesystem::path base(o.out);
  base.replace_extension();
  const std::filesystem::path pools_csv = base.string() + ".pools.csv";
  const std::filesystem::path hist_csv = base.string() + ".hist.csv";
  ensure_writable(o.out, o.force);
  ensure_writable(pools_csv, o.force);
  ensure_writable(hist_csv, o.force);
  write_text(o.out, report_json);
  write_text(pools_csv, render_pool_csv(corpus, ranked));
  write_text(hist_csv, render_histogram_csv(report));
  return 0;
}

int cmd_sweep(const CommonOpts& o) {
  const Corpus corpus = load_corpus(o);
  const Corpus validation = o.validation.empty() ? Corpus{} : load_pools(o.validation);
  const TrainConfig base = resolve_config(o);

  std::map<std::string, std::vector<std::string>> grid;
  for (const std::string& spec : o.grids) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--grid expects key=v1,v2,..., got '" + spec + "'");
    }
    const std::string key = spec.substr(0, eq);
    if (grid.count(key)) {
      throw std::invalid_argument("--grid key '" + key + "' given twice");
    }
    std::vector<std::string> values;
    std::string rest = spec.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const std::size_t comma = rest.find(',', pos);
      const std::string v = rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                        : comma - pos);
      if (!v.empty()) values.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (values.empty()) {
      throw std::invalid_argument("--grid key '" + key + "' has no values");
    }
    grid[key] = std::move(values);
  }

  const std::vector<SweepCell> cells = sweep(grid, corpus, base, validation);
  emit(o.out, o.force, render_sweep_csv(cells));
  return 0;
}

struct SyntheticOpts {
  int docs = 100;
  int candidates = 8;
  std::vector<double> noise;
  int fp_per_pool = 0;
  double fp_max_similarity = 0.85;
  std::string scores_out;
};

int cmd_gen_synthetic(const CommonOpts& o, const SyntheticOpts& s) {
  const TrainConfig cfg = resolve_config(o);
  SyntheticConfig scfg;
  scfg.n_docs = s.docs;
  scfg.m_candidates = s.candidates;
  if (!s.noise.empty()) scfg.noise_levels = s.noise;
  scfg.fp_per_pool = s.fp_per_pool;
  scfg.fp_max_similarity = s.fp_max_similarity;
  scfg.seed = cfg.seed;

  ensure_writable(o.out, o.force);
  if (!s.scores_out.empty()) ensure_writable(s.scores_out, o.force);

  SyntheticCorpus corpus = generate_synthetic_corpus(scfg);
  write_pools(o.out, corpus.pools);

  if (!s.scores_out.empty()) {
    const QualityMetric metric = quality_metric(cfg.metric);
    const HashedBowEmbedder embedder(HashedBowEmbedder::kDefaultDim, cfg.tokenizer);
    parallel_for(corpus.pools.size(), o.workers, [&](std::size_t i) {
      CandidatePool& pool = corpus.pools[i];
      pool.cached_quality = pool_qualities(pool, metric, cfg.tokenizer);
      pool.cached_semantic = pool_semantics(pool, embedder, cfg.tokenizer);
    });
    write_scores(s.scores_out, corpus.pools);
  }
  std::cerr << "generated " << corpus.pools.size() << " pools ("
            << s.candidates << " candidates + " << s.fp_per_pool
            << " injected per pool)\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const argv[]) {
  CLI::App app{"candidate-summary re-ranking toolkit"};
  app.require_subcommand(1);

  CommonOpts analyze_o, train_o, rank_o, evaluate_o, sweep_o, synth_o;
  SyntheticOpts synth_s;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "z-distribution and identical-score statistics of a pools file");
  analyze->add_option("--pools", analyze_o.pools, "pools JSONL")
      ->required()
      ->envname("RERANK_POOLS");
  analyze->add_option("--scores", analyze_o.scores, "score sidecar JSONL")
      ->envname("RERANK_SCORES");
  analyze->add_option("--workers", analyze_o.workers, "pool-level parallelism")
      ->envname("RERANK_WORKERS")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--out", analyze_o.out, "report path (default stdout)")
      ->envname("RERANK_OUT");
  analyze->add_flag("--force", analyze_o.force, "allow overwriting existing outputs")
      ->envname("RERANK_FORCE");
  add_config_flags(analyze, analyze_o);

  CLI::App* train_cmd =
      app.add_subcommand("train", "fit a re-ranker; writes checkpoint + step log");
  train_cmd->add_option("--pools", train_o.pools, "training pools JSONL")
      ->required()
      ->envname("RERANK_POOLS");
  train_cmd->add_option("--scores", train_o.scores, "score sidecar JSONL")
      ->envname("RERANK_SCORES");
  train_cmd->add_option("--validation", train_o.validation, "validation pools JSONL")
      ->envname("RERANK_VALIDATION");
  train_cmd->add_option("--out", train_o.out, "checkpoint path (log at <out>.log.jsonl)")
      ->required()
      ->envname("RERANK_OUT");
  train_cmd->add_flag("--force", train_o.force, "allow overwriting existing outputs")
      ->envname("RERANK_FORCE");
  add_config_flags(train_cmd, train_o);

  CLI::App* rank_cmd = app.add_subcommand(
      "rank", "score pools with a checkpoint; JSONL with scores/order/selected");
  rank_cmd->add_option("--pools", rank_o.pools, "pools JSONL")
      ->required()
      ->envname("RERANK_POOLS");
  rank_cmd->add_option("--checkpoint", rank_o.checkpoint, "trained checkpoint")
      ->required()
      ->envname("RERANK_CHECKPOINT");
  rank_cmd->add_option("--workers", rank_o.workers, "pool-level parallelism")
      ->envname("RERANK_WORKERS")
      ->check(CLI::PositiveNumber);
  rank_cmd->add_option("--out", rank_o.out, "output path (default stdout)")
      ->envname("RERANK_OUT");
  rank_cmd->add_flag("--force", rank_o.force, "allow overwriting existing outputs")
      ->envname("RERANK_FORCE");

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "full ranking report from ranked pools or a checkpoint");
  evaluate->add_option("--pools", evaluate_o.pools, "pools JSONL (rank output works)")
      ->required()
      ->envname("RERANK_POOLS");
  evaluate->add_option("--scores", evaluate_o.scores, "score sidecar JSONL")
      ->envname("RERANK_SCORES");
  evaluate->add_option("--checkpoint", evaluate_o.checkpoint,
                       "checkpoint (overrides embedded scores)")
      ->envname("RERANK_CHECKPOINT");
  evaluate->add_option("--workers", evaluate_o.workers, "pool-level parallelism")
      ->envname("RERANK_WORKERS")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--out", evaluate_o.out,
                       "report path; also writes <stem>.pools.csv and <stem>.hist.csv")
      ->envname("RERANK_OUT");
  evaluate->add_flag("--force", evaluate_o.force, "allow overwriting existing outputs")
      ->envname("RERANK_FORCE");
  add_config_flags(evaluate, evaluate_o);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "train/evaluate over a config grid; CSV table");
  sweep_cmd->add_option("--pools", sweep_o.pools, "pools JSONL")
      ->required()
      ->envname("RERANK_POOLS");
  sweep_cmd->add_option("--scores", sweep_o.scores, "score sidecar JSONL")
      ->envname("RERANK_SCORES");
  sweep_cmd->add_option("--validation", sweep_o.validation, "validation pools JSONL")
      ->envname("RERANK_VALIDATION");
  sweep_cmd
      ->add_option("--grid", sweep_o.grids,
                   "grid axis key=v1,v2,... (repeatable; 'candidates' truncates pools)")
      ->envname("RERANK_GRID");
  sweep_cmd->add_option("--out", sweep_o.out, "CSV path (default stdout)")
      ->envname("RERANK_OUT");
  sweep_cmd->add_flag("--force", sweep_o.force, "allow overwriting existing outputs")
      ->envname("RERANK_FORCE");
  add_config_flags(sweep_cmd, sweep_o);

  CLI::App* synth = app.add_subcommand(
      "gen-synthetic", "deterministic synthetic corpus with known noise structure");
  synth->add_option("--out", synth_o.out, "pools JSONL path")
      ->required()
      ->envname("RERANK_OUT");
  synth->add_option("--scores-out", synth_s.scores_out,
                    "also write a quality/semantic sidecar here")
      ->envname("RERANK_SCORES_OUT");
  synth->add_option("--docs", synth_s.docs, "document count")
      ->envname("RERANK_DOCS")
      ->check(CLI::PositiveNumber);
  synth->add_option("--candidates", synth_s.candidates, "candidates per document")
      ->envname("RERANK_CANDIDATES")
      ->check(CLI::PositiveNumber);
  synth->add_option("--noise", synth_s.noise,
                    "comma-separated noise levels, strictly increasing in [0,1]")
      ->delimiter(',')
      ->envname("RERANK_NOISE");
  synth->add_option("--fp-per-pool", synth_s.fp_per_pool,
                    "injected false positives per pool")
      ->envname("RERANK_FP_PER_POOL")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--fp-max-sim", synth_s.fp_max_similarity,
                    "embedder-similarity ceiling for injected false positives")
      ->envname("RERANK_FP_MAX_SIM");
  synth->add_option("--workers", synth_o.workers, "sidecar computation parallelism")
      ->envname("RERANK_WORKERS")
      ->check(CLI::PositiveNumber);
  synth->add_flag("--force", synth_o.force, "allow overwriting existing outputs")
      ->envname("RERANK_FORCE");
  add_config_flags(synth, synth_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(analyze)) return cmd_analyze(analyze_o);
    if (app.got_subcommand(train_cmd)) return cmd_train(train_o);
    if (app.got_subcommand(rank_cmd)) return cmd_rank(rank_o);
    if (app.got_subcommand(evaluate)) return cmd_evaluate(evaluate_o);
    if (app.got_subcommand(sweep_cmd)) return cmd_sweep(sweep_o);
    if (app.got_subcommand(synth)) return cmd_gen_synthetic(synth_o, synth_s);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace rerank
