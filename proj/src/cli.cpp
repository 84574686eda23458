#include "rhp/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "rhp/analysis.hpp"
#include "rhp/checkpoint.hpp"
#include "rhp/config.hpp"
#include "rhp/corpus.hpp"
#include "rhp/dataset.hpp"
#include "rhp/encoder.hpp"
#include "rhp/evaluation.hpp"
#include "rhp/interpret.hpp"
#include "rhp/synthetic.hpp"
#include "rhp/text.hpp"
#include "rhp/training.hpp"
#include "rhp/transformer.hpp"

namespace rhp {

namespace fs = std::filesystem;

std::filesystem::path run_root() {
  if (const char* env = std::getenv("RHP_RUN_ROOT"); env != nullptr && *env != '\0') return env;
  return "runs";
}

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> encoder;
  std::string out;
  std::string log_level = "info";
};

struct Overrides {
  // prepare
  std::optional<std::string> reviews, reviewers, reference_date;
  bool group_by_reviewer = false;
  std::vector<double> ratios;
  // shared
  std::optional<std::string> manifest, checkpoint, split;
  // train / ablate
  std::optional<std::size_t> epochs, batch_size, max_len, text_dim;
  std::optional<double> learning_rate, dropout, weight_decay, clip_norm;
  std::optional<std::string> pretrained_model, exec;
  bool no_expertise = false, no_temporal = false, freeze_encoder = false;
  // eval
  std::vector<std::string> predictions, names;
  // analyze
  std::optional<std::string> lexicon, stopwords;
  std::optional<std::size_t> top_k, min_freq, sample_per_class;
  // explain
  std::optional<std::size_t> steps, count;
  std::vector<std::string> review_ids;
  // synth
  std::size_t synth_reviews = 200;
  std::size_t synth_reviewers = 0;
  double synth_noise = 0.05;
  double synth_cue = 0.25;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_file(path, j.dump(2) + "\n"); }

fs::path prepare_out(const std::string& out, const std::string& command) {
  const fs::path dir = out.empty() ? run_root() / command : fs::path(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

template <class T>
void apply(std::optional<T>& target_if_set, const std::optional<T>& value) {
  if (value) target_if_set = value;
}

RunConfig effective_config(const Globals& g, const Overrides& o) {
  RunConfig c = g.config.empty() ? RunConfig{} : RunConfig::load(g.config);
  if (g.seed) {
    c.seed = *g.seed;
    c.train.seed = *g.seed;
  }
  if (g.encoder) c.encoder.backend = *g.encoder;
  if (o.reviews) c.paths.reviews = *o.reviews;
  if (o.reviewers) c.paths.reviewers = *o.reviewers;
  if (o.reference_date) c.split.reference_date = *o.reference_date;
  if (o.group_by_reviewer) c.split.group_by_reviewer = true;
  if (!o.ratios.empty()) {
    if (o.ratios.size() != 3) throw DataError("--ratios takes exactly three values");
    c.split.ratios = {o.ratios[0], o.ratios[1], o.ratios[2]};
  }
  if (o.manifest) c.paths.manifest = *o.manifest;
  if (o.checkpoint) c.paths.checkpoint = *o.checkpoint;
  if (o.pretrained_model) c.paths.pretrained_model = *o.pretrained_model;
  if (o.lexicon) c.paths.lexicon = *o.lexicon;
  if (o.stopwords) c.paths.stopwords = *o.stopwords;
  if (o.epochs) c.train.epochs = *o.epochs;
  if (o.batch_size) c.train.batch_size = *o.batch_size;
  if (o.learning_rate) c.train.learning_rate = *o.learning_rate;
  if (o.dropout) c.train.dropout = *o.dropout;
  if (o.weight_decay) c.train.weight_decay = *o.weight_decay;
  if (o.clip_norm) c.train.clip_norm = *o.clip_norm;
  if (o.exec) c.train.exec = *o.exec == "serial" ? Exec::serial : Exec::parallel;
  if (o.freeze_encoder) c.train.freeze_encoder = true;
  if (o.max_len) c.model.max_len = *o.max_len;
  if (o.text_dim) c.encoder.text_dim = *o.text_dim;
  if (o.no_expertise) c.model.use_expertise = false;
  if (o.no_temporal) c.model.use_temporal = false;
  if (o.top_k) {
    c.analysis.top_k = *o.top_k;
    c.explain.top_k = *o.top_k;
  }
  if (o.min_freq) c.analysis.min_freq = *o.min_freq;
  apply(c.analysis.sample_per_class, o.sample_per_class);
  if (o.steps) c.explain.steps = *o.steps;
  if (o.count) c.explain.count = *o.count;
  if (!o.review_ids.empty()) c.explain.review_ids = o.review_ids;
  if (o.split) {
    c.eval_split = *o.split;
    c.analysis.split = *o.split;
    c.explain.split = *o.split;
  }
  // Round-trip through JSON so flag values get the same validation as file values.
  return RunConfig::from_json(c.to_json());
}

struct Prepared {
  CorpusManifest manifest;
  RawCorpus raw;
};

Prepared load_prepared(const RunConfig& cfg) {
  const fs::path path = cfg.paths.manifest.empty() ? run_root() / "prepare" / "manifest.json" : fs::path(cfg.paths.manifest);
  Prepared p;
  p.manifest = read_manifest(path);
  p.raw = load_corpus(p.manifest.reviews_path, p.manifest.reviewers_path);
  return p;
}

fs::path checkpoint_path(const RunConfig& cfg) {
  return cfg.paths.checkpoint.empty() ? run_root() / "train" / "checkpoint" : fs::path(cfg.paths.checkpoint);
}

std::vector<std::string> split_ids(const LabeledCorpus& c, const std::string& split) {
  if (split == "train") return c.train;
  if (split == "valid") return c.valid;
  if (split == "test") return c.test;
  if (split == "all") {
    std::vector<std::string> all = c.train;
    all.insert(all.end(), c.valid.begin(), c.valid.end());
    all.insert(all.end(), c.test.begin(), c.test.end());
    return all;
  }
  throw DataError("unknown split '" + split + "' (expected train, valid, test or all)");
}

std::shared_ptr<TextEncoder> training_encoder(const RunConfig& cfg, const Prepared& p) {
  if (cfg.encoder.backend == "pretrained") {
    if (cfg.paths.pretrained_model.empty()) {
      throw DataError("the pretrained encoder needs paths.pretrained_model (or --pretrained-model)");
    }
    return TransformerEncoder::from_pretrained(cfg.paths.pretrained_model, cfg.encoder.text_dim,
                                               cfg.encoder.lowercase);
  }
  const auto texts = review_texts(p.raw, p.manifest.corpus.train);
  auto vocab = Vocabulary::build(texts, cfg.encoder.lowercase, cfg.encoder.vocab_min_count, cfg.encoder.vocab_max_size);
  HashEncoder::Options opts{cfg.encoder.embedding_dim, cfg.encoder.text_dim, cfg.encoder.hash_seed};
  return std::make_shared<HashEncoder>(WordPieceTokenizer(std::move(vocab), cfg.encoder.lowercase), opts);
}

ModelConfig effective_model_config(const RunConfig& cfg, const TextEncoder& encoder) {
  ModelConfig m = cfg.model;
  m.max_len = std::min(m.max_len, encoder.max_positions());
  return m;
}

std::string predictions_jsonl(std::span<const LabeledExample> examples, std::span<const Prediction> preds) {
  std::string out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    nlohmann::json j{{"review_id", examples[i].review_id},
                     {"gold", examples[i].label},
                     {"pred", preds[i].predicted_class},
                     {"probs", preds[i].probs}};
    out += j.dump() + "\n";
  }
  return out;
}

void log_epoch(const std::string& prefix, const EpochRecord& r) {
  spdlog::info("{}epoch {}: train loss {:.4f}, valid loss {:.4f}, valid acc {:.2f}%", prefix, r.epoch, r.train_loss,
               r.valid_loss, 100.0 * r.valid_accuracy);
}

int cmd_synth(const RunConfig& cfg, const fs::path& out, const Overrides& o) {
  SyntheticOptions opts;
  opts.reviews = o.synth_reviews;
  opts.reviewers = o.synth_reviewers;
  opts.seed = cfg.seed;
  opts.noise = o.synth_noise;
  opts.text_cue_probability = o.synth_cue;
  const auto corpus = generate_synthetic(opts);
  write_synthetic(corpus, out);
  fmt::print("wrote {} reviews by {} reviewers to {}\n", corpus.reviews.size(), corpus.reviewers.size(),
             out.string());
  return 0;
}

int cmd_prepare(const RunConfig& cfg, const fs::path& out) {
  if (cfg.paths.reviews.empty() || cfg.paths.reviewers.empty()) {
    throw DataError("prepare needs both --reviews and --reviewers");
  }
  const RawCorpus raw = load_corpus(cfg.paths.reviews, cfg.paths.reviewers);
  std::optional<Date> reference;
  if (cfg.split.reference_date) reference = Date::parse(*cfg.split.reference_date);
  const LabeledSet labeled = label_reviews(raw, reference);
  const LabeledCorpus corpus = make_splits(labeled, {cfg.split.ratios, cfg.seed, cfg.split.group_by_reviewer});

  CorpusManifest manifest{fs::absolute(cfg.paths.reviews), fs::absolute(cfg.paths.reviewers), corpus};
  write_manifest(out / "manifest.json", manifest);

  nlohmann::json stats = nlohmann::json::object();
  std::string table = fmt::format("{:<8} {:>9} {:>14} {:>10}   {}\n", "Split", "#Samples", "Avg.Sentences",
                                  "Avg.Words", "classes 1..5");
  for (const auto& [name, ids] : {std::pair<std::string, const std::vector<std::string>*>{"train", &corpus.train},
                                  {"valid", &corpus.valid},
                                  {"test", &corpus.test}}) {
    const auto s = split_statistics(raw, corpus, *ids);
    stats[name] = {{"samples", s.samples},
                   {"avg_sentences", s.avg_sentences},
                   {"avg_words", s.avg_words},
                   {"class_counts", s.class_counts}};
    table += fmt::format("{:<8} {:>9} {:>14.2f} {:>10.2f}   {}\n", name, s.samples, s.avg_sentences, s.avg_words,
                         fmt::join(s.class_counts, "/"));
  }
  const auto& sum = labeled.summary;
  stats["labeling"] = {{"total", sum.total},
                       {"zero_votes", sum.zero_votes},
                       {"missing_reviewer", sum.missing_reviewer},
                       {"future_dated", sum.future_dated},
                       {"labeled", sum.labeled},
                       {"malformed_reviews", raw.report.malformed_reviews},
                       {"malformed_reviewers", raw.report.malformed_reviewers},
                       {"reference_date", labeled.reference_date.iso()}};
  write_json(out / "statistics.json", stats);
  write_file(out / "statistics.txt", table);
  fmt::print("{}", table);
  fmt::print("{} reviews loaded, {} labeled ({} without votes, {} without reviewer), reference date {}\n",
             sum.total, sum.labeled, sum.zero_votes, sum.missing_reviewer, labeled.reference_date.iso());
  return 0;
}

int cmd_train(const RunConfig& cfg, const fs::path& out) {
  const Prepared p = load_prepared(cfg);
  auto encoder = training_encoder(cfg, p);
  const ModelConfig mc = effective_model_config(cfg, *encoder);
  const Dataset data = build_dataset(p.raw, p.manifest.corpus, encoder->tokenizer(), mc.max_len, {}, cfg.train.exec);
  FusionModel model(encoder, mc, cfg.seed);
  spdlog::info("training on {} examples ({} trainable parameters)", data.train.size(),
               model.parameters().trainable_size());
  try {
    auto result = train(std::move(model), data.train, data.valid, cfg.train,
                        [](const EpochRecord& r) { log_epoch("", r); });
    save_checkpoint(out / "checkpoint", result.model, data.stats, cfg.to_json());
    write_file(out / "train_log.jsonl", result.log.to_jsonl());

    std::vector<Prediction> test_preds;
    const auto valid = evaluate_model(result.model, data.valid, cfg.train.exec);
    nlohmann::json metrics{{"best_epoch", result.log.best_epoch}, {"valid", valid.to_json()}};
    if (!data.test.empty()) {
      const auto test = evaluate_model(result.model, data.test, cfg.train.exec, &test_preds);
      metrics["test"] = test.to_json();
      write_file(out / "predictions_test.jsonl", predictions_jsonl(data.test, test_preds));
      fmt::print("best epoch {}: test Acc {:.2f}%  MAE {:.3f}  MSE {:.3f}\n", result.log.best_epoch,
                 100.0 * test.accuracy, test.mae, test.mse);
    }
    write_json(out / "metrics.json", metrics);
  } catch (const DivergenceError& e) {
    save_checkpoint(out / "diverged_checkpoint", e.last_finite(), data.stats, cfg.to_json());
    spdlog::error("last finite state saved to {}", (out / "diverged_checkpoint").string());
    throw;
  }
  return 0;
}

std::string slug(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!s.empty() && s.back() != '_') {
      s.push_back('_');
    }
  }
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

int cmd_ablate(const RunConfig& cfg, const fs::path& out) {
  const Prepared p = load_prepared(cfg);
  auto encoder = training_encoder(cfg, p);
  const ModelConfig mc = effective_model_config(cfg, *encoder);
  const Dataset data = build_dataset(p.raw, p.manifest.corpus, encoder->tokenizer(), mc.max_len, {}, cfg.train.exec);
  if (data.test.empty()) throw DataError("ablation needs a non-empty test split");
  auto runs = run_ablations(encoder, mc, data, cfg.train, cfg.seed, [](const AblationVariant& v, const EpochRecord& r) {
    log_epoch(v.name + ": ", r);
  });

  fs::create_directories(out / "logs");
  std::vector<SystemResult> systems;
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    systems.push_back({r.variant.name, r.test_metrics});
    write_file(out / "logs" / (slug(r.variant.name) + ".jsonl"), r.result.log.to_jsonl());
    nlohmann::json row{{"name", r.variant.name},
                       {"use_expertise", r.variant.use_expertise},
                       {"use_temporal", r.variant.use_temporal},
                       {"trainable_parameters", r.trainable_parameters},
                       {"best_epoch", r.result.log.best_epoch},
                       {"test", r.test_metrics.to_json()}};
    if (i > 0 && r.test_metrics.n >= 2) {
      auto sig = nlohmann::json::object();
      for (Metric m : {Metric::accuracy, Metric::mae, Metric::mse}) {
        sig[metric_name(m)] = compare_systems(r.test_metrics, runs[0].test_metrics, m).to_json();
      }
      row["significance_vs_full"] = sig;
    }
    rows.push_back(row);
  }
  const std::string table = render_metrics_table(systems, 0);
  write_json(out / "ablation.json", {{"variants", rows}});
  write_file(out / "ablation_table.txt", table);
  fmt::print("{}", table);
  return 0;
}

std::vector<std::pair<HelpfulnessClass, HelpfulnessClass>> read_prediction_pairs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open predictions file '" + path.string() + "'");
  std::vector<std::pair<HelpfulnessClass, HelpfulnessClass>> pairs;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      pairs.emplace_back(j.at("gold").get<int>(), j.at("pred").get<int>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("{}:{}: expected {{\"gold\": .., \"pred\": ..}}: {}", path.string(), no, e.what()));
    }
  }
  return pairs;
}

int cmd_eval(const RunConfig& cfg, const fs::path& out, const Overrides& o) {
  std::vector<SystemResult> systems;
  if (!o.predictions.empty()) {
    for (std::size_t i = 0; i < o.predictions.size(); ++i) {
      const auto pairs = read_prediction_pairs(o.predictions[i]);
      std::vector<HelpfulnessClass> golds, preds;
      for (const auto& [g, pr] : pairs) {
        golds.push_back(g);
        preds.push_back(pr);
      }
      const std::string name = i < o.names.size() ? o.names[i] : fs::path(o.predictions[i]).stem().string();
      systems.push_back({name, evaluate(preds, golds)});
    }
  } else {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path(cfg));
    const Prepared p = load_prepared(cfg);
    const auto ids = split_ids(p.manifest.corpus, cfg.eval_split);
    const auto examples = build_examples(p.raw, p.manifest.corpus, ids, ckpt.stats, ckpt.model.encoder().tokenizer(),
                                         ckpt.model.config().max_len, cfg.train.exec);
    std::vector<Prediction> preds;
    const auto report = evaluate_model(ckpt.model, examples, cfg.train.exec, &preds);
    write_file(out / "predictions.jsonl", predictions_jsonl(examples, preds));
    systems.push_back({"checkpoint (" + cfg.eval_split + ")", report});
  }

  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < systems.size(); ++i) {
    nlohmann::json row{{"name", systems[i].name}, {"metrics", systems[i].report.to_json(true)}};
    if (i > 0 && systems[i].report.n == systems[0].report.n && systems[i].report.n >= 2) {
      auto sig = nlohmann::json::object();
      for (Metric m : {Metric::accuracy, Metric::mae, Metric::mse}) {
        sig[metric_name(m)] = compare_systems(systems[i].report, systems[0].report, m).to_json();
      }
      row["significance_vs_first"] = sig;
    }
    rows.push_back(row);
  }
  const std::string table = render_metrics_table(systems, 0);
  write_json(out / "metrics.json", {{"systems", rows}});
  write_file(out / "metrics_table.txt", table);
  fmt::print("{}", table);
  return 0;
}

int cmd_analyze(const RunConfig& cfg, const fs::path& out) {
  const fs::path lexicon = cfg.paths.lexicon.empty() ? default_lexicon_path() : fs::path(cfg.paths.lexicon);
  const fs::path stopwords = cfg.paths.stopwords.empty() ? default_stopwords_path() : fs::path(cfg.paths.stopwords);
  const auto resources = AnalysisResources::load(lexicon, stopwords);
  const Prepared p = load_prepared(cfg);
  const auto ids = split_ids(p.manifest.corpus, cfg.analysis.split);
  AnalysisOptions opts{cfg.analysis.top_k, cfg.analysis.min_freq, cfg.analysis.sample_per_class, cfg.seed};
  const auto per_class = class_candidates(p.raw, p.manifest.corpus.labels, ids, resources, opts, cfg.train.exec);
  const auto report = analyze(per_class, opts, cfg.train.exec);
  const std::string table = render_ngram_table(report);
  write_json(out / "analysis.json", report.to_json());
  write_file(out / "analysis_table.txt", table);
  fmt::print("{}", table);
  return 0;
}

int cmd_explain(const RunConfig& cfg, const fs::path& out) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path(cfg));
  const Prepared p = load_prepared(cfg);
  std::vector<std::string> ids = cfg.explain.review_ids;
  if (ids.empty()) {
    ids = split_ids(p.manifest.corpus, cfg.explain.split);
    if (ids.size() > cfg.explain.count) ids.resize(cfg.explain.count);
  }
  if (ids.empty()) throw DataError("no reviews selected for explanation");
  const auto examples = build_examples(p.raw, p.manifest.corpus, ids, ckpt.stats, ckpt.model.encoder().tokenizer(),
                                       ckpt.model.config().max_len, cfg.train.exec);
  std::string jsonl, heat;
  for (const auto& ex : examples) {
    const auto report = attribute(ckpt.model, ex, cfg.explain.steps, std::nullopt, cfg.explain.top_k, cfg.train.exec);
    jsonl += report.to_json().dump() + "\n";
    const double span = std::abs(report.f_input - report.f_baseline);
    heat += fmt::format("review {}  gold {}  predicted {}  steps {}  completeness gap {:.3g}{}\n", ex.review_id,
                        ex.label, report.predicted_class, report.steps, report.completeness_gap,
                        span > 0 ? fmt::format(" ({:.3f}% of |F(x)-F(x')|)", 100.0 * report.completeness_gap / span)
                                 : std::string());
    heat += fmt::format("  top-{}:", report.top_k.size());
    for (const auto& t : report.top_k) heat += fmt::format(" {} ({:+.4f})", t.token, t.score);
    heat += "\n  " + render_heat(report) + "\n\n";
  }
  write_file(out / "attributions.jsonl", jsonl);
  write_file(out / "heat_report.txt", heat);
  fmt::print("{}", heat);
  return 0;
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const DivergenceError*>(&e)) return "DivergenceError";
  if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const DataError*>(&e)) return "DataError";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "InternalError";
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Review helpfulness prediction: prepare data, train, ablate, evaluate, analyze and explain."};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  Overrides o;
  app.add_option("--config", g.config, "JSON run config; flags override its values");
  app.add_option("--seed", g.seed, "Seed for splits, initialization and data order");
  app.add_option("--encoder", g.encoder, "Text encoder backend")->check(CLI::IsMember({"pretrained", "test"}));
  app.add_option("--out", g.out, "Run directory (default: $RHP_RUN_ROOT/<command> or runs/<command>)");
  app.add_option("--log-level", g.log_level, "Log level")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  auto* synth = app.add_subcommand("synth", "Write a synthetic review corpus");
  synth->add_option("--reviews", o.synth_reviews, "Number of labeled reviews");
  synth->add_option("--reviewers", o.synth_reviewers, "Number of reviewers (default: reviews / 3)");
  synth->add_option("--noise", o.synth_noise, "Standard deviation of the latent noise");
  synth->add_option("--cue-probability", o.synth_cue, "Probability that a review text carries a class cue");

  auto* prepare = app.add_subcommand("prepare", "Load, label and split a corpus");
  prepare->add_option("--reviews", o.reviews, "Review records (JSON lines)");
  prepare->add_option("--reviewers", o.reviewers, "Reviewer records (JSON lines)");
  prepare->add_option("--reference-date", o.reference_date, "Age reference date YYYY-MM-DD");
  prepare->add_flag("--group-by-reviewer", o.group_by_reviewer, "Keep each reviewer within one split");
  prepare->add_option("--ratios", o.ratios, "Train/valid/test ratios")->expected(3)->delimiter(',');

  auto add_training = [&](CLI::App* cmd) {
    cmd->add_option("--manifest", o.manifest, "Corpus manifest from prepare");
    cmd->add_option("--epochs", o.epochs);
    cmd->add_option("--batch-size", o.batch_size);
    cmd->add_option("--lr", o.learning_rate, "Learning rate");
    cmd->add_option("--dropout", o.dropout);
    cmd->add_option("--weight-decay", o.weight_decay);
    cmd->add_option("--clip-norm", o.clip_norm);
    cmd->add_option("--max-len", o.max_len, "Maximum tokens per review");
    cmd->add_option("--text-dim", o.text_dim, "Text representation width");
    cmd->add_option("--pretrained-model", o.pretrained_model, "Hugging Face style model directory");
    cmd->add_option("--exec", o.exec, "Kernel execution policy")->check(CLI::IsMember({"serial", "parallel"}));
    cmd->add_flag("--freeze-encoder", o.freeze_encoder, "Train only the heads and classifier");
  };
  auto* train_cmd = app.add_subcommand("train", "Train the fusion model");
  add_training(train_cmd);
  train_cmd->add_flag("--no-expertise", o.no_expertise, "Disable the expertise head");
  train_cmd->add_flag("--no-temporal", o.no_temporal, "Disable the temporal head");
  auto* ablate = app.add_subcommand("ablate", "Train and compare the four feature ablations");
  add_training(ablate);

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint or prediction files");
  eval->add_option("--checkpoint", o.checkpoint, "Checkpoint directory");
  eval->add_option("--manifest", o.manifest, "Corpus manifest");
  eval->add_option("--split", o.split, "train, valid, test or all");
  eval->add_option("--predictions", o.predictions, "JSON lines with gold/pred; repeat to compare systems");
  eval->add_option("--name", o.names, "Display name for each --predictions file");
  eval->add_option("--exec", o.exec)->check(CLI::IsMember({"serial", "parallel"}));

  auto* analyze_cmd = app.add_subcommand("analyze", "Per-class aspect unigrams and collocations");
  analyze_cmd->add_option("--manifest", o.manifest, "Corpus manifest");
  analyze_cmd->add_option("--lexicon", o.lexicon, "Sentiment lexicon (term<TAB>valence)");
  analyze_cmd->add_option("--stopwords", o.stopwords, "Stopword list");
  analyze_cmd->add_option("--top-k", o.top_k);
  analyze_cmd->add_option("--min-freq", o.min_freq, "Minimum bigram count");
  analyze_cmd->add_option("--sample-per-class", o.sample_per_class, "Reviews sampled per class");
  analyze_cmd->add_option("--split", o.split, "train, valid, test or all");

  auto* explain = app.add_subcommand("explain", "Integrated-gradients token attributions");
  explain->add_option("--checkpoint", o.checkpoint, "Checkpoint directory");
  explain->add_option("--manifest", o.manifest, "Corpus manifest");
  explain->add_option("--review-id", o.review_ids, "Review to explain (repeatable)");
  explain->add_option("--count", o.count, "Reviews to explain when no id is given");
  explain->add_option("--steps", o.steps, "Integration steps");
  explain->add_option("--top-k", o.top_k);
  explain->add_option("--split", o.split, "Split to draw reviews from");
  explain->add_option("--exec", o.exec)->check(CLI::IsMember({"serial", "parallel"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  auto logger = spdlog::get("rhp");
  if (!logger) logger = spdlog::stderr_color_mt("rhp");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(g.log_level));

  const CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    const RunConfig cfg = effective_config(g, o);
    const fs::path out = prepare_out(g.out, name);
    write_json(out / "config.json", cfg.to_json());
    if (name == "synth") return cmd_synth(cfg, out, o);
    if (name == "prepare") return cmd_prepare(cfg, out);
    if (name == "train") return cmd_train(cfg, out);
    if (name == "ablate") return cmd_ablate(cfg, out);
    if (name == "eval") return cmd_eval(cfg, out, o);
    if (name == "analyze") return cmd_analyze(cfg, out);
    if (name == "explain") return cmd_explain(cfg, out);
    throw Error("unhandled command '" + name + "'");
  } catch (const std::exception& e) {
    const nlohmann::json line{{"error", {{"command", name}, {"type", error_type(e)}, {"message", e.what()}}}};
    std::cerr << line.dump() << std::endl;
    return 1;
  }
}

}  // namespace rhp
