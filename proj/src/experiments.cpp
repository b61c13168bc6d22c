#include "gna/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gna/error.hpp"

namespace gna {

PreparedData prepare_data(const CorpusSplits& splits, std::size_t min_frequency, std::size_t max_len) {
  return prepare_data(splits, build_vocab(splits.train, min_frequency), max_len);
}

PreparedData prepare_data(const CorpusSplits& splits, const Vocabulary& vocab, std::size_t max_len) {
  PreparedData data;
  data.vocab = vocab;
  data.train = RetrievalSet(splits.train, vocab, max_len);
  data.val = RetrievalSet(splits.val, vocab, max_len);
  data.test = RetrievalSet(splits.test, vocab, max_len);
  return data;
}

EncoderConfig encoder_config(const TrainConfig& config, std::size_t input_dim, std::size_t num_classes) {
  EncoderConfig c;
  c.input_dim = input_dim;
  c.backbone_dim = config.dims.backbone_dim;
  c.head_hidden = config.dims.head_hidden;
  c.unit_count = config.unit_count;
  c.context_dim = config.dims.context_dim;
  c.num_classes = num_classes;
  return c;
}

ModelConfig model_config(const TrainConfig& config, std::size_t vocab_size, const EncoderConfig& encoder) {
  ModelConfig m;
  m.vocab_size = vocab_size;
  m.embed_dim = config.dims.embed_dim;
  m.hidden = config.dims.hidden;
  m.attention_hidden = config.dims.attention_hidden;
  m.encoder = encoder;
  m.ablation = config.ablation;
  return m;
}

VisualEncoder pretrain_encoder(const PreparedData& data, const TrainConfig& config, PretrainResult* pretrain,
                               std::ostream* log) {
  config.validate();
  Rng rng(config.seed ^ 0xE1C0DE5ULL);
  VisualEncoder encoder(encoder_config(config, data.train.feature_dim(), data.train.persons().size()), rng);
  PretrainConfig pc;
  pc.epochs = config.pretrain_epochs;
  pc.learning_rate = config.pretrain_learning_rate;
  pc.momentum = config.momentum;
  pc.batch_size = config.pretrain_batch_size;
  pc.seed = config.seed;
  if (pc.epochs == 0) {
    encoder.freeze_backbone();
    return encoder;
  }
  PretrainResult result = pretrain_id_classification(encoder, data.train, pc);
  if (log != nullptr) {
    *log << "pretrain initial loss " << result.initial_loss;
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) *log << " | epoch " << e + 1 << " " << result.epoch_loss[e];
    *log << " | train accuracy " << result.final_accuracy << "\n";
  }
  if (pretrain != nullptr) *pretrain = std::move(result);
  return encoder;
}

GnaModel build_gna_model(const VisualEncoder& encoder, std::size_t vocab_size, const TrainConfig& config) {
  Rng rng(config.seed ^ 0x1A46E7ULL);
  return GnaModel(model_config(config, vocab_size, encoder.config()), encoder, rng);
}

TrainedModel train_gna(const PreparedData& data, const TrainConfig& config, const VisualEncoder& pretrained,
                       std::ostream* log) {
  GnaModel model = build_gna_model(pretrained, data.vocab.size(), config);
  TrainResult history = train(model, data.train, &data.val, config, log);
  return TrainedModel{std::move(model), std::move(history)};
}

TrainedBow bow_baseline(const PreparedData& data, const TrainConfig& config, const VisualEncoder& pretrained,
                        std::ostream* log) {
  Rng rng(config.seed ^ 0xB0C0DEULL);
  BowConfig bc;
  bc.vocab_size = data.vocab.size();
  bc.text_hidden = config.dims.attention_hidden;
  bc.classifier_hidden = config.dims.attention_hidden;
  BowModel model(bc, pretrained, rng);
  TrainResult history = train(model, data.train, &data.val, config, log);
  const std::size_t ks[] = {1, 10};
  EvalReport report = evaluate_topk(model, data.test, ks, config.threads);
  return TrainedBow{std::move(model), std::move(history), std::move(report)};
}

// ---------------------------------------------------------------------------

namespace {

double mean_of(const std::vector<ComparisonRow>& rows, const std::string& label, double ComparisonRow::*field) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.label == label) {
      total += r.*field;
      ++n;
    }
  }
  if (n == 0) throw ContractError("no rows labelled '" + label + "'");
  return total / static_cast<double>(n);
}

ComparisonRow make_row(std::string label, std::uint64_t seed, const EvalReport& report, const TrainResult& history) {
  return ComparisonRow{std::move(label), seed, report.accuracy(1), report.accuracy(10), history.best_val_top1};
}

}  // namespace

double ComparativeReport::mean_top1(const std::string& label) const { return mean_of(rows, label, &ComparisonRow::top1); }
double ComparativeReport::mean_top10(const std::string& label) const {
  return mean_of(rows, label, &ComparisonRow::top10);
}

std::vector<std::string> ComparativeReport::labels() const {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (std::find(out.begin(), out.end(), r.label) == out.end()) out.push_back(r.label);
  }
  return out;
}

nlohmann::json to_json(const ComparativeReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"label", r.label}, {"seed", r.seed}, {"top1", r.top1}, {"top10", r.top10},
                    {"best_val_top1", r.best_val_top1}});
  }
  nlohmann::json means = nlohmann::json::object();
  for (const auto& label : report.labels()) {
    means[label] = {{"top1", report.mean_top1(label)}, {"top10", report.mean_top10(label)}};
  }
  return {{"title", report.title}, {"config", report.config}, {"rows", rows}, {"means", means}};
}

std::string format_table(const ComparativeReport& report) {
  std::ostringstream out;
  char line[160];
  out << report.title << "\n";
  std::snprintf(line, sizeof line, "%-14s %6s %8s %8s %10s\n", "model", "seed", "top-1", "top-10", "val top-1");
  out << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%-14s %6llu %8.2f %8.2f %10.2f\n", r.label.c_str(),
                  static_cast<unsigned long long>(r.seed), 100.0 * r.top1, 100.0 * r.top10, 100.0 * r.best_val_top1);
    out << line;
  }
  for (const auto& label : report.labels()) {
    std::snprintf(line, sizeof line, "%-14s %6s %8.2f %8.2f\n", label.c_str(), "mean", 100.0 * report.mean_top1(label),
                  100.0 * report.mean_top10(label));
    out << line;
  }
  return out.str();
}

ComparativeReport run_ablation(const PreparedData& data, const TrainConfig& base, std::span<const std::string> modes,
                               std::span<const std::uint64_t> seeds, std::ostream* log) {
  for (const auto& mode : modes) {
    if (mode != "bow") parse_ablation(mode);
  }
  if (modes.empty() || seeds.empty()) throw ConfigError("ablation needs at least one mode and one seed");
  ComparativeReport report;
  report.title = "ablation (test split top-k, %)";
  report.config = to_json(base);
  const std::size_t ks[] = {1, 10};
  for (std::uint64_t seed : seeds) {
    TrainConfig config = base;
    config.seed = seed;
    const VisualEncoder encoder = pretrain_encoder(data, config, nullptr, log);
    for (const auto& mode : modes) {
      if (log != nullptr) *log << "== seed " << seed << " mode " << mode << "\n";
      if (mode == "bow") {
        const TrainedBow bow = bow_baseline(data, config, encoder, log);
        report.rows.push_back(make_row(mode, seed, bow.report, bow.history));
        continue;
      }
      config.ablation = parse_ablation(mode);
      const TrainedModel trained = train_gna(data, config, encoder, log);
      const EvalReport test = evaluate_topk(trained.model, data.test, ks, config.threads);
      report.rows.push_back(make_row(mode, seed, test, trained.history));
    }
  }
  return report;
}

ComparativeReport unit_count_sweep(const PreparedData& data, const TrainConfig& base,
                                   std::span<const std::size_t> counts, std::ostream* log) {
  if (counts.empty()) throw ConfigError("unit sweep needs at least one count");
  ComparativeReport report;
  report.title = "visual unit sweep (test split top-k, %)";
  report.config = to_json(base);
  const std::size_t ks[] = {1, 10};
  for (std::size_t count : counts) {
    if (count == 0) throw ConfigError("unit counts must be positive");
    TrainConfig config = base;
    config.unit_count = count;
    if (log != nullptr) *log << "== units " << count << "\n";
    const VisualEncoder encoder = pretrain_encoder(data, config, nullptr, log);
    const TrainedModel trained = train_gna(data, config, encoder, log);
    const EvalReport test = evaluate_topk(trained.model, data.test, ks, config.threads);
    report.rows.push_back(make_row(std::to_string(count), config.seed, test, trained.history));
  }
  return report;
}

// ---------------------------------------------------------------------------

UnitInspection inspect_units(const GnaModel& model, const Vocabulary& vocab, const std::string& word,
                             const RetrievalSet& images, std::size_t top_units, std::size_t top_images) {
  if (!vocab.contains(word) || word == Vocabulary::unk_token) {
    throw ContractError("word '" + word + "' is not in the vocabulary");
  }
  if (images.empty()) throw ContractError("no images to inspect");
  const std::size_t units = model.config().unit_count();
  const std::size_t n = images.images().size();
  EncodedSentence sentence;
  sentence.indices = {vocab.index_of(word)};
  sentence.raw_text = word;

  std::vector<double> mean_attention(units, 0.0);
  std::vector<std::vector<double>> responses(n);
  constexpr std::size_t chunk = 512;
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t count = std::min(chunk, n - start);
    rows.resize(count);
    std::iota(rows.begin(), rows.end(), start);
    const Tensor features = images.feature_matrix(rows);
    std::vector<const EncodedSentence*> sentences(count, &sentence);
    Graph g(false);
    std::vector<StepVars> steps;
    model.forward(g, sentences, features, &steps);
    const Tensor& a = steps.at(0).attention.value();
    const Tensor& v = model.encoder().encode(g, features).units.value();
    for (std::size_t r = 0; r < count; ++r) {
      for (std::size_t u = 0; u < units; ++u) mean_attention[u] += a(r, u);
      const auto vr = v.row(r);
      responses[start + r].assign(vr.begin(), vr.end());
    }
  }
  for (double& m : mean_attention) m /= static_cast<double>(n);

  UnitInspection out;
  out.word = word;
  out.mean_attention = mean_attention;
  std::vector<std::size_t> order(units);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mean_attention[a] > mean_attention[b]; });
  const std::size_t keep_units = std::min(top_units, units);
  const std::size_t keep_images = std::min(top_images, n);
  for (std::size_t k = 0; k < keep_units; ++k) {
    const std::size_t unit = order[k];
    std::vector<std::size_t> ranked(n);
    std::iota(ranked.begin(), ranked.end(), std::size_t{0});
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      if (responses[a][unit] != responses[b][unit]) return responses[a][unit] > responses[b][unit];
      return images.images()[a].image_id < images.images()[b].image_id;
    });
    UnitImages entry;
    entry.unit = unit;
    entry.mean_attention = mean_attention[unit];
    for (std::size_t i = 0; i < keep_images; ++i) {
      entry.images.push_back(ranked[i]);
      entry.activations.push_back(responses[ranked[i]][unit]);
    }
    out.units.push_back(std::move(entry));
  }
  return out;
}

nlohmann::json to_json(const UnitInspection& inspection, const RetrievalSet& images) {
  nlohmann::json units = nlohmann::json::array();
  for (const auto& u : inspection.units) {
    nlohmann::json top = nlohmann::json::array();
    for (std::size_t i = 0; i < u.images.size(); ++i) {
      top.push_back({{"image_id", images.images()[u.images[i]].image_id},
                     {"person_id", images.images()[u.images[i]].person_id},
                     {"activation", u.activations[i]}});
    }
    units.push_back({{"unit", u.unit}, {"mean_attention", u.mean_attention}, {"images", top}});
  }
  return {{"word", inspection.word}, {"mean_attention", inspection.mean_attention}, {"units", units}};
}

GradCheckResult model_gradcheck(std::uint64_t seed, Ablation ablation, double epsilon) {
  constexpr std::size_t kVocab = 12, kWidth = 8, kWords = 3, kBatch = 4, kInput = 10;
  Rng rng(seed);
  EncoderConfig ec;
  ec.input_dim = kInput;
  ec.backbone_dim = ec.head_hidden = ec.unit_count = ec.context_dim = kWidth;
  ec.num_classes = 3;
  ModelConfig mc;
  mc.vocab_size = kVocab;
  mc.embed_dim = mc.hidden = mc.attention_hidden = kWidth;
  mc.encoder = ec;
  mc.ablation = ablation;
  VisualEncoder encoder(ec, rng);
  GnaModel model(mc, std::move(encoder), rng);
  // Zero biases hide mistakes in their gradients; move every entry off its init.
  for (ParameterSet* set : model.parameter_sets()) {
    for (Parameter& p : *set) {
      for (double& v : p.value.values()) v += 0.1 * rng.normal();
    }
  }

  std::vector<EncodedSentence> sentences(kBatch);
  for (auto& s : sentences) {
    for (std::size_t t = 0; t < kWords; ++t) s.indices.push_back(rng.index(kVocab));
  }
  Tensor features({kBatch, kInput});
  for (double& v : features.values()) v = rng.normal();
  std::vector<const EncodedSentence*> batch;
  for (const auto& s : sentences) batch.push_back(&s);
  const std::vector<double> labels = {1.0, 0.0, 0.0, 0.0};

  const LossClosure loss = [&](Graph& g) {
    return binary_cross_entropy(model.score(g, batch, features).probability, labels);
  };
  GradCheckResult worst;
  for (ParameterSet* set : model.parameter_sets()) {
    const GradCheckResult r = grad_check_detailed(loss, *set, epsilon);
    if (r.max_relative_error >= worst.max_relative_error) {
      const std::size_t checked = worst.entries_checked;
      worst = r;
      worst.entries_checked += checked;
    } else {
      worst.entries_checked += r.entries_checked;
    }
  }
  return worst;
}

}  // namespace gna
