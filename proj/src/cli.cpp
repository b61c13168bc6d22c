#include "gna/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <ostream>
#include <sstream>

#include "gna/checkpoint.hpp"
#include "gna/error.hpp"
#include "gna/experiments.hpp"
#include "gna/run_config.hpp"
#include "gna/synthetic.hpp"

namespace gna {

namespace {

const std::set<std::string> kDataKeys = {"corpus", "val_persons", "test_persons", "min_freq", "max_len"};
const std::set<std::string> kTrainKeys = {
    "batch_size",  "neg_ratio",    "learning_rate",   "momentum",        "epochs",
    "unit_count",  "ablation",     "embed_dim",       "hidden",          "attention_hidden",
    "backbone_dim", "head_hidden", "context_dim",     "pretrain_epochs", "pretrain_learning_rate",
    "pretrain_batch_size",         "validate_each_epoch", "optimizer", "adam_beta1", "adam_beta2",
    "calibration_warm_start",      "val_query_stride"};
const std::set<std::string> kGlobalKeys = {"seed", "threads"};

std::set<std::string> keys(std::initializer_list<const std::set<std::string>*> groups,
                           std::initializer_list<const char*> extra) {
  std::set<std::string> out = kGlobalKeys;
  for (const auto* g : groups) out.insert(g->begin(), g->end());
  for (const char* k : extra) out.insert(k);
  return out;
}

struct Command {
  std::string summary;
  std::string options;
  std::set<std::string> allowed;
  std::function<void(const RunConfig&, std::ostream&, std::ostream&)> run;
};

// ---------------------------------------------------------------------------
// shared pieces

struct DataArgs {
  std::string corpus;
  std::size_t val_persons = 0;
  std::size_t test_persons = 0;
  std::uint64_t split_seed = 1;
  std::size_t min_freq = 1;
  std::size_t max_len = kDefaultMaxSentenceLength;

  nlohmann::json to_json() const {
    return {{"corpus", corpus},         {"val_persons", val_persons}, {"test_persons", test_persons},
            {"split_seed", split_seed}, {"min_freq", min_freq},       {"max_len", max_len}};
  }
};

std::size_t count_persons(const std::vector<PersonRecord>& records) {
  std::set<std::int64_t> ids;
  for (const auto& r : records) ids.insert(r.person_id);
  return ids.size();
}

// Split sizes default to a tenth of the persons each.
DataArgs data_args(const RunConfig& rc, const std::vector<PersonRecord>& records, const nlohmann::json* stored) {
  DataArgs d;
  d.corpus = rc.text("corpus");
  const std::size_t tenth = std::max<std::size_t>(1, count_persons(records) / 10);
  auto stored_size = [&](const char* key, std::size_t fallback) {
    return stored != nullptr && stored->contains(key) ? stored->at(key).get<std::size_t>() : fallback;
  };
  d.val_persons = rc.size_or("val_persons", stored_size("val_persons", tenth));
  d.test_persons = rc.size_or("test_persons", stored_size("test_persons", tenth));
  d.split_seed = rc.u64_or("seed", stored != nullptr && stored->contains("split_seed")
                                       ? stored->at("split_seed").get<std::uint64_t>()
                                       : 1);
  d.min_freq = rc.size_or("min_freq", stored_size("min_freq", 1));
  d.max_len = rc.size_or("max_len", stored_size("max_len", kDefaultMaxSentenceLength));
  if (d.max_len == 0) throw UsageError("--max-len must be positive");
  return d;
}

CorpusSplits split_records(const std::vector<PersonRecord>& records, const DataArgs& d) {
  return split_by_person(records, d.val_persons, d.test_persons, d.split_seed);
}

Ablation ablation_option(const RunConfig& rc) {
  try {
    return parse_ablation(rc.text_or("ablation", "full"));
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

TrainConfig train_config(const RunConfig& rc, const TrainConfig& base = TrainConfig{}) {
  TrainConfig c = base;
  c.batch_size = rc.size_or("batch_size", c.batch_size);
  c.neg_ratio = rc.size_or("neg_ratio", c.neg_ratio);
  c.learning_rate = rc.real_or("learning_rate", c.learning_rate);
  c.momentum = rc.real_or("momentum", c.momentum);
  c.epochs = rc.size_or("epochs", c.epochs);
  c.unit_count = rc.size_or("unit_count", c.unit_count);
  c.seed = rc.u64_or("seed", c.seed);
  if (rc.has("ablation")) c.ablation = ablation_option(rc);
  c.dims.embed_dim = rc.size_or("embed_dim", c.dims.embed_dim);
  c.dims.hidden = rc.size_or("hidden", c.dims.hidden);
  c.dims.attention_hidden = rc.size_or("attention_hidden", c.dims.attention_hidden);
  c.dims.backbone_dim = rc.size_or("backbone_dim", c.dims.backbone_dim);
  c.dims.head_hidden = rc.size_or("head_hidden", c.dims.head_hidden);
  c.dims.context_dim = rc.size_or("context_dim", c.dims.context_dim);
  c.pretrain_epochs = rc.size_or("pretrain_epochs", c.pretrain_epochs);
  c.pretrain_learning_rate = rc.real_or("pretrain_learning_rate", c.pretrain_learning_rate);
  c.pretrain_batch_size = rc.size_or("pretrain_batch_size", c.pretrain_batch_size);
  c.validate_each_epoch = rc.flag_or("validate_each_epoch", c.validate_each_epoch);
  c.val_query_stride = rc.size_or("val_query_stride", c.val_query_stride);
  c.adam_beta1 = rc.real_or("adam_beta1", c.adam_beta1);
  c.adam_beta2 = rc.real_or("adam_beta2", c.adam_beta2);
  c.calibration_warm_start = rc.flag_or("calibration_warm_start", c.calibration_warm_start);
  if (rc.has("optimizer")) {
    try {
      c.optimizer = parse_optimizer(rc.text("optimizer"));
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  c.threads = std::max<std::size_t>(1, rc.size_or("threads", c.threads));
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw DataError("failed writing " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

std::vector<std::uint64_t> u64_list(const RunConfig& rc, const char* key, std::vector<std::string> fallback) {
  std::vector<std::uint64_t> out;
  for (const auto& item : rc.list_or(key, std::move(fallback))) {
    RunConfig one({"v"});
    one.set("v", item);
    out.push_back(one.u64_or("v", 0));
  }
  return out;
}

std::vector<std::size_t> size_list(const RunConfig& rc, const char* key, std::vector<std::string> fallback) {
  std::vector<std::size_t> out;
  for (std::uint64_t v : u64_list(rc, key, std::move(fallback))) out.push_back(static_cast<std::size_t>(v));
  return out;
}

nlohmann::json checkpoint_config(const TrainConfig& config, const DataArgs& data) {
  nlohmann::json j = to_json(config);
  j["data"] = data.to_json();
  return j;
}

// Per-word gates, dominant attention unit and affinity for query q against
// its best-ranked image.
nlohmann::json query_trace(const GnaModel& model, const Vocabulary& vocab, const RetrievalSet& split,
                           std::size_t q) {
  const auto& caption = split.captions()[q];
  const auto ranked = rank_gallery(model, caption.sentence, split);
  const auto& image = split.images()[ranked.front().image];
  const AffinityTrace trace = model.forward_with_trace(caption.sentence, image.features);
  nlohmann::json words = nlohmann::json::array();
  for (const auto& w : trace.words) {
    const auto top = std::max_element(w.attention.begin(), w.attention.end());
    words.push_back({{"token", vocab.token(w.token)},
                     {"gate", w.gate},
                     {"top_unit", static_cast<std::size_t>(top - w.attention.begin())},
                     {"top_attention", *top},
                     {"affinity", w.affinity}});
  }
  return {{"query", caption.query_id},
          {"caption", caption.sentence.raw_text},
          {"image_id", image.image_id},
          {"raw", trace.raw},
          {"probability", trace.probability},
          {"words", words}};
}

// ---------------------------------------------------------------------------
// subcommands

void cmd_generate(const RunConfig& rc, std::ostream& out, std::ostream&) {
  synthetic::SyntheticSpec spec;
  spec.persons = rc.size_or("persons", spec.persons);
  spec.images_per_person = rc.size_or("images_per_person", spec.images_per_person);
  spec.captions_per_image = rc.size_or("captions_per_image", spec.captions_per_image);
  spec.noise_sigma = rc.real_or("noise_sigma", spec.noise_sigma);
  spec.distractor_dims = rc.size_or("distractor_dims", spec.distractor_dims);
  spec.seed = rc.u64_or("seed", spec.seed);
  const std::string path = rc.text("out");
  spec.validate();
  const auto records = synthetic::generate_synthetic_corpus(spec);
  write_corpus(std::filesystem::path(path), records);
  out << "wrote " << records.size() << " records for " << spec.persons << " persons to " << path << "\n";
}

void cmd_build_vocab(const RunConfig& rc, std::ostream& out, std::ostream&) {
  const std::string path = rc.text("out");
  const auto records = read_corpus(rc.text("corpus"));
  const DataArgs d = data_args(rc, records, nullptr);
  const Vocabulary vocab = build_vocab(split_records(records, d).train, d.min_freq);
  std::string text;
  for (const auto& t : vocab.tokens()) text += t + "\n";
  write_text(path, text);
  out << "vocabulary of " << vocab.size() << " tokens written to " << path << "\n";
}

void cmd_pretrain(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const std::string path = rc.text("out");
  const auto records = read_corpus(rc.text("corpus"));
  const DataArgs d = data_args(rc, records, nullptr);
  const TrainConfig config = train_config(rc);
  const PreparedData data = prepare_data(split_records(records, d), d.min_freq, d.max_len);
  PretrainResult result;
  const VisualEncoder encoder = pretrain_encoder(data, config, &result, &err);
  const GnaModel model = build_gna_model(encoder, data.vocab.size(), config);
  save_checkpoint(model, data.vocab, checkpoint_config(config, d), path);
  const std::string report = rc.text_or("report", path + ".json");
  write_json(report, {{"config", checkpoint_config(config, d)},
                      {"initial_loss", result.initial_loss},
                      {"epoch_loss", result.epoch_loss},
                      {"train_accuracy", result.final_accuracy}});
  out << "pretrained encoder: ID accuracy " << result.final_accuracy << " on " << data.train.persons().size()
      << " training persons; checkpoint " << path << ", report " << report << "\n";
}

void cmd_train(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  if (!rc.has("corpus")) throw UsageError("train needs --corpus");
  const std::string path = rc.text("checkpoint");
  const auto records = read_corpus(rc.text("corpus"));
  const DataArgs d = data_args(rc, records, nullptr);
  const TrainConfig config = train_config(rc);
  const CorpusSplits splits = split_records(records, d);

  std::optional<LoadedCheckpoint> pretrained;
  if (rc.has("encoder")) pretrained = load_checkpoint(rc.text("encoder"));
  const PreparedData data = pretrained ? prepare_data(splits, pretrained->vocab, d.max_len)
                                       : prepare_data(splits, d.min_freq, d.max_len);
  VisualEncoder encoder = pretrained ? pretrained->model.encoder() : pretrain_encoder(data, config, nullptr, &err);
  if (encoder.config() != encoder_config(config, data.train.feature_dim(), data.train.persons().size())) {
    throw DataError("encoder in " + rc.text("encoder") + " does not match the corpus and layer widths");
  }
  if (!encoder.backbone_frozen()) encoder.freeze_backbone();
  TrainedModel trained = train_gna(data, config, encoder, &err);
  save_checkpoint(trained.model, data.vocab, checkpoint_config(config, d), path);

  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : trained.history.epochs) {
    epochs.push_back({{"epoch", e.epoch}, {"loss", e.mean_loss}, {"val_top1", e.val_top1}, {"val_top10", e.val_top10}});
  }
  const std::string report = rc.text_or("report", path + ".json");
  write_json(report, {{"config", checkpoint_config(config, d)},
                      {"epochs", epochs},
                      {"best_epoch", trained.history.best_epoch},
                      {"best_val_top1", trained.history.best_val_top1}});
  out << "trained " << config.epochs << " epochs, best validation top-1 " << trained.history.best_val_top1
      << " at epoch " << trained.history.best_epoch << "; checkpoint " << path << ", report " << report << "\n";
}

void cmd_eval(const RunConfig& rc, std::ostream& out, std::ostream&) {
  const std::string report_path = rc.text("report");
  const LoadedCheckpoint ckpt = load_checkpoint(rc.text("checkpoint"));
  const auto records = read_corpus(rc.text("corpus"));
  const nlohmann::json stored = ckpt.config.value("data", nlohmann::json::object());
  const DataArgs d = data_args(rc, records, &stored);
  const PreparedData data = prepare_data(split_records(records, d), ckpt.vocab, d.max_len);
  const std::string which = rc.text_or("split", "test");
  if (which != "test" && which != "val") throw UsageError("--split must be test or val");
  const RetrievalSet& split = which == "test" ? data.test : data.val;
  const std::vector<std::size_t> ks = size_list(rc, "ks", {"1", "5", "10"});
  const std::size_t threads = std::max<std::size_t>(1, rc.size_or("threads", 1));

  EvalReport report = evaluate_topk(ckpt.model, split, ks, threads);
  report.config = ckpt.config;
  report.config["data"] = d.to_json();
  report.config["split"] = which;
  if (!rc.flag_or("record_time", true)) report.seconds = 0.0;
  nlohmann::json j = to_json(report);
  const std::size_t traces = std::min(rc.size_or("trace_queries", 3), split.captions().size());
  nlohmann::json trace_list = nlohmann::json::array();
  for (std::size_t q = 0; q < traces; ++q) trace_list.push_back(query_trace(ckpt.model, ckpt.vocab, split, q));
  j["traces"] = trace_list;
  write_json(report_path, j);
  for (const auto& [k, acc] : report.top_k) out << "top-" << k << " " << std::fixed << std::setprecision(4) << acc << "\n";
  out << "report written to " << report_path << "\n";
}

void cmd_ablate(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const std::string report_path = rc.text("report");
  const auto records = read_corpus(rc.text("corpus"));
  const DataArgs d = data_args(rc, records, nullptr);
  const TrainConfig config = train_config(rc);
  const PreparedData data = prepare_data(split_records(records, d), d.min_freq, d.max_len);
  const auto modes = rc.list_or("modes", {"full", "no_gates", "no_attention", "bow"});
  const auto seeds = u64_list(rc, "seeds", {"1", "2", "3"});
  ComparativeReport report = run_ablation(data, config, modes, seeds, &err);
  report.config["data"] = d.to_json();
  write_json(report_path, to_json(report));
  const std::string table = format_table(report);
  write_text(rc.text_or("table", report_path + ".txt"), table);
  out << table;
}

void cmd_sweep(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const std::string report_path = rc.text("report");
  const auto records = read_corpus(rc.text("corpus"));
  const DataArgs d = data_args(rc, records, nullptr);
  const TrainConfig config = train_config(rc);
  const PreparedData data = prepare_data(split_records(records, d), d.min_freq, d.max_len);
  const auto counts = size_list(rc, "unit_counts", {"128", "256", "512", "1024", "2048"});
  ComparativeReport report = unit_count_sweep(data, config, counts, &err);
  report.config["data"] = d.to_json();
  write_json(report_path, to_json(report));
  const std::string table = format_table(report);
  write_text(rc.text_or("table", report_path + ".txt"), table);
  out << table;
}

void cmd_gradcheck(const RunConfig& rc, std::ostream& out, std::ostream&) {
  const std::uint64_t seed = rc.u64_or("seed", 1);
  const Ablation ablation = ablation_option(rc);
  const GradCheckResult r = model_gradcheck(seed, ablation, rc.real_or("epsilon", 1e-5));
  out << "max relative error " << std::scientific << std::setprecision(3) << r.max_relative_error << " ("
      << r.worst_parameter << "[" << r.worst_index << "] analytic " << r.worst_analytic << " numeric "
      << r.worst_numeric << ", " << r.entries_checked << " entries)\n";
  if (rc.has("report")) {
    write_json(rc.text("report"), {{"seed", seed},
                                   {"ablation", std::string(to_string(ablation))},
                                   {"max_relative_error", r.max_relative_error},
                                   {"worst_parameter", r.worst_parameter},
                                   {"worst_index", r.worst_index},
                                   {"entries_checked", r.entries_checked}});
  }
  if (!(r.max_relative_error < 1e-4)) throw DataError("gradient check failed: error is not below 1e-4");
}

void cmd_inspect(const RunConfig& rc, std::ostream& out, std::ostream&) {
  const std::string report_path = rc.text("report");
  const LoadedCheckpoint ckpt = load_checkpoint(rc.text("checkpoint"));
  const auto records = read_corpus(rc.text("corpus"));
  const nlohmann::json stored = ckpt.config.value("data", nlohmann::json::object());
  const DataArgs d = data_args(rc, records, &stored);
  const PreparedData data = prepare_data(split_records(records, d), ckpt.vocab, d.max_len);
  const std::string which = rc.text_or("split", "test");
  if (which != "test" && which != "val" && which != "train") throw UsageError("--split must be train, val or test");
  const RetrievalSet& split = which == "test" ? data.test : which == "val" ? data.val : data.train;
  std::vector<std::string> colors(synthetic::kColors.begin(), synthetic::kColors.end());
  const auto words = rc.list_or("words", colors);
  const std::size_t top_units = rc.size_or("top_units", 1);
  const std::size_t top_images = rc.size_or("top_images", 10);

  nlohmann::json all = nlohmann::json::array();
  for (const auto& word : words) {
    const UnitInspection inspection = inspect_units(ckpt.model, ckpt.vocab, word, split, top_units, top_images);
    all.push_back(to_json(inspection, split));
    for (const auto& u : inspection.units) {
      out << word << ": unit " << u.unit << " (mean attention " << std::fixed << std::setprecision(4)
          << u.mean_attention << ")";
      for (std::size_t i : u.images) out << " " << split.images()[i].image_id;
      out << "\n";
    }
  }
  write_json(report_path, {{"split", which}, {"words", all}});
  out << "report written to " << report_path << "\n";
}

void cmd_rank(const RunConfig& rc, std::ostream& out, std::ostream&) {
  const LoadedCheckpoint ckpt = load_checkpoint(rc.text("checkpoint"));
  const auto records = read_corpus(rc.text("gallery"));
  const std::string caption = rc.text("caption");
  const std::size_t top = rc.size_or("top", 10);
  if (top == 0) throw UsageError("--top must be positive");
  const RetrievalSet gallery(records, ckpt.vocab);
  const EncodedSentence sentence = encode(caption, ckpt.vocab);
  const auto ranked = rank_gallery(ckpt.model, sentence, gallery);
  nlohmann::json rows = nlohmann::json::array();
  const std::size_t n = std::min(top, ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& image = gallery.images()[ranked[i].image];
    out << image.image_id << "\t" << std::setprecision(17) << ranked[i].probability << "\n";
    rows.push_back({{"image_id", image.image_id}, {"person_id", image.person_id},
                    {"probability", ranked[i].probability}, {"raw", ranked[i].raw}});
  }
  if (rc.has("report")) write_json(rc.text("report"), {{"caption", caption}, {"ranking", rows}});
}

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table = {
      {"generate-corpus",
       {"write a synthetic attribute corpus as JSON lines",
        "--out PATH [--persons N --images-per-person N --captions-per-image N --noise-sigma X --distractor-dims N]",
        keys({}, {"out", "persons", "images_per_person", "captions_per_image", "noise_sigma", "distractor_dims"}),
        cmd_generate}},
      {"build-vocab",
       {"build the training-split vocabulary, one token per line",
        "--corpus PATH --out PATH [--min-freq N --val-persons N --test-persons N]", keys({&kDataKeys}, {"out"}),
        cmd_build_vocab}},
      {"pretrain",
       {"pretrain the visual encoder on person-ID classification",
        "--corpus PATH --out CHECKPOINT [--report PATH] [training options]", keys({&kDataKeys, &kTrainKeys}, {"out", "report"}),
        cmd_pretrain}},
      {"train",
       {"train a GNA-RNN model and save the best-validation checkpoint",
        "--corpus PATH --checkpoint PATH [--encoder CHECKPOINT --report PATH] [training options]",
        keys({&kDataKeys, &kTrainKeys}, {"checkpoint", "encoder", "report"}), cmd_train}},
      {"eval",
       {"top-k evaluation of a checkpoint on the val or test split",
        "--checkpoint PATH --corpus PATH --report PATH [--split test|val --ks 1,5,10 --record-time true|false "
        "--trace-queries N]",
        keys({&kDataKeys}, {"checkpoint", "report", "split", "ks", "record_time", "trace_queries"}), cmd_eval}},
      {"ablate",
       {"train and compare model variants over several seeds",
        "--corpus PATH --report PATH [--modes full,no_gates,no_attention,bow --seeds 1,2,3 --table PATH]",
        keys({&kDataKeys, &kTrainKeys}, {"report", "modes", "seeds", "table"}), cmd_ablate}},
      {"sweep-units",
       {"train one model per visual-unit count",
        "--corpus PATH --report PATH [--unit-counts 128,256,512,1024,2048 --table PATH]",
        keys({&kDataKeys, &kTrainKeys}, {"report", "unit_counts", "table"}), cmd_sweep}},
      {"gradcheck",
       {"finite-difference gradient check of a tiny random model",
        "[--seed N --ablation full|no_gates|no_attention --epsilon X --report PATH]",
        keys({}, {"ablation", "epsilon", "report"}), cmd_gradcheck}},
      {"inspect-units",
       {"most attended visual units per word and their top images",
        "--checkpoint PATH --corpus PATH --report PATH [--words red,blue --top-units N --top-images N --split test]",
        keys({&kDataKeys}, {"checkpoint", "report", "words", "top_units", "top_images", "split"}), cmd_inspect}},
      {"rank",
       {"rank a gallery against one caption and print the top images",
        "--checkpoint PATH --gallery PATH --caption TEXT [--top N --report PATH]",
        keys({}, {"checkpoint", "gallery", "caption", "top", "report"}), cmd_rank}},
  };
  return table;
}

}  // namespace

std::string usage_text() {
  std::ostringstream s;
  s << "usage: gna <command> [--config FILE] [--key value ...]\n\ncommands:\n";
  for (const auto& [name, c] : commands()) {
    s << "  " << std::left << std::setw(16) << name << c.summary << "\n";
    s << "  " << std::setw(16) << "" << c.options << "\n";
  }
  s << "\nevery command accepts --seed N and --threads N; flags override values from --config.\n"
       "training options: --epochs --batch-size --neg-ratio --learning-rate --momentum --unit-count --ablation\n"
       "  --embed-dim --hidden --attention-hidden --backbone-dim --head-hidden --context-dim\n"
       "  --pretrain-epochs --pretrain-learning-rate --pretrain-batch-size --validate-each-epoch\n"
       "  --optimizer sgd|adam --adam-beta1 --adam-beta2 --calibration-warm-start --val-query-stride\n";
  return s.str();
}

int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage_text();
    return 1;
  }
  if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    out << usage_text();
    return 0;
  }
  const auto& table = commands();
  const auto it = table.find(args[0]);
  if (it == table.end()) {
    err << "error: unknown command '" << args[0] << "'\n\n" << usage_text();
    return 1;
  }
  const Command& command = it->second;
  try {
    const RunConfig rc = parse_run_flags(args.subspan(1), command.allowed);
    command.run(rc, out, err);
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\nusage: gna " << it->first << " " << command.options << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace gna
