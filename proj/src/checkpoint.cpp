#include "gna/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "gna/error.hpp"

namespace gna {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(const std::string& bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

  std::uint64_t u64(const char* field) { return little_endian(8, field); }
  std::uint32_t u32(const char* field) { return static_cast<std::uint32_t>(little_endian(4, field)); }
  double f64(const char* field) { return std::bit_cast<double>(u64(field)); }

  std::string bytes(std::uint64_t n, const char* field) {
    need(n, field);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == bytes_.size(); }
  [[noreturn]] void fail(const std::string& what) const { throw DataError(source_ + ": " + what); }

 private:
  void need(std::uint64_t n, const char* field) const {
    if (n > bytes_.size() - pos_) {
      fail(std::string("checkpoint truncated while reading ") + field + " at byte " + std::to_string(pos_));
    }
  }

  std::uint64_t little_endian(int width, const char* field) {
    need(static_cast<std::uint64_t>(width), field);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  const std::string& bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

nlohmann::json encoder_to_json(const EncoderConfig& c) {
  return {{"input_dim", c.input_dim},     {"backbone_dim", c.backbone_dim}, {"head_hidden", c.head_hidden},
          {"unit_count", c.unit_count},   {"context_dim", c.context_dim},   {"num_classes", c.num_classes}};
}

EncoderConfig encoder_from_json(const nlohmann::json& j) {
  EncoderConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.backbone_dim = j.at("backbone_dim").get<std::size_t>();
  c.head_hidden = j.at("head_hidden").get<std::size_t>();
  c.unit_count = j.at("unit_count").get<std::size_t>();
  c.context_dim = j.at("context_dim").get<std::size_t>();
  c.num_classes = j.at("num_classes").get<std::size_t>();
  return c;
}

}  // namespace

nlohmann::json model_config_to_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size},
          {"embed_dim", c.embed_dim},
          {"hidden", c.hidden},
          {"attention_hidden", c.attention_hidden},
          {"ablation", std::string(to_string(c.ablation))},
          {"encoder", encoder_to_json(c.encoder)}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.attention_hidden = j.at("attention_hidden").get<std::size_t>();
  c.ablation = parse_ablation(j.at("ablation").get<std::string>());
  c.encoder = encoder_from_json(j.at("encoder"));
  return c;
}

std::string serialize_checkpoint(const GnaModel& model, const Vocabulary& vocab, const nlohmann::json& config) {
  if (vocab.size() != model.config().vocab_size) {
    throw ContractError("vocabulary has " + std::to_string(vocab.size()) + " tokens but the model expects " +
                        std::to_string(model.config().vocab_size));
  }
  nlohmann::json frozen = nlohmann::json::array();
  std::size_t count = 0;
  for (const ParameterSet* set : model.parameter_sets()) {
    for (const Parameter& p : *set) {
      if (p.frozen) frozen.push_back(p.name);
      ++count;
    }
  }
  const nlohmann::json meta = {{"kind", std::string(model.kind())},
                               {"config", config},
                               {"model", model_config_to_json(model.config())},
                               {"unit_count", model.config().unit_count()},
                               {"vocab", vocab.tokens()},
                               {"frozen", frozen}};
  const std::string meta_text = meta.dump();

  std::string out(kCheckpointMagic, sizeof kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  put_u64(out, meta_text.size());
  out += meta_text;
  put_u64(out, count);
  for (const ParameterSet* set : model.parameter_sets()) {
    for (const Parameter& p : *set) {
      put_u32(out, static_cast<std::uint32_t>(p.name.size()));
      out += p.name;
      put_u32(out, static_cast<std::uint32_t>(p.value.rank()));
      for (std::size_t d : p.value.shape()) put_u64(out, d);
      for (double v : p.value.values()) put_f64(out, v);
    }
  }
  return out;
}

void save_checkpoint(const GnaModel& model, const Vocabulary& vocab, const nlohmann::json& config,
                     const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(model, vocab, config);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw DataError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw DataError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
  }
}

LoadedCheckpoint deserialize_checkpoint(const std::string& bytes, const std::string& source) {
  Reader in(bytes, source);
  const std::string magic = in.bytes(4, "magic");
  if (std::memcmp(magic.data(), kCheckpointMagic, 4) != 0) in.fail("bad magic: not a GNAR checkpoint");
  const std::uint32_t version = in.u32("format_version");
  if (version != kCheckpointVersion) {
    in.fail("unsupported format_version " + std::to_string(version) + " (expected " +
            std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint64_t meta_size = in.u64("metadata length");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in.bytes(meta_size, "metadata"));
  } catch (const nlohmann::json::exception& e) {
    in.fail(std::string("metadata is not valid JSON: ") + e.what());
  }

  ModelConfig mc;
  std::vector<std::string> tokens;
  std::vector<std::string> frozen;
  try {
    if (meta.at("kind").get<std::string>() != "gna") in.fail("kind: only gna checkpoints are supported");
    mc = model_config_from_json(meta.at("model"));
    tokens = meta.at("vocab").get<std::vector<std::string>>();
    frozen = meta.at("frozen").get<std::vector<std::string>>();
    if (meta.at("unit_count").get<std::size_t>() != mc.unit_count()) {
      in.fail("unit_count in metadata disagrees with the encoder config");
    }
  } catch (const nlohmann::json::exception& e) {
    in.fail(std::string("metadata field missing or malformed: ") + e.what());
  }
  if (tokens.empty() || tokens.front() != Vocabulary::unk_token) in.fail("vocab: first token must be <unk>");
  tokens.erase(tokens.begin());
  Vocabulary vocab(tokens);
  if (vocab.size() != mc.vocab_size) in.fail("vocab: size disagrees with model vocab_size");

  GnaModel model(mc);
  std::size_t expected = 0;
  for (const ParameterSet* set : model.parameter_sets()) expected += set->size();
  const std::uint64_t count = in.u64("tensor count");
  if (count != expected) {
    in.fail("tensor count " + std::to_string(count) + " does not match the " + std::to_string(expected) +
            " parameters of the model");
  }
  std::vector<std::string> seen;
  for (std::uint64_t t = 0; t < count; ++t) {
    const std::string name = in.bytes(in.u32("tensor name length"), "tensor name");
    Parameter* p = nullptr;
    for (ParameterSet* set : model.parameter_sets()) {
      if ((p = set->find(name)) != nullptr) break;
    }
    if (p == nullptr) in.fail("tensor '" + name + "' is not a parameter of the model");
    if (std::find(seen.begin(), seen.end(), name) != seen.end()) in.fail("tensor '" + name + "' appears twice");
    seen.push_back(name);
    const std::uint32_t rank = in.u32("tensor rank");
    Shape shape;
    for (std::uint32_t r = 0; r < rank; ++r) shape.push_back(in.u64("tensor dims"));
    if (shape != p->value.shape()) {
      in.fail("tensor '" + name + "' has shape " + to_string(shape) + " but the metadata implies " +
              p->value.shape_string());
    }
    for (double& v : p->value.values()) v = in.f64("tensor values");
  }
  if (!in.at_end()) in.fail("trailing bytes after the last tensor");
  for (const std::string& name : frozen) {
    Parameter* p = nullptr;
    for (ParameterSet* set : model.parameter_sets()) {
      if ((p = set->find(name)) != nullptr) break;
    }
    if (p == nullptr) in.fail("frozen: unknown parameter '" + name + "'");
    p->frozen = true;
  }
  const nlohmann::json config = meta.at("config");
  return LoadedCheckpoint{std::move(model), std::move(vocab), config};
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_checkpoint(buffer.str(), path.string());
}

}  // namespace gna
