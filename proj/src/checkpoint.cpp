#include "morphdis/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "morphdis/error.hpp"
#include "morphdis/utf8.hpp"

namespace morphdis {

namespace {

constexpr char kMagic[8] = {'M', 'O', 'R', 'P', 'H', 'D', 'I', 'S'};

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_string(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_doubles(std::ostream& out, const Tensor& t) {
  for (double d : t.storage()) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    put_u64(out, bits);
  }
}

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::uint64_t u64() {
    unsigned char b[8];
    if (!in_.read(reinterpret_cast<char*>(b), 8)) fail("unexpected end of file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::string string() {
    const std::uint64_t n = u64();
    if (n > (std::uint64_t{1} << 32)) fail("implausible string length");
    std::string s(n, '\0');
    if (n > 0 && !in_.read(s.data(), static_cast<std::streamsize>(n))) fail("unexpected end of file");
    return s;
  }
  void doubles(Tensor& t) {
    for (double& d : t.storage()) {
      const std::uint64_t bits = u64();
      std::memcpy(&d, &bits, sizeof d);
    }
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("checkpoint '" + source_ + "': " + what);
  }

 private:
  std::istream& in_;
  std::string source_;
};

std::string key_values_text(const KeyValues& kv) {
  std::string s;
  for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
  return s;
}

KeyValues parse_key_values_text(const std::string& text) {
  KeyValues kv;
  for (const auto& line : split(text, '\n')) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("checkpoint: malformed config line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string state_text(const TrainingState& s) {
  std::ostringstream os;
  os << "epochs_done=" << s.epochs_done << "\n"
     << "best_epoch=" << s.best_epoch << "\n"
     << "best_tune_full=" << format_double(s.best_tune_full) << "\n"
     << "log_lines=" << s.log_lines.size() << "\n";
  for (const auto& l : s.log_lines) os << l << "\n";
  return os.str();
}

TrainingState parse_state_text(const std::string& text) {
  TrainingState s;
  const auto lines = split(text, '\n');
  auto value = [&](std::size_t i, const std::string& key) {
    if (i >= lines.size() || lines[i].rfind(key + "=", 0) != 0) {
      throw DataError("checkpoint: missing training state field '" + key + "'");
    }
    return lines[i].substr(key.size() + 1);
  };
  s.epochs_done = parse_size_value("epochs_done", value(0, "epochs_done"));
  s.best_epoch = parse_size_value("best_epoch", value(1, "best_epoch"));
  s.best_tune_full = parse_double_value("best_tune_full", value(2, "best_tune_full"));
  const std::size_t n = parse_size_value("log_lines", value(3, "log_lines"));
  if (lines.size() < 4 + n) throw DataError("checkpoint: truncated training log");
  for (std::size_t i = 0; i < n; ++i) s.log_lines.push_back(lines[4 + i]);
  return s;
}

}  // namespace

void Checkpoint::use_best() {
  auto& store = model->parameters();
  if (best.size() != store.size()) return;
  for (std::size_t i = 0; i < store.size(); ++i) store[i].value = best[i];
}

void Checkpoint::snapshot_best() {
  best.clear();
  for (const auto& p : model->parameters()) best.push_back(p->value);
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const JointModel& m = *ckpt.model;
  out.write(kMagic, sizeof kMagic);
  put_u64(out, kCheckpointVersion);
  put_string(out, key_values_text(m.config().to_key_values()));
  put_string(out, key_values_text(ckpt.train_config));
  put_string(out, m.normalizer().serialize());
  std::ostringstream vocab;
  m.vocab().write(vocab);
  put_string(out, vocab.str());
  put_string(out, state_text(ckpt.state));

  const ParameterStore& store = m.parameters();
  put_u64(out, store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const Parameter& p = store[i];
    put_string(out, p.name);
    put_u64(out, p.value.rank());
    for (std::size_t d : p.value.shape()) put_u64(out, d);
    put_u64(out, p.step_count);
    put_doubles(out, p.value);
    put_doubles(out, p.adam_m);
    put_doubles(out, p.adam_v);
    put_doubles(out, i < ckpt.best.size() ? ckpt.best[i] : p.value);
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  write_checkpoint(out, ckpt);
  if (!out) throw DataError("failed writing checkpoint '" + path + "'");
}

Checkpoint read_checkpoint(std::istream& in, const std::string& source) {
  Reader r(in, source);
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    r.fail("not a checkpoint file");
  }
  const std::uint64_t version = r.u64();
  if (version != kCheckpointVersion) {
    r.fail("format version " + std::to_string(version) + " is not supported (expected " +
           std::to_string(kCheckpointVersion) + ")");
  }
  KeyValues model_kv = parse_key_values_text(r.string());
  Checkpoint ckpt;
  ckpt.train_config = parse_key_values_text(r.string());
  Normalizer normalizer = Normalizer::deserialize(r.string());
  std::istringstream vocab_in(r.string());
  Vocab vocab = Vocab::read(vocab_in);
  ckpt.state = parse_state_text(r.string());

  ModelConfig config = ModelConfig::take(model_kv);
  if (!model_kv.empty()) r.fail("unknown model config key '" + model_kv.begin()->first + "'");
  ckpt.model = std::make_unique<JointModel>(config, std::move(vocab), std::move(normalizer), 0);

  ParameterStore& store = ckpt.model->parameters();
  const std::uint64_t count = r.u64();
  if (count != store.size()) {
    r.fail("parameter count " + std::to_string(count) + " does not match the architecture (" +
           std::to_string(store.size()) + ")");
  }
  for (std::size_t i = 0; i < store.size(); ++i) {
    Parameter& p = store[i];
    const std::string name = r.string();
    if (name != p.name) r.fail("parameter '" + name + "' found where '" + p.name + "' was expected");
    const std::uint64_t rank = r.u64();
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = r.u64();
    if (shape != p.value.shape()) {
      r.fail("parameter '" + name + "' has shape " + shape_string(shape) + ", expected " +
             p.value.shape_string());
    }
    p.step_count = r.u64();
    r.doubles(p.value);
    r.doubles(p.adam_m);
    r.doubles(p.adam_v);
    Tensor best = Tensor::zeros_like(p.value);
    r.doubles(best);
    ckpt.best.push_back(std::move(best));
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in, path);
}

}  // namespace morphdis
