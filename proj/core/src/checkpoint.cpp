// SPDX-License-Identifier: Apache-2.0
#include "lfm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <zlib.h>

#include "lfm/error.hpp"

namespace lfm {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr std::uint8_t kNoInterpolant = 0xFF;
constexpr std::uint32_t kMaxCount = 1u << 20;

class Writer {
 public:
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }

  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }

  std::vector<std::uint8_t> finish() {
    put(crc32_ieee(bytes_));
    return std::move(bytes_);
  }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t limit) : bytes_(bytes), limit_(limit) {}

  template <typename T>
  T get(const char* what) {
    T value;
    need(sizeof(T), what);
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  void get_bytes(void* out, std::size_t n, const char* what) {
    need(n, what);
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }

  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (n > limit_ - pos_) {
      throw CheckpointError(CheckpointError::Kind::truncated,
                            std::string("checkpoint truncated while reading ") + what + " at byte " +
                                std::to_string(pos_));
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, CheckpointKind kind, int d, std::size_t n) {
  w.put_bytes("LFM1", 4);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(kind));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(n));
}

void write_block(Writer& w, const VelocityField& f, std::uint8_t interpolant, double gamma) {
  const MlpSpec& s = f.spec();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.hidden_widths.size()));
  for (int width : s.hidden_widths) w.put<std::uint32_t>(static_cast<std::uint32_t>(width));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(s.activation));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(s.time.kind));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.time.kind == TimeEncoding::sinusoidal ? s.time.k : 0));
  w.put<std::uint8_t>(interpolant);
  w.put<double>(gamma);
  w.put<std::uint64_t>(static_cast<std::uint64_t>(f.params().size()));
  w.put_bytes(f.params().data(), static_cast<std::size_t>(f.params().size()) * sizeof(double));
}

struct BlockRecord {
  VelocityField field;
  std::uint8_t interpolant;
  double gamma;
};

BlockRecord read_block(Reader& r, int d, std::size_t index) {
  const std::string where = "block " + std::to_string(index + 1);
  auto malformed = [&](const std::string& what) {
    return CheckpointError(CheckpointError::Kind::malformed, "checkpoint " + where + ": " + what);
  };
  MlpSpec spec;
  spec.input_dim = d;
  const auto n_hidden = r.get<std::uint32_t>("hidden layer count");
  if (n_hidden == 0 || n_hidden > kMaxCount) throw malformed("invalid hidden layer count " + std::to_string(n_hidden));
  for (std::uint32_t i = 0; i < n_hidden; ++i) {
    const auto width = r.get<std::uint32_t>("hidden width");
    if (width == 0 || width > kMaxCount) throw malformed("invalid hidden width " + std::to_string(width));
    spec.hidden_widths.push_back(static_cast<int>(width));
  }
  const auto act = r.get<std::uint8_t>("activation id");
  if (act > static_cast<std::uint8_t>(Activation::identity)) throw malformed("unknown activation id " + std::to_string(act));
  spec.activation = static_cast<Activation>(act);
  const auto tf = r.get<std::uint8_t>("time-feature id");
  if (tf > static_cast<std::uint8_t>(TimeEncoding::none)) throw malformed("unknown time-feature id " + std::to_string(tf));
  spec.time.kind = static_cast<TimeEncoding>(tf);
  const auto k = r.get<std::uint32_t>("time-feature k");
  if (k > 64) throw malformed("invalid time-feature k " + std::to_string(k));
  spec.time.k = static_cast<int>(k);
  const auto interpolant = r.get<std::uint8_t>("interpolant id");
  const double gamma = r.get<double>("gamma");
  const auto count = r.get<std::uint64_t>("param count");
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw malformed(e.what());
  }
  if (count != static_cast<std::uint64_t>(spec.param_count())) {
    throw malformed("param count " + std::to_string(count) + " does not match architecture (" +
                    std::to_string(spec.param_count()) + ")");
  }
  ParamVector params(static_cast<Eigen::Index>(count));
  r.get_bytes(params.data(), count * sizeof(double), "parameters");
  if (!params.allFinite()) throw malformed("non-finite parameter");
  return {VelocityField(std::move(spec), std::move(params)), interpolant, gamma};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError(CheckpointError::Kind::io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError(CheckpointError::Kind::io, "failed writing '" + path.string() + "'");
}

}  // namespace

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, bytes.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_checkpoint(const LfmModel& model) {
  model.validate();
  Writer w;
  write_header(w, CheckpointKind::lfm, model.dim, model.blocks.size());
  for (const SubFlow& b : model.blocks) write_block(w, b.field, static_cast<std::uint8_t>(b.interpolant), b.gamma);
  return w.finish();
}

std::vector<std::uint8_t> encode_checkpoint(const DistilledModel& model) {
  model.validate();
  Writer w;
  write_header(w, CheckpointKind::distilled, model.dim, model.maps.size());
  for (const VelocityField& f : model.maps) write_block(w, f, kNoInterpolant, 0.0);
  return w.finish();
}

AnyModel decode_checkpoint(std::span<const std::uint8_t> bytes, const IntegratorConfig& integrator) {
  if (bytes.size() < 8) throw CheckpointError(CheckpointError::Kind::truncated, "checkpoint truncated: header incomplete");
  if (std::memcmp(bytes.data(), "LFM1", 4) != 0) {
    throw CheckpointError(CheckpointError::Kind::bad_magic, "not a checkpoint file (bad magic)");
  }
  std::uint32_t version = 0;
  std::memcpy(&version, bytes.data() + 4, sizeof(version));
  if (version != kCheckpointVersion) {
    throw CheckpointError(CheckpointError::Kind::version_mismatch,
                          "unsupported checkpoint format version " + std::to_string(version) + " (expected " +
                              std::to_string(kCheckpointVersion) + ")");
  }
  if (bytes.size() < 4 + 4 + 1 + 4 + 4 + 4) {
    throw CheckpointError(CheckpointError::Kind::truncated, "checkpoint truncated: header incomplete");
  }

  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, sizeof(stored));
  const bool crc_ok = stored == crc32_ieee(bytes.first(bytes.size() - 4));
  const CheckpointError crc_error(CheckpointError::Kind::crc_mismatch, "checkpoint CRC-32 mismatch (file corrupted)");

  // Everything up to the trailing CRC is structured payload. On a CRC mismatch
  // the parse only decides between truncation and corruption.
  std::uint8_t kind = 0;
  std::uint32_t d = 0;
  std::vector<BlockRecord> records;
  try {
    Reader r(bytes, bytes.size() - 4);
    r.get<std::uint32_t>("magic");
    r.get<std::uint32_t>("version");
    kind = r.get<std::uint8_t>("kind");
    d = r.get<std::uint32_t>("dimension");
    const auto n = r.get<std::uint32_t>("block count");
    if (kind > 1) throw CheckpointError(CheckpointError::Kind::malformed, "unknown checkpoint kind " + std::to_string(kind));
    if (d == 0 || d > kMaxCount) throw CheckpointError(CheckpointError::Kind::malformed, "invalid dimension");
    if (n == 0 || n > kMaxCount) throw CheckpointError(CheckpointError::Kind::malformed, "invalid block count");
    for (std::uint32_t i = 0; i < n; ++i) records.push_back(read_block(r, static_cast<int>(d), i));
    if (r.position() != bytes.size() - 4) {
      throw CheckpointError(CheckpointError::Kind::malformed,
                            "checkpoint has " + std::to_string(bytes.size() - 4 - r.position()) +
                                " unexpected trailing bytes");
    }
  } catch (const CheckpointError& e) {
    if (crc_ok || e.kind() == CheckpointError::Kind::truncated) throw;
    throw crc_error;
  }
  if (!crc_ok) throw crc_error;

  if (kind == static_cast<std::uint8_t>(CheckpointKind::lfm)) {
    LfmModel model;
    model.dim = static_cast<int>(d);
    model.integrator = integrator;
    for (auto& rec : records) {
      if (rec.interpolant > static_cast<std::uint8_t>(Interpolant::trig)) {
        throw CheckpointError(CheckpointError::Kind::malformed, "unknown interpolant id");
      }
      model.blocks.push_back({std::move(rec.field), rec.gamma, static_cast<Interpolant>(rec.interpolant)});
    }
    try {
      model.validate();
    } catch (const ValidationError& e) {
      throw CheckpointError(CheckpointError::Kind::malformed, e.what());
    }
    return model;
  }
  DistilledModel model;
  model.dim = static_cast<int>(d);
  for (auto& rec : records) model.maps.push_back(std::move(rec.field));
  try {
    model.validate();
  } catch (const ValidationError& e) {
    throw CheckpointError(CheckpointError::Kind::malformed, e.what());
  }
  return model;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Kind::io, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void save_checkpoint(const std::filesystem::path& path, const LfmModel& model) {
  write_file(path, encode_checkpoint(model));
}

void save_checkpoint(const std::filesystem::path& path, const DistilledModel& model) {
  write_file(path, encode_checkpoint(model));
}

AnyModel load_checkpoint(const std::filesystem::path& path, const IntegratorConfig& integrator) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_checkpoint(bytes, integrator);
  } catch (const CheckpointError& e) {
    throw CheckpointError(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace lfm
