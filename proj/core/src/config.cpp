// SPDX-License-Identifier: Apache-2.0
#include "lfm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "lfm/error.hpp"

namespace lfm {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct Entry {
  std::string key;
  std::string value;
  int line;
};

std::vector<Entry> parse_lines(std::string_view text) {
  std::vector<Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    entries.push_back({std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no});
  }
  return entries;
}

[[noreturn]] void bad_value(const Entry& e, const std::string& expected) {
  throw ValidationError("config line " + std::to_string(e.line) + ": key '" + e.key + "' expects " + expected +
                        ", got '" + e.value + "'");
}

double to_double(const Entry& e) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc{} || p != e.value.data() + e.value.size() || !std::isfinite(v)) bad_value(e, "a real number");
  return v;
}

long to_long(const Entry& e) {
  long v = 0;
  const auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc{} || p != e.value.data() + e.value.size()) bad_value(e, "an integer");
  return v;
}

std::uint64_t to_u64(const Entry& e) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc{} || p != e.value.data() + e.value.size()) bad_value(e, "a non-negative integer");
  return v;
}

bool to_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  bad_value(e, "true or false");
}

template <typename Fn>
auto wrap(const Entry& e, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& err) {
    throw ValidationError("config line " + std::to_string(e.line) + ": key '" + e.key + "': " + err.what());
  }
}

std::string fmt(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

TimeFeatures parse_time_features(const Entry& e) {
  if (e.value == "raw") return {TimeEncoding::raw, 0};
  if (e.value.rfind("sinusoidal:", 0) == 0) {
    Entry k_entry{e.key, e.value.substr(11), e.line};
    return {TimeEncoding::sinusoidal, static_cast<int>(to_long(k_entry))};
  }
  bad_value(e, "raw or sinusoidal:<k>");
}

std::string time_features_text(const TimeFeatures& t) {
  return t.kind == TimeEncoding::sinusoidal ? "sinusoidal:" + std::to_string(t.k) : std::string(to_string(t.kind));
}

DatasetKind parse_dataset(const Entry& e) {
  for (auto k : {DatasetKind::rose, DatasetKind::checkerboard, DatasetKind::mixture, DatasetKind::gaussian,
                 DatasetKind::csv}) {
    if (to_string(k) == e.value) return k;
  }
  bad_value(e, "one of rose, checkerboard, mixture, gaussian, csv");
}

std::vector<double> parse_vector(const Entry& e) {
  std::vector<double> out;
  std::string_view rest = e.value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    Entry part{e.key, std::string(trim(rest.substr(0, comma))), e.line};
    out.push_back(to_double(part));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (out.empty()) bad_value(e, "a comma-separated list of reals");
  return out;
}

using Setter = std::function<void(RunConfig&, const Entry&)>;

const std::map<std::string, Setter, std::less<>>& run_setters() {
  static const std::map<std::string, Setter, std::less<>> setters = {
      {"dataset", [](RunConfig& c, const Entry& e) { c.dataset.kind = parse_dataset(e); }},
      {"data_path", [](RunConfig& c, const Entry& e) { c.dataset.csv_path = e.value; }},
      {"csv_header", [](RunConfig& c, const Entry& e) { c.dataset.csv_header = to_bool(e); }},
      {"test_fraction", [](RunConfig& c, const Entry& e) { c.dataset.test_fraction = to_double(e); }},
      {"dataset_dim", [](RunConfig& c, const Entry& e) { c.dataset.expected_dim = static_cast<int>(to_long(e)); }},
      {"n_train", [](RunConfig& c, const Entry& e) { c.dataset.n_train = to_long(e); }},
      {"n_test", [](RunConfig& c, const Entry& e) { c.dataset.n_test = to_long(e); }},
      {"rose_petals", [](RunConfig& c, const Entry& e) { c.dataset.rose_petals = static_cast<int>(to_long(e)); }},
      {"rose_noise", [](RunConfig& c, const Entry& e) { c.dataset.rose_noise = to_double(e); }},
      {"mixture_components",
       [](RunConfig& c, const Entry& e) { c.dataset.mixture_components = static_cast<int>(to_long(e)); }},
      {"mixture_radius", [](RunConfig& c, const Entry& e) { c.dataset.mixture_radius = to_double(e); }},
      {"mixture_sigma", [](RunConfig& c, const Entry& e) { c.dataset.mixture_sigma = to_double(e); }},
      {"gaussian_mean", [](RunConfig& c, const Entry& e) { c.dataset.gaussian_mean = parse_vector(e); }},
      {"batch_size", [](RunConfig& c, const Entry& e) { c.block.batch_size = to_long(e); }},
      {"training_batches", [](RunConfig& c, const Entry& e) { c.block.n_batches = to_long(e); }},
      {"hidden_width", [](RunConfig& c, const Entry& e) { c.hidden_width = static_cast<int>(to_long(e)); }},
      {"hidden_layers", [](RunConfig& c, const Entry& e) { c.hidden_layers = static_cast<int>(to_long(e)); }},
      {"activation",
       [](RunConfig& c, const Entry& e) { c.activation = wrap(e, [&] { return parse_activation(e.value); }); }},
      {"time_features", [](RunConfig& c, const Entry& e) { c.time_features = parse_time_features(e); }},
      {"n_blocks", [](RunConfig& c, const Entry& e) { c.n_blocks = static_cast<int>(to_long(e)); }},
      {"c", [](RunConfig& c, const Entry& e) { c.schedule_c = to_double(e); }},
      {"rho", [](RunConfig& c, const Entry& e) { c.schedule_rho = to_double(e); }},
      {"learning_rate", [](RunConfig& c, const Entry& e) { c.block.adam.lr = to_double(e); }},
      {"lr_decay_factor", [](RunConfig& c, const Entry& e) { c.block.adam.decay_factor = to_double(e); }},
      {"lr_decay_every", [](RunConfig& c, const Entry& e) { c.block.adam.decay_every = to_long(e); }},
      {"adam_beta1", [](RunConfig& c, const Entry& e) { c.block.adam.beta1 = to_double(e); }},
      {"adam_beta2", [](RunConfig& c, const Entry& e) { c.block.adam.beta2 = to_double(e); }},
      {"adam_eps", [](RunConfig& c, const Entry& e) { c.block.adam.eps = to_double(e); }},
      {"beta_alpha", [](RunConfig& c, const Entry& e) { c.block.time_sampler.alpha = to_double(e); }},
      {"beta_beta", [](RunConfig& c, const Entry& e) { c.block.time_sampler.beta = to_double(e); }},
      {"interpolant",
       [](RunConfig& c, const Entry& e) { c.block.interpolant = wrap(e, [&] { return parse_interpolant(e.value); }); }},
      {"integrator",
       [](RunConfig& c, const Entry& e) { c.integrator.scheme = wrap(e, [&] { return parse_scheme(e.value); }); }},
      {"integrator_steps", [](RunConfig& c, const Entry& e) { c.integrator.steps = static_cast<int>(to_long(e)); }},
      {"seed", [](RunConfig& c, const Entry& e) { c.seed = to_u64(e); }},
  };
  return setters;
}

using DistillSetter = std::function<void(DistillConfig&, const Entry&)>;

const std::map<std::string, DistillSetter, std::less<>>& distill_setters() {
  static const std::map<std::string, DistillSetter, std::less<>> setters = {
      {"chain_samples", [](DistillConfig& c, const Entry& e) { c.chain_samples = to_long(e); }},
      {"hidden_width", [](DistillConfig& c, const Entry& e) { c.hidden_width = static_cast<int>(to_long(e)); }},
      {"hidden_layers", [](DistillConfig& c, const Entry& e) { c.hidden_layers = static_cast<int>(to_long(e)); }},
      {"activation",
       [](DistillConfig& c, const Entry& e) { c.activation = wrap(e, [&] { return parse_activation(e.value); }); }},
      {"batch_size", [](DistillConfig& c, const Entry& e) { c.block.batch_size = to_long(e); }},
      {"training_batches", [](DistillConfig& c, const Entry& e) { c.block.n_batches = to_long(e); }},
      {"learning_rate", [](DistillConfig& c, const Entry& e) { c.block.adam.lr = to_double(e); }},
      {"lr_decay_factor", [](DistillConfig& c, const Entry& e) { c.block.adam.decay_factor = to_double(e); }},
      {"lr_decay_every", [](DistillConfig& c, const Entry& e) { c.block.adam.decay_every = to_long(e); }},
      {"adam_beta1", [](DistillConfig& c, const Entry& e) { c.block.adam.beta1 = to_double(e); }},
      {"adam_beta2", [](DistillConfig& c, const Entry& e) { c.block.adam.beta2 = to_double(e); }},
      {"adam_eps", [](DistillConfig& c, const Entry& e) { c.block.adam.eps = to_double(e); }},
      {"seed", [](DistillConfig& c, const Entry& e) { c.seed = to_u64(e); }},
  };
  return setters;
}

struct PresetRow {
  const char* name;
  DatasetKind dataset;
  int dim;
  long n_train;
  long batch;
  long total_batches;
  int width;
  int layers;
  Activation act;
  int n_blocks;
  double c;
  double rho;
  double lr;
  double decay_factor;
  long decay_every;
  double beta_alpha;
  double beta_beta;
};

// Full-scale rows: batch budgets are totals over all blocks and are divided
// evenly per block. The fractal-tree column is carried by the checkerboard sampler.
constexpr PresetRow kFullPresets[] = {
    {"rose", DatasetKind::rose, 2, 2000000, 10000, 50000, 256, 3, Activation::softplus, 9, 0.025, 1.25, 2e-4, 0.99,
     1000, 1.0, 1.0},
    {"checkerboard", DatasetKind::checkerboard, 2, 2000000, 10000, 50000, 256, 3, Activation::softplus, 9, 0.025, 1.25,
     2e-4, 0.99, 1000, 1.0, 1.0},
    {"power", DatasetKind::csv, 6, 0, 30000, 100000, 256, 4, Activation::relu, 4, 0.15, 1.3, 5e-3, 0.99, 1000, 1.0,
     1.0},
    {"gas", DatasetKind::csv, 8, 0, 50000, 100000, 362, 5, Activation::relu, 2, 0.05, 1.0, 2e-3, 0.99, 1000, 1.0, 0.5},
    {"miniboone", DatasetKind::csv, 43, 0, 1000, 100000, 362, 4, Activation::relu, 2, 0.35, 1.0, 5e-3, 0.9, 4000, 1.0,
     1.0},
    {"bsds300", DatasetKind::csv, 63, 0, 500, 30000, 512, 4, Activation::elu, 4, 0.25, 1.0, 2e-3, 0.8, 4000, 1.0, 1.0},
};

RunConfig from_row(const PresetRow& row) {
  RunConfig c;
  c.preset = row.name;
  c.dataset.kind = row.dataset;
  c.dataset.expected_dim = row.dim;
  c.dataset.n_train = row.n_train > 0 ? row.n_train : c.dataset.n_train;
  c.block.batch_size = row.batch;
  c.block.n_batches = row.total_batches / row.n_blocks;
  c.hidden_width = row.width;
  c.hidden_layers = row.layers;
  c.activation = row.act;
  c.n_blocks = row.n_blocks;
  c.schedule_c = row.c;
  c.schedule_rho = row.rho;
  c.block.adam.lr = row.lr;
  c.block.adam.decay_factor = row.decay_factor;
  c.block.adam.decay_every = row.decay_every;
  c.block.time_sampler = {row.beta_alpha, row.beta_beta};
  c.block.interpolant = Interpolant::trig;
  return c;
}

/// Desk-scale variant: budgets cut about 20x, narrower nets, N capped at 4.
RunConfig mini(RunConfig c, std::string name) {
  c.preset = std::move(name);
  c.block.batch_size = std::max<long>(c.block.batch_size / 20, 256);
  c.block.n_batches = 625;
  c.block.adam.lr = 1e-3;
  c.block.adam.decay_every = std::max<long>(c.block.adam.decay_every / 20, 50);
  c.hidden_width = 64;
  c.hidden_layers = std::min(c.hidden_layers, 3);
  if (c.n_blocks > 4) {
    c.n_blocks = 4;
    c.schedule_c = 0.1;
    c.schedule_rho = 1.25;
  }
  c.dataset.n_train = 20000;
  c.dataset.n_test = 5000;
  return c;
}

void apply(RunConfig& cfg, const std::vector<Entry>& entries) {
  const auto& setters = run_setters();
  for (const Entry& e : entries) {
    if (e.key == "preset") continue;
    const auto it = setters.find(e.key);
    if (it == setters.end()) {
      throw ValidationError("config line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
    it->second(cfg, e);
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::rose: return "rose";
    case DatasetKind::checkerboard: return "checkerboard";
    case DatasetKind::mixture: return "mixture";
    case DatasetKind::gaussian: return "gaussian";
    case DatasetKind::csv: return "csv";
  }
  return "unknown";
}

MlpSpec RunConfig::mlp_spec() const {
  MlpSpec spec;
  spec.input_dim = dataset.expected_dim;
  spec.hidden_widths.assign(static_cast<std::size_t>(std::max(hidden_layers, 0)), hidden_width);
  spec.activation = activation;
  spec.time = time_features;
  return spec;
}

BlockTrainConfig RunConfig::block_config() const {
  BlockTrainConfig b = block;
  b.seed = derive_seed(seed, streams::training);
  return b;
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ValidationError("config key '" + key + "': " + what);
  };
  require(dataset.expected_dim >= 1, "dataset_dim", "must be >= 1");
  require(dataset.kind == DatasetKind::csv || dataset.kind == DatasetKind::gaussian || dataset.expected_dim == 2,
          "dataset_dim", "two-dimensional samplers need dataset_dim = 2");
  if (dataset.kind == DatasetKind::gaussian) {
    require(static_cast<int>(dataset.gaussian_mean.size()) == dataset.expected_dim, "gaussian_mean",
            "length must equal dataset_dim");
  }
  if (dataset.kind == DatasetKind::csv) {
    require(!dataset.csv_path.empty(), "data_path", "required for dataset = csv");
    require(dataset.test_fraction >= 0.0 && dataset.test_fraction < 1.0, "test_fraction", "must lie in [0, 1)");
  } else {
    require(dataset.n_train >= 1, "n_train", "must be >= 1");
    require(dataset.n_test >= 0, "n_test", "must be >= 0");
  }
  require(dataset.rose_petals >= 1, "rose_petals", "must be >= 1");
  require(dataset.rose_noise >= 0.0, "rose_noise", "must be >= 0");
  require(dataset.mixture_components >= 1, "mixture_components", "must be >= 1");
  require(dataset.mixture_sigma > 0.0, "mixture_sigma", "must be positive");
  require(n_blocks >= 1, "n_blocks", "must be >= 1");
  require(schedule_c > 0.0, "c", "must be positive");
  require(schedule_rho > 0.0, "rho", "must be positive");
  require(hidden_width >= 1, "hidden_width", "must be >= 1");
  require(hidden_layers >= 1, "hidden_layers", "must be >= 1");
  require(block.batch_size >= 1, "batch_size", "must be >= 1");
  require(block.n_batches >= 1, "training_batches", "must be >= 1");
  require(block.adam.lr > 0.0, "learning_rate", "must be positive");
  require(block.adam.decay_factor > 0.0 && block.adam.decay_factor <= 1.0, "lr_decay_factor", "must lie in (0, 1]");
  require(block.adam.decay_every >= 1, "lr_decay_every", "must be >= 1");
  require(block.time_sampler.alpha > 0.0, "beta_alpha", "must be positive");
  require(block.time_sampler.beta > 0.0, "beta_beta", "must be positive");
  require(integrator.steps >= 1, "integrator_steps", "must be >= 1");
  require(time_features.kind != TimeEncoding::none, "time_features", "velocity fields need a time input");
  require(time_features.kind != TimeEncoding::sinusoidal || time_features.k >= 1, "time_features",
          "sinusoidal needs k >= 1");
  block.adam.validate();
}

MlpSpec DistillConfig::mlp_spec(int dim) const {
  MlpSpec spec;
  spec.input_dim = dim;
  spec.hidden_widths.assign(static_cast<std::size_t>(std::max(hidden_layers, 0)), hidden_width);
  spec.activation = activation;
  spec.time = {TimeEncoding::none, 0};
  return spec;
}

void DistillConfig::validate() const {
  if (chain_samples < 1) throw ValidationError("config key 'chain_samples': must be >= 1");
  if (hidden_width < 1) throw ValidationError("config key 'hidden_width': must be >= 1");
  if (hidden_layers < 1) throw ValidationError("config key 'hidden_layers': must be >= 1");
  block.validate();
}

RunConfig preset(std::string_view name) {
  for (const auto& row : kFullPresets) {
    if (name == row.name) return from_row(row);
    if (name == std::string(row.name) + "-mini") return mini(from_row(row), std::string(name));
  }
  if (name == "mixture-mini") {
    RunConfig c = mini(from_row(kFullPresets[0]), "mixture-mini");
    c.dataset.kind = DatasetKind::mixture;
    c.block.batch_size = 512;
    c.block.n_batches = 5000;
    c.hidden_width = 128;
    c.schedule_c = 0.1;
    c.schedule_rho = 1.25;
    c.block.interpolant = Interpolant::ot;
    c.time_features = {TimeEncoding::sinusoidal, 3};
    c.block.adam.lr = 5e-3;
    c.block.adam.decay_factor = 0.5;
    c.block.adam.decay_every = 1000;
    return c;
  }
  if (name == "gaussian-mini") {
    RunConfig c = mini(from_row(kFullPresets[0]), "gaussian-mini");
    c.dataset.kind = DatasetKind::gaussian;
    c.dataset.gaussian_mean = {2.0, 0.0};
    c.dataset.n_train = 10000;
    // Total OU time 2.4: chi2 of the limit N((2e^{-2.4}, 0), I) is about 0.03.
    c.schedule_c = 0.6;
    c.schedule_rho = 1.0;
    return c;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown preset '" + std::string(name) + "'; known presets: " + known);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& row : kFullPresets) names.emplace_back(row.name);
  for (const auto& row : kFullPresets) names.push_back(std::string(row.name) + "-mini");
  names.emplace_back("mixture-mini");
  names.emplace_back("gaussian-mini");
  return names;
}

RunConfig parse_run_config(std::string_view text) {
  const auto entries = parse_lines(text);
  RunConfig cfg;
  for (const Entry& e : entries) {
    if (e.key == "preset") cfg = wrap(e, [&] { return preset(e.value); });
  }
  apply(cfg, entries);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_text(path)); }

DistillConfig parse_distill_config(std::string_view text) {
  DistillConfig cfg;
  cfg.block.batch_size = 512;
  cfg.block.n_batches = 8000;
  cfg.block.adam.lr = 3e-3;
  cfg.block.adam.decay_factor = 0.5;
  cfg.block.adam.decay_every = 2000;
  const auto& setters = distill_setters();
  const auto& run_keys = run_setters();
  for (const Entry& e : parse_lines(text)) {
    if (const auto it = setters.find(e.key); it != setters.end()) {
      it->second(cfg, e);
    } else if (e.key != "preset" && run_keys.find(e.key) == run_keys.end()) {
      throw ValidationError("config line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

DistillConfig load_distill_config(const std::filesystem::path& path) { return parse_distill_config(read_text(path)); }

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  auto kv = [&](const char* key, const std::string& value) { os << key << " = " << value << '\n'; };
  if (!c.preset.empty()) os << "# derived from preset " << c.preset << '\n';
  kv("dataset", std::string(to_string(c.dataset.kind)));
  kv("dataset_dim", std::to_string(c.dataset.expected_dim));
  if (c.dataset.kind == DatasetKind::csv) {
    kv("data_path", c.dataset.csv_path);
    kv("csv_header", c.dataset.csv_header ? "true" : "false");
    kv("test_fraction", fmt(c.dataset.test_fraction));
  } else {
    kv("n_train", std::to_string(c.dataset.n_train));
    kv("n_test", std::to_string(c.dataset.n_test));
  }
  if (c.dataset.kind == DatasetKind::rose) {
    kv("rose_petals", std::to_string(c.dataset.rose_petals));
    kv("rose_noise", fmt(c.dataset.rose_noise));
  }
  if (c.dataset.kind == DatasetKind::mixture) {
    kv("mixture_components", std::to_string(c.dataset.mixture_components));
    kv("mixture_radius", fmt(c.dataset.mixture_radius));
    kv("mixture_sigma", fmt(c.dataset.mixture_sigma));
  }
  if (c.dataset.kind == DatasetKind::gaussian) {
    std::string m;
    for (double v : c.dataset.gaussian_mean) m += (m.empty() ? "" : ",") + fmt(v);
    kv("gaussian_mean", m);
  }
  kv("batch_size", std::to_string(c.block.batch_size));
  kv("training_batches", std::to_string(c.block.n_batches));
  kv("hidden_width", std::to_string(c.hidden_width));
  kv("hidden_layers", std::to_string(c.hidden_layers));
  kv("activation", std::string(to_string(c.activation)));
  kv("time_features", time_features_text(c.time_features));
  kv("n_blocks", std::to_string(c.n_blocks));
  kv("c", fmt(c.schedule_c));
  kv("rho", fmt(c.schedule_rho));
  kv("learning_rate", fmt(c.block.adam.lr));
  kv("lr_decay_factor", fmt(c.block.adam.decay_factor));
  kv("lr_decay_every", std::to_string(c.block.adam.decay_every));
  kv("adam_beta1", fmt(c.block.adam.beta1));
  kv("adam_beta2", fmt(c.block.adam.beta2));
  kv("adam_eps", fmt(c.block.adam.eps));
  kv("beta_alpha", fmt(c.block.time_sampler.alpha));
  kv("beta_beta", fmt(c.block.time_sampler.beta));
  kv("interpolant", std::string(to_string(c.block.interpolant)));
  kv("integrator", std::string(to_string(c.integrator.scheme)));
  kv("integrator_steps", std::to_string(c.integrator.steps));
  kv("seed", std::to_string(c.seed));
  return os.str();
}

std::string to_text(const DistillConfig& c) {
  std::ostringstream os;
  auto kv = [&](const char* key, const std::string& value) { os << key << " = " << value << '\n'; };
  kv("chain_samples", std::to_string(c.chain_samples));
  kv("hidden_width", std::to_string(c.hidden_width));
  kv("hidden_layers", std::to_string(c.hidden_layers));
  kv("activation", std::string(to_string(c.activation)));
  kv("batch_size", std::to_string(c.block.batch_size));
  kv("training_batches", std::to_string(c.block.n_batches));
  kv("learning_rate", fmt(c.block.adam.lr));
  kv("lr_decay_factor", fmt(c.block.adam.decay_factor));
  kv("lr_decay_every", std::to_string(c.block.adam.decay_every));
  kv("adam_beta1", fmt(c.block.adam.beta1));
  kv("adam_beta2", fmt(c.block.adam.beta2));
  kv("adam_eps", fmt(c.block.adam.eps));
  kv("seed", std::to_string(c.seed));
  return os.str();
}

}  // namespace lfm
