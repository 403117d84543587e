#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "aenet/errors.hpp"
#include "aenet/experiments.hpp"
#include "aenet/rng.hpp"

namespace aenet {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& what) {
  throw ConfigError("config key '" + key + "': '" + value + "' is not " + what);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    bad_value(key, v, std::is_floating_point_v<T> ? "a number" : "an integer");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  for (const auto& item : split_list(v)) out.push_back(parse_number<T>(key, item));
  return out;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    if constexpr (std::is_floating_point_v<T>) {
      s += format_double(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s;
}

std::string join_methods(const std::vector<Method>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += to_string(v[i]);
  }
  return s;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& config_schema() {
  static const std::vector<std::pair<std::string, std::string>> schema{
      {"schema_version", "config layout version (1)"},
      {"family", "transport | burgers | kdv"},
      {"grid_in", "input grid nodes"},
      {"grid_out", "output grid nodes"},
      {"n_train", "training samples"},
      {"n_test", "test samples"},
      {"reduced_dims", "reduced dimensions of the dimension sweep"},
      {"methods", "subset of aenet, pcanet, deeponet"},
      {"n_sweep", "training sizes of the sample-complexity sweep"},
      {"sigmas", "output noise standard deviations of the noise sweep"},
      {"test_grids", "test grid sizes of the grid-transfer sweep"},
      {"repeats", "runs per cell; repeat r uses seed + r"},
      {"seed", "master seed"},
      {"desk_scale", "small widths, epochs, n and grid unless set explicitly"},
      {"output_dir", "root of tables/, series/, models/, datasets/"},
      {"epochs", "training epochs of every network"},
      {"learning_rate", "Adam learning rate"},
      {"batch_size", "mini-batch size"},
      {"ae_width", "hidden width of the autoencoder"},
      {"gamma_width", "hidden width of the latent-to-output network"},
      {"pcanet_width", "hidden width of the PCANet core"},
      {"deeponet_width", "hidden width of branch and trunk"},
      {"pcanet_d_out", "output PCA dimension of PCANet"},
      {"sweep_dim", "latent dimension of the n, noise and grid sweeps"},
      {"noise_sigma", "output noise of the dimension sweep"},
      {"split_stages", "train the two AENet stages on disjoint halves"},
      {"deeponet_trunk_relu", "ReLU on the trunk output"},
      {"quadrature", "midpoint | trapezoid | simpson"},
      {"transfer_interp", "piecewise_constant | linear | cubic"},
      {"workers", "parallel sweep cells (<= 0: one per hardware thread)"},
      {"cache_datasets", "store generated datasets under output_dir/datasets"},
      {"cache_models", "store trained models under output_dir/models"},
  };
  return schema;
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    kv[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return kv;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(ConfigMap& into, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty()) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  into[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

ExperimentConfig build_config(const ConfigMap& kv) {
  std::set<std::string> known;
  for (const auto& [k, _] : config_schema()) known.insert(k);
  for (const auto& [k, _] : kv) {
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }

  ExperimentConfig c;
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (auto v = get("schema_version")) {
    c.schema_version = parse_number<int>("schema_version", *v);
    if (c.schema_version != kConfigSchemaVersion) {
      throw ConfigError("config schema_version " + *v + " is not supported (expected " +
                        std::to_string(kConfigSchemaVersion) + ")");
    }
  }
  if (auto v = get("desk_scale")) c.desk_scale = parse_bool("desk_scale", *v);
  if (c.desk_scale) {
    c.ae_width = c.gamma_width = c.pcanet_width = c.deeponet_width = 64;
    c.epochs = 200;
    c.n_train = 500;
    c.grid_in = c.grid_out = 256;
    c.n_sweep = {63, 125, 250, 500};
    c.test_grids = {8, 16, 32, 64, 128, 256};
  }

  if (auto v = get("family")) c.family = family_from_string(*v);
  if (auto v = get("grid_in")) c.grid_in = parse_number<std::size_t>("grid_in", *v);
  if (auto v = get("grid_out")) c.grid_out = parse_number<std::size_t>("grid_out", *v);
  if (auto v = get("n_train")) c.n_train = parse_number<std::size_t>("n_train", *v);
  if (auto v = get("n_test")) c.n_test = parse_number<std::size_t>("n_test", *v);
  if (auto v = get("reduced_dims")) c.reduced_dims = parse_list<int>("reduced_dims", *v);
  if (auto v = get("methods")) {
    c.methods.clear();
    for (const auto& m : split_list(*v)) c.methods.push_back(method_from_string(m));
  }
  if (auto v = get("n_sweep")) c.n_sweep = parse_list<std::size_t>("n_sweep", *v);
  if (auto v = get("sigmas")) c.sigmas = parse_list<double>("sigmas", *v);
  if (auto v = get("test_grids")) c.test_grids = parse_list<std::size_t>("test_grids", *v);
  if (auto v = get("repeats")) c.repeats = parse_number<int>("repeats", *v);
  if (auto v = get("seed")) c.seed = parse_number<std::uint64_t>("seed", *v);
  if (auto v = get("output_dir")) c.output_dir = *v;
  if (auto v = get("epochs")) c.epochs = parse_number<int>("epochs", *v);
  if (auto v = get("learning_rate")) c.learning_rate = parse_number<double>("learning_rate", *v);
  if (auto v = get("batch_size")) c.batch_size = parse_number<int>("batch_size", *v);
  if (auto v = get("ae_width")) c.ae_width = parse_number<int>("ae_width", *v);
  if (auto v = get("gamma_width")) c.gamma_width = parse_number<int>("gamma_width", *v);
  if (auto v = get("pcanet_width")) c.pcanet_width = parse_number<int>("pcanet_width", *v);
  if (auto v = get("deeponet_width")) c.deeponet_width = parse_number<int>("deeponet_width", *v);
  if (auto v = get("pcanet_d_out")) c.pcanet_d_out = parse_number<int>("pcanet_d_out", *v);
  if (auto v = get("sweep_dim")) c.sweep_dim = parse_number<int>("sweep_dim", *v);
  if (auto v = get("noise_sigma")) c.noise_sigma = parse_number<double>("noise_sigma", *v);
  if (auto v = get("split_stages")) c.split_stages = parse_bool("split_stages", *v);
  if (auto v = get("deeponet_trunk_relu")) {
    c.deeponet_trunk_relu = parse_bool("deeponet_trunk_relu", *v);
  }
  if (auto v = get("quadrature")) c.quadrature = quadrature_kind_from_string(*v);
  if (auto v = get("transfer_interp")) c.transfer_interp = interp_method_from_string(*v);
  if (auto v = get("workers")) c.workers = parse_number<int>("workers", *v);
  if (auto v = get("cache_datasets")) c.cache_datasets = parse_bool("cache_datasets", *v);
  if (auto v = get("cache_models")) c.cache_models = parse_bool("cache_models", *v);
  c.validate();
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  return build_config(parse_config_text(text));
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (grid_in < 2 || grid_out < 2) fail("grids need at least 2 nodes");
  if (n_train < 1) fail("n_train must be >= 1");
  if (n_test < 1) fail("n_test must be >= 1");
  if (reduced_dims.empty()) fail("reduced_dims is empty");
  for (int d : reduced_dims) {
    if (d < 1) fail("reduced_dims must be positive");
  }
  if (methods.empty()) fail("methods is empty");
  if (n_sweep.empty()) fail("n_sweep is empty");
  for (auto n : n_sweep) {
    if (n < 2) fail("n_sweep entries must be >= 2");
  }
  if (sigmas.empty()) fail("sigmas is empty");
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail("sigmas must be finite and >= 0");
  }
  if (test_grids.empty()) fail("test_grids is empty");
  for (auto g : test_grids) {
    if (g < 4) fail("test_grids entries must be >= 4");
  }
  if (repeats < 1) fail("repeats must be >= 1");
  if (sweep_dim < 1) fail("sweep_dim must be >= 1");
  if (ae_width < 1 || gamma_width < 1 || pcanet_width < 1 || deeponet_width < 1) {
    fail("network widths must be positive");
  }
  if (pcanet_d_out < 1) fail("pcanet_d_out must be >= 1");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
  if (output_dir.empty()) fail("output_dir is empty");
  train_config().validate();
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream o;
  o << "schema_version = " << schema_version << "\n"
    << "family = " << to_string(family) << "\n"
    << "grid_in = " << grid_in << "\n"
    << "grid_out = " << grid_out << "\n"
    << "n_train = " << n_train << "\n"
    << "n_test = " << n_test << "\n"
    << "reduced_dims = " << join(reduced_dims) << "\n"
    << "methods = " << join_methods(methods) << "\n"
    << "n_sweep = " << join(n_sweep) << "\n"
    << "sigmas = " << join(sigmas) << "\n"
    << "test_grids = " << join(test_grids) << "\n"
    << "repeats = " << repeats << "\n"
    << "seed = " << seed << "\n"
    << "desk_scale = " << (desk_scale ? "true" : "false") << "\n"
    << "output_dir = " << output_dir << "\n"
    << "epochs = " << epochs << "\n"
    << "learning_rate = " << format_double(learning_rate) << "\n"
    << "batch_size = " << batch_size << "\n"
    << "ae_width = " << ae_width << "\n"
    << "gamma_width = " << gamma_width << "\n"
    << "pcanet_width = " << pcanet_width << "\n"
    << "deeponet_width = " << deeponet_width << "\n"
    << "pcanet_d_out = " << pcanet_d_out << "\n"
    << "sweep_dim = " << sweep_dim << "\n"
    << "noise_sigma = " << format_double(noise_sigma) << "\n"
    << "split_stages = " << (split_stages ? "true" : "false") << "\n"
    << "deeponet_trunk_relu = " << (deeponet_trunk_relu ? "true" : "false") << "\n"
    << "quadrature = " << to_string(quadrature) << "\n"
    << "transfer_interp = " << to_string(transfer_interp) << "\n"
    << "workers = " << workers << "\n"
    << "cache_datasets = " << (cache_datasets ? "true" : "false") << "\n"
    << "cache_models = " << (cache_models ? "true" : "false") << "\n";
  return o.str();
}

std::string ExperimentConfig::fingerprint() const {
  // output location, caching and parallelism do not change any result
  ExperimentConfig c = *this;
  c.output_dir = "-";
  c.workers = 1;
  c.cache_datasets = c.cache_models = false;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash_tag(c.to_text())));
  return buf;
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.epochs = epochs;
  t.learning_rate = learning_rate;
  t.batch_size = batch_size;
  t.seed = seed;
  return t;
}

std::size_t ExperimentConfig::dataset_size() const {
  std::size_t n = n_train;
  for (auto m : n_sweep) n = std::max(n, m);
  return n;
}

}  // namespace aenet
