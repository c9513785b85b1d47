#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace daz {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct KeyDef {
  const char* key;
  const char* default_value;  // nullptr: required
};

// Keys shared by every experiment.
const std::vector<KeyDef> kCommonKeys = {
    {"base_seed", "42"},
    {"output_dir", ""},  // filled as out/<experiment>
    {"threads", "0"},    // 0: hardware concurrency
};

const std::vector<KeyDef> kScheduleKeys = {
    {"t_small", nullptr}, {"t_large", nullptr}, {"levels", nullptr},
    {"inner_steps", "1"}, {"step_policy", "half-t"},
};

const std::vector<KeyDef> kSamplerKeys = {
    {"samplers", "ula,myula,skrock,ald,daz,daz-skrock"},
    {"n_chains", nullptr},
    {"skrock_eta", "0.05"},
    {"skrock_stages", "5"},
    {"skrock_step_factor", "0.9"},
};

struct ExperimentDef {
  const char* name;
  std::vector<KeyDef> keys;
};

const std::vector<ExperimentDef>& experiment_defs() {
  static const std::vector<ExperimentDef> defs = {
      {"moreau-sweep",
       {{"potential", "gmm4"},
        {"t_small", "1e-2"},
        {"t_large", "1e2"},
        {"levels", "7"},
        {"grid_lo", "-5"},
        {"grid_hi", "5"},
        {"grid_n", "1001"},
        {"partition_lo", "-10"},
        {"partition_hi", "10"},
        {"partition_n", "4001"}}},
      {"laplace-moreau",
       {{"t_list", "0.001,0.005,0.01,0.05,0.1,0.5,1.0"},
        {"tau_list", "0.001,0.1,0.5"},
        {"n_chains", "10000"},
        {"n_iters", "2000"},
        {"grid_lo", "-10"},
        {"grid_hi", "10"},
        {"grid_n", "4001"}}},
      {"gmm",
       {{"t_small", "1e-4"},
        {"t_large", "1e-2"},
        {"levels", "50"},
        {"inner_steps", "20"},
        {"step_policy", "half-t"},
        {"recorder", "full"},
        {"samplers", "ula,myula,skrock,ald,daz,daz-skrock"},
        {"n_chains", "1000"},
        {"skrock_eta", "0.05"},
        {"skrock_stages", "5"},
        {"skrock_step_factor", "0.9"},
        {"grid_lo", "-10"},
        {"grid_hi", "10"},
        {"grid_n", "4001"}}},
      {"tv-prior",
       {{"dim", "10"},
        {"lambda", "1.0"},
        {"t_small", "2e-4"},
        {"t_large", "1e-1"},
        {"levels", "1000"},
        {"inner_steps", "1"},
        {"step_policy", "half-t"},
        {"recorder", "full"},
        {"samplers", "ula,myula,skrock,ald,daz,daz-skrock"},
        {"n_chains", "10000"},
        {"full_scale_chains", "100000"},
        {"skrock_eta", "0.05"},
        {"skrock_stages", "5"},
        {"skrock_step_factor", "0.9"},
        {"init_var", "0.1"},
        {"window", "50"},
        {"ref_lo", "-8"},
        {"ref_hi", "8"},
        {"ref_n", "2001"},
        {"full_scale", "false"}}},
      {"tv-chain",
       {{"dim", "100"},
        {"sigma", "0.1"},
        {"lambda", "30"},
        {"data_seed", "1234"},
        {"t_small", "1e-4"},
        {"t_large", "1e-3"},
        {"levels", "50"},
        {"inner_steps", "20"},
        {"step_policy", "half-t"},
        {"recorder", "full"},
        {"samplers", "ula,myula,skrock,ald,daz,daz-skrock"},
        {"n_chains", "1000"},
        {"skrock_eta", "0.05"},
        {"skrock_stages", "5"},
        {"skrock_step_factor", "0.9"},
        {"labels", "501"},
        {"window", "20"}}},
      {"tv-image",
       {{"rows", "64"},
        {"cols", "64"},
        {"image", "synthetic"},
        {"sigma", "0.05"},
        {"lambda", "30"},
        {"data_seed", "1234"},
        {"t_small", "1e-5"},
        {"t_large", "1e-3"},
        {"levels", "50"},
        {"inner_steps", "20"},
        {"step_policy", "half-t"},
        {"samplers", "ula,myula,skrock,ald,daz,daz-skrock"},
        {"n_chains", "100"},
        {"skrock_eta", "0.05"},
        {"skrock_stages", "5"},
        {"skrock_step_factor", "0.9"},
        {"labels", "101"},
        {"bp_damping", "0.5"},
        {"bp_max_sweeps", "200"},
        {"prox_tolerance", "1e-6"},
        {"window", "20"},
        {"recorder", "strided:10"},
        {"full_scale", "false"},
        {"full_scale_size", "200"}}},
  };
  return defs;
}

const ExperimentDef& find_experiment(const std::string& name) {
  for (const auto& d : experiment_defs())
    if (name == d.name) return d;
  fail(Error::Code::Config, "unknown experiment '" + name + "'");
}

}  // namespace

const std::string& ExperimentConfig::str(const std::string& key) const {
  auto it = kv.find(key);
  require(it != kv.end(), Error::Code::Config, "missing config key '" + key + "'");
  return it->second;
}

double ExperimentConfig::num(const std::string& key) const {
  const std::string& v = str(key);
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    require(pos == v.size(), Error::Code::Config, "bad number");
    return x;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(Error::Code::Config, "config key '" + key + "': not a number: '" + v + "'");
  }
}

long long ExperimentConfig::integer(const std::string& key) const {
  const double x = num(key);
  const long long i = static_cast<long long>(x);
  require(static_cast<double>(i) == x, Error::Code::Config,
          "config key '" + key + "' must be an integer");
  return i;
}

bool ExperimentConfig::flag(const std::string& key) const {
  const std::string& v = str(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(Error::Code::Config, "config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<std::string> ExperimentConfig::list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Vec ExperimentConfig::num_list(const std::string& key) const {
  Vec out;
  for (const std::string& s : list(key)) {
    try {
      out.push_back(std::stod(s));
    } catch (...) {
      fail(Error::Code::Config, "config key '" + key + "': not a number list");
    }
  }
  return out;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    require(eq != std::string::npos, Error::Code::Config,
            "config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty(), Error::Code::Config,
            "config line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> load_key_values(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Error::Code::Io, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

ExperimentConfig resolve_config(std::map<std::string, std::string> raw,
                                const std::map<std::string, std::string>& overrides) {
  for (const auto& [k, v] : overrides) raw[k] = v;
  raw.erase("version");

  auto it = raw.find("experiment");
  require(it != raw.end(), Error::Code::Config, "config: missing 'experiment' key");
  const ExperimentDef& def = find_experiment(it->second);

  ExperimentConfig cfg;
  cfg.experiment = def.name;
  cfg.kv["experiment"] = def.name;

  std::vector<KeyDef> keys = kCommonKeys;
  keys.insert(keys.end(), def.keys.begin(), def.keys.end());

  for (const KeyDef& kd : keys) {
    auto found = raw.find(kd.key);
    if (found != raw.end()) {
      cfg.kv[kd.key] = found->second;
    } else if (kd.default_value != nullptr) {
      cfg.kv[kd.key] = kd.default_value;
    } else {
      fail(Error::Code::Config, std::string("config: missing required key '") + kd.key + "'");
    }
  }
  if (cfg.kv["output_dir"].empty()) cfg.kv["output_dir"] = "out/" + cfg.experiment;

  // reject unknown keys
  for (const auto& [k, v] : raw) {
    if (k == "experiment") continue;
    const bool known = std::any_of(keys.begin(), keys.end(),
                                   [&](const KeyDef& kd) { return k == kd.key; });
    require(known, Error::Code::Config,
            "config: unknown key '" + k + "' for experiment '" + cfg.experiment + "'");
  }
  return cfg;
}

std::string emit_key_values(const std::map<std::string, std::string>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& d : experiment_defs()) names.push_back(d.name);
  return names;
}

std::vector<Diagnostic> validate_config(const ExperimentConfig& cfg) {
  std::vector<Diagnostic> diags;
  const auto err = [&](const std::string& m) { diags.push_back({true, m}); };
  const auto warn = [&](const std::string& m) { diags.push_back({false, m}); };

  try {
    if (cfg.has("t_small") && cfg.has("t_large")) {
      const double ts = cfg.num("t_small"), tl = cfg.num("t_large");
      if (ts <= 0.0 || tl <= 0.0) err("schedule endpoints must be positive");
      else if (ts >= tl) err("schedule endpoints inverted: t_small >= t_large");
      if (cfg.has("levels") && cfg.integer("levels") < 2) err("levels must be at least 2");
      if (cfg.has("step_policy")) {
        const std::string& pol = cfg.str("step_policy");
        if (pol != "half-t" && pol != "lipschitz") err("unknown step_policy '" + pol + "'");
        // half-t keeps tau_n = t_n/2 < t_n, within the large-t step bound.
        if (pol == "lipschitz" && cfg.experiment != "tv-chain" && cfg.experiment != "tv-image")
          warn("lipschitz policy needs a gradient Lipschitz constant; only the data-fidelity "
               "experiments carry one");
      }
    }
    if (cfg.has("samplers")) {
      for (const std::string& s : cfg.list("samplers")) {
        if (s != "ula" && s != "myula" && s != "skrock" && s != "ald" && s != "daz" &&
            s != "daz-skrock")
          err("unknown sampler '" + s + "'");
      }
    }
    if (cfg.has("n_chains") && cfg.integer("n_chains") < 1) err("n_chains must be positive");
    if (cfg.experiment == "tv-chain") {
      // default label range [min(y)-1, max(y)+1] covers the piecewise data
      // (-3..3) plus noise; a custom label count below 2 is rejected.
      if (cfg.integer("labels") < 2) err("labels must be at least 2");
      if (cfg.integer("labels") < 101)
        warn("fewer than 101 labels discretizes the reference marginals coarsely");
    }
    if (cfg.experiment == "tv-image") {
      const long long rows = cfg.flag("full_scale") ? cfg.integer("full_scale_size") : cfg.integer("rows");
      const long long cols = cfg.flag("full_scale") ? cfg.integer("full_scale_size") : cfg.integer("cols");
      if (rows < 2 || cols < 2) err("image must be at least 2x2");
      const long long chains = cfg.integer("n_chains");
      const long long iters = cfg.integer("levels") * cfg.integer("inner_steps");
      const double gib = static_cast<double>(rows * cols) * chains * 8.0 / (1 << 30);
      if (cfg.str("recorder") == "full") {
        const double full_gib = gib * static_cast<double>(iters);
        if (full_gib > 1.0)
          warn("recorder 'full' at this size needs about " + std::to_string(full_gib) +
               " GiB; consider 'summary' or 'strided:<m>'");
      }
      if (gib > 4.0) err("state ensemble alone exceeds 4 GiB; reduce size or chains");
    }
  } catch (const Error& e) {
    err(e.what());
  }
  return diags;
}

}  // namespace daz
