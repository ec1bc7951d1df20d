#include "stochnet/config.hpp"

#include <cmath>
#include <cstdlib>
#include <set>

#include "stochnet/error.hpp"
#include "stochnet/io.hpp"
#include "stochnet/toml_lite.hpp"

namespace stochnet {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, key + ": " + msg);
}

// Reads fields of one section, remembering which keys were consumed so that
// misspelled keys are reported instead of silently ignored.
class Section {
 public:
  Section(const json& doc, const std::string& name, std::string display = {})
      : name_(display.empty() ? name : std::move(display)) {
    if (doc.contains(name)) {
      node_ = &doc.at(name);
      if (!node_->is_object()) config_error(name_, "must be a table");
    }
  }

  bool present() const { return node_ != nullptr; }
  std::string key(const std::string& k) const { return name_ + "." + k; }
  bool has(const std::string& k) const { return node_ && node_->contains(k); }

  const json* find(const std::string& k) {
    seen_.insert(k);
    if (!node_ || !node_->contains(k)) return nullptr;
    return &node_->at(k);
  }

  void read(const std::string& k, double& out) {
    if (const auto* v = find(k)) {
      if (!v->is_number()) config_error(key(k), "expected a number");
      out = v->get<double>();
    }
  }
  void read(const std::string& k, int& out) {
    if (const auto* v = find(k)) {
      if (!v->is_number_integer()) config_error(key(k), "expected an integer");
      const auto i = v->get<std::int64_t>();
      if (i < INT32_MIN || i > INT32_MAX) config_error(key(k), "integer out of range");
      out = static_cast<int>(i);
    }
  }
  void read(const std::string& k, std::uint64_t& out) {
    if (const auto* v = find(k)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
        config_error(key(k), "expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }
  void read(const std::string& k, std::optional<std::uint64_t>& out) {
    if (has(k)) {
      std::uint64_t v = 0;
      read(k, v);
      out = v;
    } else {
      seen_.insert(k);
    }
  }
  void read(const std::string& k, std::optional<double>& out) {
    if (has(k)) {
      double v = 0.0;
      read(k, v);
      out = v;
    }
  }

  void read(const std::string& k, bool& out) {
    if (const auto* v = find(k)) {
      if (!v->is_boolean()) config_error(key(k), "expected true or false");
      out = v->get<bool>();
    }
  }
  void read(const std::string& k, std::string& out) {
    if (const auto* v = find(k)) {
      if (!v->is_string()) config_error(key(k), "expected a string");
      out = v->get<std::string>();
    }
  }
  void read(const std::string& k, std::vector<double>& out) {
    if (const auto* v = find(k)) {
      if (!v->is_array()) config_error(key(k), "expected an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) config_error(key(k), "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }
  void read(const std::string& k, std::vector<std::vector<double>>& out) {
    if (const auto* v = find(k)) {
      if (!v->is_array()) config_error(key(k), "expected an array of arrays");
      out.clear();
      for (const auto& row : *v) {
        if (!row.is_array()) config_error(key(k), "expected an array of arrays");
        auto& r = out.emplace_back();
        for (const auto& e : row) {
          if (!e.is_number()) config_error(key(k), "expected numbers");
          r.push_back(e.get<double>());
        }
      }
    }
  }
  void read_path(const std::string& k, std::filesystem::path& out, const std::filesystem::path& base) {
    std::string s;
    read(k, s);
    if (s.empty()) return;
    std::filesystem::path p(s);
    out = p.is_absolute() || base.empty() ? p : (base / p).lexically_normal();
  }

  void finish(const std::set<std::string>& subtables = {}) const {
    if (!node_) return;
    for (const auto& [k, v] : node_->items()) {
      if (!seen_.count(k) && !subtables.count(k)) config_error(key(k), "unknown key");
    }
  }

  const json* node() const { return node_; }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

json optional_path(const std::filesystem::path& p) { return p.empty() ? json() : json(p.string()); }

std::uint64_t derived_seed(std::uint64_t master, std::uint64_t tag) { return stream_seed(master ^ tag, tag); }

constexpr std::uint64_t kNetworkTag = 0x6e6574776f726bULL;  // "network"
constexpr std::uint64_t kAlphaTag = 0x616c706861ULL;        // "alpha"

}  // namespace

std::uint64_t ExperimentConfig::network_seed() const {
  return network.seed.value_or(derived_seed(sde.seed, kNetworkTag));
}

std::uint64_t ExperimentConfig::alpha_seed() const { return model.alpha_seed.value_or(derived_seed(sde.seed, kAlphaTag)); }

void ExperimentConfig::validate() const {
  const auto& nw = network;
  if (nw.kind == "ou-random") {
    if (nw.n < 1) config_error("network.n", "must be >= 1");
    if (!(nw.mu_a > 0.0) || !std::isfinite(nw.mu_a)) config_error("network.mu_a", "must be > 0");
  } else if (nw.kind == "mutualistic") {
    if (nw.incidence.empty()) config_error("network.incidence", "required for mutualistic networks");
    if (!std::filesystem::exists(nw.incidence)) config_error("network.incidence", "file not found: " + nw.incidence.string());
    if (!std::isfinite(nw.mu_gamma)) config_error("network.mu_gamma", "must be finite");
    if (!(nw.beta_max < 0.0)) config_error("network.beta_max", "must be negative");
    if (nw.self_regulation && !std::isfinite(*nw.self_regulation)) {
      config_error("network.self_regulation", "must be finite");
    }
  } else if (nw.kind == "matrix-file") {
    if (nw.matrix.empty()) config_error("network.matrix", "required for matrix-file networks");
    if (!std::filesystem::exists(nw.matrix)) config_error("network.matrix", "file not found: " + nw.matrix.string());
  } else {
    config_error("network.kind", "expected ou-random, mutualistic or matrix-file, got '" + nw.kind + "'");
  }

  const auto& m = model;
  if (m.kind != "ou" && m.kind != "glv" && m.kind != "custom-coefficients") {
    config_error("model.kind", "expected ou, glv or custom-coefficients, got '" + m.kind + "'");
  }
  if (m.epsilon.empty()) config_error("model.epsilon", "must list at least one stochastic strength");
  for (const double e : m.epsilon) {
    if (!(e >= 0.0) || !std::isfinite(e)) config_error("model.epsilon", "values must be finite and >= 0");
  }
  if (m.kind == "glv") {
    if (!std::isfinite(m.mu_alpha)) config_error("model.mu_alpha", "must be finite");
    for (const double a : m.alpha) {
      if (!std::isfinite(a)) config_error("model.alpha", "values must be finite");
    }
  }
  if (m.kind == "custom-coefficients") {
    if (m.coefficients_file.empty()) {
      if (m.self.empty()) config_error("model.self", "required unless model.coefficients_file is given");
      if (m.coupling.empty() || m.coupling.front().empty()) {
        config_error("model.coupling", "required unless model.coefficients_file is given");
      }
      for (const auto& row : m.coupling) {
        if (row.size() != m.coupling.front().size()) config_error("model.coupling", "rows must have equal length");
      }
      if (m.diffusion.empty()) config_error("model.diffusion", "required unless model.coefficients_file is given");
    } else if (!std::filesystem::exists(m.coefficients_file)) {
      config_error("model.coefficients_file", "file not found: " + m.coefficients_file.string());
    }
  }
  if (m.reduction != "exact" && m.reduction != "chebyshev") {
    config_error("model.reduction", "expected exact or chebyshev, got '" + m.reduction + "'");
  }
  if (m.reduction == "chebyshev") {
    if (!(m.fit.a < m.fit.b)) config_error("model.fit.domain", "must satisfy lo < hi");
    if (m.fit.self_terms < 1) config_error("model.fit.m", "must be >= 1");
    if (m.fit.coupling_p < 1) config_error("model.fit.p", "must be >= 1");
    if (m.fit.coupling_q < 1) config_error("model.fit.q", "must be >= 1");
    if (m.fit.diffusion_terms < 1) config_error("model.fit.t", "must be >= 1");
  }

  if (!(sde.dt > 0.0) || !std::isfinite(sde.dt)) config_error("sde.dt", "must be > 0");
  if (!(sde.t_end >= sde.dt) || !std::isfinite(sde.t_end)) config_error("sde.t_end", "must be >= sde.dt");
  if (sde.record_every < 1) config_error("sde.record_every", "must be >= 1");
  if (sde.realizations < 1) config_error("sde.realizations", "must be >= 1");
  if (!(sde.x0_lo <= sde.x0_hi)) config_error("sde.x0_range", "must satisfy lo <= hi");

  if (analysis.smooth_window < 1) config_error("analysis.smooth_window", "must be >= 1");
  if (!(analysis.rel_tol >= 0.0)) config_error("analysis.rel_tol", "must be >= 0");
  if (!(analysis.stationary_from >= 0.0 && analysis.stationary_from < 1.0)) {
    config_error("analysis.stationary_from", "must lie in [0, 1)");
  }
}

ExperimentConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) config_error("config", "document must be a table");
  for (const auto& [k, v] : doc.items()) {
    if (k != "network" && k != "model" && k != "sde" && k != "output" && k != "analysis") {
      config_error(k, "unknown section");
    }
  }
  ExperimentConfig cfg;

  Section nw(doc, "network");
  if (!nw.present()) config_error("network", "section is required");
  nw.read("kind", cfg.network.kind);
  nw.read("n", cfg.network.n);
  nw.read("mu_a", cfg.network.mu_a);
  nw.read("seed", cfg.network.seed);
  nw.read_path("incidence", cfg.network.incidence, base_dir);
  nw.read("mu_gamma", cfg.network.mu_gamma);
  nw.read("beta_max", cfg.network.beta_max);
  nw.read("self_regulation", cfg.network.self_regulation);
  nw.read_path("matrix", cfg.network.matrix, base_dir);
  nw.finish();

  Section md(doc, "model");
  if (!md.present()) config_error("model", "section is required");
  md.read("kind", cfg.model.kind);
  md.read("epsilon", cfg.model.epsilon);
  md.read("mu_alpha", cfg.model.mu_alpha);
  md.read("alpha", cfg.model.alpha);
  md.read("alpha_seed", cfg.model.alpha_seed);
  md.read("self", cfg.model.self);
  md.read("coupling", cfg.model.coupling);
  md.read("diffusion", cfg.model.diffusion);
  md.read_path("coefficients_file", cfg.model.coefficients_file, base_dir);
  md.read("nonnegative", cfg.model.nonnegative);
  md.read("reduction", cfg.model.reduction);
  if (md.has("fit")) {
    Section fit(*md.node(), "fit", "model.fit");
    std::vector<double> domain;
    fit.read("domain", domain);
    if (!domain.empty()) {
      if (domain.size() != 2) config_error("model.fit.domain", "expected [lo, hi]");
      cfg.model.fit.a = domain[0];
      cfg.model.fit.b = domain[1];
    }
    fit.read("m", cfg.model.fit.self_terms);
    fit.read("p", cfg.model.fit.coupling_p);
    fit.read("q", cfg.model.fit.coupling_q);
    fit.read("t", cfg.model.fit.diffusion_terms);
    fit.finish();
  }
  md.finish({"fit"});

  Section sd(doc, "sde");
  sd.read("dt", cfg.sde.dt);
  sd.read("t_end", cfg.sde.t_end);
  sd.read("record_every", cfg.sde.record_every);
  sd.read("realizations", cfg.sde.realizations);
  sd.read("seed", cfg.sde.seed);
  sd.read("shared_x0", cfg.sde.shared_x0);
  std::vector<double> range;
  sd.read("x0_range", range);
  if (!range.empty()) {
    if (range.size() != 2) config_error("sde.x0_range", "expected [lo, hi]");
    cfg.sde.x0_lo = range[0];
    cfg.sde.x0_hi = range[1];
  }
  sd.finish();

  Section out(doc, "output");
  std::string dir;
  out.read("directory", dir);
  if (!dir.empty()) cfg.output.directory = dir;
  out.read("full_paths", cfg.output.full_paths);
  out.finish();

  Section an(doc, "analysis");
  an.read("smooth_window", cfg.analysis.smooth_window);
  an.read("rel_tol", cfg.analysis.rel_tol);
  an.read("score_threshold", cfg.analysis.score_threshold);
  an.read("stationary_from", cfg.analysis.stationary_from);
  an.finish();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json doc;
  auto& nw = doc["network"];
  nw["kind"] = cfg.network.kind;
  nw["n"] = cfg.network.n;
  nw["mu_a"] = cfg.network.mu_a;
  if (cfg.network.seed) nw["seed"] = *cfg.network.seed;
  if (!cfg.network.incidence.empty()) nw["incidence"] = optional_path(cfg.network.incidence);
  nw["mu_gamma"] = cfg.network.mu_gamma;
  nw["beta_max"] = cfg.network.beta_max;
  if (cfg.network.self_regulation) nw["self_regulation"] = *cfg.network.self_regulation;
  if (!cfg.network.matrix.empty()) nw["matrix"] = optional_path(cfg.network.matrix);

  auto& md = doc["model"];
  md["kind"] = cfg.model.kind;
  md["epsilon"] = cfg.model.epsilon;
  md["mu_alpha"] = cfg.model.mu_alpha;
  if (!cfg.model.alpha.empty()) md["alpha"] = cfg.model.alpha;
  if (cfg.model.alpha_seed) md["alpha_seed"] = *cfg.model.alpha_seed;
  if (!cfg.model.self.empty()) md["self"] = cfg.model.self;
  if (!cfg.model.coupling.empty()) md["coupling"] = cfg.model.coupling;
  if (!cfg.model.diffusion.empty()) md["diffusion"] = cfg.model.diffusion;
  if (!cfg.model.coefficients_file.empty()) md["coefficients_file"] = cfg.model.coefficients_file.string();
  md["nonnegative"] = cfg.model.nonnegative;
  md["reduction"] = cfg.model.reduction;
  md["fit"] = {{"domain", {cfg.model.fit.a, cfg.model.fit.b}},
               {"m", cfg.model.fit.self_terms},
               {"p", cfg.model.fit.coupling_p},
               {"q", cfg.model.fit.coupling_q},
               {"t", cfg.model.fit.diffusion_terms}};

  doc["sde"] = {{"dt", cfg.sde.dt},
                {"t_end", cfg.sde.t_end},
                {"record_every", cfg.sde.record_every},
                {"realizations", cfg.sde.realizations},
                {"seed", cfg.sde.seed},
                {"shared_x0", cfg.sde.shared_x0},
                {"x0_range", {cfg.sde.x0_lo, cfg.sde.x0_hi}}};
  doc["output"] = {{"directory", cfg.output.directory.string()}, {"full_paths", cfg.output.full_paths}};
  doc["analysis"] = {{"smooth_window", cfg.analysis.smooth_window},
                     {"rel_tol", cfg.analysis.rel_tol},
                     {"score_threshold", cfg.analysis.score_threshold},
                     {"stationary_from", cfg.analysis.stationary_from}};
  return doc;
}

ExperimentConfig parse_config_toml(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = toml::parse(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, "TOML " + e.detail());
  }
  return config_from_json(doc, base_dir);
}

std::string config_to_toml(const ExperimentConfig& cfg) { return toml::dump(config_to_json(cfg)); }

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.detail());
  }
  const auto base = std::filesystem::absolute(path).parent_path();
  if (path.extension() == ".json") {
    json manifest;
    try {
      manifest = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
    if (!manifest.contains("config")) config_error("config", path.string() + " is not a run manifest");
    return config_from_json(manifest.at("config"), base);
  }
  return parse_config_toml(text, base);
}

void apply_seed_override(ExperimentConfig& cfg) {
  const char* env = std::getenv("STOCHNET_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-') config_error("STOCHNET_SEED", "expected an unsigned integer");
  cfg.sde.seed = v;
}

NetworkMatrix build_network(const ExperimentConfig& cfg) {
  const auto& nw = cfg.network;
  if (nw.kind == "ou-random") return gen_ou_network(nw.n, nw.mu_a, cfg.network_seed());
  if (nw.kind == "mutualistic") {
    const auto inc = load_incidence(nw.incidence);
    require_connected(inc);
    return gen_mutualistic(inc, nw.mu_gamma, nw.beta_max, cfg.network_seed(), nw.self_regulation);
  }
  return load_matrix_csv(nw.matrix);
}

namespace {

Matrix rows_to_matrix(const json& rows, const std::string& key) {
  const auto v = rows.get<std::vector<std::vector<double>>>();
  if (v.empty() || v.front().empty()) config_error(key, "must be a nonempty matrix");
  Matrix m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.front().size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].size() != v.front().size()) config_error(key, "rows must have equal length");
    for (std::size_t j = 0; j < v[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j];
    }
  }
  return m;
}

CoefficientModel custom_coefficients(const ModelConfig& m, Eigen::Index n, double epsilon) {
  if (!m.coefficients_file.empty()) {
    json doc;
    try {
      doc = json::parse(io::read_text(m.coefficients_file));
      Matrix b = rows_to_matrix(doc.at("self"), "model.coefficients_file.self");
      Matrix d = rows_to_matrix(doc.at("diffusion"), "model.coefficients_file.diffusion") * epsilon;
      std::vector<Matrix> dpq;
      for (const auto& node : doc.at("coupling")) dpq.push_back(rows_to_matrix(node, "model.coefficients_file.coupling"));
      if (b.rows() != n) {
        config_error("model.coefficients_file", "has " + std::to_string(b.rows()) + " nodes, network has " +
                                                    std::to_string(n));
      }
      return CoefficientModel(std::move(b), std::move(dpq), std::move(d));
    } catch (const json::exception& e) {
      config_error("model.coefficients_file", e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      config_error("model.coefficients_file", e.detail());
    }
  }
  const Vector b = Eigen::Map<const Vector>(m.self.data(), static_cast<Eigen::Index>(m.self.size()));
  const Vector d = Eigen::Map<const Vector>(m.diffusion.data(), static_cast<Eigen::Index>(m.diffusion.size())) * epsilon;
  Matrix dpq(static_cast<Eigen::Index>(m.coupling.size()), static_cast<Eigen::Index>(m.coupling.front().size()));
  for (std::size_t p = 0; p < m.coupling.size(); ++p) {
    for (std::size_t q = 0; q < m.coupling[p].size(); ++q) {
      dpq(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = m.coupling[p][q];
    }
  }
  return CoefficientModel::homogeneous(n, b, dpq, d);
}

}  // namespace

CoefficientModel build_coefficients(const ExperimentConfig& cfg, Eigen::Index n, double epsilon) {
  const StochasticStrength eps(epsilon);
  if (cfg.model.kind == "ou") return ou_coefficients(n, eps);
  if (cfg.model.kind == "glv") {
    Vector alpha;
    if (!cfg.model.alpha.empty()) {
      if (static_cast<Eigen::Index>(cfg.model.alpha.size()) != n) {
        config_error("model.alpha", "has " + std::to_string(cfg.model.alpha.size()) + " entries, network has " +
                                        std::to_string(n) + " nodes");
      }
      alpha = Eigen::Map<const Vector>(cfg.model.alpha.data(), n);
    } else {
      alpha = draw_growth_rates(n, cfg.model.mu_alpha, cfg.alpha_seed());
    }
    return glv_coefficients(alpha, eps);
  }
  return custom_coefficients(cfg.model, n, epsilon);
}

NodeDynamics build_dynamics(const ExperimentConfig& cfg, Eigen::Index n, double epsilon) {
  const bool nonnegative = cfg.model.kind == "glv" || cfg.model.nonnegative;
  return NodeDynamics::from_coefficients(build_coefficients(cfg, n, epsilon), nonnegative);
}

EffectiveModel build_effective(const ExperimentConfig& cfg, const NetworkMatrix& a, double epsilon) {
  if (cfg.model.reduction == "chebyshev") {
    return reduce_from_functions(build_dynamics(cfg, a.size(), epsilon), a, cfg.model.fit);
  }
  return effective_params(build_coefficients(cfg, a.size(), epsilon), a);
}

Initializer build_initializer(const ExperimentConfig& cfg, Eigen::Index n) {
  Initializer init;
  init.n = n;
  init.lo = cfg.sde.x0_lo;
  init.hi = cfg.sde.x0_hi;
  init.shared = cfg.sde.shared_x0;
  return init;
}

}  // namespace stochnet
