#include <fstream>
#include <set>

#include "pemi/bench/experiment.hpp"
#include "pemi/errors.hpp"

namespace pemi::bench {

using nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
    case Method::pemi_det: return "pemi_det";
    case Method::pemi_rand: return "pemi_rand";
    case Method::vanilla: return "vanilla";
    case Method::oracle: return "oracle";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  for (Method m : {Method::pemi_det, Method::pemi_rand, Method::vanilla, Method::oracle})
    if (to_string(m) == s) return m;
  throw ConfigError("methods: unknown method '" + s + "'");
}

namespace {

// Reads obj[key] into out when present, reporting type errors by path.
template <class T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  const auto fail = [&](const char* what) { throw ConfigError(path + key + ": " + what); };
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) fail("expected a boolean");
  } else if constexpr (std::is_arithmetic_v<T>) {
    if (!it->is_number()) fail("expected a number");
    if (std::is_unsigned_v<T> && !it->is_number_unsigned()) fail("expected a non-negative integer");
  } else {
    if (!it->is_string()) fail("expected a string");
  }
  out = it->template get<T>();
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError((path.empty() ? std::string("config") : path) + ": expected an object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!known.count(k)) throw ConfigError(path + k + ": unknown key");
}

const std::set<std::string> kRules{"always",           "decision_driven",  "weighted_quantile", "weighted_average",
                                   "uncertainty_budget", "conformal_pvalue", "elond",             "earlier_outcome"};

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  reject_unknown(j, "", {"T", "N", "alpha", "M", "rule", "score", "data", "methods", "seed", "out", "oracle_limit"});
  read(j, "T", "", c.T);
  read(j, "N", "", c.N);
  read(j, "alpha", "", c.alpha);
  read(j, "M", "", c.M);
  read(j, "score", "", c.score);
  read(j, "seed", "", c.seed);
  read(j, "out", "", c.out);
  read(j, "oracle_limit", "", c.oracle_limit);
  if (j.contains("methods")) {
    if (!j["methods"].is_array()) throw ConfigError("methods: expected a list");
    c.methods.clear();
    for (const auto& m : j["methods"]) {
      if (!m.is_string()) throw ConfigError("methods: expected method names");
      c.methods.push_back(method_from_string(m.get<std::string>()));
    }
  }
  if (j.contains("rule")) {
    const auto& r = j["rule"];
    reject_unknown(r, "rule.", {"kind", "tau0", "tau1", "offset", "q_sel", "rho", "budget", "ensemble", "engine",
                                "level", "randomize", "beta", "cutoff", "n_offline", "taxonomy"});
    auto& s = c.rule;
    read(r, "kind", "rule.", s.kind);
    read(r, "tau0", "rule.", s.tau0);
    read(r, "tau1", "rule.", s.tau1);
    read(r, "offset", "rule.", s.offset);
    read(r, "q_sel", "rule.", s.q_sel);
    read(r, "rho", "rule.", s.rho);
    read(r, "budget", "rule.", s.budget);
    read(r, "ensemble", "rule.", s.ensemble);
    read(r, "engine", "rule.", s.engine);
    read(r, "level", "rule.", s.level);
    read(r, "randomize", "rule.", s.randomize);
    read(r, "beta", "rule.", s.beta);
    read(r, "cutoff", "rule.", s.cutoff);
    read(r, "n_offline", "rule.", s.n_offline);
    read(r, "taxonomy", "rule.", s.taxonomy);
  }
  if (j.contains("data")) {
    const auto& d = j["data"];
    reject_unknown(d, "data.", {"source", "sigma", "model", "n_train", "path", "shuffle"});
    read(d, "source", "data.", c.data.source);
    read(d, "sigma", "data.", c.data.sigma);
    read(d, "model", "data.", c.data.model);
    read(d, "n_train", "data.", c.data.n_train);
    read(d, "path", "data.", c.data.path);
    read(d, "shuffle", "data.", c.data.shuffle);
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (T == 0) throw ConfigError("T: must be positive");
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha: must lie in (0, 1)");
  if (methods.empty()) throw ConfigError("methods: at least one method is required");
  if (!kRules.count(rule.kind)) throw ConfigError("rule.kind: unknown rule '" + rule.kind + "'");
  if (rule.taxonomy != "all" && rule.taxonomy != "singleton")
    throw ConfigError("rule.taxonomy: expected 'all' or 'singleton'");
  const bool covariate = rule.kind != "conformal_pvalue" && rule.kind != "elond" && rule.kind != "earlier_outcome";
  if (rule.taxonomy == "singleton" && !covariate)
    throw ConfigError("rule.taxonomy: the singleton taxonomy needs a covariate-only rule");
  if (rule.kind == "elond" && rule.n_offline == 0) throw ConfigError("rule.n_offline: e-LOND needs an offline block");
  if (!(rule.rho > 0 && rule.rho <= 1)) throw ConfigError("rule.rho: must lie in (0, 1]");
  if (rule.kind == "uncertainty_budget" && rule.ensemble < 2)
    throw ConfigError("rule.ensemble: uncertainty rule needs at least two models");
  if (rule.kind == "conformal_pvalue" &&
      !(rule.engine == "fixed" || rule.engine == "lond" || rule.engine == "saffron" || rule.engine == "addis"))
    throw ConfigError("rule.engine: unknown threshold engine '" + rule.engine + "'");
  if (score != "residual" && score != "cqr") throw ConfigError("score: unknown score '" + score + "'");
  if (data.source != "nonlinear" && data.source != "setting3" && data.source != "csv")
    throw ConfigError("data.source: unknown source '" + data.source + "'");
  if (data.source == "csv" && data.path.empty()) throw ConfigError("data.path: required for csv data");
  if (data.source != "csv" && data.model != "ols" && data.model != "true")
    throw ConfigError("data.model: expected 'ols' or 'true'");
  if (data.source != "csv" && score == "cqr") throw ConfigError("score: cqr needs q_lo and q_hi dataset columns");
  if (data.source != "csv" && data.model == "ols" && data.n_train < 25)
    throw ConfigError("data.n_train: too few training points");
  for (Method m : methods)
    if (m == Method::oracle && T + rule.n_offline > oracle_limit)
      throw ConfigError("methods: the oracle enumerates all permutations; T + n_offline must not exceed oracle_limit");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  const auto& r = c.rule;
  return {
      {"T", c.T},
      {"N", c.N},
      {"alpha", c.alpha},
      {"M", c.M},
      {"seed", c.seed},
      {"out", c.out},
      {"oracle_limit", c.oracle_limit},
      {"score", c.score},
      {"methods", methods},
      {"rule",
       {{"kind", r.kind},
        {"tau0", r.tau0},
        {"tau1", r.tau1},
        {"offset", r.offset},
        {"q_sel", r.q_sel},
        {"rho", r.rho},
        {"budget", r.budget},
        {"ensemble", r.ensemble},
        {"engine", r.engine},
        {"level", r.level},
        {"randomize", r.randomize},
        {"beta", r.beta},
        {"cutoff", r.cutoff},
        {"n_offline", r.n_offline},
        {"taxonomy", r.taxonomy}}},
      {"data",
       {{"source", c.data.source},
        {"sigma", c.data.sigma},
        {"model", c.data.model},
        {"n_train", c.data.n_train},
        {"path", c.data.path},
        {"shuffle", c.data.shuffle}}},
  };
}

}  // namespace pemi::bench
