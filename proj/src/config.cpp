#include "adastorm/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

namespace adastorm {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kProblems = {"quadratic", "nonconvex", "finite_sum",
                                                      "compositional"};
const std::set<std::string, std::less<>> kAlgorithms = {
    "ada_storm", "ada_storm_doubling", "comp_storm",    "fs_storm",
    "fs_storm_svrg", "sgd",           "storm_original"};

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + "." + key + ": " + e.what());
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

ProblemSpec parse_problem(const json& j) {
  const std::string where = "problem";
  reject_unknown(j, {"name", "label", "dim", "n", "mid_dim", "sigma", "L", "mu", "seed"}, where);
  ProblemSpec p;
  require(j.contains("name"), "problem: missing 'name'");
  read(j, "name", p.name, where);
  require(kProblems.count(p.name) == 1, "problem: unknown name '" + p.name + "'");
  read(j, "label", p.label, where);
  if (p.label.empty()) p.label = p.name;
  read(j, "dim", p.dim, where);
  read(j, "n", p.n, where);
  read(j, "mid_dim", p.mid_dim, where);
  read(j, "sigma", p.sigma, where);
  read(j, "L", p.L, where);
  read(j, "mu", p.mu, where);
  read(j, "seed", p.seed, where);
  require(p.dim >= 1, "problem." + p.label + ": dim must be >= 1");
  require(p.n >= 1, "problem." + p.label + ": n must be >= 1");
  require(p.mid_dim >= 1, "problem." + p.label + ": mid_dim must be >= 1");
  require(p.sigma >= 0.0 && std::isfinite(p.sigma), "problem." + p.label + ": sigma must be >= 0");
  require(p.mu > 0.0 && p.mu <= p.L && std::isfinite(p.L),
          "problem." + p.label + ": need 0 < mu <= L");
  return p;
}

AlgorithmSpec parse_algorithm(const json& j) {
  const std::string where = "algorithm";
  reject_unknown(j, {"name", "label", "alpha", "k", "w", "c", "eta0", "decay", "I", "eta"}, where);
  AlgorithmSpec a;
  require(j.contains("name"), "algorithm: missing 'name'");
  read(j, "name", a.name, where);
  require(kAlgorithms.count(a.name) == 1, "algorithm: unknown name '" + a.name + "'");
  read(j, "label", a.label, where);
  if (a.label.empty()) a.label = a.name;
  read(j, "alpha", a.alpha, where);
  read(j, "k", a.k, where);
  read(j, "w", a.w, where);
  read(j, "c", a.c, where);
  read(j, "eta0", a.eta0, where);
  read(j, "decay", a.decay, where);
  read(j, "I", a.period, where);
  if (j.contains("eta") && !j.at("eta").is_null()) {
    double eta = 0.0;
    read(j, "eta", eta, where);
    require(eta > 0.0, "algorithm." + a.label + ": eta must be positive");
    a.eta = eta;
  }
  require(a.alpha > 0.0 && a.alpha < 1.0 / 3.0,
          "algorithm." + a.label + ": alpha must lie in (0, 1/3), got " + std::to_string(a.alpha));
  require(a.k > 0.0 && a.w > 0.0 && a.c > 0.0, "algorithm." + a.label + ": k, w, c must be > 0");
  require(a.eta0 > 0.0, "algorithm." + a.label + ": eta0 must be > 0");
  require(a.decay >= 0.0, "algorithm." + a.label + ": decay must be >= 0");
  return a;
}

template <typename T, typename Fn>
std::vector<T> parse_one_or_many(const json& root, const char* single, const char* plural,
                                 Fn parse) {
  require(!(root.contains(single) && root.contains(plural)),
          std::string("config: give either '") + single + "' or '" + plural + "', not both");
  std::vector<T> out;
  if (root.contains(single)) {
    out.push_back(parse(root.at(single)));
  } else if (root.contains(plural)) {
    require(root.at(plural).is_array() && !root.at(plural).empty(),
            std::string("config: '") + plural + "' must be a non-empty array");
    for (const auto& item : root.at(plural)) out.push_back(parse(item));
  } else {
    throw ConfigError(std::string("config: missing '") + single + "'");
  }
  return out;
}

template <typename T>
void require_unique_labels(const std::vector<T>& items, const char* what) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    require(seen.insert(item.label).second,
            std::string("config: duplicate ") + what + " label '" + item.label + "'");
  }
}

}  // namespace

bool compatible(std::string_view algorithm, std::string_view problem) {
  if (algorithm == "comp_storm") return problem == "compositional";
  if (algorithm == "fs_storm" || algorithm == "fs_storm_svrg") return problem == "finite_sum";
  return problem == "quadratic" || problem == "nonconvex";
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  reject_unknown(root, {"problem", "problems", "algorithm", "algorithms", "grid", "output"},
                 "config");

  ExperimentConfig cfg;
  cfg.problems = parse_one_or_many<ProblemSpec>(root, "problem", "problems", parse_problem);
  cfg.algorithms =
      parse_one_or_many<AlgorithmSpec>(root, "algorithm", "algorithms", parse_algorithm);
  require_unique_labels(cfg.problems, "problem");
  require_unique_labels(cfg.algorithms, "algorithm");

  require(root.contains("grid"), "config: missing 'grid'");
  const json& grid = root.at("grid");
  reject_unknown(grid, {"T", "seeds"}, "grid");
  require(grid.contains("T") && grid.contains("seeds"), "grid: needs 'T' and 'seeds'");
  read(grid, "T", cfg.grid.horizons, "grid");
  read(grid, "seeds", cfg.grid.seeds, "grid");
  require(!cfg.grid.horizons.empty(), "grid: 'T' must list at least one horizon");
  require(!cfg.grid.seeds.empty(), "grid: 'seeds' must list at least one seed");
  for (auto T : cfg.grid.horizons) require(T >= 1, "grid: every T must be >= 1");
  {
    std::set<std::uint64_t> seen;
    for (auto s : cfg.grid.seeds) {
      require(seen.insert(s).second, "grid: duplicate seed " + std::to_string(s));
    }
    std::set<std::uint64_t> seen_t;
    for (auto T : cfg.grid.horizons) {
      require(seen_t.insert(T).second, "grid: duplicate T " + std::to_string(T));
    }
  }

  if (root.contains("output")) {
    const json& out = root.at("output");
    reject_unknown(out, {"directory", "trace"}, "output");
    read(out, "directory", cfg.output.directory, "output");
    if (out.contains("trace")) {
      const json& trace = out.at("trace");
      if (trace.is_string()) {
        require(trace.get<std::string>() == "full", "output.trace: expected \"full\" or {\"thin\": k}");
        cfg.output.thin = 1;
      } else {
        reject_unknown(trace, {"thin"}, "output.trace");
        read(trace, "thin", cfg.output.thin, "output.trace");
        require(cfg.output.thin >= 1, "output.trace.thin must be >= 1");
      }
    }
  }

  for (const auto& a : cfg.algorithms) {
    for (const auto& p : cfg.problems) {
      require(compatible(a.name, p.name),
              "config: algorithm '" + a.name + "' cannot run on problem '" + p.name + "'");
    }
  }
  return cfg;
}

std::string serialize_config(const ExperimentConfig& config) {
  json root;
  root["problems"] = json::array();
  for (const auto& p : config.problems) {
    root["problems"].push_back({{"name", p.name},
                                {"label", p.label},
                                {"dim", p.dim},
                                {"n", p.n},
                                {"mid_dim", p.mid_dim},
                                {"sigma", p.sigma},
                                {"L", p.L},
                                {"mu", p.mu},
                                {"seed", p.seed}});
  }
  root["algorithms"] = json::array();
  for (const auto& a : config.algorithms) {
    json j = {{"name", a.name}, {"label", a.label}, {"alpha", a.alpha}, {"k", a.k},
              {"w", a.w},       {"c", a.c},         {"eta0", a.eta0},   {"decay", a.decay},
              {"I", a.period}};
    if (a.eta) j["eta"] = *a.eta;
    root["algorithms"].push_back(std::move(j));
  }
  root["grid"] = {{"T", config.grid.horizons}, {"seeds", config.grid.seeds}};
  json trace = config.output.thin == 1 ? json("full") : json{{"thin", config.output.thin}};
  root["output"] = {{"directory", config.output.directory}, {"trace", trace}};
  return root.dump(2);
}

}  // namespace adastorm
