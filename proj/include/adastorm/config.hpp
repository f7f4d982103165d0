#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adastorm {

/// Problem names: "quadratic", "nonconvex", "finite_sum", "compositional".
struct ProblemSpec {
  std::string name;
  std::string label;  ///< defaults to name; keys summary rows and file names
  std::int64_t dim = 10;
  std::uint64_t n = 100;       ///< finite_sum only
  std::int64_t mid_dim = 5;    ///< compositional only
  double sigma = 1.0;          ///< per-coordinate oracle noise (not finite_sum)
  double L = 4.0;              ///< quadratic only
  double mu = 1.0;             ///< quadratic only
  std::uint64_t seed = 0;      ///< instance seed (data, start point)

  bool operator==(const ProblemSpec&) const = default;
};

/// Algorithm names: "ada_storm", "ada_storm_doubling", "comp_storm",
/// "fs_storm", "fs_storm_svrg", "sgd", "storm_original".
struct AlgorithmSpec {
  std::string name;
  std::string label;
  double alpha = 0.3;
  double k = 0.1;      ///< storm_original
  double w = 1.0;      ///< storm_original
  double c = 10.0;     ///< storm_original
  double eta0 = 0.1;   ///< sgd
  double decay = 1.0;  ///< sgd
  std::uint64_t period = 0;   ///< fs_storm_svrg refresh period; 0 means n
  std::optional<double> eta;  ///< fs_storm_svrg constant step (adaptive when unset)

  bool operator==(const AlgorithmSpec&) const = default;
};

struct GridSpec {
  std::vector<std::uint64_t> horizons;
  std::vector<std::uint64_t> seeds;

  bool operator==(const GridSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "results";
  std::uint64_t thin = 1;  ///< keep every thin-th trace row; 1 keeps all

  bool operator==(const OutputSpec&) const = default;
};

struct ExperimentConfig {
  std::vector<ProblemSpec> problems;
  std::vector<AlgorithmSpec> algorithms;
  GridSpec grid;
  OutputSpec output;

  bool operator==(const ExperimentConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and validates a JSON experiment description, applying defaults.
/// Accepts "problem"/"problems" and "algorithm"/"algorithms"; rejects unknown
/// keys, alpha outside (0, 1/3), duplicate seeds, T < 1 and algorithm/problem
/// pairs that do not fit together. Throws ConfigError.
ExperimentConfig parse_config(std::string_view text);

/// Canonical JSON (plural keys, every field spelled out).
std::string serialize_config(const ExperimentConfig& config);

/// True if `algorithm` can run on `problem`.
bool compatible(std::string_view algorithm, std::string_view problem);

}  // namespace adastorm
