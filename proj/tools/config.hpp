#pragma once

// Run configuration. Precedence: built-in defaults, then the JSON file named
// by --config (or the FIERISK_CONFIG environment variable), then flags.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fierisk/optimize.hpp"

namespace fierisk::cli {

inline constexpr const char* kConfigEnv = "FIERISK_CONFIG";

struct Config {
  std::uint64_t seed = 12345;
  std::vector<double> levels{0.95, 0.99};
  bool levels_explicit = false;
  std::size_t horizon = 1;
  std::size_t steps = 10;  // forecast table length
  double lambda = 0.94;
  std::size_t ewma_window = 30;
  std::size_t sim_truncation = 50'000;
  std::size_t filter_truncation = 1'000;
  std::size_t burn_in = 2'000;
  std::size_t n = 2'000;
  std::size_t replications = 200;
  std::size_t holdout = 10;
  OptimizeOptions optimizer{};
  std::vector<std::string> approaches{"all"};
  std::string model = "M1";
  std::string orders = "0,0,0,1";
  bool fit_mean = true;
  std::string input;
  std::string format = "csv-returns";
  std::string asset;
  std::vector<double> weights;
  double v0 = 1.0;
  std::string cov;
  std::string out = "fierisk-out";
  std::size_t threads = 0;
  bool oracle = false;
  bool forecast = false;  // experiment: also run the volatility-forecast study
};

/// Applies the keys of a JSON object to `config`; unknown keys are an error.
void apply_json(Config& config, const std::string& json_text, const std::string& source);
void apply_file(Config& config, const std::string& path);

/// Path of the config file to read: explicit flag, else the environment variable, else none.
std::optional<std::string> config_path(const std::optional<std::string>& flag);

std::vector<double> parse_number_list(const std::string& text);
std::vector<std::string> parse_word_list(const std::string& text);

}  // namespace fierisk::cli
