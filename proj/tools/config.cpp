#include "config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fierisk/error.hpp"

namespace fierisk::cli {
namespace {

constexpr std::string_view kModule = "config";

using nlohmann::json;

template <typename T>
T get(const json& j, const std::string& key, const std::string& source) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::InvalidArgument, kModule, source + ": key '" + key + "' has the wrong type");
  }
}

std::vector<std::string> words(const json& j, const std::string& key, const std::string& source) {
  if (j.is_string()) return parse_word_list(j.get<std::string>());
  return get<std::vector<std::string>>(j, key, source);
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& w : parse_word_list(text)) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size()) {
      throw Error(ErrorKind::InvalidArgument, kModule, "not a number: '" + w + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> parse_word_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

void apply_json(Config& c, const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Load, kModule, source + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Load, kModule, source + ": top level must be an object");

  for (const auto& [key, v] : j.items()) {
    if (key == "seed") c.seed = get<std::uint64_t>(v, key, source);
    else if (key == "levels") { c.levels = get<std::vector<double>>(v, key, source); c.levels_explicit = true; }
    else if (key == "horizon") c.horizon = get<std::size_t>(v, key, source);
    else if (key == "steps") c.steps = get<std::size_t>(v, key, source);
    else if (key == "lambda") c.lambda = get<double>(v, key, source);
    else if (key == "ewma_window") c.ewma_window = get<std::size_t>(v, key, source);
    else if (key == "truncation") {
      if (v.is_object()) {
        for (const auto& [k2, v2] : v.items()) {
          if (k2 == "simulation") c.sim_truncation = get<std::size_t>(v2, k2, source);
          else if (k2 == "filter") c.filter_truncation = get<std::size_t>(v2, k2, source);
          else throw Error(ErrorKind::InvalidArgument, kModule, source + ": unknown key 'truncation." + k2 + "'");
        }
      } else {
        c.filter_truncation = get<std::size_t>(v, key, source);
      }
    }
    else if (key == "burn_in") c.burn_in = get<std::size_t>(v, key, source);
    else if (key == "n") c.n = get<std::size_t>(v, key, source);
    else if (key == "replications") c.replications = get<std::size_t>(v, key, source);
    else if (key == "holdout") c.holdout = get<std::size_t>(v, key, source);
    else if (key == "optimizer") {
      if (!v.is_object()) throw Error(ErrorKind::InvalidArgument, kModule, source + ": 'optimizer' must be an object");
      for (const auto& [k2, v2] : v.items()) {
        if (k2 == "max_iterations") c.optimizer.max_iterations = get<std::size_t>(v2, k2, source);
        else if (k2 == "gradient_tolerance") c.optimizer.gradient_tolerance = get<double>(v2, k2, source);
        else if (k2 == "max_step") c.optimizer.max_step = get<double>(v2, k2, source);
        else if (k2 == "relative_step") c.optimizer.relative_step = get<double>(v2, k2, source);
        else if (k2 == "nelder_mead_iterations") c.optimizer.nelder_mead_iterations = get<std::size_t>(v2, k2, source);
        else throw Error(ErrorKind::InvalidArgument, kModule, source + ": unknown key 'optimizer." + k2 + "'");
      }
    }
    else if (key == "approach" || key == "approaches") c.approaches = words(v, key, source);
    else if (key == "model") c.model = get<std::string>(v, key, source);
    else if (key == "orders") c.orders = get<std::string>(v, key, source);
    else if (key == "fit_mean") c.fit_mean = get<bool>(v, key, source);
    else if (key == "input") c.input = get<std::string>(v, key, source);
    else if (key == "format") c.format = get<std::string>(v, key, source);
    else if (key == "asset") c.asset = get<std::string>(v, key, source);
    else if (key == "weights") c.weights = get<std::vector<double>>(v, key, source);
    else if (key == "v0") c.v0 = get<double>(v, key, source);
    else if (key == "cov") c.cov = get<std::string>(v, key, source);
    else if (key == "out") c.out = get<std::string>(v, key, source);
    else if (key == "threads") c.threads = get<std::size_t>(v, key, source);
    else if (key == "oracle") c.oracle = get<bool>(v, key, source);
    else if (key == "forecast") c.forecast = get<bool>(v, key, source);
    else throw Error(ErrorKind::InvalidArgument, kModule, source + ": unknown key '" + key + "'");
  }
}

void apply_file(Config& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Load, kModule, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_json(config, buf.str(), path);
}

std::optional<std::string> config_path(const std::optional<std::string>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv(kConfigEnv); env && *env) return std::string(env);
  return std::nullopt;
}

}  // namespace fierisk::cli
