#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "trawl/infer.hpp"
#include "trawl/model.hpp"

namespace trawl {

// Malformed configuration; line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  std::optional<ModelSpec> model;  // both "levy_seed" and "trawl" given
  std::size_t n = 1000;
  double tau = 1.0;
  std::uint64_t seed = 0;
  FitConfig fit;
  std::size_t forecast_samples = 2000;
};

// Parses a configuration document. `source` names it in error messages.
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

// A model given either at the top level ("levy_seed", "trawl") or under "model".
ModelSpec parse_model(const std::string& text, const std::string& source = "model");
ModelSpec load_model(const std::string& path);

nlohmann::ordered_json model_to_json(const ModelSpec& m);

std::string read_text_file(const std::string& path);

}  // namespace trawl
