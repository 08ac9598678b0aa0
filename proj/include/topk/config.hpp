#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "topk/consistency.hpp"
#include "topk/experiments.hpp"

namespace topk {

// A config that failed validation, with every offending field named.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const noexcept {
    return problems_;
  }

 private:
  std::vector<std::string> problems_;
};

// Fields absent from the JSON keep their defaults; unknown fields and type or
// range violations raise ConfigError.
SweepConfig parse_sweep_config(const nlohmann::json& j);
// "alpha" may be a number or an array; one TrainConfig per alpha.
std::vector<TrainConfig> parse_train_configs(const nlohmann::json& j);
// Fields: loss, predicate, n, k, alpha, samples, seed.
RegionScanConfig parse_region_config(const nlohmann::json& j);

// Throws FileError when unreadable and ConfigError when not valid JSON.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace topk
