#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "idfield/spectral_field.hpp"

namespace idfield {

// Carries every field-level validation message collected while parsing.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> msgs);
  std::vector<std::string> messages;
};

struct ExperimentRequest {
  std::string name;
  nlohmann::json params;
};

// Parsed experiment description: the model (domain, characteristics,
// kernels, t-points) plus the experiment list and run parameters.
struct ExperimentConfig {
  DomainPartition partition;
  LocalCharacteristics chars;
  KernelFamily kernels;
  std::vector<Point> t_points;
  double gamma = 1.0;
  long samples = 10000;
  double epsilon = 0.01;
  int level = 1;
  std::uint64_t seed = 0;
  std::optional<double> stable_alpha;
  std::function<double(const Point&)> stable_beta;
  std::vector<ExperimentRequest> experiments;

  FieldSpec field_spec() const {
    return FieldSpec{kernels, chars, partition, gamma};
  }
};

// Parses and fully validates a config document; throws ConfigError with
// one message per offending field.
ExperimentConfig parse_config(const nlohmann::json& j);

// Reads and parses a config file (JSON).
ExperimentConfig load_config_file(const std::string& path);

}  // namespace idfield
