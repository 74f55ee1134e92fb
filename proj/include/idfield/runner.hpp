#pragma once

#include <vector>

#include "idfield/config.hpp"
#include "idfield/verify.hpp"

namespace idfield {

// Executes every requested experiment against the configured model.
// Deterministic given (config, seed); a failure inside one experiment is
// reported in its entry and does not abort the batch. The optional filter
// restricts execution by experiment name while preserving derived seeds.
std::vector<ExperimentReport> run_experiment(
    const ExperimentConfig& config,
    const std::vector<std::string>& name_filter = {});

}  // namespace idfield
