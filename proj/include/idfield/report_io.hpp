#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"

#include "idfield/verify.hpp"

namespace idfield {

struct EmitOptions {
  // Runtime is excluded by default so identical (config, seed) runs
  // produce byte-identical reports.
  bool include_runtime = false;
};

nlohmann::json report_to_json(const ExperimentReport& rep,
                              const EmitOptions& opts = {});

void emit_report_json(std::span<const ExperimentReport> reports,
                      std::ostream& out, const EmitOptions& opts = {});

// One row per statistic:
// experiment,statistic,estimate,std_error,threshold,verdict,n_samples,seed
void emit_report_csv(std::span<const ExperimentReport> reports,
                     std::ostream& out, const EmitOptions& opts = {});

// format is "json" or "csv"; path "-" writes to stdout.
void emit_report(std::span<const ExperimentReport> reports,
                 const std::string& format, const std::string& path,
                 const EmitOptions& opts = {});

}  // namespace idfield
