#include "idfield/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace idfield {

namespace {

std::string sig17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

nlohmann::json report_to_json(const ExperimentReport& rep,
                              const EmitOptions& opts) {
  nlohmann::json j;
  j["experiment"] = rep.name;
  j["seed"] = rep.seed;
  j["verdict"] = to_string(rep.verdict);
  if (!rep.error.empty()) j["error"] = rep.error;
  j["parameters"] = rep.parameters;
  nlohmann::json stats = nlohmann::json::array();
  for (const Statistic& s : rep.statistics) {
    stats.push_back({{"name", s.name},
                     {"estimate", s.estimate},
                     {"std_error", s.std_error},
                     {"threshold", s.threshold},
                     {"verdict", to_string(s.verdict)},
                     {"n_samples", s.n_samples}});
  }
  j["statistics"] = std::move(stats);
  if (rep.spectral) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const SpectralAtom& a : rep.spectral->atoms)
      atoms.push_back({{"s", a.s}, {"weight", a.weight}});
    j["spectral"] = {{"atoms", std::move(atoms)},
                     {"drift", rep.spectral->drift}};
  }
  if (opts.include_runtime) j["runtime_seconds"] = rep.runtime_seconds;
  return j;
}

void emit_report_json(std::span<const ExperimentReport> reports,
                      std::ostream& out, const EmitOptions& opts) {
  nlohmann::json j;
  j["reports"] = nlohmann::json::array();
  for (const ExperimentReport& rep : reports)
    j["reports"].push_back(report_to_json(rep, opts));
  out << j.dump(2) << "\n";
}

void emit_report_csv(std::span<const ExperimentReport> reports,
                     std::ostream& out, const EmitOptions&) {
  out << "experiment,statistic,estimate,std_error,threshold,verdict,"
         "n_samples,seed\n";
  for (const ExperimentReport& rep : reports) {
    for (const Statistic& s : rep.statistics) {
      out << rep.name << ',' << s.name << ',' << sig17(s.estimate) << ','
          << sig17(s.std_error) << ',' << sig17(s.threshold) << ','
          << to_string(s.verdict) << ',' << s.n_samples << ',' << rep.seed
          << "\n";
    }
  }
}

void emit_report(std::span<const ExperimentReport> reports,
                 const std::string& format, const std::string& path,
                 const EmitOptions& opts) {
  const auto write = [&](std::ostream& out) {
    if (format == "json")
      emit_report_json(reports, out, opts);
    else if (format == "csv")
      emit_report_csv(reports, out, opts);
    else
      throw std::invalid_argument("unknown report format '" + format + "'");
    if (!out) throw std::runtime_error("failed writing report");
  };
  if (path == "-" || path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open report destination '" + path + "'");
  write(out);
}

}  // namespace idfield
