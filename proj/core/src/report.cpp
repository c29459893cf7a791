// Copyright 2026 The fdasf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fdasf/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace fdasf {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// JSON has no NaN; those become null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string report_json(const ExperimentReport& report) {
  json doc;
  doc["config"] = json::parse(config_to_json(report.config));
  doc["failed_runs"] = report.failed_runs;
  doc["aborted"] = report.aborted;
  doc["warnings"] = report.warnings;
  doc["aux_ratio"] = report.aux_ratio ? num(*report.aux_ratio) : json(nullptr);
  json modes = json::array();
  for (const auto& m : report.modes) {
    json entry;
    entry["mode"] = to_string(m.mode);
    json medse_values = json::array();
    for (double v : m.medse) medse_values.push_back(num(v));
    entry["medse"] = medse_values;
    entry["aux_solves_median_cum"] = m.aux_median_cum;
    json runs = json::array();
    for (const auto& r : m.runs) {
      json run;
      run["run"] = r.run;
      run["failed"] = r.failed;
      if (r.failed) {
        run["error"] = r.error;
      } else {
        run["rho_star"] = num(r.rho_star);
        run["final_constraint_residual"] = num(r.final_constraint_residual);
        run["final_valid"] = r.final_valid;
        run["final_rel_sq_error"] =
            r.records.empty() ? json(nullptr) : num(r.records.back().rel_sq_error);
        run["final_rho"] = r.records.empty() ? json(nullptr) : num(r.records.back().rho);
        run["batch_checksum"] = r.batch_checksum;
      }
      runs.push_back(run);
    }
    entry["runs"] = runs;
    modes.push_back(entry);
  }
  doc["modes"] = modes;
  return doc.dump(2);
}

std::string curves_csv(const ExperimentReport& report) {
  std::string out(kCurvesHeader);
  out += '\n';
  for (const auto& m : report.modes) {
    const std::string mode(to_string(m.mode));
    for (const auto& r : m.runs) {
      if (r.failed) continue;
      for (const auto& rec : r.records) {
        out += mode + ',' + std::to_string(r.run) + ',' + std::to_string(rec.iteration) + ',' +
               std::to_string(rec.t) + ',' + std::to_string(rec.updating_node + 1) + ',' +
               fmt(rec.rho) + ',' + fmt(rec.rel_sq_error) + ',' +
               std::to_string(rec.aux_solves_cum) + ',' + std::to_string(rec.scalars_cum) + ',' +
               fmt(rec.constraint_residual) + '\n';
      }
    }
  }
  return out;
}

std::string medse_csv(const ExperimentReport& report) {
  std::string out(kMedseHeader);
  out += '\n';
  for (const auto& m : report.modes) {
    const std::string mode(to_string(m.mode));
    for (std::size_t i = 0; i < m.medse.size(); ++i) {
      const Index t = static_cast<Index>(i) * report.config.N;
      out += mode + ',' + std::to_string(i) + ',' + std::to_string(t) + ',' + fmt(m.medse[i]) +
             ',' + fmt(m.aux_median_cum[i]) + '\n';
    }
  }
  return out;
}

void write_report_files(const ExperimentReport& report, const std::string& directory) {
  const std::filesystem::path dir(directory);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + directory + ": " + ec.message());
  write_file(dir / "report.json", report_json(report));
  write_file(dir / "curves.csv", curves_csv(report));
  write_file(dir / "medse.csv", medse_csv(report));
}

}  // namespace fdasf
