#pragma once

#include <map>
#include <string>
#include <vector>

#include "etl/extract.hpp"
#include "etl/keyval.hpp"
#include "etl/load.hpp"
#include "etl/transform.hpp"

namespace etl {

// Per-run accounting. For every target the staged op-code counts must match
// the loaded op-code counts (every staged row loads exactly once); augment
// placeholders are accounted by the validation stats of the referencing
// targets.
struct BatchReport {
  Date batch_date = kDateAbsent;
  std::string outcome;  // success | aborted
  std::vector<IngestStats> ingests;
  std::map<std::string, TransformStats> transforms;
  std::map<std::string, ValidateStats> validates;
  std::map<std::string, LoadStats> loads;
  std::map<std::string, double> phase_ms;
  std::string error_code;  // set when aborted
  std::string error_detail;

  // Empty when the staged-equals-loaded invariant holds for every target.
  std::vector<std::string> count_mismatches() const;
};

std::string report_to_json(const BatchReport& report);
std::string report_summary(const BatchReport& report);

}  // namespace etl
