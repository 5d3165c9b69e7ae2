#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "chainbell/bounds.hpp"
#include "chainbell/experiment.hpp"

namespace chainbell {

/// Canonical JSON rendering of an experiment report: fixed key order, reals
/// with 15 significant digits, toolkit version and config hash included.
/// Serialization is a pure function of the report, so equal reports give
/// byte-identical documents.
std::string format_report(const ExperimentReport& report);

/// Canonical JSON rendering of the closed-form bounds for one n.
std::string format_bounds_report(const BoundsReport& report);

/// Sweep table rows as `gamma,s_hat,se,bound,quantum,note` CSV lines.
std::string format_sweep_header();
std::string format_sweep_row(const SweepRow& row);
std::string format_sweep_error_row(double gamma, const std::string& message);

/// Atomic text-file write (temp file then rename).
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Hex digest of the generator/analysis configuration block, embedded in
/// reports so downstream tooling can group runs of the same configuration.
std::string config_hash(const ExperimentReport& report);

}  // namespace chainbell
