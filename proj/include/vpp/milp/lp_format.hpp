#pragma once

#include <string>

#include "vpp/milp/model.hpp"

namespace vpp::milp {

/// Renders the model as CPLEX LP-format text. Variable names are sanitized
/// to the format's identifier rules and kept unique; a nonzero objective
/// constant is recorded as a comment so the reader can restore it.
std::string write_lp_format(const MilpModel& model, const std::string& title = "model");

/// Writes write_lp_format output to disk.
void export_lp_file(const MilpModel& model, const std::string& path,
                    const std::string& title = "model");

/// Parses the subset of the LP format emitted by write_lp_format. Intended
/// for round-trip checks and for feeding exported files back into tests.
MilpModel parse_lp_format(const std::string& text);
MilpModel read_lp_file(const std::string& path);

}  // namespace vpp::milp
