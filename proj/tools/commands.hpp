#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "run_config.hpp"

namespace trimquad::cli {

/// Run one experiment, writing CSVs (and run.json) under config.out. Progress and
/// summaries go to `log`. Returns the files written.
std::vector<std::filesystem::path> run(const RunConfig& config, std::ostream& log);

}  // namespace trimquad::cli
