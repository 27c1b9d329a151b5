#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qrg::cli {

enum ExitCode : int {
  kSuccess = 0,
  kNegative = 1,       // certification came back negative (dependent family)
  kUsage = 2,          // usage or parse error
  kNonConvergence = 3, // SDP did not reach the requested gap
};

/// Entry point shared by the qrg binary and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads `key=value` lines ('#' starts a comment) into (key, value) pairs.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

}  // namespace qrg::cli
