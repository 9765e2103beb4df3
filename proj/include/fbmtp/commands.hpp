#pragma once

#include <string>

#include "fbmtp/config.hpp"

namespace fbmtp {

// Subcommand bodies shared by the CLI and the test harness. Each writes its
// CSV/SVG products under out_dir, removes partial outputs on failure, and
// returns the process exit code (0 iff every emitted bound report passes).
int cmd_gen_fbm(Config cfg, const std::string& out_dir);
int cmd_solve(Config cfg, const std::string& out_dir);
int cmd_validate(Config cfg, const std::string& out_dir);
int cmd_converge(Config cfg, const std::string& out_dir);

} // namespace fbmtp
