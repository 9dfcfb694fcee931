#pragma once

namespace pulseforge {

// Full command-line entry point: parses arguments, dispatches the
// subcommand, and maps failures onto the exit-code contract
// (0 success, 2 user/config error, 3 numerical failure).
int run_cli(int argc, const char* const* argv);

}  // namespace pulseforge
