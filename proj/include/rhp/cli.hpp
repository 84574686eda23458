#pragma once

#include <filesystem>

namespace rhp {

// Directory under which runs are written when --out is not given:
// $RHP_RUN_ROOT if set, otherwise ./runs.
std::filesystem::path run_root();

// Entry point of the `rhp` command. Returns the process exit code; failures
// print one JSON error line on standard error.
int run_cli(int argc, char** argv);

}  // namespace rhp
