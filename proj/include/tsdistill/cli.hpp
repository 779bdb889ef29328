#pragma once

namespace tsdistill {

/// Entry point of the `tsdistill` command. Returns the process exit code:
/// 0 success, 1 validation error, 2 transport error, 3 data error.
int run_cli(int argc, char** argv);

}  // namespace tsdistill
