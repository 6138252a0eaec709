#pragma once

namespace symchi {

/// Command-line front end.  Returns the process exit code: 0 on success,
/// 1 on failure, 2 when the `test` subcommand rejects normality (so shell
/// pipelines can branch on the decision).
int run_cli(int argc, const char* const* argv);

}  // namespace symchi
