#pragma once

namespace kgnr {

// Entry point for the command-line driver. Subcommands: solve-nls, solve-kg,
// limit-rate, residual-scaling, decay, growth, self-convergence. Options
// mirror the config keys; --config loads a key=value file first and explicit
// flags override it. Returns 0 on success, 2 on validation/usage errors,
// 3 on numerical failure.
int run_cli(int argc, const char* const* argv);

} // namespace kgnr
