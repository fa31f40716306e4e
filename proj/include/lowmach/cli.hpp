#pragma once

namespace lowmach {

/// Subcommands simulate, sweep, energy-audit, print-model.
/// Exit codes: 0 success, 1 usage or run error, 2 failed verification.
int cli_main(int argc, char** argv);

}  // namespace lowmach
