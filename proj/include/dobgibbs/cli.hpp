#pragma once
#include <string>
#include <vector>

namespace dobgibbs {

// Batch front door.  Subcommands: coeffs, exact, couple, simulate,
// concentrate, report.  Common flags: --config PATH (required), --seed U64,
// --out DIR, --format {csv,json}, --threads K (DOBRUSHIN_GIBBS_THREADS as
// fallback).  Exit codes: 0 ok, 2 config error, 3 model-assumption
// violation, 1 internal failure.  Errors print one machine-readable line:
//   error kind=<config|assumption|internal> key=<key> msg="..."
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // argv[0] excluded

}  // namespace dobgibbs
