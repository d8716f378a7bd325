// Batch front-end. Subcommands:
//
//   gen        build a model spectrum and write it as Spectrum JSON
//   verify     run one law against a spectrum file or model descriptor
//   sweep      run one law over a parameter grid, one CSV row per point
//   identities randomized identity battery on seeded symmetric pairs
//   report     every applicable law on one input, JSON/CSV artifacts
//
// Law identifiers: moment-order, geometric-mean, yang-cap, riesz-monotone,
// zp-monotone, ratio-bound, pln-1, pln-2, dirichlet-refined, c2, t1, trk,
// c1, abel, weyl. Unknown identifiers are rejected before any input is read.
//
// Exit status: 0 all verdicts pass, 2 at least one law failed (the report is
// printed inline), 1 usage or configuration error. The environment variable
// SPECBOUND_TOL overrides the default relative tolerance 1e-9; --tol beats
// both. Outputs are deterministic for a fixed command line (the identities
// battery seeds its generator from --seed, default fixed).

#pragma once

#include <string>
#include <vector>

namespace specbound::cli {

// argv-style entry; the first element is the program name.
int run(int argc, const char* const* argv);

// Convenience overload for tests: args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace specbound::cli
