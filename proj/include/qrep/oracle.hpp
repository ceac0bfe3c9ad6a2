#pragma once

#include "qrep/bogoliubov.hpp"
#include "qrep/fock.hpp"
#include "qrep/projection.hpp"

namespace qrep {

struct OracleResult {
    FockDensityMatrix state;        // event-weighted, cutoff = oracle_cutoff
    double truncation_leak = 0.0;   // probability weight at the top level
};

// Brute-force reference: represents the circuit unitary on the truncated
// Fock space by exponentiating its quadratic generator, applies the prefix
// squeezers and the per-mode projectors literally, and partial-traces down
// to the output modes.  Slow and exponential in mode count; exists to
// validate the generating-function engine on small instances.
//
// oracle_cutoff needs headroom above the physical photon content; if the
// weight that reaches the top level exceeds leak_tol this throws
// NumericalError carrying the leak magnitude.
OracleResult oracle_apply(const BogoliubovMap& map,
                          const SqueezePrefix& prefix,
                          const ModeRoles& roles,
                          const FockDensityMatrix& input,
                          int oracle_cutoff,
                          double leak_tol = 1e-6);

} // namespace qrep
