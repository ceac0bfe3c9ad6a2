#pragma once

#include "qrep/bogoliubov.hpp"

namespace qrep {

// Two-pass cell: the light pulse is stored and retrieved by passing the
// ensemble twice.  kappa is the light-atom coupling, xi the reflection
// coefficient at the cell walls.
struct TwoPassParams {
    double kappa = 2.0;
    double xi = 0.0;
};

// One-pass cell with feedback: coupling kappa, feedback gain g, and the
// factor s by which the atomic X-quadrature variance is squeezed before
// storage (s < 1 means squeezed below vacuum).
struct OnePassParams {
    double kappa = 1.0;
    double g = 1.0;
    double s = 1.0;
};

ReducedMemory ideal_memory();
ReducedMemory generic_memory(double b1, double b2, double c1, Complex c2, double c3);

// Minimal non-passive family: a given conjugate coupling c1 on the stored
// mode, with b1 = sqrt(1 + c1^2) so the map stays unitary.
ReducedMemory memory_with_c1(double c1);

ReducedMemory two_pass(const TwoPassParams& p);
ReducedMemory one_pass(const OnePassParams& p);

} // namespace qrep
