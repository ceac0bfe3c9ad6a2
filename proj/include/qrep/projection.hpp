#pragma once

#include <vector>

#include "qrep/errors.hpp"

namespace qrep {

// What happens to a mode at the end of a circuit.
enum class DetectorKind { Counting, NonCounting };

enum class ModeFate {
    Output,            // kept in the returned density matrix
    Traced,            // discarded without measurement
    Dark,              // projected onto vacuum (no click)
    CountingClick,     // projected onto exactly one photon
    NonCountingClick   // projected onto anything but vacuum
};

// Per-mode measurement/output plan plus which modes carry the input state.
// Modes not flagged as inputs start in vacuum (possibly squeezed by the
// prefix of the operation consuming this).
struct ModeRoles {
    std::vector<ModeFate> fate;
    std::vector<bool> is_input;

    int mode_count() const { return static_cast<int>(fate.size()); }

    int input_count() const {
        int n = 0;
        for (bool f : is_input) n += f ? 1 : 0;
        return n;
    }

    int count(ModeFate f) const {
        int n = 0;
        for (ModeFate g : fate) n += g == f ? 1 : 0;
        return n;
    }

    int output_count() const { return count(ModeFate::Output); }

    void validate(int expected_modes) const {
        if (mode_count() != expected_modes)
            throw ConfigError("mode roles do not cover the circuit's modes");
        if (is_input.size() != fate.size())
            throw ConfigError("mode roles input flags length mismatch");
    }
};

// Squeezing applied to vacuum modes before the circuit proper: a two-mode
// squeezer when mode_b >= 0, otherwise one-mode.  Listed modes must not be
// input modes.
struct SqueezeTerm {
    int mode_a;
    int mode_b;   // -1 for one-mode squeezing
    double r;
};
using SqueezePrefix = std::vector<SqueezeTerm>;

} // namespace qrep
