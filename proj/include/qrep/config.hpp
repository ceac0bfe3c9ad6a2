#pragma once

#include "qrep/repeater.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qrep {

// A fully resolved run description.  Defaults here, then a key=value config
// file, then command-line flags, each layer overriding the previous one.
// Field names double as the config-file keys.
struct RunConfig {
    // chain
    double r = 0.1;
    double p_gen = 0.0;
    double p_con = 0.0;
    double n_dc_gen = 0.0;
    double n_dc_con = 0.0;
    double tau = 1e-4;
    int n = 0;
    std::string detector = "counting";    // counting | non_counting
    std::string dark_path = "reduced";    // reduced | explicit

    // memory map; b1 = nan means "complete from the unitarity constraint",
    // kappa = nan means "kind default" (2 for two_pass, 1 for one_pass)
    std::string memory_kind = "ideal";    // ideal | generic | two_pass | one_pass
    double b1 = std::numeric_limits<double>::quiet_NaN();
    double b2 = 0.0;
    double c1 = 0.0;
    double c2_re = 0.0;
    double c2_im = 0.0;
    double c3 = 0.0;
    double kappa = std::numeric_limits<double>::quiet_NaN();
    double xi = 0.0;
    double g = 1.0;
    double s = 1.0;

    // run control
    int cutoff = 2;
    unsigned long long seed = 1;
    bool strict = false;
    std::string output;         // CSV destination; empty writes to stdout
    std::string dump_state;     // write the final state here when non-empty

    // sweep
    std::string sweep_param;
    std::vector<double> sweep_values;

    // analytic extras
    std::string formula;
    double L = 2.0;             // distance in units of the attenuation length
    double ndc = 0.0;           // detection dark counts for the closed formulas
    double x = 0.5;             // dilog argument

    // rate
    long trials = 100000;
    bool fixed_s = false;
    double s_deficit = 0.05;

    DetectorKind detector_kind() const;
    ReducedMemory build_memory() const;
    RepeaterParams to_params() const;

    // every key with its resolved value, sorted by key, for output headers
    std::vector<std::pair<std::string, std::string>> echo() const;
};

// Set one parameter by its sweep-axis name.  Throws ConfigError for names
// that are not sweepable and for non-integral values of integer parameters.
void apply_parameter(RunConfig& cfg, const std::string& name, double value);

// Fixed 17-significant-digit scientific form used for all CSV numbers.
std::string format_number(double v);

} // namespace qrep
