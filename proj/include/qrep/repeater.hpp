#pragma once

#include "qrep/genfun.hpp"
#include "qrep/memories.hpp"

#include <array>
#include <numbers>
#include <optional>
#include <vector>

namespace qrep {

// How dark counts enter the simulated circuits: folded into the reduced
// memory row in closed form, or wired explicitly as squeezed-vacuum sources
// feeding the loss ports (the two must agree; the explicit path exists as a
// cross-check and needs nonzero loss to attach to).
enum class DarkCountPath { Reduced, ExplicitCircuit };

struct RepeaterParams {
    double r = 0.1;            // pair-source squeezing in generation
    double p_gen = 0.0;        // detector-arm loss during generation
    double p_con = 0.0;        // transmission loss during connection
    double n_dc_gen = 0.0;     // mean dark counts per detector per window
    double n_dc_con = 0.0;
    DetectorKind detector = DetectorKind::Counting;
    int n = 0;                 // nesting level; final length is 2^n segments
    ReducedMemory memory{};
    double tau = 1e-4;         // one-segment communication time in seconds
    DarkCountPath dark_path = DarkCountPath::Reduced;

    void validate() const;
};

// A heralded state together with its success probability.  q counts both
// one-click patterns; rho is the normalized state of the canonical one.
struct ConditionalState {
    FockDensityMatrix rho;
    double q = 0.0;
};

ConditionalState generate(const RepeaterParams& params, int cutoff);

// One entanglement-connection step.  connection_tensor builds the transfer
// tensor once so chains can reuse it across levels.
TransferTensor connection_tensor(const RepeaterParams& params, int cutoff);
ConditionalState connect_with(const TransferTensor& t, const FockDensityMatrix& left,
                              const FockDensityMatrix& right);
ConditionalState connect(const FockDensityMatrix& left, const FockDensityMatrix& right,
                         const RepeaterParams& params);

struct ChainResult {
    FockDensityMatrix rho;
    std::vector<double> q;            // q[0] generation, q[k] level-k connection
    std::vector<double> raw_weights;  // per-step single-pattern weights
};

ChainResult run_chain(const RepeaterParams& params, int cutoff);

struct BellOptions {
    std::optional<DetectorKind> detector{};        // defaults to params.detector
    ReducedMemory memory{};                        // retrieval map of each arm
    double loss = 0.0;                             // per-arm loss before analysis
    double n_dc = 0.0;                             // analysis-detector dark counts
    std::array<double, 2> left_angles{std::numbers::pi / 2, 0.0};
    std::array<double, 2> right_angles{std::numbers::pi / 4, -std::numbers::pi / 4};
};

struct BellResult {
    double S = 0.0;
    // Settings in the order (l0,r0), (l1,r0), (l1,r1), (l0,r1); the Bell
    // combination is E[0] + E[1] + E[2] - E[3].
    std::array<double, 4> E{};
    std::array<double, 4> p_same{};
    std::array<double, 4> p_diff{};
    double q_ps = 0.0;   // one-click-per-end probability, averaged over settings
};

BellResult bell(const FockDensityMatrix& rho, const RepeaterParams& params,
                const BellOptions& options = {});

// Average number of tries until two independent events of probability q
// have both succeeded.
double two_success_tries(double q);

struct RateResult {
    double exact = 0.0;        // pairs per second from the product of tries
    double simplified = 0.0;   // (2/3)^(n+1) small-q form
    double log_exact = 0.0;    // natural logs, safe when the rate underflows
    double log_simplified = 0.0;
};

RateResult rate(double tau, const std::vector<double>& q_list, double q_ps);

struct MonteCarloResult {
    double mean_time = 0.0;   // seconds until a postselected pair
    double std_error = 0.0;
    double rate = 0.0;        // 1 / mean_time
};

MonteCarloResult rate_monte_carlo(double tau, const std::vector<double>& q_list,
                                  double q_ps, long trials, unsigned long long seed);

} // namespace qrep
