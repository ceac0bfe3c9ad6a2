#pragma once

#include "qrep/errors.hpp"
#include "qrep/projection.hpp"

namespace qrep {

// Parameters of the closed-form Bell-parameter and rate expressions.  These
// are leading-order results, so callers get a validity flag along with the
// value whenever the perturbative window is left.
struct PerturbativeInputs {
    double L_over_L0 = 1.0;  // total length in segment units, 2^n for n levels
    double p_gen = 0.0;
    double p_con = 0.0;
    double c1 = 0.0;         // memory conjugate admixture of the stored mode
    double c2_mag = 0.0;     // magnitude of the passive auxiliary admixture
    double c3 = 0.0;         // active auxiliary admixture
    double n_dc = 0.0;       // mean dark counts per detector per window
    double r = 0.0;          // pair-source squeezing
    DetectorKind detector = DetectorKind::Counting;

    void validate() const;
};

struct PerturbativeS {
    double S = 0.0;
    double deficit = 0.0;  // 1 - S / (2 sqrt 2)
    bool valid = true;     // deficit < 1 and n_dc below the loss window
};

// Bell parameter with memory imperfections and connection dark counts,
// to leading order in c1^2, |c2|^2, c3^2 and n_dc.
PerturbativeS s_memory_darkcount(const PerturbativeInputs& in);
// Bell parameter with finite source squeezing r.
PerturbativeS s_finite_squeezing(const PerturbativeInputs& in);
// Bell parameter with dark counts during entanglement generation.
PerturbativeS s_generation_darkcount(const PerturbativeInputs& in);

// Level-n coefficients of the two-parameter state family produced by
// repeated connection with a conjugate-admixture memory, and one step of
// the recurrence that defines them.
struct FGPair {
    double f = 0.5;
    double g = 0.0;
};

FGPair f_g_solution(int n);
FGPair f_g_recurrence(const FGPair& fg);

// Exact Bell parameter of the two-parameter family at coefficients (f, g).
double s_exact_c1(double f, double g, double c1);

// Inversions of the non-counting Bell formulas at S = 2.  Squeezing and
// GenDarkCount return the maximal L/L0; TwoPassXi and OnePassS return the
// imperfection threshold at the given L/L0.
enum class DistanceLimit { Squeezing, GenDarkCount, TwoPassXi, OnePassS };

double max_distance(DistanceLimit which, const PerturbativeInputs& in);

// Whether perturbation cross terms (generation dark count combined with a
// later imperfection, relative size n_dc / r^2) invalidate summing the
// single-source formulas.
struct CrossTermReport {
    bool dominant = false;
    double ratio = 0.0;
};

CrossTermReport cross_term_dominance(double n_dc, double r);

// Real dilogarithm on (-inf, 1].  Absolute error below 1e-10.
double dilog(double x);

// Loss-only chain with counting detectors: closed-form vacuum weight after
// n levels and the success probability of the next connection.
double eta_solution(int n, double p_con);
double connection_success(double eta, double p_con);

// log of the product eta_1 ... eta_n, exactly and via the dilogarithm
// estimate (relative error of the product stays below 3% for n <= 45).
double log_eta_product(int n, double p_con);
double log_eta_product_estimate(int n, double p_con);

// Closed-form loss-only rate (R times tau, dimensionless), including
// postselection.  L_over_L0 is 2^n at integer levels; other values evaluate
// the same expression as a continuous extension.
double rate_closed_form(double r, double p_gen, double p_con, double L_over_L0,
                        DetectorKind detector);
double log_rate_closed_form(double r, double p_gen, double p_con,
                            double L_over_L0, DetectorKind detector);

} // namespace qrep
