#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qrep/bogoliubov.hpp"
#include "qrep/fock.hpp"
#include "qrep/projection.hpp"

namespace qrep {

// Tags for the formal variables of a generating function.  Alpha/Beta pair
// with input modes (bra/ket side), Gamma/Delta with output modes (bra/ket),
// Mu/Nu with counting clicks (differentiated once each).
enum class VariableTag { Alpha, Beta, Gamma, Delta, Mu, Nu };

struct GenFunVariable {
    VariableTag tag;
    int mode;
};

// One Gaussian term sign · k · exp(½ vᵀQv + Lᵀv) in the formal variables.
// Q is complex symmetric; the linear part is identically zero for every
// circuit built here (all exponent contributions are strictly bilinear) but
// is kept so the representation stays self-describing.
struct QuadraticGenFun {
    Eigen::MatrixXcd Q;
    Eigen::VectorXd lin;
    double prefactor = 1.0;   // value at v = 0, a vacuum-outcome probability
    double sign = 1.0;        // inclusion-exclusion sign
};

// A generating function as a signed sum of Gaussian terms, together with the
// variable layout needed to read matrix elements out of it.
struct GenFunBuild {
    std::vector<GenFunVariable> variables;
    std::vector<int> input_modes;    // order fixes input Fock labels
    std::vector<int> output_modes;   // order fixes output Fock labels
    std::vector<QuadraticGenFun> terms;

    // Event weight of the detection pattern on vacuum-plus-prefix input.
    double value_at_zero() const;
};

// Runs the four-step construction: replace projectors by displacement
// integrals, push displacements through the circuit, take the vacuum
// expectation, and do the Gaussian integral in closed form.  Squeezed
// inputs are absorbed into the circuit, so the literal input is vacuum and
// the result is exact at any photon number.
GenFunBuild build_genfun(const BogoliubovMap& circuit,
                         const SqueezePrefix& prefix,
                         const ModeRoles& roles);

// Linear map from input to output density matrix elements,
//   out(i, j) = sum_{k,l} M[(i,j), (k,l)] · in(k, l),
// rows and columns linearized as ket·dim + bra with the FockDensityMatrix
// mode ordering.
struct TransferTensor {
    int input_mode_count = 0;
    int output_mode_count = 0;
    int input_cutoff = 0;
    int output_cutoff = 0;
    Eigen::MatrixXcd M;

    long input_dim() const;
    long output_dim() const;
};

// Taylor coefficients of the generating function by exact power-series
// recurrence, scaled per the factorial convention fixed by the identity
// channel.
TransferTensor extract_tensor(const GenFunBuild& f, int input_cutoff, int output_cutoff);

FockDensityMatrix apply_tensor(const TransferTensor& m, const FockDensityMatrix& rho);

} // namespace qrep
