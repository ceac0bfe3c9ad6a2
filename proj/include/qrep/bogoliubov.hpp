#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qrep/errors.hpp"

namespace qrep {

using Complex = std::complex<double>;

// Linear mode transformation in the Heisenberg picture,
//   U† a_j U = sum_i B(j,i) a_i + C(j,i) a_i†.
// For a unitary U the blocks obey B B† − C C† = I and B Cᵀ symmetric.
struct BogoliubovMap {
    Eigen::MatrixXcd B;
    Eigen::MatrixXcd C;

    int mode_count() const { return static_cast<int>(B.rows()); }

    static BogoliubovMap identity(int modes);

    // Residual of the two unitarity constraints (max elementwise).
    double unitarity_residual() const;
    void validate(double tol = 1e-10) const;
};

// first is applied to the state before second.
BogoliubovMap compose(const BogoliubovMap& first, const BogoliubovMap& second);

// Completes partially specified Heisenberg rows to a full unitary map using
// Gram–Schmidt in the commutator metric <w,z> = w_b·conj(z_b) − w_c·conj(z_c).
// Each given row is a pair (b, c) of coefficient vectors; the rows must
// already be mutually compatible ([a'_j, a'_k†] = δ_jk, [a'_j, a'_k] = 0).
// The remaining rows are an arbitrary valid completion.
BogoliubovMap complete_rows_to_map(const std::vector<Eigen::VectorXcd>& b_rows,
                                   const std::vector<Eigen::VectorXcd>& c_rows,
                                   int mode_count);

// Memory map in the reduced three-mode form: the stored mode transforms as
//   a'_1 = b1 a_1 + c1 a_1† + b2 a_2 + c2 a_2† + c3 a_3†
// with modes 2 and 3 fresh vacuum.  Phase convention: b1, c1 real and
// b2, c3 real non-negative (phases absorbed into the auxiliary modes).
struct ReducedMemory {
    double b1 = 1.0;
    double b2 = 0.0;
    double c1 = 0.0;
    Complex c2 = 0.0;
    double c3 = 0.0;

    // b1² + b2² − c1² − |c2|² − c3² − 1, zero for any map cut from a unitary.
    double constraint_residual() const;
    void validate(double tol = 1e-8) const;
};

// Collapse a many-mode memory row (b1, c1 on the stored mode plus
// coefficient vectors over auxiliary modes) to the three-mode form.
ReducedMemory reduce_memory(double b1, double c1,
                            const Eigen::VectorXcd& b_tilde,
                            const Eigen::VectorXcd& c_tilde);

// Detector dark counts folded into the memory coefficients: admixing a
// weak thermal background of mean photon number n_dc raises b2 and c3.
// This is the vanishing-transmittivity limit of augment_dark_counts_virtual
// and preserves the unitarity constraint exactly.
ReducedMemory augment_dark_counts(const ReducedMemory& mem, double n_dc);

// Same admixture at finite beam-splitter transmittivity: the detector mode
// passes a beam splitter of reflectivity p whose other port carries one arm
// of a two-mode squeezed source with parameter s.  Mean added background is
// p·sinh²s.  Exact for all p, which makes it the cross-check route.
ReducedMemory augment_dark_counts_virtual(const ReducedMemory& mem, double p, double s);

// Circuit description layer: a sequence of elements on a fixed set of modes,
// each expanding to a BogoliubovMap on the full register.
struct CircuitElement {
    enum class Kind {
        BeamSplitter,    // transmittivity T: a → √T a + √(1−T) b
        PhaseShift,      // a → e^{iφ} a
        OneModeSqueeze,  // a → a cosh r + a† sinh r
        TwoModeSqueeze,  // a → a cosh r + b† sinh r
        Memory           // ReducedMemory on (input, aux_b, aux_c)
    } kind;
    int mode_a = 0;
    int mode_b = -1;
    int mode_c = -1;
    double param = 0.0;
    ReducedMemory memory;
    double input_phase = 0.0;  // Memory only: phase on the stored mode first

    static CircuitElement beam_splitter(double transmittivity, int a, int b);
    static CircuitElement phase_shift(double angle, int mode);
    static CircuitElement one_mode_squeeze(double r, int mode);
    static CircuitElement two_mode_squeeze(double r, int a, int b);
    static CircuitElement memory_element(const ReducedMemory& mem, int input,
                                         int aux_b, int aux_c,
                                         double input_phase = 0.0);
};

// Photon loss with probability p: beam splitter of reflectivity p routing
// into a dedicated mode the caller leaves unmeasured.
CircuitElement lossy_channel(double p, int mode, int ancilla);

BogoliubovMap element_map(const CircuitElement& e, int total_modes);
BogoliubovMap compose_circuit(const std::vector<CircuitElement>& elements, int total_modes);

} // namespace qrep
