#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qrep/errors.hpp"

namespace qrep {

using Complex = std::complex<double>;

// Whether the trace of a density matrix is 1 (a normalized state) or the
// probability of the measurement branch that produced it.
enum class TraceMeaning { Normalized, EventWeighted };

// Dense density matrix on a truncated multimode Fock space.  Each mode keeps
// photon numbers 0..cutoff.  Basis states are linearized row-major with mode
// 0 as the slowest index, so serialized matrices are bit-comparable across
// runs.
class FockDensityMatrix {
public:
    // Zero matrix.  mode_count 0 is the degenerate scalar case (dim 1),
    // produced by tracing out everything.
    FockDensityMatrix(int mode_count, int cutoff,
                      TraceMeaning meaning = TraceMeaning::Normalized);

    static FockDensityMatrix vacuum(int mode_count, int cutoff);

    int mode_count() const { return mode_count_; }
    int cutoff() const { return cutoff_; }
    int levels() const { return cutoff_ + 1; }
    long dim() const { return dim_; }

    TraceMeaning trace_meaning() const { return meaning_; }
    void set_trace_meaning(TraceMeaning m) { meaning_ = m; }

    Eigen::MatrixXcd& elements() { return elements_; }
    const Eigen::MatrixXcd& elements() const { return elements_; }

    long linear_index(const std::vector<int>& occupations) const;
    std::vector<int> occupations_of(long index) const;

    Complex at(const std::vector<int>& ket, const std::vector<int>& bra) const {
        return elements_(linear_index(ket), linear_index(bra));
    }
    Complex& at(const std::vector<int>& ket, const std::vector<int>& bra) {
        return elements_(linear_index(ket), linear_index(bra));
    }

    double trace() const;

    // Checks hermiticity (1e-12 elementwise), nonnegative populations, and
    // the trace bound implied by trace_meaning.  Diagonal entries in
    // [-1e-9, 0) are clipped to zero in place; more negative ones throw
    // ValidityError since they signal a bug rather than roundoff.
    void validate();

    // Divide by trace and mark as normalized.  Throws ValidityError when the
    // trace is below tol.
    void normalize(double tol = 1e-300);

private:
    int mode_count_;
    int cutoff_;
    long dim_;
    TraceMeaning meaning_;
    Eigen::MatrixXcd elements_;
};

// Kronecker product; a's modes come first (slower).  Requires equal cutoffs.
// The result is event-weighted if either input is.
FockDensityMatrix tensor(const FockDensityMatrix& a, const FockDensityMatrix& b);

// Trace out the listed modes; the remaining modes keep their relative order
// and the trace is preserved.  Tracing all modes yields the 0-mode scalar.
FockDensityMatrix partial_trace(const FockDensityMatrix& state,
                                const std::vector<int>& traced_modes);

// Re-truncate by dropping basis states above new_cutoff.
FockDensityMatrix crop_to_cutoff(const FockDensityMatrix& state, int new_cutoff);

} // namespace qrep
