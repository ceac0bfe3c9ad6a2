#include "qrep/fock.hpp"

#include <cmath>

namespace qrep {

namespace {

long power_dim(int levels, int mode_count) {
    long d = 1;
    for (int m = 0; m < mode_count; ++m) d *= levels;
    return d;
}

} // namespace

FockDensityMatrix::FockDensityMatrix(int mode_count, int cutoff, TraceMeaning meaning)
    : mode_count_(mode_count), cutoff_(cutoff), meaning_(meaning) {
    if (mode_count < 0) throw ConfigError("mode_count must be >= 0");
    if (cutoff < 0) throw ConfigError("cutoff must be >= 0");
    dim_ = power_dim(levels(), mode_count_);
    elements_ = Eigen::MatrixXcd::Zero(dim_, dim_);
}

FockDensityMatrix FockDensityMatrix::vacuum(int mode_count, int cutoff) {
    FockDensityMatrix rho(mode_count, cutoff);
    rho.elements_(0, 0) = 1.0;
    return rho;
}

long FockDensityMatrix::linear_index(const std::vector<int>& occupations) const {
    if (static_cast<int>(occupations.size()) != mode_count_)
        throw ConfigError("multi-index length does not match mode_count");
    long idx = 0;
    for (int m = 0; m < mode_count_; ++m) {
        int n = occupations[m];
        if (n < 0 || n > cutoff_)
            throw ConfigError("photon number outside [0, cutoff]");
        idx = idx * levels() + n;
    }
    return idx;
}

std::vector<int> FockDensityMatrix::occupations_of(long index) const {
    std::vector<int> occ(mode_count_);
    for (int m = mode_count_ - 1; m >= 0; --m) {
        occ[m] = static_cast<int>(index % levels());
        index /= levels();
    }
    return occ;
}

double FockDensityMatrix::trace() const {
    return elements_.trace().real();
}

void FockDensityMatrix::validate() {
    double herm = (elements_ - elements_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12)
        throw ValidityError("density matrix not Hermitian: max deviation " + std::to_string(herm));
    for (long i = 0; i < dim_; ++i) {
        double d = elements_(i, i).real();
        if (d < -1e-9)
            throw ValidityError("negative population " + std::to_string(d) + " at diagonal " + std::to_string(i));
        if (d < 0.0) elements_(i, i) = 0.0;
    }
    double tr = trace();
    if (meaning_ == TraceMeaning::Normalized) {
        if (std::abs(tr - 1.0) > 1e-10)
            throw ValidityError("normalized state has trace " + std::to_string(tr));
    } else {
        if (tr < -1e-10 || tr > 1.0 + 1e-10)
            throw ValidityError("event weight " + std::to_string(tr) + " outside [0, 1]");
    }
}

void FockDensityMatrix::normalize(double tol) {
    double tr = trace();
    if (!(tr > tol))
        throw ValidityError("cannot normalize state with trace " + std::to_string(tr));
    elements_ /= tr;
    meaning_ = TraceMeaning::Normalized;
}

FockDensityMatrix tensor(const FockDensityMatrix& a, const FockDensityMatrix& b) {
    if (a.cutoff() != b.cutoff())
        throw ConfigError("tensor requires equal cutoffs");
    TraceMeaning meaning =
        (a.trace_meaning() == TraceMeaning::EventWeighted ||
         b.trace_meaning() == TraceMeaning::EventWeighted)
            ? TraceMeaning::EventWeighted
            : TraceMeaning::Normalized;
    FockDensityMatrix out(a.mode_count() + b.mode_count(), a.cutoff(), meaning);
    long da = a.dim(), db = b.dim();
    for (long ra = 0; ra < da; ++ra)
        for (long ca = 0; ca < da; ++ca) {
            Complex va = a.elements()(ra, ca);
            if (va == Complex(0.0)) continue;
            out.elements().block(ra * db, ca * db, db, db) = va * b.elements();
        }
    return out;
}

FockDensityMatrix partial_trace(const FockDensityMatrix& state,
                                const std::vector<int>& traced_modes) {
    int M = state.mode_count();
    std::vector<bool> traced(M, false);
    for (int m : traced_modes) {
        if (m < 0 || m >= M) throw ConfigError("traced mode index out of range");
        if (traced[m]) throw ConfigError("duplicate traced mode");
        traced[m] = true;
    }
    std::vector<int> kept;
    for (int m = 0; m < M; ++m)
        if (!traced[m]) kept.push_back(m);

    FockDensityMatrix out(static_cast<int>(kept.size()), state.cutoff(),
                          state.trace_meaning());
    int L = state.levels();
    long dim_traced = 1;
    for (size_t i = 0; i < traced_modes.size(); ++i) dim_traced *= L;

    std::vector<int> full_r(M), full_c(M);
    for (long kr = 0; kr < out.dim(); ++kr) {
        std::vector<int> occ_r = out.occupations_of(kr);
        for (long kc = 0; kc < out.dim(); ++kc) {
            std::vector<int> occ_c = out.occupations_of(kc);
            Complex sum = 0.0;
            for (long t = 0; t < dim_traced; ++t) {
                long tmp = t;
                for (int m = M - 1; m >= 0; --m) {
                    if (traced[m]) {
                        full_r[m] = full_c[m] = static_cast<int>(tmp % L);
                        tmp /= L;
                    }
                }
                for (size_t i = 0; i < kept.size(); ++i) {
                    full_r[kept[i]] = occ_r[i];
                    full_c[kept[i]] = occ_c[i];
                }
                sum += state.elements()(state.linear_index(full_r),
                                        state.linear_index(full_c));
            }
            out.elements()(kr, kc) = sum;
        }
    }
    return out;
}

FockDensityMatrix crop_to_cutoff(const FockDensityMatrix& state, int new_cutoff) {
    if (new_cutoff > state.cutoff())
        throw ConfigError("crop_to_cutoff cannot raise the cutoff");
    FockDensityMatrix out(state.mode_count(), new_cutoff, state.trace_meaning());
    for (long r = 0; r < out.dim(); ++r) {
        std::vector<int> occ_r = out.occupations_of(r);
        long sr = state.linear_index(occ_r);
        for (long c = 0; c < out.dim(); ++c) {
            std::vector<int> occ_c = out.occupations_of(c);
            out.elements()(r, c) = state.elements()(sr, state.linear_index(occ_c));
        }
    }
    return out;
}

} // namespace qrep
