#include "qrep/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include <cmath>
#include <vector>

namespace qrep {

namespace {

using SparseC = Eigen::SparseMatrix<Complex>;

struct FockSpace {
    int modes;
    int levels;
    long dim;
    std::vector<long> stride;   // mode 0 slowest

    FockSpace(int mode_count, int cutoff) : modes(mode_count), levels(cutoff + 1) {
        stride.assign(modes, 1);
        for (int m = modes - 2; m >= 0; --m) stride[m] = stride[m + 1] * levels;
        dim = modes == 0 ? 1 : stride[0] * levels;
    }

    int occ(long idx, int m) const {
        return static_cast<int>((idx / stride[m]) % levels);
    }
};

// X = sum P_ij a_i† a_j + (1/2) sum Q_ij a_i† a_j† − (1/2) sum conj(Q_ij) a_i a_j,
// truncated to the space: raising amplitudes that would leave it are dropped.
SparseC quadratic_generator(const FockSpace& fs, const Eigen::MatrixXcd& P,
                            const Eigen::MatrixXcd& Q) {
    struct Entry {
        int i, j;
        Complex v;
    };
    std::vector<Entry> hop, pair;
    for (int i = 0; i < fs.modes; ++i)
        for (int j = 0; j < fs.modes; ++j) {
            if (std::abs(P(i, j)) > 1e-15) hop.push_back({i, j, P(i, j)});
            if (std::abs(Q(i, j)) > 1e-15) pair.push_back({i, j, 0.5 * Q(i, j)});
        }

    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(fs.dim * (hop.size() + 2 * pair.size()) + 1);
    std::vector<int> n(fs.modes);
    for (long idx = 0; idx < fs.dim; ++idx) {
        for (int m = 0; m < fs.modes; ++m) n[m] = fs.occ(idx, m);
        for (const Entry& e : hop) {
            if (e.i == e.j) {
                if (n[e.i] > 0) trips.emplace_back(idx, idx, e.v * double(n[e.i]));
            } else if (n[e.j] >= 1 && n[e.i] + 1 < fs.levels) {
                long tgt = idx - fs.stride[e.j] + fs.stride[e.i];
                trips.emplace_back(tgt, idx, e.v * std::sqrt(double(n[e.j]) * (n[e.i] + 1)));
            }
        }
        for (const Entry& e : pair) {
            if (e.i == e.j) {
                if (n[e.i] + 2 < fs.levels) {
                    long tgt = idx + 2 * fs.stride[e.i];
                    trips.emplace_back(tgt, idx,
                                       e.v * std::sqrt(double(n[e.i] + 1) * (n[e.i] + 2)));
                }
                if (n[e.i] >= 2) {
                    long tgt = idx - 2 * fs.stride[e.i];
                    trips.emplace_back(tgt, idx,
                                       -std::conj(e.v) * std::sqrt(double(n[e.i]) * (n[e.i] - 1)));
                }
            } else {
                if (n[e.i] + 1 < fs.levels && n[e.j] + 1 < fs.levels) {
                    long tgt = idx + fs.stride[e.i] + fs.stride[e.j];
                    trips.emplace_back(tgt, idx,
                                       e.v * std::sqrt(double(n[e.i] + 1) * (n[e.j] + 1)));
                }
                if (n[e.i] >= 1 && n[e.j] >= 1) {
                    long tgt = idx - fs.stride[e.i] - fs.stride[e.j];
                    trips.emplace_back(tgt, idx,
                                       -std::conj(e.v) * std::sqrt(double(n[e.i]) * n[e.j]));
                }
            }
        }
    }
    SparseC X(fs.dim, fs.dim);
    X.setFromTriplets(trips.begin(), trips.end());
    X.makeCompressed();
    return X;
}

double norm1(const SparseC& X) {
    double best = 0.0;
    for (int col = 0; col < X.outerSize(); ++col) {
        double s = 0.0;
        for (SparseC::InnerIterator it(X, col); it; ++it) s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

// exp(X)·v by scaling and squaring with a Taylor inner loop.
void apply_exp(const SparseC& X, Eigen::VectorXcd& v) {
    double theta = norm1(X);
    int s = theta <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(theta)));
    double scale = std::ldexp(1.0, -s);
    long reps = 1L << s;
    Eigen::VectorXcd term(v.size());
    for (long rep = 0; rep < reps; ++rep) {
        term = v;
        for (int k = 1; k <= 300; ++k) {
            term = (X * term) * (scale / k);
            v += term;
            if (term.norm() <= 1e-18 * v.norm()) break;
        }
    }
}

// Takagi factorization W = Z diag(s) Zᵀ of a complex symmetric matrix via
// the real embedding [[Re W, Im W], [Im W, −Re W]]: an eigenvector (x; y)
// at eigenvalue s > 0 gives a unit column z = x + iy with W z̄ = s z, and
// the kernel pairs up under z → iz, contributing one column per pair.
void takagi(const Eigen::MatrixXcd& W, Eigen::MatrixXcd& Z, Eigen::VectorXd& s) {
    long m = W.rows();
    Eigen::MatrixXd K(2 * m, 2 * m);
    K.topLeftCorner(m, m) = W.real();
    K.topRightCorner(m, m) = W.imag();
    K.bottomLeftCorner(m, m) = W.imag();
    K.bottomRightCorner(m, m) = -W.real();
    K = 0.5 * (K + K.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    double tol = 1e-11 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff());

    Z.resize(m, m);
    s.resize(m);
    long col = 0;
    for (long k = 2 * m - 1; k >= 0 && col < m; --k) {
        if (es.eigenvalues()(k) <= tol) break;
        Z.col(col) = es.eigenvectors().col(k).head(m) +
                     Complex(0.0, 1.0) * es.eigenvectors().col(k).tail(m);
        s(col) = es.eigenvalues()(k);
        ++col;
    }
    for (long k = 0; k < 2 * m && col < m; ++k) {
        if (std::abs(es.eigenvalues()(k)) > tol) continue;
        Eigen::VectorXcd z = es.eigenvectors().col(k).head(m) +
                             Complex(0.0, 1.0) * es.eigenvectors().col(k).tail(m);
        for (long c = 0; c < col; ++c) z -= Z.col(c).dot(z) * Z.col(c);
        double nrm = z.norm();
        if (nrm < 0.5) continue;   // the i-partner of a column already taken
        Z.col(col) = z / nrm;
        s(col) = 0.0;
        ++col;
    }
    if (col != m)
        throw NumericalError("Takagi factorization did not span the mode space");
}

// Principal log of a unitary matrix.  The Schur form of a normal matrix is
// diagonal up to roundoff, so the log never meets the branch cut trouble a
// dense matrix log has near eigenvalue −1.
Eigen::MatrixXcd passive_log(const Eigen::MatrixXcd& W) {
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(W);
    Eigen::VectorXcd d = schur.matrixT().diagonal();
    Eigen::VectorXcd ld(d.size());
    for (long k = 0; k < d.size(); ++k)
        ld(k) = Complex(std::log(std::abs(d(k))), std::arg(d(k)));
    return schur.matrixU() * ld.asDiagonal() * schur.matrixU().adjoint();
}

// The circuit factored as passive · squeeze · passive.  Exponentiating the
// factors separately keeps the truncated application faithful: the passive
// logs are number-conserving, so only the diagonal squeezers (of physical
// magnitude) touch the cutoff boundary.  A single log of the composed map
// can instead carry hugely amplified squeeze coefficients whose truncated
// transients pollute the top levels whenever the map's rotation angle gets
// close to π.
struct StagedCircuit {
    Eigen::MatrixXcd passive_in;    // applied to the state first
    Eigen::VectorXd squeeze;        // per-mode one-mode squeeze
    Eigen::MatrixXcd passive_out;
};

StagedCircuit stage_circuit(const BogoliubovMap& map) {
    int M = map.mode_count();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(map.B,
                                           Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXcd W = svd.matrixU().adjoint() * map.C * svd.matrixV().conjugate();
    W = 0.5 * (W + W.transpose()).eval();

    Eigen::MatrixXcd Z;
    Eigen::VectorXd s;
    takagi(W, Z, s);

    StagedCircuit st;
    Eigen::MatrixXcd U = svd.matrixU() * Z;
    Eigen::MatrixXcd V = svd.matrixV() * Z;
    st.passive_in = V.adjoint();
    st.passive_out = U;
    st.squeeze.resize(M);
    for (int k = 0; k < M; ++k) st.squeeze(k) = std::asinh(s(k));

    double scale = 1.0 + map.B.cwiseAbs().maxCoeff();
    double err = (U * st.squeeze.array().cosh().matrix().asDiagonal() * V.adjoint() - map.B)
                     .cwiseAbs()
                     .maxCoeff();
    err = std::max(err, (U * s.asDiagonal() * V.transpose() - map.C).cwiseAbs().maxCoeff());
    if (err > 1e-8 * scale)
        throw NumericalError("circuit staging residual " + std::to_string(err));
    return st;
}

} // namespace

OracleResult oracle_apply(const BogoliubovMap& map,
                          const SqueezePrefix& prefix,
                          const ModeRoles& roles,
                          const FockDensityMatrix& input,
                          int oracle_cutoff,
                          double leak_tol) {
    int M = map.mode_count();
    roles.validate(M);
    if (roles.input_count() != input.mode_count())
        throw ConfigError("input state mode count does not match flagged input modes");
    if (input.cutoff() > oracle_cutoff)
        throw ConfigError("oracle cutoff below input cutoff");
    for (const SqueezeTerm& t : prefix) {
        if (t.mode_a < 0 || t.mode_a >= M || t.mode_b >= M)
            throw ConfigError("squeeze prefix mode out of range");
        if (roles.is_input[t.mode_a] || (t.mode_b >= 0 && roles.is_input[t.mode_b]))
            throw ConfigError("squeeze prefix may only act on vacuum modes");
    }

    FockSpace fs(M, oracle_cutoff);
    std::vector<int> input_modes;
    for (int m = 0; m < M; ++m)
        if (roles.is_input[m]) input_modes.push_back(m);

    // Branch the input into weighted pure states.
    std::vector<std::pair<double, Eigen::VectorXcd>> branches;
    if (input.mode_count() == 0) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(fs.dim);
        v(0) = 1.0;
        double w = input.elements()(0, 0).real();
        if (w > 1e-16) branches.emplace_back(w, std::move(v));
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            0.5 * (input.elements() + input.elements().adjoint()));
        for (long k = 0; k < input.dim(); ++k) {
            double w = es.eigenvalues()(k);
            if (w < -1e-9)
                throw ValidityError("input state has negative eigenvalue " + std::to_string(w));
            if (w <= 1e-16) continue;
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(fs.dim);
            for (long in_idx = 0; in_idx < input.dim(); ++in_idx) {
                Complex amp = es.eigenvectors()(in_idx, k);
                if (amp == Complex(0.0)) continue;
                std::vector<int> occ = input.occupations_of(in_idx);
                long full = 0;
                for (size_t q = 0; q < input_modes.size(); ++q)
                    full += occ[q] * fs.stride[input_modes[q]];
                v(full) = amp;
            }
            branches.emplace_back(w, std::move(v));
        }
    }

    for (const SqueezeTerm& t : prefix) {
        Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(M, M);
        Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(M, M);
        if (t.mode_b < 0) {
            Q(t.mode_a, t.mode_a) = t.r;
        } else {
            Q(t.mode_a, t.mode_b) = t.r;
            Q(t.mode_b, t.mode_a) = t.r;
        }
        SparseC X = quadratic_generator(fs, P, Q);
        for (auto& br : branches) apply_exp(X, br.second);
    }

    StagedCircuit st = stage_circuit(map);
    Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(M, M);
    auto apply_passive = [&](const Eigen::MatrixXcd& W) {
        if ((W - Eigen::MatrixXcd::Identity(M, M)).cwiseAbs().maxCoeff() < 1e-14) return;
        SparseC X = quadratic_generator(fs, passive_log(W), zero);
        for (auto& br : branches) apply_exp(X, br.second);
    };
    apply_passive(st.passive_in);
    if (st.squeeze.cwiseAbs().maxCoeff() > 1e-14) {
        SparseC X = quadratic_generator(fs, zero, st.squeeze.asDiagonal());
        for (auto& br : branches) apply_exp(X, br.second);
    }
    apply_passive(st.passive_out);

    double leak = 0.0;
    for (const auto& br : branches) {
        double l = 0.0;
        for (long idx = 0; idx < fs.dim; ++idx) {
            bool top = false;
            for (int m = 0; m < M && !top; ++m)
                top = fs.occ(idx, m) == fs.levels - 1;
            if (top) l += std::norm(br.second(idx));
        }
        leak += br.first * l;
    }
    if (leak > leak_tol)
        throw NumericalError("oracle truncation leak " + std::to_string(leak) +
                             " exceeds tolerance " + std::to_string(leak_tol));

    // Apply the projectors: each is diagonal in photon number.
    for (auto& br : branches)
        for (long idx = 0; idx < fs.dim; ++idx) {
            bool keep = true;
            for (int m = 0; m < M && keep; ++m) {
                int n = fs.occ(idx, m);
                switch (roles.fate[m]) {
                case ModeFate::Dark: keep = n == 0; break;
                case ModeFate::CountingClick: keep = n == 1; break;
                case ModeFate::NonCountingClick: keep = n >= 1; break;
                default: break;
                }
            }
            if (!keep) br.second(idx) = 0.0;
        }

    // Partial trace down to the output modes.
    std::vector<int> out_modes;
    for (int m = 0; m < M; ++m)
        if (roles.fate[m] == ModeFate::Output) out_modes.push_back(m);
    int n_out = static_cast<int>(out_modes.size());
    long dim_out = 1;
    for (int q = 0; q < n_out; ++q) dim_out *= fs.levels;
    long dim_rest = fs.dim / dim_out;

    std::vector<long> o_of(fs.dim), t_of(fs.dim);
    for (long idx = 0; idx < fs.dim; ++idx) {
        long o = 0, t = 0;
        for (int m = 0; m < M; ++m) {
            int n = fs.occ(idx, m);
            if (roles.fate[m] == ModeFate::Output)
                o = o * fs.levels + n;
            else
                t = t * fs.levels + n;
        }
        o_of[idx] = o;
        t_of[idx] = t;
    }

    OracleResult result{FockDensityMatrix(n_out, oracle_cutoff, TraceMeaning::EventWeighted),
                        leak};
    Eigen::MatrixXcd G(dim_out, dim_rest);
    for (const auto& br : branches) {
        G.setZero();
        for (long idx = 0; idx < fs.dim; ++idx)
            G(o_of[idx], t_of[idx]) = br.second(idx);
        result.state.elements().noalias() += br.first * (G * G.adjoint());
    }
    result.state.validate();
    return result;
}

} // namespace qrep
