#include "qrep/genfun.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace qrep {

double GenFunBuild::value_at_zero() const {
    double v = 0.0;
    for (const QuadraticGenFun& t : terms) v += t.sign * t.prefactor;
    return v;
}

long TransferTensor::input_dim() const {
    long d = 1;
    for (int m = 0; m < input_mode_count; ++m) d *= input_cutoff + 1;
    return d;
}

long TransferTensor::output_dim() const {
    long d = 1;
    for (int m = 0; m < output_mode_count; ++m) d *= output_cutoff + 1;
    return d;
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct Layout {
    std::vector<GenFunVariable> vars;
    std::vector<int> alpha, beta, gamma, delta, mu, nu;   // per circuit mode, -1 if absent

    int add(VariableTag tag, int mode) {
        vars.push_back({tag, mode});
        return static_cast<int>(vars.size()) - 1;
    }
    int V() const { return static_cast<int>(vars.size()); }
};

// Builds one Gaussian term for the given set of pinched modes (those whose
// operator is D(l)|0><0|D(r)); every other non-output mode is traced, which
// needs no bookkeeping at all.  The exponent is accumulated as
//   E = ½ zᵀAzz z + zᵀAzv v + ½ vᵀAvv v
// over the integration variables z = (x, p per pinched mode) and the formal
// variables v, then z is integrated out in closed form.
QuadraticGenFun build_term(const BogoliubovMap& map, const Layout& lay,
                           const ModeRoles& roles, const std::vector<int>& pinched,
                           double sign) {
    const int V = lay.V();
    const int K = static_cast<int>(pinched.size());
    const int Z = 2 * K;
    const int M = map.mode_count();

    // Displacement argument per pinched mode: w = l + (x + ip)/√2 + r, with
    // l and r read off the mode's role (γ/−δ for outputs, μ/−ν for counting
    // clicks, zero for vacuum projections).
    Eigen::MatrixXcd Wz = Eigen::MatrixXcd::Zero(K, Z);
    Eigen::MatrixXcd Wv = Eigen::MatrixXcd::Zero(K, V);
    for (int k = 0; k < K; ++k) {
        int m = pinched[k];
        Wz(k, 2 * k) = kInvSqrt2;
        Wz(k, 2 * k + 1) = Complex(0.0, kInvSqrt2);
        switch (roles.fate[m]) {
        case ModeFate::Output:
            Wv(k, lay.gamma[m]) += 1.0;
            Wv(k, lay.delta[m]) -= 1.0;
            break;
        case ModeFate::CountingClick:
            Wv(k, lay.mu[m]) += 1.0;
            Wv(k, lay.nu[m]) -= 1.0;
            break;
        default:
            break;   // vacuum projection: l = r = 0
        }
    }

    // Push the product of displacements through the circuit in one step:
    // the joint displacement D(w) maps to D(η) with η = B†w − Cᵀ conj(w),
    // with no extra phase since the product is a single exponential.
    Eigen::MatrixXcd Bp(K, M), Cp(K, M);
    for (int k = 0; k < K; ++k) {
        Bp.row(k) = map.B.row(pinched[k]);
        Cp.row(k) = map.C.row(pinched[k]);
    }
    Eigen::MatrixXcd etaZ = Bp.adjoint() * Wz - Cp.transpose() * Wz.conjugate();
    Eigen::MatrixXcd etaV = Bp.adjoint() * Wv - Cp.transpose() * Wv.conjugate();

    // Vacuum expectation <vac|D(−α)D(η)D(β)|vac>: modulus part
    // exp(−|β−α+η|²/2) plus two phase factors handled below.
    Eigen::MatrixXcd gZ = etaZ;
    Eigen::MatrixXcd gV = etaV;
    for (int m = 0; m < M; ++m) {
        if (!roles.is_input[m]) continue;
        gV(m, lay.beta[m]) += 1.0;
        gV(m, lay.alpha[m]) -= 1.0;
    }

    Eigen::MatrixXd Azz = -0.5 * Eigen::MatrixXd::Identity(Z, Z) -
                          (gZ.adjoint() * gZ).real();
    Eigen::MatrixXcd Azv = -(gZ.adjoint() * gV).real().cast<Complex>();
    Eigen::MatrixXcd Avv = -(gV.adjoint() * gV).real().cast<Complex>();

    // Phases from merging D(l) D((x+ip)/√2) D(r): exp(i p (r−l)/√2), where
    // r−l = −γ−δ (outputs) or −μ−ν (counting clicks).
    for (int k = 0; k < K; ++k) {
        int m = pinched[k];
        if (roles.fate[m] == ModeFate::Output) {
            Azv(2 * k + 1, lay.gamma[m]) += Complex(0.0, -kInvSqrt2);
            Azv(2 * k + 1, lay.delta[m]) += Complex(0.0, -kInvSqrt2);
        } else if (roles.fate[m] == ModeFate::CountingClick) {
            Azv(2 * k + 1, lay.mu[m]) += Complex(0.0, -kInvSqrt2);
            Azv(2 * k + 1, lay.nu[m]) += Complex(0.0, -kInvSqrt2);
        }
    }

    // The two displacement-merge phase factors exp(i Im(−α·conj(η))) and
    // exp(i Im((η−α)·β)).  Each is exp((t − conj-coeff(t))/2) for a product
    // t = (indicator variable)·(linear form); only the imaginary parts of
    // the form's coefficients survive.  The −α inside the second factor has
    // real coefficients and drops out.
    auto add_phase_product = [&](int u, Complex c, const Eigen::RowVectorXcd& fz,
                                 const Eigen::RowVectorXcd& fv) {
        for (int z = 0; z < Z; ++z)
            Azv(z, u) += Complex(0.0, std::imag(c * fz(z)));
        for (int q = 0; q < V; ++q) {
            Complex w(0.0, std::imag(c * fv(q)));
            Avv(u, q) += w;
            Avv(q, u) += w;
        }
    };
    for (int m = 0; m < M; ++m) {
        if (!roles.is_input[m]) continue;
        add_phase_product(lay.alpha[m], Complex(-1.0, 0.0),
                          etaZ.row(m).conjugate(), etaV.row(m).conjugate());
        add_phase_product(lay.beta[m], Complex(1.0, 0.0), etaZ.row(m), etaV.row(m));
    }

    // exp(Σ/2) normalization: +1 on every variable's diagonal (the counting
    // variables carry the same factor from the single-photon construction).
    for (int q = 0; q < V; ++q) Avv(q, q) += 1.0;

    QuadraticGenFun out;
    out.sign = sign;
    out.lin = Eigen::VectorXd::Zero(V);
    if (K == 0) {
        out.Q = Avv;
        out.prefactor = 1.0;
    } else {
        Eigen::MatrixXd A = -Azz;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
        double lmin = es.eigenvalues().minCoeff();
        double lmax = es.eigenvalues().maxCoeff();
        if (lmin <= 0.0)
            throw NumericalError("Gaussian integral block is not positive definite");
        if (lmax / lmin > 1e12)
            throw NumericalError("Gaussian integral block is ill-conditioned");
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        double logdet = 0.0;
        for (int z = 0; z < Z; ++z) logdet += 2.0 * std::log(llt.matrixL()(z, z));
        Eigen::MatrixXcd solved = llt.solve(Azv.real()).cast<Complex>() +
                                  Complex(0.0, 1.0) * llt.solve(Azv.imag()).cast<Complex>();
        out.Q = Avv + Azv.transpose() * solved;
        out.prefactor = std::exp(-0.5 * logdet);
    }
    out.Q = 0.5 * (out.Q + out.Q.transpose()).eval();
    if (out.prefactor > 1.0 + 1e-10)
        throw NumericalError("generating-function prefactor " +
                             std::to_string(out.prefactor) + " above 1");
    return out;
}

} // namespace

GenFunBuild build_genfun(const BogoliubovMap& circuit,
                         const SqueezePrefix& prefix,
                         const ModeRoles& roles) {
    const int M = circuit.mode_count();
    roles.validate(M);
    circuit.validate(1e-8);

    BogoliubovMap map = circuit;
    if (!prefix.empty()) {
        std::vector<CircuitElement> pre;
        for (const SqueezeTerm& t : prefix) {
            if (t.mode_a < 0 || t.mode_a >= M || t.mode_b >= M)
                throw ConfigError("squeeze prefix mode out of range");
            if (roles.is_input[t.mode_a] || (t.mode_b >= 0 && roles.is_input[t.mode_b]))
                throw ConfigError("squeeze prefix may only act on vacuum modes");
            pre.push_back(t.mode_b < 0
                              ? CircuitElement::one_mode_squeeze(t.r, t.mode_a)
                              : CircuitElement::two_mode_squeeze(t.r, t.mode_a, t.mode_b));
        }
        map = compose(compose_circuit(pre, M), circuit);
    }

    GenFunBuild out;
    Layout lay;
    lay.alpha.assign(M, -1);
    lay.beta.assign(M, -1);
    lay.gamma.assign(M, -1);
    lay.delta.assign(M, -1);
    lay.mu.assign(M, -1);
    lay.nu.assign(M, -1);
    for (int m = 0; m < M; ++m) {
        if (!roles.is_input[m]) continue;
        lay.alpha[m] = lay.add(VariableTag::Alpha, m);
        lay.beta[m] = lay.add(VariableTag::Beta, m);
        out.input_modes.push_back(m);
    }
    std::vector<int> base_pinched, noncount;
    for (int m = 0; m < M; ++m) {
        switch (roles.fate[m]) {
        case ModeFate::Output:
            lay.gamma[m] = lay.add(VariableTag::Gamma, m);
            lay.delta[m] = lay.add(VariableTag::Delta, m);
            out.output_modes.push_back(m);
            base_pinched.push_back(m);
            break;
        case ModeFate::CountingClick:
            lay.mu[m] = lay.add(VariableTag::Mu, m);
            lay.nu[m] = lay.add(VariableTag::Nu, m);
            base_pinched.push_back(m);
            break;
        case ModeFate::Dark:
            base_pinched.push_back(m);
            break;
        case ModeFate::NonCountingClick:
            noncount.push_back(m);
            break;
        case ModeFate::Traced:
            break;
        }
    }
    out.variables = lay.vars;

    // 1 − |0><0| per non-counting click: inclusion–exclusion over the
    // subsets that take the vacuum projection, the rest simply traced.
    const int subsets = 1 << noncount.size();
    for (int mask = 0; mask < subsets; ++mask) {
        std::vector<int> pinched = base_pinched;
        int bits = 0;
        for (size_t d = 0; d < noncount.size(); ++d)
            if (mask & (1 << d)) {
                pinched.push_back(noncount[d]);
                ++bits;
            }
        double sign = bits % 2 == 0 ? 1.0 : -1.0;
        out.terms.push_back(build_term(map, lay, roles, pinched, sign));
    }
    return out;
}

namespace {

// Coefficients of exp(½ vᵀQv) on the per-variable-capped index box via the
// recurrence n_i f_n = sum_j Q_ij f_{n − e_i − e_j}, exact per coefficient.
void series_coefficients(const Eigen::MatrixXcd& Q, const std::vector<int>& caps,
                         const std::vector<long>& stride, Eigen::VectorXcd& out) {
    const int V = static_cast<int>(caps.size());
    const long size = out.size();
    out.setZero();
    out(0) = 1.0;
    std::vector<int> n(V, 0);
    for (long idx = 1; idx < size; ++idx) {
        int v = V - 1;
        while (true) {
            if (n[v] < caps[v]) {
                ++n[v];
                break;
            }
            n[v] = 0;
            --v;
        }
        int i = 0;
        while (n[i] == 0) ++i;
        const long base = idx - stride[i];
        Complex acc = 0.0;
        for (int j = 0; j < V; ++j) {
            const Complex q = Q(i, j);
            if (q == Complex(0.0)) continue;
            const int avail = n[j] - (j == i ? 1 : 0);
            if (avail >= 1) acc += q * out(base - stride[j]);
        }
        out(idx) = acc / double(n[i]);
    }
}

double sqrt_factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return std::sqrt(f);
}

} // namespace

TransferTensor extract_tensor(const GenFunBuild& f, int input_cutoff, int output_cutoff) {
    if (input_cutoff < 0 || output_cutoff < 0)
        throw ConfigError("cutoffs must be >= 0");
    const int V = static_cast<int>(f.variables.size());
    std::vector<int> caps(V);
    for (int q = 0; q < V; ++q) {
        switch (f.variables[q].tag) {
        case VariableTag::Alpha:
        case VariableTag::Beta: caps[q] = input_cutoff; break;
        case VariableTag::Gamma:
        case VariableTag::Delta: caps[q] = output_cutoff; break;
        case VariableTag::Mu:
        case VariableTag::Nu: caps[q] = 1; break;
        }
    }
    std::vector<long> stride(V, 1);
    for (int q = V - 2; q >= 0; --q) stride[q] = stride[q + 1] * (caps[q + 1] + 1);
    long size = V == 0 ? 1 : stride[0] * (caps[0] + 1);
    if (size > 40'000'000)
        throw ConfigError("series expansion exceeds the configured budget");

    Eigen::VectorXcd total = Eigen::VectorXcd::Zero(size);
    Eigen::VectorXcd work(size);
    for (const QuadraticGenFun& t : f.terms) {
        series_coefficients(t.Q, caps, stride, work);
        total += (t.sign * t.prefactor) * work;
    }

    // Variable positions by role, in input/output mode order.
    const int n_in = static_cast<int>(f.input_modes.size());
    const int n_out = static_cast<int>(f.output_modes.size());
    std::vector<long> st_alpha, st_beta, st_gamma, st_delta;
    long counting_offset = 0;
    for (int q = 0; q < V; ++q) {
        switch (f.variables[q].tag) {
        case VariableTag::Alpha: st_alpha.push_back(stride[q]); break;
        case VariableTag::Beta: st_beta.push_back(stride[q]); break;
        case VariableTag::Gamma: st_gamma.push_back(stride[q]); break;
        case VariableTag::Delta: st_delta.push_back(stride[q]); break;
        case VariableTag::Mu:
        case VariableTag::Nu: counting_offset += stride[q]; break;
        }
    }

    TransferTensor out;
    out.input_mode_count = n_in;
    out.output_mode_count = n_out;
    out.input_cutoff = input_cutoff;
    out.output_cutoff = output_cutoff;
    const long Din = out.input_dim(), Dout = out.output_dim();

    // Per linearized Fock label: series offset and factorial factor, for
    // each of the four variable families.
    auto tabulate = [](long dim, int levels, const std::vector<long>& strides) {
        std::pair<std::vector<long>, std::vector<double>> tab;
        tab.first.assign(dim, 0);
        tab.second.assign(dim, 1.0);
        for (long lin = 0; lin < dim; ++lin) {
            long rest = lin;
            long off = 0;
            double fac = 1.0;
            for (int m = static_cast<int>(strides.size()) - 1; m >= 0; --m) {
                int digit = static_cast<int>(rest % levels);
                rest /= levels;
                off += digit * strides[m];
                fac *= sqrt_factorial(digit);
            }
            tab.first[lin] = off;
            tab.second[lin] = fac;
        }
        return tab;
    };
    auto [off_dlt, fac_dlt] = tabulate(Dout, output_cutoff + 1, st_delta);
    auto [off_gam, fac_gam] = tabulate(Dout, output_cutoff + 1, st_gamma);
    auto [off_bet, fac_bet] = tabulate(Din, input_cutoff + 1, st_beta);
    auto [off_alp, fac_alp] = tabulate(Din, input_cutoff + 1, st_alpha);

    out.M.resize(Dout * Dout, Din * Din);
    for (long i = 0; i < Dout; ++i)
        for (long j = 0; j < Dout; ++j) {
            const long row = i * Dout + j;
            const long off_out = off_dlt[i] + off_gam[j] + counting_offset;
            const double fac_out = fac_dlt[i] * fac_gam[j];
            for (long k = 0; k < Din; ++k)
                for (long l = 0; l < Din; ++l)
                    out.M(row, k * Din + l) =
                        fac_out * fac_bet[k] * fac_alp[l] *
                        total(off_out + off_bet[k] + off_alp[l]);
        }
    return out;
}

FockDensityMatrix apply_tensor(const TransferTensor& t, const FockDensityMatrix& rho) {
    if (rho.mode_count() != t.input_mode_count || rho.cutoff() != t.input_cutoff)
        throw ConfigError("transfer tensor does not match the input state's shape");
    const long Din = t.input_dim(), Dout = t.output_dim();
    Eigen::VectorXcd vin(Din * Din);
    for (long r = 0; r < Din; ++r)
        for (long c = 0; c < Din; ++c) vin(r * Din + c) = rho.elements()(r, c);
    Eigen::VectorXcd vout = t.M * vin;
    FockDensityMatrix out(t.output_mode_count, t.output_cutoff, TraceMeaning::EventWeighted);
    for (long r = 0; r < Dout; ++r)
        for (long c = 0; c < Dout; ++c) out.elements()(r, c) = vout(r * Dout + c);
    out.validate();
    return out;
}

} // namespace qrep
