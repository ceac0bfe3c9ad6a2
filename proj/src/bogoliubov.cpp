#include "qrep/bogoliubov.hpp"

#include <cmath>

namespace qrep {

BogoliubovMap BogoliubovMap::identity(int modes) {
    return {Eigen::MatrixXcd::Identity(modes, modes),
            Eigen::MatrixXcd::Zero(modes, modes)};
}

double BogoliubovMap::unitarity_residual() const {
    int n = mode_count();
    double r1 = (B * B.adjoint() - C * C.adjoint() -
                 Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    Eigen::MatrixXcd bct = B * C.transpose();
    double r2 = (bct - bct.transpose()).cwiseAbs().maxCoeff();
    return std::max(r1, r2);
}

void BogoliubovMap::validate(double tol) const {
    double r = unitarity_residual();
    if (r > tol)
        throw ValidityError("Bogoliubov map violates unitarity constraints: residual " +
                            std::to_string(r));
}

BogoliubovMap compose(const BogoliubovMap& first, const BogoliubovMap& second) {
    if (first.mode_count() != second.mode_count())
        throw ConfigError("compose requires equal mode counts");
    BogoliubovMap out;
    out.B = second.B * first.B + second.C * first.C.conjugate();
    out.C = second.B * first.C + second.C * first.B.conjugate();
    double r = out.unitarity_residual();
    if (r > 1e-8)
        throw NumericalError("composition lost unitarity: residual " + std::to_string(r));
    return out;
}

namespace {

struct Row {
    Eigen::VectorXcd b, c;
};

// [a'_w, a'_z†]: conjugate-linear in z.
Complex comm_inner(const Row& w, const Row& z) {
    return z.b.dot(w.b) - z.c.dot(w.c);
}

// [a'_w, a'_z]: bilinear.
Complex comm_op(const Row& w, const Row& z) {
    return w.b.cwiseProduct(z.c).sum() - w.c.cwiseProduct(z.b).sum();
}

// Row of the conjugate operator a'_z†.
Row dual(const Row& z) {
    return {z.c.conjugate(), z.b.conjugate()};
}

} // namespace

BogoliubovMap complete_rows_to_map(const std::vector<Eigen::VectorXcd>& b_rows,
                                   const std::vector<Eigen::VectorXcd>& c_rows,
                                   int mode_count) {
    if (b_rows.size() != c_rows.size())
        throw ConfigError("b_rows and c_rows must pair up");
    if (static_cast<int>(b_rows.size()) > mode_count)
        throw ConfigError("more rows than modes");

    std::vector<Row> rows;
    for (size_t i = 0; i < b_rows.size(); ++i) {
        if (b_rows[i].size() != mode_count || c_rows[i].size() != mode_count)
            throw ConfigError("row length does not match mode_count");
        rows.push_back({b_rows[i], c_rows[i]});
    }
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j <= i; ++j) {
            Complex g = comm_inner(rows[i], rows[j]);
            if (i == j) g -= 1.0;
            if (std::abs(g) > 1e-8 || std::abs(comm_op(rows[i], rows[j])) > 1e-8)
                throw ValidityError("given rows are not part of a unitary map");
        }

    // Gram–Schmidt in the commutator metric.  Candidates are the bare mode
    // rows a_k and a_k†; after projecting out the accepted rows the one with
    // the largest residual norm is kept.  A negative norm means the residual
    // behaves as a creation operator; its dual is the valid row.
    while (static_cast<int>(rows.size()) < mode_count) {
        Row best;
        double best_norm = 0.0;
        for (int cand = 0; cand < 2 * mode_count; ++cand) {
            Row w{Eigen::VectorXcd::Zero(mode_count), Eigen::VectorXcd::Zero(mode_count)};
            if (cand < mode_count)
                w.b(cand) = 1.0;
            else
                w.c(cand - mode_count) = 1.0;
            for (const Row& z : rows) {
                Complex lam = comm_inner(w, z);
                Complex mu = comm_op(w, z);
                Row zd = dual(z);
                w.b -= lam * z.b - mu * zd.b;
                w.c -= lam * z.c - mu * zd.c;
            }
            double nu = comm_inner(w, w).real();
            if (std::abs(nu) > std::abs(best_norm)) {
                best_norm = nu;
                best = w;
            }
        }
        if (std::abs(best_norm) < 1e-10)
            throw NumericalError("row completion found no independent direction");
        if (best_norm < 0.0) best = dual(best);
        double scale = 1.0 / std::sqrt(std::abs(best_norm));
        best.b *= scale;
        best.c *= scale;
        rows.push_back(best);
    }

    BogoliubovMap out;
    out.B.resize(mode_count, mode_count);
    out.C.resize(mode_count, mode_count);
    for (int i = 0; i < mode_count; ++i) {
        out.B.row(i) = rows[i].b.transpose();
        out.C.row(i) = rows[i].c.transpose();
    }
    out.validate(1e-8);
    return out;
}

double ReducedMemory::constraint_residual() const {
    return b1 * b1 + b2 * b2 - c1 * c1 - std::norm(c2) - c3 * c3 - 1.0;
}

void ReducedMemory::validate(double tol) const {
    if (b2 < 0.0 || c3 < 0.0)
        throw ValidityError("b2 and c3 must be non-negative by phase convention");
    double r = constraint_residual();
    if (std::abs(r) > tol)
        throw ValidityError("memory coefficients violate the unitarity constraint: residual " +
                            std::to_string(r));
}

ReducedMemory reduce_memory(double b1, double c1,
                            const Eigen::VectorXcd& b_tilde,
                            const Eigen::VectorXcd& c_tilde) {
    if (b_tilde.size() != c_tilde.size())
        throw ConfigError("reduce_memory coefficient vectors must have equal length");
    ReducedMemory m;
    m.b1 = b1;
    m.c1 = c1;
    m.b2 = b_tilde.norm();
    if (m.b2 > 0.0) {
        Eigen::VectorXcd u = b_tilde / m.b2;
        m.c2 = u.cwiseProduct(c_tilde).sum();
        m.c3 = (c_tilde - m.c2 * u.conjugate()).norm();
    } else {
        m.c2 = 0.0;
        m.c3 = c_tilde.norm();
    }
    m.validate(1e-8);
    return m;
}

ReducedMemory augment_dark_counts(const ReducedMemory& mem, double n_dc) {
    if (n_dc < 0.0) throw ConfigError("mean dark counts must be >= 0");
    ReducedMemory out;
    out.b1 = mem.b1;
    out.b2 = std::sqrt(mem.b2 * mem.b2 + n_dc);
    out.c1 = mem.c1;
    out.c2 = out.b2 > 0.0 ? mem.b2 * mem.c2 / out.b2 : mem.c2;
    double c3sq = std::norm(mem.c2) - std::norm(out.c2) + mem.c3 * mem.c3 + n_dc;
    out.c3 = std::sqrt(std::max(0.0, c3sq));
    out.validate(1e-8);
    return out;
}

ReducedMemory augment_dark_counts_virtual(const ReducedMemory& mem, double p, double s) {
    if (p < 0.0 || p > 1.0) throw ConfigError("transmittivity parameter p outside [0, 1]");
    double t = std::sqrt(1.0 - p);
    ReducedMemory out;
    out.b1 = t * mem.b1;
    out.b2 = std::sqrt((1.0 - p) * mem.b2 * mem.b2 +
                       p * std::cosh(s) * std::cosh(s));
    out.c1 = t * mem.c1;
    out.c2 = out.b2 > 0.0 ? (1.0 - p) * mem.b2 * mem.c2 / out.b2 : 0.0;
    double c3sq = (1.0 - p) * (std::norm(mem.c2) + mem.c3 * mem.c3) +
                  p * std::sinh(s) * std::sinh(s) - std::norm(out.c2);
    out.c3 = std::sqrt(std::max(0.0, c3sq));
    out.validate(1e-8);
    return out;
}

CircuitElement CircuitElement::beam_splitter(double transmittivity, int a, int b) {
    if (transmittivity < 0.0 || transmittivity > 1.0)
        throw ConfigError("beam splitter transmittivity outside [0, 1]");
    if (a == b) throw ConfigError("beam splitter needs two distinct modes");
    CircuitElement e;
    e.kind = Kind::BeamSplitter;
    e.mode_a = a;
    e.mode_b = b;
    e.param = transmittivity;
    return e;
}

CircuitElement CircuitElement::phase_shift(double angle, int mode) {
    CircuitElement e;
    e.kind = Kind::PhaseShift;
    e.mode_a = mode;
    e.param = angle;
    return e;
}

CircuitElement CircuitElement::one_mode_squeeze(double r, int mode) {
    CircuitElement e;
    e.kind = Kind::OneModeSqueeze;
    e.mode_a = mode;
    e.param = r;
    return e;
}

CircuitElement CircuitElement::two_mode_squeeze(double r, int a, int b) {
    if (a == b) throw ConfigError("two-mode squeezer needs two distinct modes");
    CircuitElement e;
    e.kind = Kind::TwoModeSqueeze;
    e.mode_a = a;
    e.mode_b = b;
    e.param = r;
    return e;
}

CircuitElement CircuitElement::memory_element(const ReducedMemory& mem, int input,
                                              int aux_b, int aux_c, double input_phase) {
    if (input == aux_b || input == aux_c || aux_b == aux_c)
        throw ConfigError("memory element needs three distinct modes");
    mem.validate(1e-8);
    CircuitElement e;
    e.kind = Kind::Memory;
    e.mode_a = input;
    e.mode_b = aux_b;
    e.mode_c = aux_c;
    e.memory = mem;
    e.input_phase = input_phase;
    return e;
}

CircuitElement lossy_channel(double p, int mode, int ancilla) {
    if (p < 0.0 || p > 1.0) throw ConfigError("loss probability outside [0, 1]");
    return CircuitElement::beam_splitter(1.0 - p, mode, ancilla);
}

BogoliubovMap element_map(const CircuitElement& e, int total_modes) {
    auto check = [&](int m) {
        if (m < 0 || m >= total_modes)
            throw ConfigError("circuit element mode index out of range");
    };
    BogoliubovMap map = BogoliubovMap::identity(total_modes);
    switch (e.kind) {
    case CircuitElement::Kind::BeamSplitter: {
        check(e.mode_a);
        check(e.mode_b);
        double ct = std::sqrt(e.param), st = std::sqrt(1.0 - e.param);
        map.B(e.mode_a, e.mode_a) = ct;
        map.B(e.mode_a, e.mode_b) = st;
        map.B(e.mode_b, e.mode_a) = -st;
        map.B(e.mode_b, e.mode_b) = ct;
        break;
    }
    case CircuitElement::Kind::PhaseShift:
        check(e.mode_a);
        map.B(e.mode_a, e.mode_a) = std::exp(Complex(0.0, e.param));
        break;
    case CircuitElement::Kind::OneModeSqueeze:
        check(e.mode_a);
        map.B(e.mode_a, e.mode_a) = std::cosh(e.param);
        map.C(e.mode_a, e.mode_a) = std::sinh(e.param);
        break;
    case CircuitElement::Kind::TwoModeSqueeze:
        check(e.mode_a);
        check(e.mode_b);
        map.B(e.mode_a, e.mode_a) = std::cosh(e.param);
        map.B(e.mode_b, e.mode_b) = std::cosh(e.param);
        map.C(e.mode_a, e.mode_b) = std::sinh(e.param);
        map.C(e.mode_b, e.mode_a) = std::sinh(e.param);
        break;
    case CircuitElement::Kind::Memory: {
        check(e.mode_a);
        check(e.mode_b);
        check(e.mode_c);
        Eigen::VectorXcd b = Eigen::VectorXcd::Zero(3), c = Eigen::VectorXcd::Zero(3);
        b(0) = e.memory.b1;
        b(1) = e.memory.b2;
        c(0) = e.memory.c1;
        c(1) = e.memory.c2;
        c(2) = e.memory.c3;
        BogoliubovMap local = complete_rows_to_map({b}, {c}, 3);
        int scatter[3] = {e.mode_a, e.mode_b, e.mode_c};
        for (int i = 0; i < 3; ++i) {
            map.B(scatter[i], scatter[i]) = 0.0;
            for (int j = 0; j < 3; ++j) {
                map.B(scatter[i], scatter[j]) = local.B(i, j);
                map.C(scatter[i], scatter[j]) = local.C(i, j);
            }
        }
        if (e.input_phase != 0.0) {
            BogoliubovMap ph =
                element_map(CircuitElement::phase_shift(e.input_phase, e.mode_a), total_modes);
            map = compose(ph, map);
        }
        break;
    }
    }
    return map;
}

BogoliubovMap compose_circuit(const std::vector<CircuitElement>& elements, int total_modes) {
    BogoliubovMap map = BogoliubovMap::identity(total_modes);
    for (const CircuitElement& e : elements)
        map = compose(map, element_map(e, total_modes));
    return map;
}

} // namespace qrep
