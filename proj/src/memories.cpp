#include "qrep/memories.hpp"

#include <cmath>

namespace qrep {

ReducedMemory ideal_memory() { return ReducedMemory{}; }

ReducedMemory generic_memory(double b1, double b2, double c1, Complex c2, double c3) {
    ReducedMemory m;
    m.b1 = b1;
    m.b2 = b2;
    m.c1 = c1;
    m.c2 = c2;
    m.c3 = c3;
    m.validate();
    return m;
}

ReducedMemory memory_with_c1(double c1) {
    ReducedMemory m;
    m.b1 = std::sqrt(1.0 + c1 * c1);
    m.c1 = c1;
    m.validate();
    return m;
}

ReducedMemory two_pass(const TwoPassParams& p) {
    if (!(p.kappa > 0.0)) throw ConfigError("two-pass memory needs kappa > 0");
    if (p.xi < 0.0 || p.xi >= 1.0)
        throw ConfigError("two-pass reflection coefficient must lie in [0, 1)");

    // Full transfer: the retrieved mode picks up (e^{-k^2} - 1) of the
    // stored light, the rest leaks into the atomic mode and the retrieval
    // pulse.  Passive, so the reduction has no conjugate part.
    double e = std::exp(-p.kappa * p.kappa);
    Eigen::VectorXcd bt(2), ct(2);
    bt << -std::sqrt(e * (1.0 - e)), std::sqrt(e);
    ct.setZero();
    ReducedMemory m = reduce_memory(e - 1.0, 0.0, bt, ct);

    if (p.xi > 0.0) {
        // The wall-reflection coefficient is only known for kappa = 2,
        // where it enters as c3^2 = 0.9 xi to lowest order.
        if (std::abs(p.kappa - 2.0) > 1e-12)
            throw ConfigError("two-pass reflections are only modelled at kappa = 2");
        m.c3 = std::sqrt(0.9 * p.xi);
        // Restore unitary consistency by rescaling the stored-mode
        // coefficient; the retrieval side is unaffected by reflections.
        m.b1 *= std::sqrt((1.0 + m.c3 * m.c3 - m.b2 * m.b2) / (m.b1 * m.b1));
    }
    m.validate();
    return m;
}

ReducedMemory one_pass(const OnePassParams& p) {
    if (!(p.s > 0.0)) throw ConfigError("one-pass squeezing factor must be > 0");

    // Full transfer maps the retrieved mode to
    //   (1 - kg/2) a_A + (kg/2) a_A+ + (k+g)/2 a_L - (k-g)/2 a_L+,
    // and the atomic mode is squeezed in X by sqrt(s) before storage.
    double lam = std::sqrt(p.s);
    double u = 0.5 * (lam + 1.0 / lam);
    double v = 0.5 * (lam - 1.0 / lam);
    double A = 1.0 - 0.5 * p.kappa * p.g;
    double B = 0.5 * p.kappa * p.g;

    Eigen::VectorXcd bt(1), ct(1);
    bt << A * u + B * v;
    ct << A * v + B * u;
    ReducedMemory m = reduce_memory(0.5 * (p.kappa + p.g), -0.5 * (p.kappa - p.g), bt, ct);
    m.validate();
    return m;
}

} // namespace qrep
