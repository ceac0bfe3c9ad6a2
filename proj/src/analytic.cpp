#include "qrep/analytic.hpp"

#include <cmath>
#include <numbers>

namespace qrep {

namespace {

constexpr double pi2_over_6 = std::numbers::pi * std::numbers::pi / 6.0;

// Power series sum_k x^k / k^2, used for |x| <= 0.5 where 60 terms reach
// full double precision.
double dilog_series(double x) {
    double power = x;
    double sum = x;
    for (int k = 2; k <= 60; ++k) {
        power *= x;
        sum += power / static_cast<double>(k * k);
    }
    return sum;
}

PerturbativeS from_deficit(const PerturbativeInputs& in, double deficit) {
    PerturbativeS out;
    out.deficit = deficit;
    out.S = 2.0 * std::numbers::sqrt2 * (1.0 - deficit);
    out.valid = deficit < 1.0 && in.n_dc < 1.0 - in.p_con;
    return out;
}

} // namespace

void PerturbativeInputs::validate() const {
    if (!(L_over_L0 >= 1.0)) throw ConfigError("L/L0 must be >= 1");
    if (p_gen < 0.0 || p_gen >= 1.0 || p_con < 0.0 || p_con >= 1.0)
        throw ConfigError("loss probabilities must lie in [0, 1)");
    if (n_dc < 0.0) throw ConfigError("dark-count rate must be >= 0");
    if (r < 0.0) throw ConfigError("squeezing parameter must be >= 0");
}

PerturbativeS s_memory_darkcount(const PerturbativeInputs& in) {
    in.validate();
    const double L = in.L_over_L0;
    const double mem2 = in.c2_mag * in.c2_mag + in.c3 * in.c3 +
                        in.n_dc / (1.0 - in.p_con);
    const double c1sq = in.c1 * in.c1;
    double deficit;
    if (in.detector == DetectorKind::NonCounting) {
        deficit = (L - 1.0) * (L - 1.0) * (1.0 + in.p_con) * (1.0 + in.p_con) * c1sq +
                  4.0 * L * L * (1.0 + in.p_con) * mem2;
    } else {
        deficit = L * L * in.p_con * in.p_con * c1sq +
                  8.0 * L * L * in.p_con * mem2;
    }
    return from_deficit(in, deficit);
}

PerturbativeS s_finite_squeezing(const PerturbativeInputs& in) {
    in.validate();
    const double L = in.L_over_L0;
    const double r2 = in.r * in.r;
    double deficit;
    if (in.detector == DetectorKind::NonCounting) {
        deficit = 8.0 * L * L * 0.5 * (1.0 + in.p_gen) * 0.5 * (1.0 + in.p_con) * r2;
    } else {
        deficit = 8.0 * L * L * in.p_gen * in.p_con * r2;
    }
    return from_deficit(in, deficit);
}

PerturbativeS s_generation_darkcount(const PerturbativeInputs& in) {
    in.validate();
    const double L = in.L_over_L0;
    double deficit;
    if (in.detector == DetectorKind::NonCounting) {
        deficit = 4.0 * L * L * (1.0 + in.p_gen) / (1.0 - in.p_gen) * in.n_dc;
    } else {
        deficit = 8.0 * L * L * in.p_gen / (1.0 - in.p_gen) * in.n_dc;
    }
    return from_deficit(in, deficit);
}

FGPair f_g_solution(int n) {
    if (n < 0) throw ConfigError("level must be >= 0");
    const double t = std::ldexp(1.0, n);
    FGPair out;
    out.f = 1.0 / (t + 1.0);
    out.g = (-2.0 * t * t * t + 6.0 * t * t + 5.0 * t - 9.0) /
            (6.0 * (t + 1.0) * (t + 1.0));
    return out;
}

FGPair f_g_recurrence(const FGPair& fg) {
    const double f = fg.f;
    const double g = fg.g;
    if (!(f > 0.0) || f > 1.0) throw ConfigError("f must lie in (0, 1]");
    FGPair out;
    out.f = f / (2.0 - f);
    out.g = (4.0 * f * (4.0 + g) + 11.0 * f * f * f - 20.0 * f * f - 4.0) /
            (2.0 * f * (f - 2.0) * (f - 2.0));
    return out;
}

double s_exact_c1(double f, double g, double c1) {
    const double c2 = c1 * c1;
    const double num = f - c2 * g;
    const double den =
        f * f - (2.0 * f * g - (2.0 * f - 1.0) * (2.0 * f - 1.0)) * c2 -
        ((2.0 * f - 1.0 + g) * (2.0 * f - 1.0 + g) - 2.0 * g * g) * c2 * c2;
    if (!(den > 0.0))
        throw ConfigError("Bell-parameter denominator must be positive");
    return 2.0 * std::numbers::sqrt2 * num * num / den;
}

double max_distance(DistanceLimit which, const PerturbativeInputs& in) {
    in.validate();
    const double gap = 2.0 - std::numbers::sqrt2;
    const double L = in.L_over_L0;
    switch (which) {
    case DistanceLimit::Squeezing:
        if (!(in.r > 0.0))
            throw ConfigError("squeezing limit needs r > 0");
        return std::sqrt(gap / (4.0 * (1.0 + in.p_gen) * (1.0 + in.p_con))) / in.r;
    case DistanceLimit::GenDarkCount:
        if (!(in.n_dc > 0.0))
            throw ConfigError("dark-count limit needs n_dc > 0");
        return std::sqrt(gap / 8.0 * (1.0 - in.p_gen) / (1.0 + in.p_gen) / in.n_dc);
    case DistanceLimit::TwoPassXi:
        return gap / (0.9 * 8.0 * (1.0 + in.p_con)) / (L * L);
    case DistanceLimit::OnePassS:
        return 0.5 * gap / (1.0 + in.p_con) / (L * L);
    }
    throw ConfigError("unknown distance limit");
}

CrossTermReport cross_term_dominance(double n_dc, double r) {
    if (!(r > 0.0)) throw ConfigError("cross-term ratio needs r > 0");
    if (n_dc < 0.0) throw ConfigError("dark-count rate must be >= 0");
    CrossTermReport rep;
    rep.ratio = n_dc / (r * r);
    rep.dominant = rep.ratio > 1.0;
    return rep;
}

double dilog(double x) {
    if (x > 1.0) throw ConfigError("dilogarithm domain is x <= 1");
    if (x == 1.0) return pi2_over_6;
    if (x >= -0.5 && x <= 0.5) return dilog_series(x);
    if (x > 0.5) {
        // Reflection onto [0, 0.5).
        return pi2_over_6 - std::log(x) * std::log1p(-x) - dilog_series(1.0 - x);
    }
    if (x >= -1.0) {
        // Landen transformation, x/(x-1) lands in (1/3, 1/2].
        const double l = std::log1p(-x);
        return -dilog_series(x / (x - 1.0)) - 0.5 * l * l;
    }
    // Inversion onto (-1, 0).
    const double l = std::log(-x);
    return -pi2_over_6 - 0.5 * l * l - dilog(1.0 / x);
}

double eta_solution(int n, double p_con) {
    if (n < 0) throw ConfigError("level must be >= 0");
    if (p_con < 0.0 || p_con > 1.0)
        throw ConfigError("loss probability must lie in [0, 1]");
    return 1.0 / (1.0 - p_con + std::ldexp(p_con, n));
}

double connection_success(double eta, double p_con) {
    if (!(eta > 0.0) || eta > 1.0)
        throw ConfigError("vacuum weight parameter must lie in (0, 1]");
    if (p_con < 0.0 || p_con >= 1.0)
        throw ConfigError("loss probability must lie in [0, 1)");
    return 0.5 * (1.0 - p_con) * eta * (2.0 - eta * (1.0 - p_con));
}

double log_eta_product(int n, double p_con) {
    if (n < 0) throw ConfigError("level must be >= 0");
    if (p_con < 0.0 || p_con >= 1.0)
        throw ConfigError("loss probability must lie in [0, 1)");
    double sum = 0.0;
    for (int i = 1; i <= n; ++i)
        sum -= std::log(1.0 - p_con + std::ldexp(p_con, i));
    return sum;
}

double log_eta_product_estimate(int n, double p_con) {
    if (n < 0) throw ConfigError("level must be >= 0");
    if (p_con < 0.0 || p_con >= 1.0)
        throw ConfigError("loss probability must lie in [0, 1)");
    const double a = p_con / (p_con - 1.0) * std::numbers::sqrt2;
    return (dilog(a * std::ldexp(1.0, n)) - dilog(a)) / std::numbers::ln2 -
           n * std::log1p(-p_con);
}

double log_rate_closed_form(double r, double p_gen, double p_con,
                            double L_over_L0, DetectorKind detector) {
    if (!(r > 0.0)) throw ConfigError("log rate needs r > 0");
    if (p_gen < 0.0 || p_gen >= 1.0 || p_con < 0.0 || p_con >= 1.0)
        throw ConfigError("loss probabilities must lie in [0, 1)");
    if (!(L_over_L0 >= 1.0)) throw ConfigError("L/L0 must be >= 1");
    double exponent, a;
    if (detector == DetectorKind::Counting) {
        exponent = std::log2(3.0);
        a = p_con / (p_con - 1.0) * std::numbers::sqrt2;
    } else {
        exponent = std::log2(1.5);
        a = (p_con + 1.0) / (p_con - 1.0) * std::numbers::sqrt2;
    }
    return std::log(2.0 / 3.0) + 2.0 * std::log(r) + std::log1p(-p_gen) -
           exponent * std::log(L_over_L0) +
           (dilog(a * L_over_L0) - dilog(a)) / std::numbers::ln2;
}

double rate_closed_form(double r, double p_gen, double p_con, double L_over_L0,
                        DetectorKind detector) {
    if (r < 0.0) throw ConfigError("squeezing parameter must be >= 0");
    if (r == 0.0) {
        if (p_gen < 0.0 || p_gen >= 1.0 || p_con < 0.0 || p_con >= 1.0)
            throw ConfigError("loss probabilities must lie in [0, 1)");
        if (!(L_over_L0 >= 1.0)) throw ConfigError("L/L0 must be >= 1");
        return 0.0;
    }
    return std::exp(log_rate_closed_form(r, p_gen, p_con, L_over_L0, detector));
}

} // namespace qrep
