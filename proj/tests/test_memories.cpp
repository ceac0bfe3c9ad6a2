#include <doctest.h>

#include "qrep/memories.hpp"

#include <cmath>

using namespace qrep;

TEST_CASE("ideal memory is the identity row") {
    ReducedMemory m = ideal_memory();
    CHECK(m.b1 == 1.0);
    CHECK(m.b2 == 0.0);
    CHECK(m.c1 == 0.0);
    CHECK(m.c2 == Complex(0.0));
    CHECK(m.c3 == 0.0);
    CHECK(m.constraint_residual() == 0.0);
}

TEST_CASE("generic memory validates the unitarity constraint") {
    ReducedMemory m = generic_memory(1.02, 0.3, 0.1, Complex(0.2, 0.1),
                                     std::sqrt(1.02 * 1.02 + 0.09 - 0.01 - 0.05 - 1.0));
    CHECK(m.constraint_residual() < 1e-12);
    CHECK_THROWS_AS(generic_memory(1.5, 0.0, 0.0, 0.0, 0.0), ValidityError);
    CHECK_THROWS_AS(generic_memory(1.0, -0.1, 0.0, 0.0, 0.1), ValidityError);
}

TEST_CASE("conjugate-coupling family balances b1 against c1") {
    ReducedMemory m = memory_with_c1(0.3);
    CHECK(m.b1 == doctest::Approx(std::sqrt(1.09)).epsilon(1e-14));
    CHECK(m.c1 == 0.3);
    CHECK(m.b2 == 0.0);
    CHECK(m.constraint_residual() < 1e-12);
    ReducedMemory id = memory_with_c1(0.0);
    CHECK(id.b1 == 1.0);
}

TEST_CASE("two-pass memory at kappa = 2 reproduces the known coefficients") {
    ReducedMemory m = two_pass({2.0, 0.0});
    double e = std::exp(-4.0);
    CHECK(m.b1 == doctest::Approx(e - 1.0).epsilon(1e-14));
    CHECK(m.b2 == doctest::Approx(std::sqrt(e * (2.0 - e))).epsilon(1e-14));
    CHECK(m.b1 == doctest::Approx(-0.98168).epsilon(1e-4));
    CHECK(m.b2 == doctest::Approx(0.19052).epsilon(1e-4));
    CHECK(m.c1 == 0.0);
    CHECK(m.c2 == Complex(0.0));
    CHECK(m.c3 == 0.0);
    CHECK(m.constraint_residual() < 1e-12);
}

TEST_CASE("two-pass memory is passive for every coupling") {
    for (double kappa : {0.5, 1.0, 2.0, 5.0}) {
        ReducedMemory m = two_pass({kappa, 0.0});
        CHECK(m.c1 == 0.0);
        CHECK(m.c2 == Complex(0.0));
        CHECK(m.c3 == 0.0);
        CHECK(m.b1 * m.b1 + m.b2 * m.b2 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("two-pass memory approaches a perfect transfer at large coupling") {
    ReducedMemory m = two_pass({6.0, 0.0});
    CHECK(std::abs(m.b1 + 1.0) < 1e-15);
    CHECK(m.b2 < 1e-7);
}

TEST_CASE("two-pass wall reflections inject c3 and restore unitarity") {
    ReducedMemory m = two_pass({2.0, 1e-3});
    CHECK(m.c3 == doctest::Approx(0.03).epsilon(1e-14));
    CHECK(m.constraint_residual() < 1e-12);
    ReducedMemory base = two_pass({2.0, 0.0});
    CHECK(m.b2 == doctest::Approx(base.b2).epsilon(1e-14));
    CHECK(std::abs(m.b1) > std::abs(base.b1));
    CHECK(std::abs(m.b1 / base.b1 - (1.0 + 0.45e-3)) < 1e-4);
}

TEST_CASE("two-pass parameter validation") {
    CHECK_THROWS_AS(two_pass({0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(two_pass({-1.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(two_pass({2.0, -0.1}), ConfigError);
    CHECK_THROWS_AS(two_pass({2.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(two_pass({1.7, 1e-3}), ConfigError);
}

TEST_CASE("one-pass memory at unit coupling and gain") {
    ReducedMemory m = one_pass({1.0, 1.0, 1.0});
    CHECK(m.b1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.b2 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.c1 == 0.0);
    CHECK(m.c2.real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.c2.imag() == 0.0);
    CHECK(m.c3 == 0.0);

    ReducedMemory sq = one_pass({1.0, 1.0, 0.25});
    CHECK(sq.b2 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(sq.c2.real() == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("one-pass memory approaches ideal only as s vanishes") {
    ReducedMemory near = one_pass({1.0, 1.0, 1e-8});
    CHECK(std::abs(near.b1 - 1.0) < 1e-12);
    CHECK(near.b2 < 1e-4);
    for (double s : {1e-3, 0.1, 1.0}) {
        ReducedMemory m = one_pass({1.0, 1.0, s});
        CHECK(std::abs(m.c2) > 0.0);
    }
    CHECK_THROWS_AS(one_pass({1.0, 1.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(one_pass({1.0, 1.0, -0.5}), ConfigError);
}

TEST_CASE("one-pass memory stays unitary for general parameters") {
    for (double kappa : {0.7, 1.0, 1.4})
        for (double g : {0.6, 1.0, 1.3})
            for (double s : {0.2, 1.0, 2.5}) {
                ReducedMemory m = one_pass({kappa, g, s});
                CHECK(m.constraint_residual() < 1e-12);
                CHECK(m.c2.imag() == 0.0);
                CHECK(m.c3 == 0.0);
            }
}

TEST_CASE("memory constructors agree with explicit row completion") {
    SUBCASE("two-pass") {
        double kappa = 1.3;
        double e = std::exp(-kappa * kappa);
        Eigen::VectorXcd b(3), c(3);
        b << e - 1.0, -std::sqrt(e * (1.0 - e)), std::sqrt(e);
        c.setZero();
        BogoliubovMap full = complete_rows_to_map({b}, {c}, 3);
        ReducedMemory viaMap =
            reduce_memory(full.B(0, 0).real(), full.C(0, 0).real(),
                          full.B.row(0).segment(1, 2).transpose(),
                          full.C.row(0).segment(1, 2).transpose());
        ReducedMemory direct = two_pass({kappa, 0.0});
        CHECK(viaMap.b1 == doctest::Approx(direct.b1).epsilon(1e-12));
        CHECK(viaMap.b2 == doctest::Approx(direct.b2).epsilon(1e-12));
        CHECK(std::abs(viaMap.c2 - direct.c2) < 1e-12);
    }

    SUBCASE("one-pass with the squeeze applied as a circuit element") {
        double kappa = 1.2, g = 0.9, s = 0.6;
        // Transfer map on (light, atoms), atoms squeezed in X first.
        Eigen::VectorXcd b(2), c(2);
        b << 0.5 * (kappa + g), 1.0 - 0.5 * kappa * g;
        c << -0.5 * (kappa - g), 0.5 * kappa * g;
        BogoliubovMap transfer = complete_rows_to_map({b}, {c}, 2);
        BogoliubovMap squeeze = element_map(
            CircuitElement::one_mode_squeeze(std::log(std::sqrt(s)), 1), 2);
        BogoliubovMap total = compose(squeeze, transfer);
        Eigen::VectorXcd bt(1), ct(1);
        bt << total.B(0, 1);
        ct << total.C(0, 1);
        ReducedMemory viaMap = reduce_memory(total.B(0, 0).real(),
                                             total.C(0, 0).real(), bt, ct);
        ReducedMemory direct = one_pass({kappa, g, s});
        CHECK(viaMap.b1 == doctest::Approx(direct.b1).epsilon(1e-12));
        CHECK(viaMap.b2 == doctest::Approx(direct.b2).epsilon(1e-12));
        CHECK(viaMap.c1 == doctest::Approx(direct.c1).epsilon(1e-12));
        CHECK(std::abs(viaMap.c2 - direct.c2) < 1e-12);
        CHECK(std::abs(viaMap.c3 - direct.c3) < 1e-12);
    }
}
