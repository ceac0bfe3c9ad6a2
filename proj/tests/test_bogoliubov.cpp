#include <doctest.h>

#include <cmath>
#include <random>

#include "qrep/bogoliubov.hpp"
#include "qrep/fock.hpp"
#include "qrep/oracle.hpp"

using namespace qrep;

namespace {

BogoliubovMap random_map(int modes, unsigned seed, int rounds = 3, double squeeze = 0.4) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<CircuitElement> elems;
    for (int round = 0; round < rounds; ++round) {
        for (int m = 0; m + 1 < modes; ++m)
            elems.push_back(CircuitElement::beam_splitter(uni(rng), m, m + 1));
        for (int m = 0; m < modes; ++m)
            elems.push_back(CircuitElement::phase_shift(6.0 * uni(rng), m));
        elems.push_back(CircuitElement::two_mode_squeeze(squeeze * uni(rng), 0, modes - 1));
        if (modes > 1)
            elems.push_back(CircuitElement::one_mode_squeeze(0.75 * squeeze * uni(rng), 1));
    }
    return compose_circuit(elems, modes);
}

} // namespace

TEST_CASE("compose with identity is a no-op") {
    auto X = random_map(3, 7);
    auto left = compose(BogoliubovMap::identity(3), X);
    auto right = compose(X, BogoliubovMap::identity(3));
    CHECK((left.B - X.B).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((left.C - X.C).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((right.B - X.B).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((right.C - X.C).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("a beam splitter composed with its inverse is the identity") {
    auto fwd = element_map(CircuitElement::beam_splitter(0.3, 0, 1), 2);
    auto bwd = element_map(CircuitElement::beam_splitter(0.3, 1, 0), 2);
    auto prod = compose(fwd, bwd);
    CHECK((prod.B - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(prod.C.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two balanced splitters act as a swap with sign flips") {
    auto bs = element_map(CircuitElement::beam_splitter(0.5, 0, 1), 2);
    auto twice = compose(bs, bs);
    // Heisenberg rows: a0 -> a1, a1 -> -a0.  Check against the brute-force
    // evolution of |1,0>.
    CHECK(std::abs(twice.B(0, 0)) < 1e-12);
    CHECK(std::abs(twice.B(0, 1) - 1.0) < 1e-12);
    CHECK(std::abs(twice.B(1, 0) + 1.0) < 1e-12);

    FockDensityMatrix in(2, 1);
    std::vector<int> ten{1, 0}, one{0, 1};
    in.elements()(in.linear_index(ten), in.linear_index(ten)) = 1.0;
    ModeRoles roles{{ModeFate::Output, ModeFate::Output}, {true, true}};
    auto res = oracle_apply(twice, {}, roles, in, 3);
    CHECK(res.state.at(one, one).real() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("composition preserves the unitarity constraints") {
    for (unsigned seed : {1u, 2u, 3u, 4u}) {
        auto m = random_map(4, seed);
        CHECK(m.unitarity_residual() < 1e-10);
    }
}

TEST_CASE("compose rejects mode count mismatch") {
    CHECK_THROWS_AS(compose(BogoliubovMap::identity(2), BogoliubovMap::identity(3)),
                    ConfigError);
}

TEST_CASE("row completion extends a valid row to a unitary map") {
    auto m = random_map(4, 99);
    std::vector<Eigen::VectorXcd> b{m.B.row(0).transpose()};
    std::vector<Eigen::VectorXcd> c{m.C.row(0).transpose()};
    auto full = complete_rows_to_map(b, c, 4);
    CHECK(full.unitarity_residual() < 1e-10);
    CHECK((full.B.row(0) - m.B.row(0)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((full.C.row(0) - m.C.row(0)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("row completion with no rows yields some unitary map") {
    auto full = complete_rows_to_map({}, {}, 3);
    CHECK(full.unitarity_residual() < 1e-12);
}

TEST_CASE("row completion rejects rows that cannot come from a unitary") {
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(2), c = Eigen::VectorXcd::Zero(2);
    b(0) = 2.0;   // commutator norm 4, not 1
    CHECK_THROWS_AS(complete_rows_to_map({b}, {c}, 2), ValidityError);
}

TEST_CASE("reduce_memory collapses a single-term row") {
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(3), c = Eigen::VectorXcd::Zero(3);
    b(0) = Complex(0.0, -0.5);
    double b1 = std::sqrt(0.75);
    auto mem = reduce_memory(b1, 0.0, b, c);
    CHECK(mem.b1 == b1);
    CHECK(mem.b2 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(mem.c2) < 1e-15);
    CHECK(mem.c3 == 0.0);
}

TEST_CASE("reduce_memory preserves the creation-vector norm") {
    std::mt19937_64 rng(123);
    std::normal_distribution<double> g;
    Eigen::VectorXcd b(3), c(3);
    for (int i = 0; i < 3; ++i) {
        b(i) = Complex(g(rng), g(rng)) * 0.3;
        c(i) = Complex(g(rng), g(rng)) * 0.2;
    }
    // pick b1 so the constraint holds exactly
    double c1 = 0.3;
    double b1 = std::sqrt(1.0 + c1 * c1 + c.squaredNorm() - b.squaredNorm());
    auto mem = reduce_memory(b1, c1, b, c);
    CHECK(std::norm(mem.c2) + mem.c3 * mem.c3 == doctest::Approx(c.squaredNorm()).epsilon(1e-12));
    CHECK(mem.constraint_residual() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("a reduced memory acts like the many-mode original") {
    // Draw a random 4-mode unitary, phase-gauge its first row so the stored
    // mode's coefficients are real, reduce it, and check both give the same
    // channel on the stored mode.
    for (unsigned seed : {5u, 6u}) {
        auto m = random_map(4, seed, 1, 0.1);
        Complex b1 = m.B(0, 0), c1 = m.C(0, 0);
        double chi = -0.5 * (std::arg(b1) + std::arg(c1));
        double phi = 0.5 * (std::arg(c1) - std::arg(b1));
        auto gauged = compose(compose(element_map(CircuitElement::phase_shift(phi, 0), 4), m),
                              element_map(CircuitElement::phase_shift(chi, 0), 4));
        CHECK(std::abs(std::imag(gauged.B(0, 0))) < 1e-12);
        CHECK(std::abs(std::imag(gauged.C(0, 0))) < 1e-12);

        Eigen::VectorXcd bt(3), ct(3);
        for (int i = 1; i < 4; ++i) {
            bt(i - 1) = gauged.B(0, i);
            ct(i - 1) = gauged.C(0, i);
        }
        auto mem = reduce_memory(gauged.B(0, 0).real(), gauged.C(0, 0).real(), bt, ct);

        FockDensityMatrix in(1, 2);
        in.elements()(0, 0) = 0.55;
        in.elements()(1, 1) = 0.3;
        in.elements()(2, 2) = 0.15;
        in.elements()(0, 1) = in.elements()(1, 0) = 0.2;

        ModeRoles full_roles{{ModeFate::Output, ModeFate::Traced, ModeFate::Traced, ModeFate::Traced},
                             {true, false, false, false}};
        auto full = oracle_apply(gauged, {}, full_roles, in, 10);

        auto circ = element_map(CircuitElement::memory_element(mem, 0, 1, 2), 3);
        ModeRoles red_roles{{ModeFate::Output, ModeFate::Traced, ModeFate::Traced},
                            {true, false, false}};
        auto red = oracle_apply(circ, {}, red_roles, in, 10);

        CHECK((crop_to_cutoff(full.state, 2).elements() - crop_to_cutoff(red.state, 2).elements())
                  .cwiseAbs()
                  .maxCoeff() < 1e-8);
    }
}

TEST_CASE("dark count augmentation at zero rate is the identity") {
    ReducedMemory mem{0.9, 0.6, 0.2, Complex(0.1, 0.05), 0.0};
    mem.c3 = std::sqrt(mem.b1 * mem.b1 + mem.b2 * mem.b2 - mem.c1 * mem.c1 -
                       std::norm(mem.c2) - 1.0);
    auto out = augment_dark_counts(mem, 0.0);
    CHECK(out.b1 == mem.b1);
    CHECK(out.b2 == mem.b2);
    CHECK(out.c1 == mem.c1);
    CHECK(std::abs(out.c2 - mem.c2) < 1e-15);
    CHECK(out.c3 == doctest::Approx(mem.c3).epsilon(1e-15));
}

TEST_CASE("dark count augmentation of the ideal memory") {
    ReducedMemory ideal;
    auto out = augment_dark_counts(ideal, 1e-4);
    CHECK(out.b1 == 1.0);
    CHECK(out.b2 == doctest::Approx(1e-2).epsilon(1e-14));
    CHECK(out.c1 == 0.0);
    CHECK(std::abs(out.c2) == 0.0);
    CHECK(out.c3 == doctest::Approx(1e-2).epsilon(1e-14));
}

TEST_CASE("dark count augmentation with a plain b2 term") {
    ReducedMemory mem{std::sqrt(1.0 - 0.01 + 0.0), 0.1, 0.0, 0.0, 0.0};
    mem.b1 = std::sqrt(1.0 - mem.b2 * mem.b2);
    double ndc = 3e-4;
    auto out = augment_dark_counts(mem, ndc);
    CHECK(out.b2 == doctest::Approx(std::sqrt(0.01 + ndc)).epsilon(1e-14));
    CHECK(out.c3 == doctest::Approx(std::sqrt(ndc)).epsilon(1e-14));
}

TEST_CASE("dark count augmentation preserves the unitarity constraint") {
    ReducedMemory mem{1.05, 0.4, 0.2, Complex(0.12, -0.07), 0.0};
    mem.c3 = std::sqrt(mem.b1 * mem.b1 + mem.b2 * mem.b2 - mem.c1 * mem.c1 -
                       std::norm(mem.c2) - 1.0);
    for (double ndc : {1e-6, 1e-4, 1e-2}) {
        auto out = augment_dark_counts(mem, ndc);
        CHECK(std::abs(out.constraint_residual()) < 1e-12);
    }
}

TEST_CASE("finite-transmittivity augmentation matches the explicit circuit") {
    ReducedMemory mem{1.02, 0.35, 0.15, Complex(0.1, 0.06), 0.0};
    mem.c3 = std::sqrt(mem.b1 * mem.b1 + mem.b2 * mem.b2 - mem.c1 * mem.c1 -
                       std::norm(mem.c2) - 1.0);
    double p = 1e-3, s = 0.7;

    // Modes: 0 stored, 1-2 memory auxiliaries, 3-4 squeezed source; the
    // stored mode passes a splitter of reflectivity p fed by one source arm.
    std::vector<CircuitElement> elems{
        CircuitElement::two_mode_squeeze(s, 3, 4),
        CircuitElement::memory_element(mem, 0, 1, 2),
        CircuitElement::beam_splitter(1.0 - p, 0, 3),
    };
    auto map = compose_circuit(elems, 5);
    Eigen::VectorXcd bt(4), ct(4);
    for (int i = 1; i < 5; ++i) {
        bt(i - 1) = map.B(0, i);
        ct(i - 1) = map.C(0, i);
    }
    CHECK(std::abs(std::imag(map.B(0, 0))) < 1e-12);
    CHECK(std::abs(std::imag(map.C(0, 0))) < 1e-12);
    auto circuit_mem = reduce_memory(map.B(0, 0).real(), map.C(0, 0).real(), bt, ct);

    auto closed = augment_dark_counts_virtual(mem, p, s);
    CHECK(closed.b1 == doctest::Approx(circuit_mem.b1).epsilon(1e-12));
    CHECK(closed.b2 == doctest::Approx(circuit_mem.b2).epsilon(1e-12));
    CHECK(closed.c1 == doctest::Approx(circuit_mem.c1).epsilon(1e-12));
    CHECK(std::abs(closed.c2 - circuit_mem.c2) < 1e-12);
    CHECK(closed.c3 == doctest::Approx(circuit_mem.c3).epsilon(1e-12));
}

TEST_CASE("zero-transmittivity limit of the virtual source matches") {
    ReducedMemory mem{1.02, 0.35, 0.15, Complex(0.1, 0.06), 0.0};
    mem.c3 = std::sqrt(mem.b1 * mem.b1 + mem.b2 * mem.b2 - mem.c1 * mem.c1 -
                       std::norm(mem.c2) - 1.0);
    double ndc = 2e-4;
    auto direct = augment_dark_counts(mem, ndc);
    double p = 1e-8;
    double s = std::asinh(std::sqrt(ndc / p));
    auto limit = augment_dark_counts_virtual(mem, p, s);
    CHECK(limit.b1 == doctest::Approx(direct.b1).epsilon(1e-7));
    CHECK(limit.b2 == doctest::Approx(direct.b2).epsilon(1e-7));
    CHECK(limit.c1 == doctest::Approx(direct.c1).epsilon(1e-7));
    CHECK(std::abs(limit.c2 - direct.c2) < 1e-7);
    CHECK(limit.c3 == doctest::Approx(direct.c3).epsilon(1e-7));
}

TEST_CASE("loss element routes the lost fraction to the ancilla") {
    auto e = lossy_channel(0.9, 0, 1);
    auto map = element_map(e, 2);
    CHECK(std::abs(map.B(0, 0) - std::sqrt(0.1)) < 1e-15);

    FockDensityMatrix in(1, 1);
    in.elements()(1, 1) = 1.0;
    ModeRoles roles{{ModeFate::Output, ModeFate::Traced}, {true, false}};
    auto res = oracle_apply(map, {}, roles, in, 3);
    CHECK(res.state.elements()(1, 1).real() == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(res.state.elements()(0, 0).real() == doctest::Approx(0.9).epsilon(1e-10));

    CHECK_THROWS_AS(lossy_channel(1.1, 0, 1), ConfigError);
}

TEST_CASE("memory element validates its coefficients") {
    ReducedMemory bad{1.0, 0.5, 0.0, 0.0, 0.0};   // constraint residual 0.25
    CHECK_THROWS_AS(CircuitElement::memory_element(bad, 0, 1, 2), ValidityError);
}

TEST_CASE("a memory with a stored-mode phase changes only phases of the row") {
    ReducedMemory mem{1.02, 0.35, 0.15, Complex(0.1, 0.06), 0.0};
    mem.c3 = std::sqrt(mem.b1 * mem.b1 + mem.b2 * mem.b2 - mem.c1 * mem.c1 -
                       std::norm(mem.c2) - 1.0);
    double theta = 0.8;
    auto plain = element_map(CircuitElement::memory_element(mem, 0, 1, 2), 3);
    auto phased = element_map(CircuitElement::memory_element(mem, 0, 1, 2, theta), 3);
    CHECK(std::abs(phased.B(0, 0) - plain.B(0, 0) * std::exp(Complex(0, theta))) < 1e-12);
    CHECK(std::abs(phased.C(0, 0) - plain.C(0, 0) * std::exp(Complex(0, -theta))) < 1e-12);
    CHECK(std::abs(phased.B(0, 1) - plain.B(0, 1)) < 1e-12);
}
