#include <cmath>
#include <numbers>

#include "doctest.h"
#include "psl2/sl2.hpp"

using namespace psl2;
using std::numbers::pi;

namespace {
bool near(const SL2& x, const SL2& y, double eps) { return frobenius(x, y) <= eps; }
}  // namespace

TEST_CASE("make_unit_det examples") {
    CHECK(make_unit_det(1, 0, 0, 1) == SL2::identity());
    SL2 r = make_unit_det(std::cos(pi / 2), std::sin(pi / 2), -std::sin(pi / 2), std::cos(pi / 2));
    CHECK(near(r, {0, 1, -1, 0}, 1e-15));
    SL2 h = make_unit_det(std::cosh(1.0), std::sinh(1.0), std::sinh(1.0), std::cosh(1.0));
    CHECK(near(h, hyperbolic(1), 1e-15));
}

TEST_CASE("make_unit_det renormalizes small drift and rejects the rest") {
    SL2 m = make_unit_det(1 + 1e-8, 0, 0, 1);
    CHECK(std::abs(m.det() - 1) <= tol::det);
    CHECK_THROWS_AS(make_unit_det(1, 2, 2, 1), Error);
    CHECK_THROWS_AS(make_unit_det(NAN, 0, 0, 1), Error);
    CHECK_THROWS_AS(make_unit_det(2, 0, 0, 1), Error);
    try {
        make_unit_det(0, 1, 1, 0);
    } catch (const Error& e) {
        CHECK(e.fault() == Fault::NonPositiveDeterminant);
    }
}

TEST_CASE("group arithmetic examples") {
    CHECK(near(multiply(rotation(pi / 4), rotation(pi / 4)), rotation(pi / 2), 1e-15));
    CHECK(near(invert(hyperbolic(1)), hyperbolic(-1), 1e-15));
    CHECK(conjugate(SL2::identity(), quarter_turn()) == quarter_turn());
}

TEST_CASE("projectivize examples") {
    CHECK(projectivize(-SL2::identity()) == PSL2::identity());
    PSL2 h = projectivize(-hyperbolic(1));
    CHECK(h.trace() == doctest::Approx(2 * std::cosh(1.0)));
    PSL2 j = projectivize(quarter_turn());
    CHECK(j.rep().c == 1);
    CHECK(j.rep() == SL2{0, -1, 1, 0});
    CHECK(projectivize(-quarter_turn()) == j);
}

TEST_CASE("conj_type examples") {
    CHECK(conj_type(PSL2(hyperbolic(1))) == ConjugacyType::Hyperbolic);
    CHECK(conj_type(PSL2(rotation(pi / 3))) == ConjugacyType::Elliptic);
    CHECK(conj_type(PSL2(parabolic(1))) == ConjugacyType::Parabolic);
    CHECK(conj_type(PSL2(-SL2::identity())) == ConjugacyType::Identity);
    CHECK(conj_type(PSL2(-hyperbolic(0.5))) == ConjugacyType::Hyperbolic);
}

TEST_CASE("trace identity over random samples") {
    Rng rng(11);
    double worst = 0;
    for (int i = 0; i < 100000; ++i) {
        SL2 a = random_sl2(rng);
        double t = a.trace();
        worst = std::max(worst, std::abs(multiply(a, a).trace() - t * t + 2));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("projectivize is sign invariant") {
    Rng rng(12);
    for (int i = 0; i < 20000; ++i) {
        SL2 a = random_sl2(rng);
        REQUIRE(projectivize(a) == projectivize(-a));
    }
    // trace-zero samples exercise the tie-break
    for (int i = 0; i < 2000; ++i) {
        SL2 g = random_sl2(rng);
        SL2 t = conjugate(g, quarter_turn());
        REQUIRE(projectivize(t) == projectivize(-t));
    }
}

TEST_CASE("conj_type is conjugation invariant") {
    Rng rng(13);
    std::vector<PSL2> probes = {PSL2(hyperbolic(0.7)), PSL2(rotation(1.1)), PSL2(parabolic(2)),
                                PSL2::identity()};
    for (int i = 0; i < 200; ++i) probes.push_back(random_psl2(rng));
    for (const auto& p : probes) {
        for (int k = 0; k < 5; ++k) {
            PSL2 g = random_psl2(rng);
            PSL2 q = conjugate(g, p);
            CHECK(conj_type(q) == conj_type(p));
        }
    }
}

TEST_CASE("associativity") {
    Rng rng(14);
    for (int i = 0; i < 10000; ++i) {
        SL2 x = random_sl2(rng), y = random_sl2(rng), z = random_sl2(rng);
        SL2 l = multiply(multiply(x, y), z), r = multiply(x, multiply(y, z));
        REQUIRE(frobenius(l, r) <= 1e-10);
    }
}

TEST_CASE("random sampling is seeded and deterministic") {
    Rng a(99), b(99);
    for (int i = 0; i < 50; ++i) CHECK(random_sl2(a) == random_sl2(b));
}
