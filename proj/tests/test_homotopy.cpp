#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "psl2/homotopy.hpp"
#include "psl2/tracker.hpp"

using namespace psl2;
using std::numbers::pi;

namespace {

Fault fault_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.fault();
    }
    FAIL("expected an error");
    return Fault::ParseError;
}

PSL2 P(const SL2& m) { return PSL2(m); }

const auto genus3 = SurfacePresentation::nonorientable(3, 0);
const auto genus4 = SurfacePresentation::nonorientable(4, 0);
const auto pants = SurfacePresentation::orientable(0, 3);
const auto torus1 = SurfacePresentation::orientable(1, 1);
const auto torus2 = SurfacePresentation::orientable(1, 2);
const auto projective2 = SurfacePresentation::nonorientable(1, 2);

bool is_hyperbolic(const PSL2& g) { return std::abs(g.trace()) > 2; }

Representation pants_of(const PSL2& b, const PSL2& c) { return {pants, {b, c, inverse(b * c)}}; }

Representation first_with_class(const SurfacePresentation& p, long e, std::uint64_t seed = 1) {
    for (;; ++seed) {
        Representation r = sample_representation(p, seed);
        if (in_W(r) && euler_relative(r).value == e) return r;
    }
}

// Interior spot checks: the class at 8 evenly spaced samples equals the start class.
void check_class_constant(const RepPath& p) {
    REQUIRE(!p.samples.empty());
    ClassValue c0 = surface_class(p.samples.front());
    for (int k = 1; k <= 8; ++k) {
        std::size_t i = k * (p.samples.size() - 1) / 9;
        CHECK(surface_class(p.samples[i]) == c0);
    }
    CHECK(surface_class(p.samples.back()) == c0);
}

std::vector<PSL2> conjugation_orbit(const PSL2& g, double p, double q, double r, int n) {
    std::vector<PSL2> out;
    for (int k = 0; k <= n; ++k) {
        double t = static_cast<double>(k) / n;
        out.push_back(P(conjugate(exp_sl2(t * p, t * q, t * r), g.rep())));
    }
    return out;
}

}  // namespace

TEST_CASE("verify_rep_path on a constant path") {
    Representation r = sample_representation(genus3, 4);
    RepPath p{genus3, {r, r, r}};
    PathReport rep = verify_rep_path(p);
    CHECK(rep.pass);
    CHECK(rep.samples == 3);
    CHECK(rep.max_residual == relation_residual(r));
    CHECK(rep.max_step == 0);
    REQUIRE(rep.start_class);
    CHECK(*rep.start_class == *rep.end_class);
}

TEST_CASE("verify_rep_path reports a corrupted sample") {
    Representation r = sample_representation(genus3, 4);
    RepPath p{genus3, {r, r, r, r, r}};
    p.samples[3].images[1] = P(rotation(0.3)) * p.samples[3].images[1];
    PathReport rep = verify_rep_path(p);
    CHECK_FALSE(rep.pass);
    REQUIRE(rep.first_failure);
    CHECK(*rep.first_failure == 3);
    CHECK(rep.residual_index == 3);
    std::ostringstream os;
    write_report(os, rep);
    CHECK(os.str().find("first_failure=3") != std::string::npos);
    CHECK(os.str().find("pass=false") != std::string::npos);
}

TEST_CASE("verify_rep_path flags non-hyperbolic boundary samples on request") {
    Representation r = pants_of(P(hyperbolic(1)), P(hyperbolic(1)));
    Representation bad = pants_of(P(rotation(0.4)), P(hyperbolic(1)));
    RepPath p{pants, {r, bad}, 10};
    PathBounds loose;
    loose.step = 10;
    CHECK(verify_rep_path(p, loose).pass);
    CHECK(verify_rep_path(p, loose).boundary_violations == std::vector<std::size_t>{1});
    loose.boundary_hyperbolic = true;
    CHECK_FALSE(verify_rep_path(p, loose).pass);
}

TEST_CASE("rep path text round trip") {
    Representation a = sample_representation(genus3, 9), b = sample_representation(genus3, 10);
    RepPath p{genus3, {a, b}, 0.05};
    std::stringstream ss;
    write_rep_path(ss, p);
    RepPath q = read_rep_path(ss);
    CHECK(q.presentation == p.presentation);
    CHECK(q.step_bound == 0.05);
    REQUIRE(q.samples.size() == 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(distance(q.samples[i].images[j], p.samples[i].images[j]) == 0);

    std::istringstream broken("reppath 2 0.05\nnot a representation\n");
    CHECK(fault_of([&] { read_rep_path(broken); }) == Fault::ParseError);
}

TEST_CASE("lift_boundary_path: constant target gives a constant path") {
    Representation r = first_with_class(pants, 0);
    std::vector<PSL2> target(5, r.images[0]);
    RepPath p = lift_boundary_path(r, target);
    REQUIRE(p.samples.size() == 5);
    for (const auto& s : p.samples)
        for (std::size_t j = 0; j < 3; ++j) CHECK(distance(s.images[j], r.images[j]) < 1e-9);
}

TEST_CASE("lift_boundary_path: conjugation orbit on pants keeps e") {
    for (long e : {-1L, 0L, 1L}) {
        Representation r = first_with_class(pants, e);
        std::vector<PSL2> target = conjugation_orbit(r.images[0], 0.4, -0.3, 0.5, 40);
        RepPath p = lift_boundary_path(r, target);
        REQUIRE(p.samples.size() >= target.size());
        PathReport rep = verify_rep_path(p, {1e-6, 0.05, true});
        CHECK(rep.pass);
        CHECK(rep.boundary_violations.empty());
        // sub-steps may be inserted, but every target sample is visited in order
        std::size_t j = 0;
        for (const auto& s : p.samples)
            if (j < target.size() && distance(s.images[0], target[j]) <= 1e-7) ++j;
        CHECK(j == target.size());
        CHECK(distance(p.samples.back().images[0], target.back()) <= 1e-7);
        CHECK(euler_relative(p.samples.back()).value == e);
        check_class_constant(p);
    }
}

TEST_CASE("lift_boundary_path on the one-holed and two-holed torus") {
    for (const auto& pres : {torus1, torus2}) {
        Representation r = first_with_class(pres, pres == torus1 ? 1 : 0, 3);
        int c = pres.boundary_index(0);
        RepPath p = lift_boundary_path(r, conjugation_orbit(r.images[c], -0.2, 0.3, 0.25, 30));
        CHECK(verify_rep_path(p, {1e-6, 0.05, true}).pass);
        CHECK(distance(p.samples.back().images[c], P(conjugate(exp_sl2(-0.2, 0.3, 0.25), r.images[c].rep()))) <= 1e-7);
        CHECK(euler_relative(p.samples.back()) == euler_relative(r));
    }
}

TEST_CASE("lift_boundary_path rejects elliptic targets") {
    Representation r = first_with_class(pants, 0);
    std::vector<PSL2> target{r.images[0], P(rotation(0.5))};
    CHECK(fault_of([&] { lift_boundary_path(r, target); }) == Fault::TargetLeavesHyperbolic);
}

TEST_CASE("euler_bump_pants from H_1 data") {
    // B = H_1 and C = g H_1 g^-1. Rotations alone keep tr(BC) >= 2 for positive lifts, so g shears too.
    SL2 g = SL2{1, 0, 3, 1} * rotation(-0.5);
    Representation start = pants_of(P(hyperbolic(1)), P(conjugate(g, hyperbolic(1))));
    REQUIRE(in_W(start));
    REQUIRE(euler_relative(start).value == -1);
    BumpPath b = euler_bump_pants(start);
    CHECK(euler_relative(b.path.samples.back()).value == 1);
    PathReport rep = verify_rep_path(b.path);
    CHECK(rep.pass);
    CHECK(rep.max_residual <= 1e-6);
    for (const auto& s : b.path.samples) {
        REQUIRE(is_hyperbolic(s.images[0]));
        REQUIRE(is_hyperbolic(s.images[1]));
    }
    REQUIRE(b.boundary.size() == b.path.samples.size());
    for (const auto& k : b.boundary) REQUIRE(in_J_tilde(cover_mul(z_power(b.epsilon), k)));
}

TEST_CASE("euler_bump_pants on sampled starts") {
    for (std::uint64_t seed : {5u, 17u, 40u}) {
        Representation r = first_with_class(pants, -1, seed);
        BumpPath b = euler_bump_pants(r);
        CHECK(euler_relative(b.path.samples.back()).value - euler_relative(r).value == 2);
        CHECK(verify_rep_path(b.path).pass);
        for (const auto& k : b.boundary) REQUIRE(in_J_tilde(cover_mul(z_power(b.epsilon), k)));
    }
}

TEST_CASE("euler_bump_pants preconditions") {
    CHECK(fault_of([&] { euler_bump_pants(first_with_class(pants, 0)); }) == Fault::WrongStartClass);
    CHECK(fault_of([&] { euler_bump_pants(first_with_class(torus1, -1)); }) == Fault::TemplateUnsupported);
}

TEST_CASE("euler_bump_torus") {
    Representation r = first_with_class(torus1, -1, 5);
    BumpPath b = euler_bump_torus(r);
    CHECK(euler_relative(b.path.samples.back()).value == 1);
    PathReport rep = verify_rep_path(b.path);
    CHECK(rep.pass);
    CHECK(rep.max_residual < 1e-6);
    REQUIRE(!b.boundary.empty());
    CHECK(classify_region(b.boundary.front()) == Region{RegionKind::H, -1});
    CHECK(classify_region(b.boundary.back()) == Region{RegionKind::H, 1});
    bool crossed = false;
    for (const auto& k : b.boundary) {
        REQUIRE(in_J_tilde(cover_mul(z_power(b.epsilon), k)));
        crossed = crossed || classify_region(k).kind == RegionKind::Z || classify_region(k).kind == RegionKind::E;
    }
    CHECK(crossed);
}

TEST_CASE("euler_bump_torus preconditions") {
    Representation ell{torus1, {P(rotation(0.3)), P(rotation(0.7)), PSL2::identity()}};
    ell.images[2] = inverse(P(commutator(ell.images[0].rep(), ell.images[1].rep())));
    CHECK(fault_of([&] { euler_bump_torus(ell); }) == Fault::NotInW);
    CHECK(fault_of([&] { euler_bump_torus(first_with_class(torus1, 1)); }) == Fault::WrongStartClass);
}

TEST_CASE("euler_bump_general on the two-holed torus") {
    Representation r = first_with_class(torus2, -1, 2);
    RepPath p = euler_bump_general(r);
    CHECK(euler_relative(p.samples.back()).value == 1);
    CHECK(euler_relative(p.samples.back()).value - euler_relative(r).value == 2);
    PathReport rep = verify_rep_path(p);
    CHECK(rep.pass);
    // C_1 is the bumped boundary and C_2 stays hyperbolic; the cutting curve is hyperbolic where the split is used
    for (const auto& s : p.samples) REQUIRE(is_hyperbolic(s.images[torus2.boundary_index(1)]));
    const auto& end = p.samples.back().images;
    CHECK(is_hyperbolic(P(commutator(end[0].rep(), end[1].rep()))));
}

TEST_CASE("euler_bump_general dispatches small templates and rejects high classes") {
    CHECK(euler_relative(euler_bump_general(first_with_class(pants, -1, 9)).samples.back()).value == 1);
    // -chi - 1 = 1 on the two-holed torus
    CHECK(fault_of([&] { euler_bump_general(first_with_class(torus2, 1)); }) == Fault::ClassTooHigh);
    CHECK(fault_of([&] { euler_bump_general(first_with_class(pants, 1)); }) == Fault::ClassTooHigh);
}

TEST_CASE("commutator_solve on forward-generated targets") {
    Rng rng(21);
    for (int i = 0; i < 25; ++i) {
        PSL2 x = random_psl2(rng), y = random_psl2(rng);
        CoverElement k = cover_commutator(lift_base(x), lift_base(y));
        auto [a, b] = commutator_solve(k);
        CHECK(cover_distance(cover_commutator(lift_base(a), lift_base(b)), k) <= 1e-7);
    }
}

TEST_CASE("commutator_solve special targets") {
    auto [a, b] = commutator_solve(z_power(0));
    CHECK(cover_distance(cover_commutator(lift_base(a), lift_base(b)), z_power(0)) <= 1e-12);
    CoverElement h2 = cover_mul(z_power(2), lift_base(P(hyperbolic(1))));
    REQUIRE(classify_region(h2) == Region{RegionKind::H, 2});
    CHECK(fault_of([&] { commutator_solve(h2); }) == Fault::NotInCommutatorImage);
}

TEST_CASE("hyperbolize_interface on the two-holed projective plane") {
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 4 && seed < 400; ++seed) {
        Representation r = sample_representation(projective2, seed);
        SL2 k = square(r.images[0]);
        if (!(std::abs(k.trace()) < 2 && is_hyperbolic(r.images[1]))) continue;
        ++checked;
        RepPath p = hyperbolize_interface(r, 0);
        CHECK(verify_rep_path(p).pass);
        CHECK(square(p.samples.back().images[0]).trace() == doctest::Approx(2 + hyperbolize_margin).epsilon(1e-9));
        // the crosscap image is the root of the interface C_1 C_2 at every sample
        for (const auto& s : p.samples) {
            PSL2 e = inverse(s.images[1] * s.images[2]);
            REQUIRE(distance(P(square(s.images[0])), e) <= 1e-9);
        }
        // boundary conjugacy classes are preserved
        CHECK(std::abs(p.samples.back().images[1].trace()) == doctest::Approx(std::abs(r.images[1].trace())).epsilon(1e-9));
        check_class_constant(p);
    }
    CHECK(checked == 4);
}

TEST_CASE("hyperbolize_interface leaves a hyperbolic interface alone") {
    for (std::uint64_t seed = 1;; ++seed) {
        Representation r = sample_representation(projective2, seed);
        if (!is_hyperbolic(P(square(r.images[0])))) continue;
        RepPath p = hyperbolize_interface(r, 0);
        CHECK(p.samples.size() == 1);
        break;
    }
}

TEST_CASE("hyperbolize_interface on closed genus 3") {
    for (long cls : {0L, 1L}) {
        Representation r = sample_representation(genus3, 31, cls);
        RepPath p = hyperbolize_interface(r, 0);
        CHECK(verify_rep_path(p).pass);
        CHECK(is_hyperbolic(P(square(p.samples.back().images[0]))));
        CHECK(sw_class_closed(p.samples.back()).value == cls);
    }
    CHECK(fault_of([&] { hyperbolize_interface(first_with_class(pants, 0), 0); }) == Fault::TemplateUnsupported);
}

TEST_CASE("extend_over_mobius") {
    Representation full;
    for (std::uint64_t seed = 1;; ++seed) {
        full = sample_representation(projective2, seed);
        bool tame = true;
        for (const auto& x : full.images) tame = tame && frobenius(x.rep(), SL2{0, 0, 0, 0}) < 8;
        if (tame && is_hyperbolic(P(square(full.images[0]))) && is_hyperbolic(full.images[1])) break;
    }
    Representation base{pants, {full.images[1], full.images[2], P(square(full.images[0]))}};
    REQUIRE(relation_residual(base) < 1e-8);

    SUBCASE("constant base") {
        RepPath ext = extend_over_mobius({pants, {base, base}}, full);
        REQUIRE(ext.samples.size() == 2);
        for (const auto& s : ext.samples)
            for (std::size_t j = 0; j < 3; ++j) CHECK(distance(s.images[j], full.images[j]) < 1e-9);
    }
    SUBCASE("root audit along a lifted base path") {
        RepPath bp = lift_boundary_path(base, conjugation_orbit(base.images[0], 0.3, 0.2, -0.4, 30));
        RepPath ext = extend_over_mobius(bp, full);
        REQUIRE(ext.samples.size() == bp.samples.size());
        for (std::size_t i = 0; i < ext.samples.size(); ++i)
            REQUIRE(distance(P(square(ext.samples[i].images[0])), bp.samples[i].images[2]) <= 1e-9);
        CHECK(verify_rep_path(ext).pass);
        check_class_constant(ext);
    }
    SUBCASE("elliptic interface sample") {
        Representation bad = base;
        bad.images[2] = P(rotation(0.2));
        CHECK(fault_of([&] { extend_over_mobius({pants, {base, bad}}, full); }) == Fault::InterfaceNotHyperbolic);
    }
}

TEST_CASE("connect: identical endpoints") {
    Representation r = sample_representation(genus3, 12, 1);
    RepPath p = connect_representations(r, r);
    CHECK(p.samples.size() == 1);
    CHECK(verify_rep_path(p).pass);
}

TEST_CASE("connect: quarter-turn rep to a sampled class-one rep") {
    Representation quarter{genus3, {P(rotation(pi / 2)), PSL2::identity(), PSL2::identity()}};
    Representation other = sample_representation(genus3, 77, 1);
    RepPath p = connect_representations(quarter, other);
    PathReport rep = verify_rep_path(p);
    CHECK(rep.pass);
    CHECK(rep.max_residual <= 1e-6);
    CHECK(rep.max_step <= 0.05);
    CHECK(*rep.start_class == ClassValue{ClassKind::SWMod2, 1});
    CHECK(*rep.end_class == ClassValue{ClassKind::SWMod2, 1});
    CHECK(distance(p.samples.front().images[0], quarter.images[0]) == 0);
    CHECK(distance(p.samples.back().images[2], other.images[2]) == 0);
    check_class_constant(p);
}

TEST_CASE("connect: each route alone on sampled pairs") {
    for (const auto& pres : {genus3, genus4})
        for (long cls : {0L, 1L}) {
            Representation a = sample_representation(pres, 400 + cls, cls), b = sample_representation(pres, 500 + cls, cls);
            RepPath roots = connect_representations(a, b, ConnectRoute::Roots);
            CHECK(verify_rep_path(roots).pass);
            check_class_constant(roots);
            RepPath any = connect_representations(a, b);
            CHECK(verify_rep_path(any).pass);
        }
    Representation a = sample_representation(genus3, 600, 0), b = sample_representation(genus3, 601, 0);
    RepPath mobius = connect_representations(a, b, ConnectRoute::Mobius);
    CHECK(verify_rep_path(mobius).pass);
    check_class_constant(mobius);
}

TEST_CASE("connect: different classes and unsupported input") {
    Representation a = sample_representation(genus3, 3, 0), b = sample_representation(genus3, 3, 1);
    CHECK(fault_of([&] { connect_representations(a, b); }) == Fault::DifferentClasses);
    Representation c = sample_representation(genus4, 3, 0);
    CHECK(fault_of([&] { connect_representations(a, c); }) == Fault::TemplateUnsupported);
    Representation bent = a;
    bent.images[0] = P(rotation(0.1)) * bent.images[0];
    CHECK(fault_of([&] { connect_representations(bent, a); }) == Fault::RelationViolated);
}

TEST_CASE("tracker primitives") {
    // the polar conjugator path starts at I and ends at g
    Rng rng(8);
    for (int i = 0; i < 20; ++i) {
        SL2 g = random_psl2(rng).rep();
        CHECK(frobenius(conjugator_path(g, 0), SL2::identity()) < 1e-12);
        CHECK(frobenius(conjugator_path(g, 1), g) < 1e-9 * (1 + frobenius(g, SL2{0, 0, 0, 0})));
        PSL2 h = random_psl2(rng);
        CHECK(distance(from_iwasawa(iwasawa(h)), h) < 1e-9);
        CHECK(distance(iwasawa_interpolate(P(g), h, 1), h) < 1e-9);
    }
    // Newton on words: hit a prescribed commutator trace
    std::vector<SL2> gens{hyperbolic(1), conjugate(rotation(0.7), hyperbolic(0.8))};
    Word comm{{0, false}, {1, false}, {0, true}, {1, true}};
    auto sol = solve_words({WordConstraint::trace_of(comm, -3.0)}, gens);
    CHECK(evaluate(comm, sol).trace() == doctest::Approx(-3.0).epsilon(1e-10));
}
