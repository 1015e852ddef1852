// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "oracles.hpp"
#include "psl2/character.hpp"
#include "psl2/classes.hpp"
#include "psl2/homotopy.hpp"
#include "psl2/square.hpp"

using namespace psl2;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::optional<Region> oracle_region(const CoverElement& x, double lo, double hi) {
    if (conj_type(x.base()) == ConjugacyType::Identity) return Region{RegionKind::Z, static_cast<int>(std::lround(x.lift() / pi))};
    auto near_int = [](double v) { return std::abs(v - std::round(v)) <= 1e-5; };
    if (near_int(lo) || near_int(hi)) return std::nullopt;  // parabolic boundary cases are not sampled reliably
    if (std::floor(lo) == std::floor(hi)) return Region{RegionKind::E, static_cast<int>(std::floor(lo))};
    return Region{RegionKind::H, static_cast<int>(std::ceil(lo))};
}

Outcome square_round_trip() {
    Rng rng(101);
    int used = 0;
    double worst = 0;
    while (used < 100000) {
        SL2 k = random_sl2(rng);
        if (!(k.trace() > -2)) continue;
        ++used;
        worst = std::max(worst, frobenius(square(psl_sqrt(k)), k));
    }
    return {worst <= 1e-9, "n=100000 worst=" + fmt("%.3g", worst)};
}

Outcome trace_identity() {
    Rng rng(102);
    double worst = 0;
    for (int i = 0; i < 100000; ++i) {
        SL2 a = random_sl2(rng);
        double t = a.trace();
        worst = std::max(worst, std::abs((a * a).trace() - t * t + 2));
    }
    return {worst <= 1e-10, "n=100000 worst=" + fmt("%.3g", worst)};
}

Outcome cover_oracle() {
    Rng rng(103);
    std::uniform_int_distribution<int> shift(-2, 2);
    auto draw = [&] { return cover_mul(z_power(shift(rng)), lift_base(random_psl2(rng))); };
    double mul_err = 0, ext_err = 0;
    int compared = 0, agreed = 0;
    for (int i = 0; i < 1000; ++i) {
        CoverElement x = draw(), y = draw();
        mul_err = std::max(mul_err, std::abs(cover_mul(x, y).lift() - oracle::apply(x, y.lift())));
        auto [lo, hi] = displacement_extrema(x);
        auto [olo, ohi] = oracle::extrema(x);
        ext_err = std::max({ext_err, std::abs(lo - olo), std::abs(hi - ohi)});
        if (auto expect = oracle_region(x, olo, ohi)) {
            ++compared;
            agreed += classify_region(x) == *expect;
        }
    }
    bool ok = mul_err <= 1e-6 && ext_err <= 1e-6 && agreed == compared;
    return {ok, "mul_err=" + fmt("%.3g", mul_err) + " extrema_err=" + fmt("%.3g", ext_err) + " regions=" + std::to_string(agreed) +
                    "/" + std::to_string(compared)};
}

Outcome sw_well_defined() {
    const auto genus3 = SurfacePresentation::nonorientable(3, 0);
    Rng rng(104);
    std::uniform_int_distribution<int> shift(-3, 3);
    int changed = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Representation r = sample_representation(genus3, seed, static_cast<long>(seed % 2));
        ClassValue base = sw_class_closed(r);
        for (int k = 0; k < 100; ++k) {
            std::vector<CoverElement> lifts = default_lifts(r);
            for (auto& l : lifts) l = cover_mul(z_power(shift(rng)), l);
            changed += !(sw_class_closed(r, lifts) == base);
        }
    }
    return {changed == 0, "reps=200 rechoices=100 changed=" + std::to_string(changed)};
}

Outcome both_classes() {
    bool ok = true;
    std::string detail;
    for (int g : {3, 4})
        for (long c : {0L, 1L}) {
            Representation r = sample_representation(SurfacePresentation::nonorientable(g, 0), 7, c);
            bool hit = sw_class_closed(r).value == c && relation_residual(r) <= tol::rel;
            ok = ok && hit;
            detail += "g" + std::to_string(g) + "/sw" + std::to_string(c) + (hit ? "=ok " : "=miss ");
        }
    const auto genus3 = SurfacePresentation::nonorientable(3, 0);
    Representation trivial{genus3, {PSL2::identity(), PSL2::identity(), PSL2::identity()}};
    Representation quarter{genus3, {PSL2(rotation(pi / 2)), PSL2::identity(), PSL2::identity()}};
    bool explicit_pair = sw_class_closed(trivial).value == 0 && sw_class_closed(quarter).value == 1;
    detail += std::string("explicit=") + (explicit_pair ? "ok" : "miss");
    return {ok && explicit_pair, detail};
}

Outcome milnor_wood() {
    int in_w = 0, violations = 0;
    for (const auto& p : {SurfacePresentation::orientable(0, 3), SurfacePresentation::orientable(1, 1)}) {
        int used = 0;
        for (std::uint64_t seed = 0; used < 10000; ++seed) {
            Representation r = sample_representation(p, seed);
            if (!in_W(r)) continue;
            ++used;
            violations += std::abs(euler_relative(r).value) > 1 || !milnor_wood_check(r);
        }
        in_w += used;
    }
    return {violations == 0, "reps=" + std::to_string(in_w) + " violations=" + std::to_string(violations)};
}

bool bump_ok(const BumpPath& b, long from, std::string& detail) {
    PathReport rep = verify_rep_path(b.path);
    bool shifted = std::all_of(b.boundary.begin(), b.boundary.end(),
                               [&](const CoverElement& k) { return in_J_tilde(cover_mul(z_power(b.epsilon), k)); });
    long start = euler_relative(b.path.samples.front()).value, end = euler_relative(b.path.samples.back()).value;
    bool ok = start == from && end == from + 2 && rep.max_residual <= 1e-6 && rep.pass && shifted;
    detail += "e:" + std::to_string(start) + "->" + std::to_string(end) + " res=" + fmt("%.2g", rep.max_residual) + " ";
    return ok;
}

Representation first_with_class(const SurfacePresentation& p, long e, std::uint64_t seed) {
    for (;; ++seed) {
        Representation r = sample_representation(p, seed);
        if (in_W(r) && euler_relative(r).value == e) return r;
    }
}

Outcome euler_bumps() {
    bool ok = true;
    std::string detail;
    for (int which = 0; which < 2; ++which) {
        auto t0 = std::chrono::steady_clock::now();
        detail += which == 0 ? "pants[" : "torus[";
        for (std::uint64_t seed : {1u, 20u, 300u}) {
            if (which == 0) {
                Representation r = first_with_class(SurfacePresentation::orientable(0, 3), -1, seed);
                ok = bump_ok(euler_bump_pants(r), -1, detail) && ok;
            } else {
                Representation r = first_with_class(SurfacePresentation::orientable(1, 1), -1, seed);
                ok = bump_ok(euler_bump_torus(r), -1, detail) && ok;
            }
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ok = ok && secs < 30;
        detail += "t=" + fmt("%.2f", secs) + "s] ";
    }
    return {ok, detail};
}

Outcome remark() {
    double closest = 1e300;
    for (int n : {10, 100, 1000}) {
        double t1 = 1 / (2 * pi * n + pi / 2), t2 = 1 / (2 * pi * n + 3 * pi / 2);
        closest = std::min(closest, distance(psl_sqrt(remark_element(t1)), psl_sqrt(remark_element(t2))));
    }
    double to_neg = frobenius(remark_element(1e-4), -SL2::identity());
    return {closest >= 0.1 && to_neg < 1e-3, "min_root_gap=" + fmt("%.4g", closest) + " |K(1e-4)+I|=" + fmt("%.3g", to_neg)};
}

std::map<std::string, std::string> scalars(const std::string& report) {
    std::map<std::string, std::string> out;
    std::istringstream ss(report);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind("record=", 0) == 0) continue;
        auto eq = line.find('=');
        if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

Outcome certification() {
    bool ok = true;
    std::string detail;
    for (auto [genus, n] : {std::pair{3, 8}, std::pair{4, 6}}) {
        std::ostringstream out, err;
        int code = cli::run({"certify", "--genus", std::to_string(genus), "--samples", std::to_string(n), "--seed", "2024"}, out, err);
        auto kv = scalars(out.str());
        bool run_ok = code == 0 && kv["certified"] == "true" && kv["classes_realized"] == "2" &&
                      kv["pairs_passed"] == kv["same_class_pairs"] && kv["cross_class_rejected"] == kv["cross_class_pairs"];
        ok = ok && run_ok;
        detail += "g" + std::to_string(genus) + ":pairs=" + kv["pairs_passed"] + "/" + kv["same_class_pairs"] +
                  " cross_rejected=" + kv["cross_class_rejected"] + "/" + kv["cross_class_pairs"] + " ";
    }
    // a cross-class pair is refused before any tracking
    const auto genus3 = SurfacePresentation::nonorientable(3, 0);
    Fault f = Fault::TrackerFailure;
    try {
        connect_representations(sample_representation(genus3, 1, 0), sample_representation(genus3, 2, 1));
    } catch (const Error& e) {
        f = e.fault();
    }
    ok = ok && f == Fault::DifferentClasses;
    detail += std::string("direct_cross=") + fault_name(f);
    return {ok, detail};
}

Outcome additivity() {
    const auto genus3 = SurfacePresentation::nonorientable(3, 0);
    int used = 0, agree = 0;
    for (std::uint64_t seed = 0; used < 100 && seed < 1000000; ++seed) {
        Representation m = genus3_to_mixed(sample_representation(genus3, seed));
        if (conj_type(m.images[0] * m.images[0]) != ConjugacyType::Hyperbolic) continue;
        ++used;
        AdditivityReport rep = check_additivity(m, SplitTemplate::MobiusOrientable);
        long torus_parity = ((rep.second.value % 2) + 2) % 2;
        agree += rep.agrees && rep.total.value == (rep.first.value + torus_parity) % 2;
    }
    return {used == 100 && agree == 100, "samples=" + std::to_string(used) + " agree=" + std::to_string(agree)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double limit;  // seconds, 0 for none
    };
    const std::vector<Criterion> all{
        {1, "square-map round trip", square_round_trip, 5},
        {2, "trace identity", trace_identity, 0},
        {3, "universal-cover oracle equivalence", cover_oracle, 0},
        {4, "sw well-defined under lift rechoice", sw_well_defined, 0},
        {5, "both classes realized", both_classes, 0},
        {6, "Milnor-Wood on pants and one-holed torus", milnor_wood, 0},
        {7, "Euler bump", euler_bumps, 0},
        {8, "square roots oscillate along the elliptic path", remark, 0},
        {9, "flagship certification", certification, 600},
        {10, "additivity over Mobius band and one-holed torus", additivity, 0},
    };
    int failures = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit > 0 && secs > c.limit) {
            o.pass = false;
            o.detail += " over time limit " + fmt("%.0f", c.limit) + "s";
        }
        failures += !o.pass;
        std::printf("criterion %2d %s  %s  (%s) time=%.2fs\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures;
}
