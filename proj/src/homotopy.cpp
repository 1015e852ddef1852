#include "psl2/homotopy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <istream>
#include <ostream>
#include <sstream>

#include "psl2/tracker.hpp"

namespace psl2 {
namespace {

constexpr double default_bound = 0.05;

using RepView = std::function<Representation(const Representation&)>;
using PairView = std::function<Representation(const Pair&)>;

Representation identity_view(const Representation& r) { return r; }

SL2 operator*(double s, const SL2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }

bool hyperbolic(const PSL2& g, double margin = 0) { return std::abs(g.trace()) > 2 + margin + tol::classify; }

SL2 positive_trace(const PSL2& g) { return g.trace() >= 0 ? g.rep() : -g.rep(); }

SL2 reflect(const SL2& m) { return {m.a, -m.b, -m.c, m.d}; }

Pair reflect(const Pair& p) { return {reflect(p.x), reflect(p.y)}; }

Pair conjugate(const SL2& g, const Pair& p) { return {conjugate(g, p.x), conjugate(g, p.y)}; }

// Appends `more` to `out`, dropping a duplicated junction sample.
template <class T>
void append(std::vector<T>& out, const std::vector<T>& more) {
    std::size_t skip = out.empty() ? 0 : 1;
    out.insert(out.end(), more.begin() + static_cast<std::ptrdiff_t>(std::min(skip, more.size())), more.end());
}

template <class T>
std::vector<T> reversed(std::vector<T> v) {
    std::reverse(v.begin(), v.end());
    return v;
}

std::vector<Pair> explicit_stage(const std::function<Pair(double)>& f, const PairView& view, double bound, const char* name) {
    Continuation<Pair> c;
    c.advance = [&](double t, const Pair&) -> std::optional<Pair> { return f(t); };
    c.observe = view;
    c.bound = bound;
    return run_continuation(c, f(0), name).states;
}

std::vector<Pair> character_stage(const Pair& start, const std::function<CharacterTriple(double)>& path,
                                  const PairView& view, double bound, const char* name) {
    Continuation<Pair> c;
    c.advance = [&](double t, const Pair& prev) -> std::optional<Pair> { return solve_fiber(path(t), prev); };
    c.observe = view;
    c.bound = bound;
    return run_continuation(c, start, name).states;
}

std::vector<Pair> conjugation_stage(const Pair& start, const SL2& g, const PairView& view, double bound) {
    return explicit_stage([&](double t) { return conjugate(conjugator_path(g, t), start); }, view, bound, "conjugation");
}

// Orientation-preserving conjugator carrying `from` onto one of the SL sign variants of `to` that share its
// character.
std::optional<SL2> align_psl(const Pair& from, const Pair& to) {
    CharacterTriple cf = chi(from);
    const Pair variants[4] = {to, {-to.x, to.y}, {to.x, -to.y}, {-to.x, -to.y}};
    std::optional<SL2> best;
    double best_res = 1e-6;
    for (const Pair& v : variants) {
        if (character_distance(chi(v), cf) > 1e-7 * (1 + std::abs(cf.x) + std::abs(cf.y) + std::abs(cf.zc))) continue;
        Alignment a;
        try {
            a = aligning_conjugator(from, v);
        } catch (const Error&) {
            continue;
        }
        if (a.orientation_preserving && a.residual < best_res) {
            best = a.g;
            best_res = a.residual;
        }
    }
    return best;
}

// h in SL with h from h^-1 = to, when one exists.
std::optional<SL2> sl_conjugator(const SL2& from, const SL2& to) {
    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    const double x0[2][2] = {{from.a, from.b}, {from.c, from.d}};
    const double x1[2][2] = {{to.a, to.b}, {to.c, to.d}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                a(2 * i + j, 2 * i + k) += x0[k][j];
                a(2 * i + j, 2 * k + j) -= x1[i][k];
            }
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(a, Eigen::ComputeFullV);
    if (svd.singularValues()(1) < 1e-9 * std::max(1.0, svd.singularValues()(0))) return std::nullopt;
    Eigen::Vector4d v1 = svd.matrixV().col(2), v2 = svd.matrixV().col(3);
    std::optional<SL2> best;
    double best_det = 1e-12;
    for (int k = 0; k < 16; ++k) {
        double ang = std::numbers::pi * k / 16;
        Eigen::Vector4d v = std::cos(ang) * v1 + std::sin(ang) * v2;
        double det = v(0) * v(3) - v(1) * v(2);
        if (det > best_det) {
            best_det = det;
            best = renormalize(v(0), v(1), v(2), v(3));
        }
    }
    if (best && frobenius(conjugate(*best, from), to) > 1e-6 * (1 + std::abs(to.trace()))) return std::nullopt;
    return best;
}

Pair flip_to_positive(Pair p) {
    if (p.x.trace() < 0) p.x = -p.x;
    if (p.y.trace() < 0) p.y = -p.y;
    return p;
}

constexpr double hub_trace = 3.0;

// Path from a pair with kappa > 2 to a pair with character (0, 0, hub_trace): push z away from the vertex
// xy/2 of kappa(x, y, .), shrink (x, y) to zero, then slide z. kappa stays above 2 on every leg.
std::vector<Pair> path_to_hub(Pair p, const PairView& view, double bound) {
    CharacterTriple c0 = chi(p);
    if (c0.zc < c0.x * c0.y / 2) {
        p.x = -p.x;
        c0 = chi(p);
    }
    double z1 = std::max(c0.zc, hub_trace);
    std::vector<Pair> out{p};
    append(out, character_stage(p, [&](double t) { return CharacterTriple{c0.x, c0.y, c0.zc + t * (z1 - c0.zc)}; },
                                view, bound, "hub: vertex escape"));
    append(out, character_stage(out.back(), [&](double t) { return CharacterTriple{(1 - t) * c0.x, (1 - t) * c0.y, z1}; },
                                view, bound, "hub: shrink"));
    append(out, character_stage(out.back(), [&](double t) { return CharacterTriple{0, 0, z1 + t * (hub_trace - z1)}; },
                                view, bound, "hub: slide"));
    return out;
}

// Path inside the set of pairs with hyperbolic commutator and fixed Euler class.
std::vector<Pair> torus_connect(const Pair& p0, const Pair& p1, const PairView& view, double bound) {
    double k0 = kappa(chi(p0)), k1 = kappa(chi(p1));
    std::vector<Pair> out{p0};
    if (k0 < -2 && k1 < -2) {
        // xyz > 0 here; with x, y > 0 the region kappa < -2 is convex in log coordinates.
        Pair a = flip_to_positive(p0), b = flip_to_positive(p1);
        CharacterTriple ca = chi(a), cb = chi(b);
        if (!(ca.zc > 0 && cb.zc > 0)) throw Error(Fault::TrackerFailure, "torus connect: sign normalization failed");
        auto lerp = [](double u, double v, double t) { return std::exp((1 - t) * std::log(u) + t * std::log(v)); };
        append(out, character_stage(a, [&](double t) {
                   return CharacterTriple{lerp(ca.x, cb.x, t), lerp(ca.y, cb.y, t), lerp(ca.zc, cb.zc, t)};
               }, view, bound, "torus connect: character path"));
        auto g = align_psl(out.back(), b);
        if (!g) throw Error(Fault::TrackerFailure, "torus connect: endpoint fibers are not PSL-conjugate");
        append(out, conjugation_stage(out.back(), *g, view, bound));
        return out;
    }
    if (k0 > 2 && k1 > 2) {
        std::vector<Pair> h0 = path_to_hub(p0, view, bound), h1 = path_to_hub(p1, view, bound);
        auto g = align_psl(h0.back(), h1.back());
        if (!g) throw Error(Fault::TrackerFailure, "torus connect: hub fibers are not PSL-conjugate");
        out = h0;
        append(out, conjugation_stage(h0.back(), *g, view, bound));
        append(out, reversed(h1));
        return out;
    }
    throw Error(Fault::TrackerFailure, "torus connect: commutators not hyperbolic of the same kind");
}

Representation torus_rep(const Pair& p) {
    return {SurfacePresentation::orientable(1, 1), {PSL2(p.x), PSL2(p.y), inverse(PSL2(commutator(p.x, p.y)))}};
}

Representation pants_rep(const Pair& p) {
    return {SurfacePresentation::orientable(0, 3), {PSL2(p.x), PSL2(p.y), inverse(PSL2(p.x * p.y))}};
}

Pair pair_of(const Representation& r, int i, int j) { return {r.images[i].rep(), r.images[j].rep()}; }

RepPath make_path(const SurfacePresentation& p, std::vector<Representation> samples) {
    return {p, std::move(samples), default_bound};
}

std::vector<Representation> view_all(const std::vector<Pair>& ps, const PairView& view) {
    std::vector<Representation> out;
    out.reserve(ps.size());
    for (const Pair& p : ps) out.push_back(view(p));
    return out;
}

void require_path_bounds(const std::vector<Representation>& samples, double bound, const char* name) {
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (rep_step(samples[i - 1], samples[i]) > bound + 1e-12)
            throw Error(Fault::TrackerFailure, std::string(name) + ": step bound violated at sample " + std::to_string(i));
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (relation_residual(samples[i]) > 1e-6)
            throw Error(Fault::TrackerFailure, std::string(name) + ": residual too large at sample " + std::to_string(i));
}

// ---- the torus bump family: X = diag(l, 1/l), Y = U_delta diag(m, 1/m), tr[X, Y] = 2 - (l - 1/l)^2 delta^2.

constexpr double bump_lambda = 2.0;
constexpr double bump_mu = 1.5;

Pair bump_pair(double delta) {
    SL2 x{bump_lambda, 0, 0, 1 / bump_lambda};
    SL2 u{1, delta, delta, 1 + delta * delta};
    SL2 d{bump_mu, 0, 0, 1 / bump_mu};
    return {x, u * d};
}

// delta at which the commutator trace is -(2 + margin), signed so that the one-holed torus has class e.
double bump_endpoint(long e) {
    double w = bump_lambda - 1 / bump_lambda;
    double delta = std::sqrt(4 + hyperbolize_margin) / w;
    long here = euler_relative(torus_rep(bump_pair(delta))).value;
    if (here == e) return delta;
    if (euler_relative(torus_rep(bump_pair(-delta))).value == e) return -delta;
    throw Error(Fault::TrackerFailure, "bump family endpoints do not realize the requested class");
}

CoverElement commutator_lift(const Pair& p) {
    return cover_commutator(lift_base(PSL2(p.x)), lift_base(PSL2(p.y)));
}

// ---- square-root bookkeeping for closed non-orientable presentations

// Sign s with A^2 W = s I in SL, where A is crosscap `m` and W the rest of the relator read cyclically.
Word cyclic_rest(const SurfacePresentation& p, int m) {
    Word w = relator_word(p);
    std::size_t pos = 0;
    while (pos + 1 < w.size() && !(w[pos].generator == m && w[pos + 1].generator == m)) ++pos;
    Word out;
    for (std::size_t k = 2; k < w.size(); ++k) out.push_back(w[(pos + k) % w.size()]);
    return out;
}

std::vector<SL2> sl_reps(const Representation& r) {
    std::vector<SL2> g;
    for (const auto& i : r.images) g.push_back(i.rep());
    return g;
}

Representation with_root(const SurfacePresentation& p, std::vector<SL2> gens, int m, const Word& rest, double s) {
    SL2 w = evaluate(rest, gens);
    gens[m] = psl_sqrt(s * invert(w)).rep();
    Representation r{p, {}};
    for (const auto& g : gens) r.images.emplace_back(g);
    return r;
}

double class_sign(const Representation& r, int m, const Word& rest) {
    SL2 v = square(r.images[m]) * evaluate(rest, sl_reps(r));
    return v.trace() >= 0 ? 1.0 : -1.0;
}

// Small random motion of the free generators that moves W away from +-I; the root follows.
std::vector<Representation> perturb_stage(const Representation& r, int m, const RepView& view, std::uint64_t seed) {
    const Word rest = cyclic_rest(r.presentation, m);
    const double s = class_sign(r, m, rest);
    std::vector<SL2> g0 = sl_reps(r);
    auto far_from_centre = [&](const std::vector<SL2>& g) {
        SL2 w = evaluate(rest, g);
        return std::min(distance_to_identity(w), distance_to_identity(-w)) > 0.2;
    };
    if (far_from_centre(g0)) return {r};
    // the root must stay defined: keep s tr W above half its starting gap to -2
    const double low = -2 + std::min(0.1, (s * evaluate(rest, g0).trace() + 2) / 2);
    Rng rng(seed);
    std::normal_distribution<double> n01(0, 1);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<std::array<double, 3>> dir(g0.size());
        for (auto& d : dir) d = {0.3 * n01(rng), 0.3 * n01(rng), 0.3 * n01(rng)};
        auto at = [&](double t) {
            std::vector<SL2> g = g0;
            for (std::size_t j = 0; j < g.size(); ++j)
                if (static_cast<int>(j) != m) g[j] = g0[j] * exp_sl2(t * dir[j][0], t * dir[j][1], t * dir[j][2]);
            return g;
        };
        bool ok = far_from_centre(at(1));
        for (int k = 0; ok && k <= 64; ++k) ok = s * evaluate(rest, at(k / 64.0)).trace() > low;
        if (!ok) continue;
        Continuation<Representation> c;
        c.advance = [&](double t, const Representation&) -> std::optional<Representation> {
            return with_root(r.presentation, at(t), m, rest, s);
        };
        c.observe = view;
        c.bound = default_bound;
        auto res = run_continuation(c, r, "perturb").states;
        res.front() = r;
        return res;
    }
    throw Error(Fault::TrackerFailure, "perturb: no admissible direction found");
}

std::vector<Representation> hyperbolize_closed(const Representation& r, int m, const RepView& view) {
    const Word rest = cyclic_rest(r.presentation, m);
    const double s = class_sign(r, m, rest);
    std::vector<SL2> g0 = sl_reps(r);
    double tau0 = s * evaluate(rest, g0).trace();
    if (tau0 > 2 + tol::classify) return {r};
    double tau1 = 2 + hyperbolize_margin;
    std::vector<bool> frozen(g0.size(), false);
    frozen[m] = true;
    Continuation<std::vector<SL2>> c;
    c.advance = [&](double t, const std::vector<SL2>& prev) -> std::optional<std::vector<SL2>> {
        double tau = tau0 + t * (tau1 - tau0);
        auto g = solve_words({WordConstraint::trace_of(rest, s * tau)}, prev, frozen);
        g[m] = with_root(r.presentation, g, m, rest, s).images[m].rep();
        return g;
    };
    c.observe = [&](const std::vector<SL2>& g) { return view(with_root(r.presentation, g, m, rest, s)); };
    auto res = run_continuation(c, g0, "hyperbolize");
    std::vector<Representation> out;
    for (const auto& g : res.states) out.push_back(with_root(r.presentation, g, m, rest, s));
    out.front() = r;
    return out;
}

std::vector<Representation> hyperbolize_projective_plane(const Representation& r) {
    // A^2 C_1 C_2 = 1: K = A^2 = (C_1 C_2)^-1 in PSL; trace path (c1, c2, s k_t).
    SL2 k = square(r.images[0]);
    Pair p = pair_of(r, 1, 2);
    SL2 prod = p.x * p.y;
    double s = (k * prod).trace() >= 0 ? 1.0 : -1.0;
    double k0 = k.trace();
    if (std::abs(k0) > 2 + tol::classify) return {r};
    if (!hyperbolic(r.images[1]) && !hyperbolic(r.images[2]))
        throw Error(Fault::TemplateUnsupported, "needs a hyperbolic boundary generator");
    CharacterTriple c0 = chi(p);
    double k1 = 2 + hyperbolize_margin;
    auto view = [&](const Pair& q) {
        Representation out{r.presentation, {psl_sqrt(s * invert(q.x * q.y)), PSL2(q.x), PSL2(q.y)}};
        return out;
    };
    std::vector<CharacterTriple> path;
    const int n = 64;
    for (int j = 0; j <= n; ++j) {
        double t = static_cast<double>(j) / n;
        path.push_back({c0.x, c0.y, s * (k0 + t * (k1 - k0))});
    }
    TracePathOptions opts;
    for (int attempt = 0; attempt < 8; ++attempt, opts.eta_pair /= 2) {
        TracePathLift lift = lift_trace_path(path, p, opts);
        std::vector<Representation> out = view_all(lift.pairs, view);
        out.front() = r;
        bool ok = true;
        for (std::size_t i = 1; ok && i < out.size(); ++i) ok = rep_step(out[i - 1], out[i]) <= default_bound;
        if (ok) return out;
    }
    throw Error(Fault::TrackerFailure, "hyperbolize: trace path could not meet the step bound");
}

// ---- pants bump

struct PantsBump {
    std::vector<Pair> pairs;  // (B, C) samples; the third boundary is (BC)^-1
};

PantsBump pants_bump_pairs(const Pair& start, double bound) {
    PairView view = [](const Pair& q) { return pants_rep(q); };
    Pair phi{start.x.trace() < 0 ? -start.x : start.x, start.y.trace() < 0 ? -start.y : start.y};
    // Diagonalize B = u diag(l, 1/l) u^-1.
    const SL2& b = phi.x;
    double tr = b.trace(), disc = std::sqrt(tr * tr / 4 - 1);
    double lam = tr / 2 + disc;
    auto eigvec = [&](double ev) -> std::pair<double, double> {
        if (std::abs(b.b) > std::abs(b.c)) return {b.b, ev - b.a};
        if (std::abs(b.c) > 0) return {ev - b.d, b.c};
        return ev == b.a ? std::pair{1.0, 0.0} : std::pair{0.0, 1.0};
    };
    auto [u11, u21] = eigvec(lam);
    auto [u12, u22] = eigvec(1 / lam);
    double du = u11 * u22 - u12 * u21;
    if (du < 0) {
        u12 = -u12;
        u22 = -u22;
        du = -du;
    }
    SL2 u = renormalize(u11, u12, u21, u22);
    SL2 uinv = invert(u);
    std::vector<Pair> out{phi};
    append(out, conjugation_stage(phi, uinv, view, bound));
    const Pair phi1 = out.back();
    const SL2 d{lam, 0, 0, 1 / lam};
    const CharacterTriple target = chi(phi1);

    double bt = lam + 1 / lam;
    double cs = (bt + 2) / 2;
    double theta_s = std::acos(cs / bt);
    for (double sigma : {1.0, -1.0}) {
        // Rotation stage: (D, D^-1 R_theta); C stays hyperbolic, BC = R_theta is elliptic.
        auto rot = [&](double t) { return Pair{d, invert(d) * rotation(sigma * theta_s * t)}; };
        std::vector<Pair> fwd = explicit_stage(rot, view, bound, "pants bump: rotation");
        // Trace stage: (b, c', k') -> (b, c, k).
        CharacterTriple c0 = chi(fwd.back());
        std::vector<CharacterTriple> path;
        const int n = 64;
        for (int j = 0; j <= n; ++j) {
            double t = static_cast<double>(j) / n;
            path.push_back({c0.x, c0.y + t * (target.y - c0.y), c0.zc + t * (target.zc - c0.zc)});
        }
        TracePathOptions opts;
        std::vector<Pair> traced;
        for (int attempt = 0; attempt < 8; ++attempt, opts.eta_pair /= 2) {
            TracePathLift lift = lift_trace_path(path, fwd.back(), opts);
            bool ok = true;
            for (std::size_t i = 1; ok && i < lift.pairs.size(); ++i)
                ok = rep_step(view(lift.pairs[i - 1]), view(lift.pairs[i])) <= bound;
            if (ok) {
                traced = lift.pairs;
                break;
            }
        }
        if (traced.empty()) throw Error(Fault::TrackerFailure, "pants bump: trace stage could not meet the step bound");
        append(fwd, traced);
        // Alignment: the fiber over chi(phi1) is a PGL orbit; the rotation sense picks the PSL orbit.
        auto g = align_psl(fwd.back(), phi1);
        if (!g) continue;
        append(fwd, conjugation_stage(fwd.back(), *g, view, bound));
        append(out, reversed(fwd));
        std::vector<Pair> mirrored;
        for (const Pair& q : fwd) mirrored.push_back(reflect(q));
        append(out, mirrored);
        return {out};
    }
    throw Error(Fault::TrackerFailure, "pants bump: neither rotation sense reaches the start orbit");
}

std::vector<CoverElement> pants_boundary_path(const std::vector<Representation>& samples) {
    std::vector<CoverElement> out;
    for (const auto& r : samples)
        out.push_back(cover_mul(canonical_hyperbolic_lift(r.images[0]), canonical_hyperbolic_lift(r.images[1])));
    return out;
}

// ---- planner in free coordinates

using Tuple = std::vector<PSL2>;

struct Planner {
    std::function<bool(const Tuple&)> valid;
    std::function<Representation(const Tuple&)> view;
    // Optional retraction into the valid set; identity on points with some slack inside it.
    std::function<Tuple(const Tuple&)> project;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

Tuple interpolate(const Tuple& a, const Tuple& b, double t) {
    Tuple out;
    for (std::size_t j = 0; j < a.size(); ++j) out.push_back(iwasawa_interpolate(a[j], b[j], t));
    return out;
}

std::optional<std::vector<Tuple>> segment(const Planner& pl, const Tuple& a, const Tuple& b) {
    if (!pl.project)
        for (int k = 0; k <= 200; ++k)
            if (!pl.valid(interpolate(a, b, k / 200.0))) return std::nullopt;
    Continuation<Tuple> c;
    c.advance = [&](double t, const Tuple&) -> std::optional<Tuple> {
        Tuple x = interpolate(a, b, t);
        return pl.project ? pl.project(x) : x;
    };
    c.observe = pl.view;
    c.bound = default_bound;
    ContinuationResult<Tuple> res;
    try {
        res = run_continuation(c, a, "planner segment");
    } catch (const Error& e) {
        if (e.fault() != Fault::TrackerFailure) throw;
        return std::nullopt;
    }
    for (const auto& s : res.states)
        if (!pl.valid(s)) return std::nullopt;
    return res.states;
}

std::vector<Tuple> plan(const Planner& pl, const Tuple& a, const Tuple& b) {
    if (auto s = segment(pl, a, b)) return *s;
    Rng rng(pl.seed);
    std::normal_distribution<double> n01(0, 1);
    auto jitter = [&](const Tuple& base, double scale) {
        Tuple out;
        for (const auto& g : base)
            out.emplace_back(g.rep() * exp_sl2(scale * n01(rng), scale * n01(rng), scale * n01(rng)));
        return out;
    };
    for (int attempt = 0; attempt < 120; ++attempt) {
        double scale = 0.25 * (1 + attempt / 15);
        Tuple w = jitter(interpolate(a, b, 0.5), scale);
        if (!pl.valid(w)) continue;
        auto s1 = segment(pl, a, w);
        if (!s1) continue;
        auto s2 = segment(pl, w, b);
        if (!s2) {
            // one more waypoint between w and b
            for (int inner = 0; inner < 20 && !s2; ++inner) {
                Tuple v = jitter(interpolate(w, b, 0.5), scale);
                if (!pl.valid(v)) continue;
                auto t1 = segment(pl, w, v);
                if (!t1) continue;
                auto t2 = segment(pl, v, b);
                if (!t2) continue;
                append(*t1, *t2);
                s2 = *t1;
            }
            if (!s2) continue;
        }
        append(*s1, *s2);
        return *s1;
    }
    throw Error(Fault::TrackerFailure, "planner: no admissible waypoint path found");
}

void check_closed_pair(const Representation& r1, const Representation& r2) {
    if (!(r1.presentation == r2.presentation))
        throw Error(Fault::TemplateUnsupported, "representations live on different presentations");
    const auto& p = r1.presentation;
    if (!(p.closed() && p.handles == 0 && (p.crosscaps == 3 || p.crosscaps == 4)))
        throw Error(Fault::TemplateUnsupported, "connect handles the standard closed presentations of genus 3 and 4");
    for (const auto* r : {&r1, &r2})
        if (relation_residual(*r) > tol::rel) throw Error(Fault::RelationViolated, "input residual above tolerance");
}

std::vector<Representation> dedupe(std::vector<Representation> v) {
    std::vector<Representation> out;
    for (auto& r : v)
        if (out.empty() || rep_step(out.back(), r) > 0) out.push_back(std::move(r));
    if (out.empty() && !v.empty()) out.push_back(v.front());
    return out;
}

// ---- genus 3 pipeline in the mixed generators (A, X, Y), A^2 = s [Y, X]

struct Genus3Leg {
    std::vector<Representation> out;  // standard generators
    Pair torus;                       // working pair at the end of the leg
};

// Principal logarithm of the PSL class of g, as (p, q, r) coordinates for exp_sl2.
std::array<double, 3> principal_log(const SL2& g) {
    SL2 m = positive_trace(PSL2(g));
    double c = m.trace() / 2, p = (m.a - m.d) / 2;
    double det = -p * p - m.b * m.c;
    double f = 1;
    if (det > 1e-14)
        f = std::atan2(std::sqrt(det), c) / std::sqrt(det);
    else if (det < -1e-14)
        f = std::asinh(std::sqrt(-det)) / std::sqrt(-det);
    return {f * p, f * m.b, f * m.c};
}

SL2 scaled_exp(const std::array<double, 3>& l, double t) { return exp_sl2(t * l[0], t * l[1], t * l[2]); }

std::vector<Representation> explicit_rep_stage(const std::function<Representation(double)>& f, const RepView& view,
                                               double bound, const char* name) {
    Continuation<Representation> c;
    c.advance = [&](double t, const Representation&) -> std::optional<Representation> { return f(t); };
    c.observe = view;
    c.bound = bound;
    return run_continuation(c, f(0), name).states;
}

// Class-one reps produced with principal crosscap roots satisfy A^2 = -I and [X, Y] = I in the mixed
// generators, where the Mobius route cannot start. They reach the hub (R_{pi/2}, I, I) directly.
bool on_involution_locus(const Representation& mixed) {
    Pair p = pair_of(mixed, 1, 2);
    return frobenius(commutator(p.x, p.y), SL2::identity()) < 1e-6 &&
           frobenius(square(mixed.images[0]), -SL2::identity()) < 1e-6;
}

Representation involution_hub() {
    return {SurfacePresentation::mixed(1, 0), {PSL2(rotation(std::numbers::pi / 2)), PSL2(SL2::identity()), PSL2(SL2::identity())}};
}

std::vector<Representation> collapse_to_hub(const Representation& mixed, const RepView& view) {
    const SL2 quarter = rotation(std::numbers::pi / 2);
    std::optional<SL2> g = sl_conjugator(quarter, mixed.images[0].rep());
    if (!g) g = sl_conjugator(quarter, -mixed.images[0].rep());
    if (!g) throw Error(Fault::TrackerFailure, "involution hub: crosscap image is not an involution");
    Pair p = pair_of(mixed, 1, 2);
    // commuting generators share a one-parameter subgroup: shrink both logarithms together
    auto lx = principal_log(p.x), ly = principal_log(p.y);
    auto f = [&](double t) {
        return Representation{mixed.presentation,
                              {PSL2(conjugate(conjugator_path(*g, 1 - t), quarter)), PSL2(scaled_exp(lx, 1 - t)),
                               PSL2(scaled_exp(ly, 1 - t))}};
    };
    auto out = explicit_rep_stage(f, view, default_bound, "involution hub: collapse");
    out.front() = mixed;
    out.back() = involution_hub();
    return out;
}

// X = exp(u H), Y = exp(+-u S) with tr[X, Y] = 2 - 4 sinh(u)^4 and A^2 = -[Y, X]; A tends to R_{pi/2} as u -> 0.
Pair hub_family_pair(double u, double sign) {
    return {SL2{std::exp(u), 0, 0, std::exp(-u)},
            SL2{std::cosh(u), sign * std::sinh(u), sign * std::sinh(u), std::cosh(u)}};
}

std::vector<Representation> hub_family(double sign, const RepView& view) {
    const double u1 = std::asinh(std::pow((4 + hyperbolize_margin) / 4, 0.25));
    auto f = [&](double t) {
        if (t == 0) return involution_hub();
        Pair p = hub_family_pair(t * u1, sign);
        return Representation{SurfacePresentation::mixed(1, 0), {psl_sqrt(-1.0 * commutator(p.y, p.x)), PSL2(p.x), PSL2(p.y)}};
    };
    return explicit_rep_stage(f, view, default_bound, "involution hub: family");
}

Genus3Leg genus3_leg(const Representation& r, double s, std::uint64_t seed) {
    RepView std_view = [](const Representation& m) { return genus3_from_mixed(m); };
    auto mixed_of_pair = [s](const Pair& p) {
        return Representation{SurfacePresentation::mixed(1, 0), {psl_sqrt(s * commutator(p.y, p.x)), PSL2(p.x), PSL2(p.y)}};
    };
    PairView pview = [&](const Pair& p) { return genus3_from_mixed(mixed_of_pair(p)); };

    Genus3Leg leg;
    leg.out.push_back(r);
    Representation mixed = genus3_to_mixed(r);
    if (s < 0 && on_involution_locus(mixed)) {
        const double u1 = std::asinh(std::pow((4 + hyperbolize_margin) / 4, 0.25));
        double sign = euler_relative(torus_rep(hub_family_pair(u1, 1.0))).value == 1 ? 1.0 : -1.0;
        std::vector<Representation> m = collapse_to_hub(mixed, std_view);
        append(m, hub_family(sign, std_view));
        for (std::size_t i = 1; i < m.size(); ++i) leg.out.push_back(genus3_from_mixed(m[i]));
        leg.torus = hub_family_pair(u1, sign);
        return leg;
    }
    std::vector<Representation> pert = perturb_stage(mixed, 0, std_view, seed);
    for (std::size_t i = 1; i < pert.size(); ++i) leg.out.push_back(genus3_from_mixed(pert[i]));
    std::vector<Representation> hyp = hyperbolize_closed(pert.back(), 0, std_view);
    for (std::size_t i = 1; i < hyp.size(); ++i) leg.out.push_back(genus3_from_mixed(hyp[i]));
    Pair p = pair_of(hyp.back(), 1, 2);
    leg.torus = p;
    if (s > 0) return leg;

    long e = euler_relative(torus_rep(p)).value;
    if (e == 1) return leg;
    if (e != -1) throw Error(Fault::TrackerFailure, "genus-3 leg: torus class outside the parity window");

    // Bump: reach the family start inside the e = -1 component, then run the family through delta = 0,
    // where -[Y, X] = -I and the crosscap root crosses the fiber over -I.
    double d0 = bump_endpoint(-1), d1 = -d0;
    std::vector<Pair> to_family = torus_connect(p, bump_pair(d0), pview, default_bound);
    for (std::size_t i = 1; i < to_family.size(); ++i) leg.out.push_back(pview(to_family[i]));

    auto fam = [&](double a, double b) {
        return [a, b](double t) { return bump_pair(a + t * (b - a)); };
    };
    double dc = std::abs(d0) / 4;
    for (;;) {
        Representation lo = pview(bump_pair(-dc)), hi = pview(bump_pair(dc));
        if (rep_step(lo, hi) < 0.01) break;
        dc /= 2;
        if (dc < 1e-9) throw Error(Fault::TrackerFailure, "genus-3 bump: crossing roots do not match");
    }
    double sgn = d0 < 0 ? -1.0 : 1.0;
    std::vector<Pair> fpairs = explicit_stage(fam(d0, sgn * dc), pview, default_bound, "bump family: approach");
    const int approach = 16;
    for (int j = 1; j <= approach; ++j) fpairs.push_back(bump_pair(sgn * dc * (1 - static_cast<double>(j) / (approach + 1))));
    std::size_t crossing = fpairs.size();
    fpairs.push_back(bump_pair(0));
    for (int j = 1; j <= approach; ++j) fpairs.push_back(bump_pair(-sgn * dc * static_cast<double>(j) / (approach + 1)));
    append(fpairs, explicit_stage(fam(-sgn * dc, d1), pview, default_bound, "bump family: departure"));

    // Square path z K~ with K~ = [Y~, X~], lifted through the crossing.
    std::vector<CoverElement> squares;
    for (const Pair& q : fpairs) squares.push_back(cover_mul(z_power(1), cover_commutator(lift_base(PSL2(q.y)), lift_base(PSL2(q.x)))));
    squares[crossing] = z_power(1);
    SquarePathOptions so;
    so.eta_step = 1.0;
    so.eta_out = 0.25;
    SquarePathLift lift = lift_square_path(squares, {CrossingSpec{crossing, 0, std::nullopt, std::nullopt}}, so);
    for (std::size_t j = 0; j < lift.roots.size(); ++j) {
        const Pair& q = fpairs[lift.source_index[j]];
        Representation m{SurfacePresentation::mixed(1, 0), {lift.roots[j].base(), PSL2(q.x), PSL2(q.y)}};
        Representation st = genus3_from_mixed(m);
        if (rep_step(leg.out.back(), st) > 0) leg.out.push_back(st);
    }
    leg.torus = fpairs.back();
    return leg;
}

RepPath connect_genus3(const Representation& r1, const Representation& r2, long cls) {
    double s = cls ? -1.0 : 1.0;
    Genus3Leg a = genus3_leg(r1, s, 11), b = genus3_leg(r2, s, 29);
    auto mixed_of_pair = [s](const Pair& p) {
        return Representation{SurfacePresentation::mixed(1, 0), {psl_sqrt(s * commutator(p.y, p.x)), PSL2(p.x), PSL2(p.y)}};
    };
    PairView pview = [&](const Pair& p) { return genus3_from_mixed(mixed_of_pair(p)); };
    std::vector<Pair> mid = torus_connect(a.torus, b.torus, pview, default_bound);
    std::vector<Representation> out = a.out;
    append(out, view_all(mid, pview));
    append(out, reversed(b.out));
    out.front() = r1;
    out.back() = r2;
    out = dedupe(std::move(out));
    require_path_bounds(out, default_bound, "connect genus 3");
    return make_path(r1.presentation, std::move(out));
}

// Free generators move to the hub tuple by Iwasawa interpolation; the last crosscap is the principal root
// of s W^-1. Samples whose root trace s tr W falls under `floor` are projected back onto that level. When
// the straight route breaks down, random waypoints around its midpoint are tried.
std::vector<Representation> root_leg(const Representation& r, const Tuple& hub, std::uint64_t seed) {
    const auto& p = r.presentation;
    const int m = p.crosscaps - 1;
    const Word rest = cyclic_rest(p, m);
    const double s = class_sign(r, m, rest);
    auto gens_of = [&](const Tuple& t) {
        std::vector<SL2> g;
        for (const auto& x : t) g.push_back(x.rep());
        g.push_back(SL2::identity());
        return g;
    };
    auto value = [&](const Tuple& t) { return s * evaluate(rest, gens_of(t)).trace(); };
    Tuple start(r.images.begin(), r.images.begin() + m);
    double v0 = value(start);
    if (!(v0 > -2 + 1e-6)) throw Error(Fault::TrackerFailure, "root leg: crosscap root sits on the involution fiber");
    const double floor = -2 + std::min(0.5, (v0 + 2) / 2);
    std::vector<bool> frozen(m + 1, false);
    frozen[m] = true;
    auto project = [&](const Tuple& t) {
        if (value(t) >= floor) return t;
        auto g = solve_words({WordConstraint::trace_of(rest, s * floor)}, gens_of(t), frozen);
        return Tuple(g.begin(), g.begin() + m);
    };
    auto view = [&](const Tuple& t) { return with_root(p, gens_of(t), m, rest, s); };
    auto leg = [&](const Tuple& a, const Tuple& b) -> std::optional<std::vector<Representation>> {
        Continuation<Tuple> c;
        c.advance = [&](double t, const Tuple&) -> std::optional<Tuple> { return project(interpolate(a, b, t)); };
        c.observe = view;
        c.bound = default_bound;
        try {
            return run_continuation(c, a, "root leg").reps;
        } catch (const Error& e) {
            if (e.fault() != Fault::TrackerFailure) throw;
            return std::nullopt;
        }
    };
    std::optional<std::vector<Representation>> out = leg(start, hub);
    Rng rng(seed);
    std::normal_distribution<double> n01(0, 1);
    for (int attempt = 0; !out && attempt < 200; ++attempt) {
        double scale = 0.25 * (1 + attempt / 25);
        Tuple w;
        for (const auto& g : interpolate(start, hub, 0.5))
            w.emplace_back(g.rep() * exp_sl2(scale * n01(rng), scale * n01(rng), scale * n01(rng)));
        try {
            w = project(w);
        } catch (const Error&) {
            continue;
        }
        auto first = leg(start, w);
        if (!first) continue;
        auto second = leg(w, hub);
        if (!second) continue;
        append(*first, *second);
        out = std::move(first);
    }
    if (!out) throw Error(Fault::TrackerFailure, "root leg: no route to the hub found");
    out->front() = r;
    return *out;
}

Tuple root_hub(const Representation& r) {
    const int m = r.presentation.crosscaps - 1;
    Tuple hub(static_cast<std::size_t>(m), PSL2(SL2::identity()));
    if (class_sign(r, m, cyclic_rest(r.presentation, m)) < 0) hub[0] = PSL2(rotation(std::numbers::pi / 4));
    return hub;
}

RepPath connect_via_roots(const Representation& r1, const Representation& r2) {
    std::vector<Representation> out = root_leg(r1, root_hub(r1), 53);
    append(out, reversed(root_leg(r2, root_hub(r2), 71)));
    out.back() = r2;
    out = dedupe(std::move(out));
    require_path_bounds(out, default_bound, "connect via roots");
    return make_path(r1.presentation, std::move(out));
}

RepPath connect_genus4(const Representation& r1, const Representation& r2, long cls) {
    const auto& p = r1.presentation;
    const Word rest = cyclic_rest(p, 0);
    const double s = cls ? -1.0 : 1.0;
    std::vector<Representation> legs[2];
    const Representation* ends[2] = {&r1, &r2};
    for (int i = 0; i < 2; ++i) {
        std::vector<Representation> pert = perturb_stage(*ends[i], 0, identity_view, 41 + 7 * i);
        std::vector<Representation> hyp = hyperbolize_closed(pert.back(), 0, identity_view);
        legs[i] = pert;
        append(legs[i], hyp);
    }
    auto trace_value = [&](const Tuple& t) {
        std::vector<SL2> g{SL2::identity()};
        for (const auto& x : t) g.push_back(x.rep());
        return s * evaluate(rest, g).trace();
    };
    auto tuple_of = [](const Representation& r) { return Tuple(r.images.begin() + 1, r.images.end()); };
    Tuple ta = tuple_of(legs[0].back()), tb = tuple_of(legs[1].back());
    double margin = std::min({0.25, (trace_value(ta) - 2) / 2, (trace_value(tb) - 2) / 2});
    Planner pl;
    pl.valid = [&](const Tuple& t) { return trace_value(t) > 2 + margin; };
    const double floor = 2 + 1.25 * margin;
    pl.project = [&](const Tuple& t) {
        if (trace_value(t) >= floor) return t;
        std::vector<SL2> g{SL2::identity()};
        for (const auto& x : t) g.push_back(x.rep());
        std::vector<bool> frozen(g.size(), false);
        frozen[0] = true;
        g = solve_words({WordConstraint::trace_of(rest, s * floor)}, g, frozen);
        Tuple out;
        for (std::size_t j = 1; j < g.size(); ++j) out.emplace_back(g[j]);
        return out;
    };
    pl.view = [&](const Tuple& t) {
        std::vector<SL2> g{SL2::identity()};
        for (const auto& x : t) g.push_back(x.rep());
        return with_root(p, g, 0, rest, s);
    };
    std::vector<Tuple> route = plan(pl, ta, tb);
    std::vector<Representation> out = legs[0];
    std::vector<Representation> mid;
    for (const auto& t : route) mid.push_back(pl.view(t));
    append(out, mid);
    append(out, reversed(legs[1]));
    out.front() = r1;
    out.back() = r2;
    out = dedupe(std::move(out));
    require_path_bounds(out, default_bound, "connect genus 4");
    return make_path(p, std::move(out));
}

}  // namespace

// ---------------------------------------------------------------------------

PathReport verify_rep_path(const RepPath& p, const PathBounds& bounds) {
    PathReport r;
    r.samples = p.samples.size();
    auto fail_at = [&](std::size_t i) {
        if (!r.first_failure || i < *r.first_failure) r.first_failure = i;
    };
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
        const Representation& s = p.samples[i];
        double res = relation_residual(s);
        if (i == 0 || res > r.max_residual) {
            r.max_residual = res;
            r.residual_index = i;
        }
        if (!(res <= bounds.residual)) fail_at(i);
        for (int l = 0; l < s.presentation.boundary; ++l)
            if (!hyperbolic(s.images[s.presentation.boundary_index(l)])) {
                r.boundary_violations.push_back(i);
                if (bounds.boundary_hyperbolic) fail_at(i);
                break;
            }
        if (i > 0) {
            double st = rep_step(p.samples[i - 1], s);
            if (st > r.max_step) {
                r.max_step = st;
                r.step_index = i;
            }
            if (!(st <= bounds.step)) fail_at(i);
        }
    }
    auto cls = [](const Representation& s) -> std::optional<ClassValue> {
        try {
            return surface_class(s);
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    if (!p.samples.empty()) {
        r.start_class = cls(p.samples.front());
        r.end_class = cls(p.samples.back());
    }
    r.pass = !p.samples.empty() && !r.first_failure;
    return r;
}

void write_report(std::ostream& os, const PathReport& r) {
    char buf[128];
    os << "samples=" << r.samples << "\n";
    std::snprintf(buf, sizeof buf, "max_residual=%.17g\n", r.max_residual);
    os << buf << "max_residual_index=" << r.residual_index << "\n";
    std::snprintf(buf, sizeof buf, "max_step=%.17g\n", r.max_step);
    os << buf << "max_step_index=" << r.step_index << "\n";
    os << "boundary_violations=" << r.boundary_violations.size() << "\n";
    os << "start_class=" << (r.start_class ? to_string(*r.start_class) : "none") << "\n";
    os << "end_class=" << (r.end_class ? to_string(*r.end_class) : "none") << "\n";
    if (r.first_failure) os << "first_failure=" << *r.first_failure << "\n";
    os << "pass=" << (r.pass ? "true" : "false") << "\n";
}

void write_rep_path(std::ostream& os, const RepPath& p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", p.step_bound);
    os << "reppath " << p.samples.size() << " " << buf << "\n";
    for (const auto& s : p.samples) write_representation(os, s);
}

RepPath read_rep_path(std::istream& is) {
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') break;
    std::istringstream head(line);
    std::string tag;
    std::size_t n = 0;
    double bound = 0;
    if (!(head >> tag >> n >> bound) || tag != "reppath") throw Error(Fault::ParseError, "expected 'reppath <count> <step_bound>'");
    RepPath p;
    p.step_bound = bound;
    for (std::size_t i = 0; i < n; ++i) {
        Representation r = read_representation_block(is);
        if (i == 0) p.presentation = r.presentation;
        else if (!(r.presentation == p.presentation)) throw Error(Fault::ParseError, "mixed presentations in a path file");
        p.samples.push_back(std::move(r));
    }
    return p;
}

namespace {

// Least-norm infinitesimal conjugator taking `from` towards `to`: solves [eta, from] = to - from.
SL2 horizontal_conjugator(const SL2& from, const SL2& to) {
    Eigen::Matrix<double, 4, 3> m;
    // [eta, P] for eta = (p, q; r, -p) in the basis (1,0;0,-1), (0,1;0,0), (0,0;1,0)
    auto bracket = [&](double p, double q, double r) {
        double e11 = p, e12 = q, e21 = r, e22 = -p;
        return Eigen::Vector4d(e11 * from.a + e12 * from.c - from.a * e11 - from.b * e21,
                               e11 * from.b + e12 * from.d - from.a * e12 - from.b * e22,
                               e21 * from.a + e22 * from.c - from.c * e11 - from.d * e21,
                               e21 * from.b + e22 * from.d - from.c * e12 - from.d * e22);
    };
    m.col(0) = bracket(1, 0, 0);
    m.col(1) = bracket(0, 1, 0);
    m.col(2) = bracket(0, 0, 1);
    Eigen::Vector4d rhs(to.a - from.a, to.b - from.b, to.c - from.c, to.d - from.d);
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-9);
    Eigen::Vector3d eta = svd.solve(rhs);
    return exp_sl2(eta(0), eta(1), eta(2));
}

// With `densify` the output meets the step bound by keeping the Newton sub-steps as samples; without it
// there is exactly one sample per target sample.
RepPath lift_boundary_impl(const Representation& r0, const std::vector<PSL2>& target, bool densify) {
    const auto& p = r0.presentation;
    if (!(p.is_orientable() && p.boundary >= 1 && p.handles <= 2 && p.boundary <= 3 && p.euler_characteristic() < 0))
        throw Error(Fault::TemplateUnsupported, "lift_boundary_path handles orientable templates up to genus 2 with 3 boundaries");
    if (!in_W(r0)) throw Error(Fault::NotInW, "start representation is not in W");
    for (const auto& t : target)
        if (!hyperbolic(t)) throw Error(Fault::TargetLeavesHyperbolic, "target boundary path leaves the hyperbolic locus");
    if (target.empty() || distance(target.front(), r0.images[p.boundary_index(0)]) > 1e-7)
        throw Error(Fault::TrackerFailure, "target does not start at the boundary image");

    const int c1 = p.boundary_index(0), last = p.boundary_index(p.boundary - 1);
    const Word rel = relator_word(p);
    std::vector<SL2> g0 = sl_reps(r0);
    // relator = s I in SL
    double s = evaluate(rel, g0).trace() >= 0 ? 1.0 : -1.0;
    std::vector<bool> frozen(g0.size(), false);
    frozen[c1] = true;

    std::vector<WordConstraint> fixed;
    // with one handle and one boundary the handle commutator is the boundary itself
    const bool handle_is_boundary = p.handles == 1 && p.boundary == 1;
    for (int j = 0; j < p.handles && !handle_is_boundary; ++j) {
        int x = p.handle_x(j), y = p.handle_y(j);
        Word w{{x, false}, {y, false}, {x, true}, {y, true}};
        fixed.push_back(WordConstraint::trace_of(w, evaluate(w, g0).trace()));
    }
    for (int l = 1; l + 1 < p.boundary; ++l) {
        Word w{{p.boundary_index(l), false}};
        fixed.push_back(WordConstraint::trace_of(w, g0[p.boundary_index(l)].trace()));
    }
    // Prefix of the relator before the last boundary letter: the last boundary is its inverse times s.
    Word prefix(rel.begin(), rel.end() - 1);
    if (last != c1) {
        frozen[last] = true;
        fixed.push_back(WordConstraint::trace_of(prefix, evaluate(prefix, g0).trace()));
    }

    auto finish = [&](std::vector<SL2> g) {
        if (last != c1) g[last] = s * invert(evaluate(prefix, g));
        Representation r{p, {}};
        for (const auto& x : g) r.images.emplace_back(x);
        return r;
    };

    std::vector<Representation> out{r0};
    std::vector<SL2> g = g0;
    SL2 prev_c = g0[c1];
    for (std::size_t i = 1; i < target.size(); ++i) {
        SL2 tc = target[i].rep();
        if (frobenius(tc, prev_c) > frobenius(-tc, prev_c)) tc = -tc;
        // Iwasawa sub-steps warm-start Newton on rough targets and densify the output to the step bound
        int sub = 1;
        std::vector<std::vector<SL2>> states;
        for (;;) {
            states.clear();
            bool ok = true;
            try {
                std::vector<SL2> h = g;
                Representation before = out.back();
                for (int k = 1; k <= sub && ok; ++k) {
                    SL2 ck = k == sub ? tc : iwasawa_interpolate(PSL2(prev_c), PSL2(tc), static_cast<double>(k) / sub).rep();
                    if (k < sub && frobenius(ck, prev_c) > frobenius(-ck, prev_c)) ck = -ck;
                    // predict by conjugation so that pure conjugation targets cost Newton nothing
                    SL2 pred = horizontal_conjugator(h[c1], ck), pred_inv = invert(pred);
                    for (auto& x : h) x = pred * x * pred_inv;
                    h[c1] = ck;
                    std::vector<WordConstraint> cs = fixed;
                    if (last == c1) cs.push_back(WordConstraint::equals(prefix, s * invert(ck)));
                    h = solve_words(cs, h, frozen);
                    if (densify || k == sub) states.push_back(h);
                    if (densify) {
                        Representation now = finish(h);
                        ok = rep_step(before, now) <= default_bound;
                        before = now;
                    }
                }
            } catch (const Error& e) {
                if (e.fault() != Fault::NoConvergence && e.fault() != Fault::SingularFiber) throw;
                ok = false;
            }
            if (ok) break;
            sub *= 2;
            if (sub > 1024) throw Error(Fault::TrackerFailure, "boundary lift: Newton failed at sample " + std::to_string(i));
        }
        for (const auto& h : states) {
            Representation r = finish(h);
            for (int l = 0; l < p.boundary; ++l)
                if (!hyperbolic(r.images[p.boundary_index(l)]))
                    throw Error(Fault::TrackerFailure, "boundary lift: a boundary image left the hyperbolic locus");
            out.push_back(std::move(r));
        }
        g = states.back();
        prev_c = tc;
    }
    return make_path(p, std::move(out));
}

}  // namespace

RepPath lift_boundary_path(const Representation& r0, const std::vector<PSL2>& target) {
    return lift_boundary_impl(r0, target, true);
}

std::pair<PSL2, PSL2> commutator_solve(const CoverElement& kt) {
    const PSL2& base = kt.base();
    if (conj_type(base) == ConjugacyType::Identity) {
        if (cover_distance(kt, z_power(0)) <= tol::central) return {PSL2::identity(), PSL2::identity()};
        throw Error(Fault::NotInCommutatorImage, "non-trivial central element");
    }
    Region reg = classify_region(kt);
    bool hyp = reg.kind == RegionKind::H || reg.kind == RegionKind::Pplus || reg.kind == RegionKind::Pminus;
    bool ok = reg.kind == RegionKind::E ? (reg.index == 0 || reg.index == -1) : hyp && std::abs(reg.index) <= 1;
    if (!ok) throw Error(Fault::NotInCommutatorImage, "region " + to_string(reg) + " is outside the lifted commutator image");
    SL2 k = project_sl2(kt);
    double tau = k.trace();
    if (std::abs(std::abs(tau) - 2) < 1e-9)
        throw Error(Fault::NotInCommutatorImage, "parabolic targets are not supported");

    // Seeds: pairs realizing characters on the level set kappa = tau, and their mirror images.
    std::vector<Pair> seeds;
    for (double x : {3.0, 2.5, 4.0, 6.0}) {
        double y = x;
        // z^2 - x y z + (x^2 + y^2 - 2 - tau) = 0
        double bq = x * y, cq = x * x + y * y - 2 - tau;
        double disc = bq * bq - 4 * cq;
        if (disc < 0) continue;
        for (double z : {(bq + std::sqrt(disc)) / 2, (bq - std::sqrt(disc)) / 2}) {
            CharacterTriple c{x, y, z};
            if (in_forbidden_set(c)) continue;
            try {
                Pair q = realize_character(c);
                seeds.push_back(q);
                seeds.push_back(reflect(q));
            } catch (const Error&) {
            }
        }
    }
    Word w{{0, false}, {1, false}, {0, true}, {1, true}};
    for (const Pair& q : seeds) {
        auto h = sl_conjugator(commutator(q.x, q.y), k);
        if (!h) continue;
        std::vector<SL2> g{conjugate(*h, q.x), conjugate(*h, q.y)};
        try {
            g = solve_words({WordConstraint::equals(w, k)}, g);
        } catch (const Error&) {
            continue;
        }
        CoverElement got = commutator_lift({g[0], g[1]});
        if (cover_distance(got, kt) <= 1e-7) return {PSL2(g[0]), PSL2(g[1])};
    }
    throw Error(Fault::NotInCommutatorImage, "no pair with this lifted commutator found");
}

BumpPath euler_bump_torus(const Representation& r0) {
    if (!(r0.presentation == SurfacePresentation::orientable(1, 1)))
        throw Error(Fault::TemplateUnsupported, "euler_bump_torus needs a one-holed torus");
    if (!in_W(r0)) throw Error(Fault::NotInW, "boundary image is not hyperbolic");
    if (euler_relative(r0).value != -1) throw Error(Fault::WrongStartClass, "start class must be e = -1");
    PairView view = [](const Pair& q) { return torus_rep(q); };
    Pair p = pair_of(r0, 0, 1);
    double d0 = bump_endpoint(-1);
    std::vector<Pair> pairs = torus_connect(p, bump_pair(d0), view, default_bound);
    append(pairs, explicit_stage([&](double t) { return bump_pair(d0 * (1 - 2 * t)); }, view, default_bound, "torus bump family"));
    std::vector<Representation> samples = view_all(pairs, view);
    samples.front() = r0;
    require_path_bounds(samples, default_bound, "torus bump");
    BumpPath out;
    for (const Pair& q : pairs) out.boundary.push_back(commutator_lift(q));
    out.epsilon = 1;
    out.path = make_path(r0.presentation, std::move(samples));
    return out;
}

BumpPath euler_bump_pants(const Representation& r0) {
    if (!(r0.presentation == SurfacePresentation::orientable(0, 3)))
        throw Error(Fault::TemplateUnsupported, "euler_bump_pants needs a pants presentation");
    if (!in_W(r0)) throw Error(Fault::NotInW, "boundary images are not hyperbolic");
    if (euler_relative(r0).value != -1) throw Error(Fault::WrongStartClass, "start class must be e = -1");
    PantsBump pb = pants_bump_pairs(pair_of(r0, 0, 1), default_bound);
    std::vector<Representation> samples;
    for (const Pair& q : pb.pairs) samples.push_back(pants_rep(q));
    samples.front() = r0;
    require_path_bounds(samples, default_bound, "pants bump");
    BumpPath out;
    out.boundary = pants_boundary_path(samples);
    out.epsilon = 1;
    out.path = make_path(r0.presentation, std::move(samples));
    return out;
}

RepPath euler_bump_general(const Representation& r0) {
    const auto& p = r0.presentation;
    if (!p.is_orientable() || p.closed()) throw Error(Fault::TemplateUnsupported, "needs an orientable surface with boundary");
    long n = euler_relative(r0).value;
    if (n > -p.euler_characteristic() - 2) throw Error(Fault::ClassTooHigh, "class exceeds -chi - 2");
    if (p == SurfacePresentation::orientable(0, 3)) return euler_bump_pants(r0).path;
    if (p == SurfacePresentation::orientable(1, 1)) return euler_bump_torus(r0).path;
    if (!(p == SurfacePresentation::orientable(1, 2)))
        throw Error(Fault::TemplateUnsupported, "general bump is implemented on the two-holed torus");

    // Two-holed torus = torus (X, Y, D) glued to pants (D^-1, C_1, C_2), D = [X, Y]^-1.
    auto full = [&](const Tuple& t) {
        PSL2 d = inverse(projectivize(commutator(t[0].rep(), t[1].rep())));
        PSL2 c2 = inverse(inverse(d) * t[2]);
        return Representation{p, {t[0], t[1], t[2], c2}};
    };
    auto split_ok = [&](const Representation& r) {
        PSL2 d = inverse(projectivize(commutator(r.images[0].rep(), r.images[1].rep())));
        if (!hyperbolic(d, 0.05)) return false;
        Representation pants{SurfacePresentation::orientable(0, 3), {inverse(d), r.images[2], r.images[3]}};
        return euler_relative(pants).value == -1;
    };

    std::vector<Representation> out{r0};
    Representation cur = r0;
    if (!split_ok(cur)) {
        // Build a representation of the same class with D hyperbolic and pants class -1, then plan a path
        // to it inside W.
        Rng rng(0xb0b);
        std::optional<Representation> goal;
        for (int attempt = 0; attempt < 2000 && !goal; ++attempt) {
            Representation torus = sample_representation(SurfacePresentation::orientable(1, 1), rng(), n + 1);
            PSL2 d = torus.images[2];
            for (int k = 0; k < 200 && !goal; ++k) {
                PSL2 c1 = random_psl2(rng);
                Representation cand = full({torus.images[0], torus.images[1], c1});
                if (in_W(cand) && hyperbolic(cand.images[2], 0.05) && hyperbolic(cand.images[3], 0.05) && split_ok(cand) &&
                    euler_relative(cand).value == n)
                    goal = cand;
                (void)d;
            }
        }
        if (!goal) throw Error(Fault::TrackerFailure, "general bump: no split-compatible target found");
        Planner pl;
        pl.valid = [&](const Tuple& t) {
            Representation r = full(t);
            return hyperbolic(r.images[2], 0.02) && hyperbolic(r.images[3], 0.02);
        };
        pl.view = full;
        auto route = plan(pl, Tuple(r0.images.begin(), r0.images.begin() + 3), Tuple(goal->images.begin(), goal->images.begin() + 3));
        for (std::size_t i = 1; i < route.size(); ++i) out.push_back(full(route[i]));
        cur = out.back();
    }

    // Pants in the order (B, C, K^-1) = (C_2, D^-1, C_1): a cyclic rotation of D^-1 C_1 C_2.
    PSL2 d = inverse(projectivize(commutator(cur.images[0].rep(), cur.images[1].rep())));
    Representation torus{SurfacePresentation::orientable(1, 1), {cur.images[0], cur.images[1], d}};
    for (double bound = default_bound / 4; bound > 1e-4; bound /= 2) {
        PantsBump pb = pants_bump_pairs({cur.images[3].rep(), inverse(d).rep()}, bound);
        std::vector<PSL2> dpath;
        for (const Pair& q : pb.pairs) dpath.push_back(inverse(PSL2(q.y)));
        dpath.front() = d;
        RepPath tpath = lift_boundary_impl(torus, dpath, false);
        std::vector<Representation> bumped;
        for (std::size_t i = 0; i < pb.pairs.size(); ++i) {
            const Pair& q = pb.pairs[i];
            const auto& t = tpath.samples[i].images;
            bumped.push_back({p, {t[0], t[1], inverse(PSL2(q.x * q.y)), PSL2(q.x)}});
        }
        bumped.front() = cur;
        bool ok = true;
        for (std::size_t i = 1; ok && i < bumped.size(); ++i) ok = rep_step(bumped[i - 1], bumped[i]) <= default_bound;
        if (!ok) continue;
        append(out, bumped);
        require_path_bounds(out, default_bound, "general bump");
        AdditivityReport add = check_additivity(out.back(), SplitTemplate::TorusPants);
        if (!add.agrees || add.total.value != n + 2)
            throw Error(Fault::TrackerFailure, "general bump: endpoint class check failed");
        return make_path(p, std::move(out));
    }
    throw Error(Fault::TrackerFailure, "general bump: neighbour lift could not meet the step bound");
}

RepPath hyperbolize_interface(const Representation& r0, int mobius_index) {
    const auto& p = r0.presentation;
    if (mobius_index < 0 || mobius_index >= p.crosscaps)
        throw Error(Fault::TemplateUnsupported, "mobius_index must name a crosscap generator");
    if (relation_residual(r0) > tol::rel) throw Error(Fault::RelationViolated, "input residual above tolerance");
    if (p.closed()) {
        if (p.handles > 0 && mobius_index != 0) throw Error(Fault::TemplateUnsupported, "mixed presentations use crosscap 0");
        std::vector<Representation> pert = perturb_stage(r0, mobius_index, identity_view, 7);
        append(pert, hyperbolize_closed(pert.back(), mobius_index, identity_view));
        return make_path(p, dedupe(std::move(pert)));
    }
    if (p == SurfacePresentation::nonorientable(1, 2)) return make_path(p, hyperbolize_projective_plane(r0));
    throw Error(Fault::TemplateUnsupported, "bounded templates other than the two-holed projective plane");
}

RepPath extend_over_mobius(const RepPath& base_path, const Representation& r0_full) {
    const auto& p = r0_full.presentation;
    if (p.crosscaps < 1 || (p.crosscaps > 1 && p.handles > 0))
        throw Error(Fault::TemplateUnsupported, "no Mobius split for this presentation");
    SurfacePresentation rest = p.crosscaps == 1 ? SurfacePresentation::orientable(p.handles, p.boundary + 1)
                                                : SurfacePresentation::nonorientable(p.crosscaps - 1, p.boundary + 1);
    if (!(base_path.presentation == rest)) throw Error(Fault::TemplateUnsupported, "base path is not on the remainder surface");
    if (base_path.samples.empty()) return make_path(p, {});
    const auto& first = base_path.samples.front().images;
    for (std::size_t j = 0; j + 1 < first.size(); ++j)
        if (distance(first[j], r0_full.images[j + 1]) > 1e-9)
            throw Error(Fault::TrackerFailure, "full representation does not restrict to the path start");
    std::vector<Representation> out;
    for (std::size_t i = 0; i < base_path.samples.size(); ++i) {
        const auto& imgs = base_path.samples[i].images;
        const PSL2& e = imgs.back();
        if (!hyperbolic(e)) throw Error(Fault::InterfaceNotHyperbolic, "interface not hyperbolic at sample " + std::to_string(i));
        Representation r{p, {psl_sqrt(positive_trace(e))}};
        r.images.insert(r.images.end(), imgs.begin(), imgs.end() - 1);
        out.push_back(std::move(r));
    }
    return {p, std::move(out), base_path.step_bound};
}

RepPath connect_representations(const Representation& r1, const Representation& r2, ConnectRoute route) {
    check_closed_pair(r1, r2);
    long c1 = sw_class_closed(r1).value, c2 = sw_class_closed(r2).value;
    if (c1 != c2) throw Error(Fault::DifferentClasses, "sw classes differ: " + std::to_string(c1) + " vs " + std::to_string(c2));
    if (rep_step(r1, r2) == 0) return make_path(r1.presentation, {r1});
    if (route != ConnectRoute::Roots) {
        try {
            return r1.presentation.crosscaps == 3 ? connect_genus3(r1, r2, c1) : connect_genus4(r1, r2, c1);
        } catch (const Error& e) {
            if (route == ConnectRoute::Mobius || e.fault() != Fault::TrackerFailure) throw;
        }
    }
    return connect_via_roots(r1, r2);
}

}  // namespace psl2

