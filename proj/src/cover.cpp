#include "psl2/cover.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace psl2 {

namespace {

constexpr double pi = std::numbers::pi;

double mod_pi(double t) {
    double r = std::fmod(t, pi);
    if (r < 0) r += pi;
    if (r >= pi) r = 0;
    return r;
}

// Angle swept by the image of direction 0 when the source direction turns by t0 in [0, pi).
// The cross product of the two image vectors is det * sin(t0) = sin(t0), so its sign is exact.
double sweep(const SL2& m, double t0) {
    double c = std::cos(t0), s = std::sin(t0);
    double vx = m.a * c + m.b * s, vy = m.c * c + m.d * s;
    double dot = m.a * vx + m.c * vy;
    return std::atan2(s, dot);
}

double snapped(const PSL2& base, double lift) {
    double alpha = base_angle(base);
    return alpha + pi * std::round((lift - alpha) / pi);
}

}  // namespace

double base_angle(const SL2& m) { return mod_pi(std::atan2(m.c, m.a)); }
double base_angle(const PSL2& p) { return base_angle(p.rep()); }

CoverElement::CoverElement(const PSL2& base, double lift) : base_(base) {
    if (!std::isfinite(lift)) throw Error(Fault::NonFinite, "lift is not finite");
    lift_ = snapped(base, lift);
    if (std::abs(lift_ - lift) > 1e-6)
        throw Error(Fault::NonFinite, "lift inconsistent with base angle");
}

CoverElement unchecked_cover(const PSL2& base, double lift) {
    if (!std::isfinite(lift)) throw Error(Fault::NonFinite, "lift is not finite");
    CoverElement x;
    x.base_ = base;
    x.lift_ = snapped(base, lift);
    return x;
}

std::string to_string(const Region& r) {
    std::string idx = "(" + std::to_string(r.index) + ")";
    switch (r.kind) {
    case RegionKind::E: return "E" + idx;
    case RegionKind::H: return "H" + idx;
    case RegionKind::Pplus: return "P+" + idx;
    case RegionKind::Pminus: return "P-" + idx;
    case RegionKind::Z: return "Z" + idx;
    }
    return "?";
}

double cover_apply(const CoverElement& x, double t) {
    double n = std::floor(t / pi);
    double t0 = t - n * pi;
    if (t0 >= pi) { t0 -= pi; n += 1; }
    if (t0 < 0) t0 = 0;
    return x.lift() + sweep(x.base().rep(), t0) + n * pi;
}

CoverElement lift_base(const PSL2& p) { return unchecked_cover(p, base_angle(p)); }

CoverElement cover_mul(const CoverElement& x, const CoverElement& y) {
    return unchecked_cover(x.base() * y.base(), cover_apply(x, y.lift()));
}

CoverElement cover_inv(const CoverElement& x) {
    PSL2 inv = inverse(x.base());
    double beta = base_angle(inv);
    double j = std::round(cover_apply(x, beta) / pi);
    return unchecked_cover(inv, beta - j * pi);
}

CoverElement z_power(long k) { return unchecked_cover(PSL2::identity(), pi * static_cast<double>(k)); }

SL2 project_sl2(const CoverElement& x) {
    const SL2& m = x.base().rep();
    double ang = std::atan2(m.c, m.a);
    return std::cos(ang - x.lift()) > 0 ? m : -m;
}

double cover_trace(const CoverElement& x) { return project_sl2(x).trace(); }

CoverElement cover_commutator(const CoverElement& x, const CoverElement& y) {
    return cover_mul(cover_mul(x, y), cover_mul(cover_inv(x), cover_inv(y)));
}

CoverElement cover_conjugate(const CoverElement& g, const CoverElement& x) {
    return cover_mul(cover_mul(g, x), cover_inv(g));
}

std::pair<double, double> displacement_extrema(const CoverElement& x) {
    const SL2& m = x.base().rep();
    double p = (m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d) / 2;
    double q = (m.a * m.a + m.c * m.c - m.b * m.b - m.d * m.d) / 2;
    double r = m.a * m.b + m.c * m.d;
    double rad = std::hypot(q, r);
    if (rad <= tol::rotation) return {x.lift() / pi, x.lift() / pi};
    double phi = std::atan2(r, q);
    double w = std::acos(std::clamp((1 - p) / rad, -1.0, 1.0));
    double t1 = (phi + w) / 2, t2 = (phi - w) / 2;
    double d1 = cover_apply(x, t1) - t1, d2 = cover_apply(x, t2) - t2;
    return {std::min(d1, d2) / pi, std::max(d1, d2) / pi};
}

Region classify_region(const CoverElement& x) {
    if (conj_type(x.base()) == ConjugacyType::Identity)
        return {RegionKind::Z, static_cast<int>(std::lround(x.lift() / pi))};
    auto [lo, hi] = displacement_extrema(x);
    double ilo = std::round(lo), ihi = std::round(hi);
    bool lo_int = std::abs(lo - ilo) <= tol::region;
    bool hi_int = std::abs(hi - ihi) <= tol::region;
    if (lo_int && hi_int)
        throw Error(Fault::AmbiguousRegion, "both displacement extrema sit on integers");
    if (lo_int) return {RegionKind::Pplus, static_cast<int>(ilo)};
    if (hi_int) return {RegionKind::Pminus, static_cast<int>(ihi)};
    double flo = std::floor(lo), fhi = std::floor(hi);
    if (flo == fhi) return {RegionKind::E, static_cast<int>(flo)};
    return {RegionKind::H, static_cast<int>(fhi)};
}

CoverElement canonical_hyperbolic_lift(const PSL2& g) {
    if (conj_type(g) != ConjugacyType::Hyperbolic)
        throw Error(Fault::NotHyperbolic, "canonical lift needs a hyperbolic element");
    const SL2& m = g.rep();
    double tr = m.trace();
    double lam = (tr + std::copysign(std::sqrt(tr * tr - 4), tr)) / 2;
    double ux = m.b, uy = lam - m.a;
    double vx = lam - m.d, vy = m.c;
    if (std::hypot(vx, vy) > std::hypot(ux, uy)) { ux = vx; uy = vy; }
    double tf = mod_pi(std::atan2(uy, ux));
    return unchecked_cover(g, tf - sweep(m, tf));
}

double cover_distance(const CoverElement& x, const CoverElement& y) {
    return distance(x.base(), y.base()) + std::abs(x.lift() - y.lift());
}

}  // namespace psl2
