#include "psl2/sl2.hpp"

#include <cmath>

namespace psl2 {

const char* fault_name(Fault f) {
    switch (f) {
    case Fault::NonPositiveDeterminant: return "NonPositiveDeterminant";
    case Fault::NonFinite: return "NonFinite";
    case Fault::DeterminantDrift: return "DeterminantDrift";
    case Fault::NotHyperbolic: return "NotHyperbolic";
    case Fault::AmbiguousRegion: return "AmbiguousRegion";
    case Fault::NotInImage: return "NotInImage";
    case Fault::NegIdentityFiber: return "NegIdentityFiber";
    case Fault::CentralInput: return "CentralInput";
    case Fault::DivergentApproach: return "DivergentApproach";
    case Fault::StepTooCoarse: return "StepTooCoarse";
    case Fault::SingularFiber: return "SingularFiber";
    case Fault::NoConvergence: return "NoConvergence";
    case Fault::ForbiddenSample: return "ForbiddenSample";
    case Fault::RelationViolated: return "RelationViolated";
    case Fault::NotCentral: return "NotCentral";
    case Fault::NotInW: return "NotInW";
    case Fault::InterfaceNotHyperbolic: return "InterfaceNotHyperbolic";
    case Fault::TargetUnreachable: return "TargetUnreachable";
    case Fault::TargetLeavesHyperbolic: return "TargetLeavesHyperbolic";
    case Fault::TrackerFailure: return "TrackerFailure";
    case Fault::WrongStartClass: return "WrongStartClass";
    case Fault::NotInCommutatorImage: return "NotInCommutatorImage";
    case Fault::ClassTooHigh: return "ClassTooHigh";
    case Fault::TemplateUnsupported: return "TemplateUnsupported";
    case Fault::DifferentClasses: return "DifferentClasses";
    case Fault::ParseError: return "ParseError";
    }
    return "Unknown";
}

std::string to_string(ConjugacyType t) {
    switch (t) {
    case ConjugacyType::Elliptic: return "elliptic";
    case ConjugacyType::Parabolic: return "parabolic";
    case ConjugacyType::Hyperbolic: return "hyperbolic";
    case ConjugacyType::Identity: return "central";
    }
    return "?";
}

namespace {

bool finite4(double a, double b, double c, double d) {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
}

SL2 scaled(double a, double b, double c, double d) {
    if (!finite4(a, b, c, d)) throw Error(Fault::NonFinite, "matrix entry is not finite");
    double det = a * d - b * c;
    if (!(det > 0)) throw Error(Fault::NonPositiveDeterminant, "determinant " + std::to_string(det));
    double s = 1.0 / std::sqrt(det);
    return {a * s, b * s, c * s, d * s};
}

// Product renormalized only when the determinant has drifted past its own rounding noise.
SL2 tidy(const SL2& m) {
    double det = m.det();
    if (std::abs(det - 1) <= 1e-14 * (std::abs(m.a * m.d) + std::abs(m.b * m.c))) {
        if (!finite4(m.a, m.b, m.c, m.d)) throw Error(Fault::NonFinite, "overflow in product");
        return m;
    }
    return scaled(m.a, m.b, m.c, m.d);
}

}  // namespace

SL2 make_unit_det(double a, double b, double c, double d) {
    if (!finite4(a, b, c, d)) throw Error(Fault::NonFinite, "matrix entry is not finite");
    double det = a * d - b * c;
    if (!(det > 0)) throw Error(Fault::NonPositiveDeterminant, "determinant " + std::to_string(det));
    if (std::abs(det - 1) > tol::det_drift)
        throw Error(Fault::DeterminantDrift, "determinant " + std::to_string(det) + " too far from 1");
    return scaled(a, b, c, d);
}

SL2 renormalize(double a, double b, double c, double d) { return scaled(a, b, c, d); }

SL2 multiply(const SL2& x, const SL2& y) {
    return tidy({x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                 x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d});
}

SL2 invert(const SL2& x) { return {x.d, -x.b, -x.c, x.a}; }

SL2 conjugate(const SL2& g, const SL2& x) { return multiply(multiply(g, x), invert(g)); }

SL2 commutator(const SL2& x, const SL2& y) {
    return multiply(multiply(x, y), multiply(invert(x), invert(y)));
}

PSL2::PSL2(const SL2& m) : rep_(m) {
    const double t = tol::trace_sign;
    bool flip;
    if (m.trace() > t) flip = false;
    else if (m.trace() < -t) flip = true;
    else if (std::abs(m.a) > t) flip = m.a < 0;
    else if (std::abs(m.c) > t) flip = m.c < 0;
    else flip = m.b < 0;
    if (flip) rep_ = -m;
}

PSL2 projectivize(const SL2& m) { return PSL2(m); }

PSL2 operator*(const PSL2& x, const PSL2& y) { return PSL2(multiply(x.rep(), y.rep())); }
PSL2 inverse(const PSL2& x) { return PSL2(invert(x.rep())); }
PSL2 conjugate(const PSL2& g, const PSL2& x) { return PSL2(conjugate(g.rep(), x.rep())); }

double frobenius(const SL2& x, const SL2& y) {
    return std::hypot(std::hypot(x.a - y.a, x.b - y.b), std::hypot(x.c - y.c, x.d - y.d));
}

double distance(const PSL2& x, const PSL2& y) {
    return std::min(frobenius(x.rep(), y.rep()), frobenius(x.rep(), -y.rep()));
}

double distance_to_identity(const SL2& m) {
    return std::min(frobenius(m, SL2::identity()), frobenius(m, -SL2::identity()));
}

bool is_identity(const PSL2& p, double eps) { return distance_to_identity(p.rep()) <= eps; }

ConjugacyType conj_type(const PSL2& p) {
    if (is_identity(p)) return ConjugacyType::Identity;
    double t = std::abs(p.trace());
    if (t > 2 + tol::classify) return ConjugacyType::Hyperbolic;
    if (t < 2 - tol::classify) return ConjugacyType::Elliptic;
    return ConjugacyType::Parabolic;
}

SL2 rotation(double theta) {
    double c = std::cos(theta), s = std::sin(theta);
    return {c, s, -s, c};
}

SL2 hyperbolic(double t) {
    double c = std::cosh(t), s = std::sinh(t);
    return {c, s, s, c};
}

SL2 parabolic(double u) { return {1, u, 0, 1}; }

SL2 quarter_turn() { return {0, -1, 1, 0}; }

SL2 exp_sl2(double p, double q, double r) {
    double delta = p * p + q * r;
    double ch, sh;
    if (std::abs(delta) < 1e-8) {
        ch = 1 + delta / 2 + delta * delta / 24;
        sh = 1 + delta / 6 + delta * delta / 120;
    } else if (delta > 0) {
        double w = std::sqrt(delta);
        ch = std::cosh(w);
        sh = std::sinh(w) / w;
    } else {
        double w = std::sqrt(-delta);
        ch = std::cos(w);
        sh = std::sin(w) / w;
    }
    return renormalize(ch + sh * p, sh * q, sh * r, ch - sh * p);
}

SL2 random_sl2(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        double a = n(rng), b = n(rng), c = n(rng), d = n(rng);
        if (a * d - b * c > 0.01) return renormalize(a, b, c, d);
    }
}

PSL2 random_psl2(Rng& rng) { return PSL2(random_sl2(rng)); }

}  // namespace psl2
