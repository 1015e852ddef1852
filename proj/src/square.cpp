#include "psl2/square.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace psl2 {

namespace {
constexpr double pi = std::numbers::pi;
}

SL2 square(const PSL2& p) { return multiply(p.rep(), p.rep()); }

bool in_image_J(const SL2& k) {
    return k.trace() > -2 + tol::classify || frobenius(k, -SL2::identity()) <= tol::classify;
}

PSL2 psl_sqrt(const SL2& k) {
    if (frobenius(k, -SL2::identity()) <= tol::classify)
        throw Error(Fault::NegIdentityFiber, "square roots of -I form a fiber; use fiber_neg_identity");
    double t = k.trace();
    if (!(t > -2 + tol::classify)) throw Error(Fault::NotInImage, "trace " + std::to_string(t) + " <= -2");
    double s = 1.0 / std::sqrt(t + 2);
    return PSL2(renormalize((k.a + 1) * s, k.b * s, k.c * s, (k.d + 1) * s));
}

PSL2 fiber_neg_identity(const PSL2& g) { return PSL2(conjugate(g.rep(), quarter_turn())); }

SL2 fiber_conjugator(const PSL2& t) {
    SL2 m = t.rep();
    if (m.c < 0) m = -m;
    if (!(m.c > 0)) throw Error(Fault::NotInImage, "element is not in the fiber over -I");
    double r = std::sqrt(m.c);
    return {1 / r, m.a / r, 0, r};
}

bool in_J_tilde(const CoverElement& x) {
    Region r = classify_region(x);
    bool odd = (r.index % 2) != 0;
    switch (r.kind) {
    case RegionKind::H:
    case RegionKind::Pplus:
    case RegionKind::Pminus: return !odd;
    default: return true;
    }
}

CoverElement cover_sqrt(const CoverElement& k) {
    if (conj_type(k.base()) == ConjugacyType::Identity)
        throw Error(Fault::CentralInput, "central element: choose a fiber element instead");
    if (!in_J_tilde(k)) throw Error(Fault::NotInImage, "element lies in an odd H/P region");
    CoverElement root = lift_base(psl_sqrt(project_sl2(k)));
    CoverElement sq = cover_mul(root, root);
    double defect = (k.lift() - sq.lift()) / pi;
    long n = std::lround(defect);
    if (std::abs(defect - n) > 1e-6 || n % 2 != 0)
        throw Error(Fault::NotInImage, "odd parity defect");
    return cover_mul(z_power(n / 2), root);
}

CoverElement central_fiber_element(const PSL2& g, long k) {
    CoverElement t = lift_base(fiber_neg_identity(g));
    CoverElement sq = cover_mul(t, t);
    long m = std::lround(sq.lift() / pi);
    return cover_mul(z_power((2 * k + 1 - m) / 2), t);
}

namespace {

// Nearest trace-zero element, used to read a conjugator off a root close to the fiber.
PSL2 trace_free_part(const PSL2& p) {
    SL2 m = p.rep();
    double h = m.trace() / 2;
    double a = m.a - h, d = m.d - h;
    double det = a * d - m.b * m.c;
    if (!(det > 0)) throw Error(Fault::DivergentApproach, "root is not elliptic near the crossing");
    return PSL2(renormalize(a, m.b, m.c, d));
}

SL2 interpolate_upper(const SL2& g0, const SL2& g1, double s) {
    // g = [[1/r, x/r], [0, r]]: interpolate x and log r linearly.
    double lr0 = std::log(g0.d), lr1 = std::log(g1.d);
    double x0 = g0.b * g0.d, x1 = g1.b * g1.d;
    double r = std::exp((1 - s) * lr0 + s * lr1);
    double x = (1 - s) * x0 + s * x1;
    return {1 / r, x / r, 0, r};
}

void cauchy_window(const std::vector<CoverElement>& roots, std::size_t lo, std::size_t hi, double bound) {
    for (std::size_t i = lo; i < hi; ++i)
        for (std::size_t j = i + 1; j < hi; ++j)
            if (cover_distance(roots[i], roots[j]) > bound)
                throw Error(Fault::DivergentApproach,
                            "square roots near the crossing do not settle (samples " + std::to_string(i) +
                                ", " + std::to_string(j) + ")");
}

}  // namespace

SquarePathLift lift_square_path(const std::vector<CoverElement>& path,
                                const std::vector<CrossingSpec>& crossings,
                                const SquarePathOptions& opts) {
    const std::size_t n = path.size();
    std::vector<const CrossingSpec*> flag(n, nullptr);
    for (const auto& c : crossings) {
        if (c.index >= n) throw Error(Fault::NotInImage, "crossing index out of range");
        if (cover_distance(path[c.index], z_power(2 * c.k + 1)) > tol::central)
            throw Error(Fault::NotInImage, "flagged sample " + std::to_string(c.index) + " is not z^(2k+1)");
        flag[c.index] = &c;
    }
    for (std::size_t i = 1; i < n; ++i)
        if (cover_distance(path[i - 1], path[i]) > opts.eta_step)
            throw Error(Fault::StepTooCoarse, "input step at " + std::to_string(i) + " exceeds eta_step");

    std::vector<CoverElement> plain(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!flag[i]) plain[i] = cover_sqrt(path[i]);

    SquarePathLift out;
    auto push = [&](const CoverElement& r, std::size_t src) {
        out.roots.push_back(r);
        out.squares.push_back(cover_mul(r, r));
        out.source_index.push_back(src);
    };

    std::size_t segment_start = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!flag[i]) {
            push(plain[i], i);
            continue;
        }
        const CrossingSpec& c = *flag[i];
        std::size_t w = opts.cauchy_window;
        std::size_t lo = i > segment_start + w ? i - w : segment_start;
        cauchy_window(plain, lo, i, 4 * opts.eta_out);
        std::size_t hi = i + 1;
        while (hi < n && hi < i + 1 + w && !flag[hi]) ++hi;
        cauchy_window(plain, i + 1, hi, 4 * opts.eta_out);

        std::optional<SL2> g_pre, g_post;
        if (c.pre_hint) g_pre = fiber_conjugator(fiber_neg_identity(*c.pre_hint));
        else if (i > 0 && !flag[i - 1]) g_pre = fiber_conjugator(trace_free_part(plain[i - 1].base()));
        if (c.post_hint) g_post = fiber_conjugator(fiber_neg_identity(*c.post_hint));
        else if (i + 1 < n && !flag[i + 1]) g_post = fiber_conjugator(trace_free_part(plain[i + 1].base()));
        if (!g_pre && !g_post) g_pre = g_post = SL2::identity();
        if (!g_pre) g_pre = g_post;
        if (!g_post) g_post = g_pre;

        const CoverElement* before = i > 0 ? &out.roots.back() : nullptr;
        const CoverElement* after = (i + 1 < n && !flag[i + 1]) ? &plain[i + 1] : nullptr;
        std::size_t m = std::max<std::size_t>(opts.bridge_samples, 1);
        std::vector<CoverElement> bridge;
        for (;;) {
            bridge.clear();
            for (std::size_t j = 0; j < m; ++j) {
                double s = m == 1 ? 0.5 : static_cast<double>(j) / static_cast<double>(m - 1);
                bridge.push_back(central_fiber_element(PSL2(interpolate_upper(*g_pre, *g_post, s)), c.k));
            }
            double worst = 0;
            for (std::size_t j = 1; j < m; ++j) worst = std::max(worst, cover_distance(bridge[j - 1], bridge[j]));
            if (worst <= opts.eta_out) break;
            if (m > (1u << 14)) throw Error(Fault::StepTooCoarse, "bridge cannot be densified to eta_out");
            m *= 2;
        }
        if (before && cover_distance(*before, bridge.front()) > opts.eta_out)
            throw Error(Fault::StepTooCoarse, "gap entering the crossing at " + std::to_string(i));
        if (after && cover_distance(bridge.back(), *after) > opts.eta_out)
            throw Error(Fault::StepTooCoarse, "gap leaving the crossing at " + std::to_string(i));
        for (const auto& b : bridge) push(b, i);
        segment_start = i + 1;
    }
    for (std::size_t j = 1; j < out.roots.size(); ++j)
        if (cover_distance(out.roots[j - 1], out.roots[j]) > opts.eta_out)
            throw Error(Fault::StepTooCoarse, "output step at " + std::to_string(j) + " exceeds eta_out");
    return out;
}

SL2 remark_conjugator(double t) {
    double s = std::sin(1 / t), c = std::cos(1 / t);
    return renormalize(std::sqrt(2.0) + s, c, c, std::sqrt(2.0) - s);
}

SL2 remark_element(double t) { return conjugate(remark_conjugator(t), rotation(pi - t)); }

PSL2 remark_root(double t) { return PSL2(conjugate(remark_conjugator(t), rotation((pi - t) / 2))); }

std::vector<SL2> remark_counterexample(const std::vector<double>& tgrid) {
    std::vector<SL2> out;
    out.reserve(tgrid.size());
    for (double t : tgrid) {
        if (!(t > 0 && t <= 1)) throw Error(Fault::NotInImage, "grid value outside (0, 1]");
        out.push_back(remark_element(t));
    }
    return out;
}

}  // namespace psl2
