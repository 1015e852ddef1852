#include "psl2/character.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

namespace psl2 {

CharacterTriple chi(const SL2& x, const SL2& y) { return {x.trace(), y.trace(), multiply(x, y).trace()}; }

double kappa(const CharacterTriple& t) {
    return t.x * t.x + t.y * t.y + t.zc * t.zc - t.x * t.y * t.zc - 2;
}

bool in_forbidden_set(const CharacterTriple& t) {
    const double cube = 2 + tol::classify;
    if (std::abs(t.x) > cube || std::abs(t.y) > cube || std::abs(t.zc) > cube) return false;
    double k = kappa(t);
    return k >= -2 - tol::classify && k <= 2 + tol::classify;
}

double character_distance(const CharacterTriple& s, const CharacterTriple& t) {
    return std::max({std::abs(s.x - t.x), std::abs(s.y - t.y), std::abs(s.zc - t.zc)});
}

double pair_distance(const Pair& p, const Pair& q) { return std::max(frobenius(p.x, q.x), frobenius(p.y, q.y)); }

namespace {

// Gradient of tr(M m) over m = (p, q; r, -p).
Sl2Vec trace_gradient(const SL2& m) { return {m.a - m.d, m.c, m.b}; }

Sl2Vec to_vec(const SL2& m) { return {m.a, m.b, m.c}; }

SL2 from_vec(double p, double q, double r) { return {p, q, r, -p}; }

SL2 sub(const SL2& x, const SL2& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d}; }

// Plain 2x2 product with no determinant bookkeeping.
SL2 mul(const SL2& x, const SL2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

double residual_of(const Pair& p, const CharacterTriple& target) { return character_distance(chi(p), target); }

using Mat36 = Eigen::Matrix<double, 3, 6>;

Mat36 jacobian_matrix(const Pair& p) {
    auto rows = trace_jacobian(p);
    Mat36 j;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 6; ++k) j(i, k) = rows[i][k];
    return j;
}

// Orthonormal basis of the conjugation directions in (xi, eta) coordinates.
Eigen::MatrixXd gauge_basis(const Pair& p) {
    Eigen::Matrix<double, 6, 3> g;
    const SL2 basis[3] = {from_vec(1, 0, 0), from_vec(0, 1, 0), from_vec(0, 0, 1)};
    for (int i = 0; i < 3; ++i) {
        Sl2Vec xi = to_vec(sub(mul(mul(invert(p.x), basis[i]), p.x), basis[i]));
        Sl2Vec eta = to_vec(sub(mul(mul(invert(p.y), basis[i]), p.y), basis[i]));
        for (int k = 0; k < 3; ++k) {
            g(k, i) = xi[k];
            g(3 + k, i) = eta[k];
        }
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 3>> svd(g, Eigen::ComputeThinU);
    Eigen::Vector3d s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < 3; ++i)
        if (s(i) > 1e-10 * std::max(1.0, s(0))) ++rank;
    return svd.matrixU().leftCols(rank);
}

Pair step_pair(const Pair& p, const Eigen::Matrix<double, 6, 1>& d, double scale) {
    return {multiply(p.x, exp_sl2(scale * d(0), scale * d(1), scale * d(2))),
            multiply(p.y, exp_sl2(scale * d(3), scale * d(4), scale * d(5)))};
}

}  // namespace

std::array<std::array<double, 6>, 3> trace_jacobian(const Pair& p) {
    Sl2Vec gx = trace_gradient(p.x), gy = trace_gradient(p.y);
    Sl2Vec gyx = trace_gradient(multiply(p.y, p.x)), gxy = trace_gradient(multiply(p.x, p.y));
    std::array<std::array<double, 6>, 3> j{};
    for (int k = 0; k < 3; ++k) {
        j[0][k] = gx[k];
        j[1][3 + k] = gy[k];
        j[2][k] = gyx[k];
        j[2][3 + k] = gxy[k];
    }
    return j;
}

FiberSolution solve_fiber_report(const CharacterTriple& target, const Pair& seed, const NewtonOptions& opts) {
    Pair cur = seed;
    double res = residual_of(cur, target);
    if (res <= opts.tolerance) return {cur, 0, res};
    double scale = std::max({1.0, std::abs(target.x), std::abs(target.y), std::abs(target.zc)});
    if (std::abs(kappa(target) - 2) <= tol::classify * scale * scale)
        throw Error(Fault::SingularFiber, "target lies on the reducible locus kappa = 2");
    int it = 0;
    while (res > opts.tolerance && it < opts.max_iterations) {
        Mat36 j = jacobian_matrix(cur);
        Eigen::MatrixXd g = gauge_basis(cur);
        Eigen::Matrix<double, 6, 6> proj = Eigen::Matrix<double, 6, 6>::Identity() - g * g.transpose();
        Mat36 jp = j * proj;
        Eigen::JacobiSVD<Mat36> svd(jp, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::Vector3d s = svd.singularValues();
        if (s(2) < opts.rank_floor * s(0) || s(2) < 1e-14)
            throw Error(Fault::SingularFiber, "trace Jacobian has rank < 3 (reducible locus)");
        CharacterTriple c = chi(cur);
        Eigen::Vector3d r(target.x - c.x, target.y - c.y, target.zc - c.zc);
        Eigen::Matrix<double, 6, 1> d = proj * svd.solve(r);
        double norm = d.norm();
        double step = norm > opts.max_step ? opts.max_step / norm : 1.0;
        ++it;
        bool improved = false;
        for (int h = 0; h < 12; ++h, step /= 2) {
            Pair trial = step_pair(cur, d, step);
            double tr = residual_of(trial, target);
            if (tr < res) {
                cur = trial;
                res = tr;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (res > std::max(opts.tolerance, 1e-10))
        throw Error(Fault::NoConvergence, "Newton residual " + std::to_string(res) + " after " +
                                              std::to_string(it) + " iterations");
    return {cur, it, res};
}

TracePathLift lift_trace_path(const std::vector<CharacterTriple>& path, const Pair& start,
                              const TracePathOptions& opts) {
    TracePathLift out;
    if (path.empty()) return out;
    for (std::size_t i = 0; i < path.size(); ++i)
        if (in_forbidden_set(path[i]))
            throw Error(Fault::ForbiddenSample, "trace sample " + std::to_string(i) + " is in the forbidden set");
    if (character_distance(chi(start), path[0]) > 1e-8)
        throw Error(Fault::TrackerFailure, "start pair does not match the first trace sample");
    for (std::size_t i = 1; i < path.size(); ++i)
        if (character_distance(path[i - 1], path[i]) > opts.step_bound)
            throw Error(Fault::StepTooCoarse, "trace step at " + std::to_string(i) + " exceeds the step bound");

    Pair cur = solve_fiber(path[0], start, opts.newton);
    out.triples.push_back(path[0]);
    out.pairs.push_back(cur);
    out.source_index.push_back(0);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const CharacterTriple& a = path[i - 1];
        const CharacterTriple& b = path[i];
        bool done = false;
        for (int level = 0; level <= opts.max_doublings && !done; ++level) {
            std::size_t m = std::size_t{1} << level;
            std::vector<CharacterTriple> tri;
            std::vector<Pair> pairs;
            Pair walk = cur;
            bool ok = true;
            for (std::size_t j = 1; j <= m; ++j) {
                double s = static_cast<double>(j) / static_cast<double>(m);
                CharacterTriple t{a.x + s * (b.x - a.x), a.y + s * (b.y - a.y), a.zc + s * (b.zc - a.zc)};
                if (in_forbidden_set(t))
                    throw Error(Fault::ForbiddenSample,
                                "segment " + std::to_string(i) + " passes through the forbidden set");
                Pair next;
                try {
                    next = solve_fiber(t, walk, opts.newton);
                } catch (const Error& e) {
                    if (e.fault() != Fault::NoConvergence) throw;
                    ok = false;
                    break;
                }
                if (pair_distance(walk, next) > opts.eta_pair) {
                    ok = false;
                    break;
                }
                tri.push_back(t);
                pairs.push_back(next);
                walk = next;
            }
            if (!ok) continue;
            for (std::size_t j = 0; j < tri.size(); ++j) {
                out.triples.push_back(tri[j]);
                out.pairs.push_back(pairs[j]);
                out.source_index.push_back(j + 1 == tri.size() ? i : i - 1);
            }
            out.triples.back() = b;
            cur = walk;
            done = true;
        }
        if (!done)
            throw Error(Fault::StepTooCoarse, "segment " + std::to_string(i) + " failed after maximal densification");
    }
    return out;
}

namespace {

// X = sign * diag(l, 1/l) with l + 1/l = |x| > 2.
Pair realize_hyperbolic_first(double x, double y, double z) {
    double sign = x > 0 ? 1 : -1;
    double ax = std::abs(x);
    double l = (ax + std::sqrt(ax * ax - 4)) / 2;
    double zz = sign * z;
    double p = (zz - y / l) / (l - 1 / l);
    double s = y - p;
    return {SL2{sign * l, 0, 0, sign / l}, SL2{p, 1, p * s - 1, s}};
}

// X a rotation with 2 cos(theta) = x, |x| < 2; needs kappa >= 2.
Pair realize_elliptic_first(double x, double y, double z) {
    double cs = x / 2, sn = std::sqrt(1 - cs * cs);
    double dd = (z - x * y / 2) / sn;
    double q = -dd / 2, r = dd / 2;
    double w2 = y * y / 4 - 1 + dd * dd / 4;
    if (w2 < -1e-9) throw Error(Fault::NotInImage, "triple is not the character of a real pair");
    double w = std::sqrt(std::max(0.0, w2));
    // tr(R Y) = cs (p + s) + sn (r - q) for R = (cs, sn; -sn, cs)
    return {SL2{cs, sn, -sn, cs}, SL2{y / 2 + w, q, r, y / 2 - w}};
}

}  // namespace

Pair realize_character(const CharacterTriple& t) {
    const double edge = 2 + 1e-9;
    Pair p;
    if (std::abs(t.x) > edge) {
        p = realize_hyperbolic_first(t.x, t.y, t.zc);
    } else if (std::abs(t.y) > edge) {
        Pair q = realize_hyperbolic_first(t.y, t.x, t.zc);
        p = {q.y, q.x};
    } else if (std::abs(t.zc) > edge) {
        // P = XY, Q = Y^-1: chi(P, Q) = (z, y, x)
        Pair q = realize_hyperbolic_first(t.zc, t.y, t.x);
        SL2 y = invert(q.y);
        p = {multiply(q.x, q.y), y};
    } else if (std::abs(t.x) < 2 - 1e-9) {
        p = realize_elliptic_first(t.x, t.y, t.zc);
    } else if (std::abs(t.y) < 2 - 1e-9) {
        Pair q = realize_elliptic_first(t.y, t.x, t.zc);
        p = {q.y, q.x};
    } else {
        throw Error(Fault::SingularFiber, "parabolic edge of the cube");
    }
    p.x = make_unit_det(p.x.a, p.x.b, p.x.c, p.x.d);
    p.y = make_unit_det(p.y.a, p.y.b, p.y.c, p.y.d);
    return p;
}

Alignment aligning_conjugator(const Pair& from, const Pair& to) {
    Eigen::Matrix<double, 8, 4> a = Eigen::Matrix<double, 8, 4>::Zero();
    auto add = [&](int row0, const SL2& m0, const SL2& m1) {
        const double x0[2][2] = {{m0.a, m0.b}, {m0.c, m0.d}};
        const double x1[2][2] = {{m1.a, m1.b}, {m1.c, m1.d}};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                int row = row0 + 2 * i + j;
                for (int k = 0; k < 2; ++k) {
                    a(row, 2 * i + k) += x0[k][j];  // (g X0)_ij
                    a(row, 2 * k + j) -= x1[i][k];  // (X1 g)_ij
                }
            }
    };
    add(0, from.x, to.x);
    add(4, from.y, to.y);
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 4>> svd(a, Eigen::ComputeFullV);
    Eigen::Vector4d v = svd.matrixV().col(3);
    double det = v(0) * v(3) - v(1) * v(2);
    if (std::abs(det) < 1e-14) throw Error(Fault::SingularFiber, "aligning conjugator is degenerate");
    v /= std::sqrt(std::abs(det));
    Alignment out;
    out.g = {v(0), v(1), v(2), v(3)};
    out.orientation_preserving = det > 0;
    SL2 ginv = out.orientation_preserving ? invert(out.g) : SL2{-out.g.d, out.g.b, out.g.c, -out.g.a};
    out.residual = std::max(frobenius(mul(mul(out.g, from.x), ginv), to.x), frobenius(mul(mul(out.g, from.y), ginv), to.y));
    return out;
}

}  // namespace psl2
