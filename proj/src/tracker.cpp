#include "psl2/tracker.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "psl2/character.hpp"

namespace psl2 {
namespace {

SL2 letter_value(const Letter& l, const std::vector<SL2>& gens) {
    const SL2& g = gens.at(static_cast<std::size_t>(l.generator));
    return l.inverse ? invert(g) : g;
}

// Columns: (p, q, r) coordinates of P E_k P^-1 for the basis (1,0;0,-1), (0,1;0,0), (0,0;1,0).
Eigen::Matrix3d adjoint(const SL2& p) {
    SL2 pi = invert(p);
    Eigen::Matrix3d m;
    auto col = [&](int k, double e11, double e12, double e21) {
        // P E P^-1 with E = (e11, e12; e21, -e11)
        double x11 = p.a * e11 + p.b * e21, x12 = p.a * e12 - p.b * e11;
        double x21 = p.c * e11 + p.d * e21, x22 = p.c * e12 - p.d * e11;
        double r11 = x11 * pi.a + x12 * pi.c, r12 = x11 * pi.b + x12 * pi.d;
        double r21 = x21 * pi.a + x22 * pi.c;
        m(0, k) = r11;
        m(1, k) = r12;
        m(2, k) = r21;
    };
    col(0, 1, 0, 0);
    col(1, 0, 1, 0);
    col(2, 0, 0, 1);
    return m;
}

double single_residual(const WordConstraint& c, const SL2& w) {
    return c.trace_only ? std::abs(w.trace() - c.trace) : frobenius(w, c.target);
}

}  // namespace

SL2 evaluate(const Word& w, const std::vector<SL2>& gens) {
    SL2 out = SL2::identity();
    for (const auto& l : w) out = out * letter_value(l, gens);
    return out;
}

double constraint_residual(const std::vector<WordConstraint>& cs, const std::vector<SL2>& gens) {
    double r = 0;
    for (const auto& c : cs) r = std::max(r, single_residual(c, evaluate(c.word, gens)));
    return r;
}

std::vector<SL2> solve_words(const std::vector<WordConstraint>& cs, std::vector<SL2> gens,
                             const std::vector<bool>& frozen, const TrackerOptions& opts) {
    std::vector<int> slot(gens.size(), -1);
    int nfree = 0;
    for (std::size_t j = 0; j < gens.size(); ++j)
        if (frozen.empty() || !frozen[j]) slot[j] = nfree++;
    int rows = 0;
    for (const auto& c : cs) rows += c.trace_only ? 1 : 3;
    if (rows == 0) return gens;

    double res = constraint_residual(cs, gens);
    for (int it = 0; it < opts.max_iterations && res > opts.tolerance; ++it) {
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, 3 * nfree);
        Eigen::VectorXd rhs(rows);
        int row = 0;
        for (const auto& c : cs) {
            SL2 w = evaluate(c.word, gens);
            // Right-trivialized derivative: dW W^-1 = sum over letters of Ad(prefix)(+-xi).
            Eigen::MatrixXd block = Eigen::MatrixXd::Zero(3, 3 * nfree);
            SL2 prefix = SL2::identity();
            for (const auto& l : c.word) {
                int s = slot[static_cast<std::size_t>(l.generator)];
                SL2 g = letter_value(l, gens);
                if (s >= 0) {
                    if (l.inverse)
                        block.middleCols(3 * s, 3) -= adjoint(prefix);
                    else
                        block.middleCols(3 * s, 3) += adjoint(prefix * g);
                }
                prefix = prefix * g;
            }
            if (c.trace_only) {
                Eigen::RowVector3d grad(w.a - w.d, w.c, w.b);
                jac.row(row) = grad * block;
                rhs(row) = c.trace - w.trace();
                row += 1;
            } else {
                SL2 m = c.target * invert(w);
                jac.middleRows(row, 3) = block;
                rhs(row) = (m.a - m.d) / 2;
                rhs(row + 1) = m.b;
                rhs(row + 2) = m.c;
                row += 3;
            }
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        int rank = 0;
        for (int k = 0; k < sv.size(); ++k)
            if (sv(k) > opts.rank_floor * std::max(1.0, sv(0))) ++rank;
        if (rank < std::min(rows, 3 * nfree))
            throw Error(Fault::SingularFiber, "constraint jacobian lost rank");
        svd.setThreshold(opts.rank_floor);
        Eigen::VectorXd step = svd.solve(rhs);
        double norm = step.norm();
        if (norm > opts.max_step) step *= opts.max_step / norm;

        double lambda = 1;
        bool improved = false;
        for (int half = 0; half < 12; ++half, lambda /= 2) {
            std::vector<SL2> trial = gens;
            for (std::size_t j = 0; j < gens.size(); ++j) {
                int s = slot[j];
                if (s < 0) continue;
                trial[j] = gens[j] * exp_sl2(lambda * step(3 * s), lambda * step(3 * s + 1), lambda * step(3 * s + 2));
            }
            double r = constraint_residual(cs, trial);
            if (r < res) {
                gens = std::move(trial);
                res = r;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (!(res <= opts.accept)) throw Error(Fault::NoConvergence, "word constraints residual " + std::to_string(res));
    return gens;
}

double rep_step(const Representation& a, const Representation& b) {
    double s = 0;
    for (std::size_t j = 0; j < a.images.size(); ++j) s = std::max(s, distance(a.images[j], b.images[j]));
    return s;
}

SL2 conjugator_path(const SL2& g, double t) {
    // g = R P with P symmetric positive definite
    Eigen::Matrix2d m;
    m << g.a, g.b, g.c, g.d;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m.transpose() * m);
    Eigen::Vector2d ev = es.eigenvalues().cwiseSqrt();
    Eigen::Matrix2d v = es.eigenvectors();
    Eigen::Matrix2d p = v * ev.asDiagonal() * v.transpose();
    Eigen::Matrix2d r = m * p.inverse();
    double alpha = std::atan2(r(1, 0), r(0, 0));
    Eigen::Vector2d evt(std::pow(ev(0), t), std::pow(ev(1), t));
    Eigen::Matrix2d pt = v * evt.asDiagonal() * v.transpose();
    double c = std::cos(t * alpha), s = std::sin(t * alpha);
    Eigen::Matrix2d rt;
    rt << c, -s, s, c;
    Eigen::Matrix2d out = rt * pt;
    return renormalize(out(0, 0), out(0, 1), out(1, 0), out(1, 1));
}

Iwasawa iwasawa(const PSL2& g) {
    // g = K(theta) A(u) N(v): first column of A N is (e^u, 0)
    const SL2& m = g.rep();
    double r = std::hypot(m.a, m.c);
    double theta = std::atan2(m.c, m.a);
    double c = std::cos(theta), s = std::sin(theta);
    // K^-1 g = (r, w; 0, 1/r)
    double w = c * m.b + s * m.d;
    return {theta, std::log(r), w / r};
}

PSL2 from_iwasawa(const Iwasawa& w) {
    double c = std::cos(w.theta), s = std::sin(w.theta);
    double e = std::exp(w.u);
    // (c, -s; s, c) (e, e v; 0, 1/e)
    SL2 an{e, e * w.v, 0, 1 / e};
    SL2 k{c, -s, s, c};
    return PSL2(k * an);
}

PSL2 iwasawa_interpolate(const PSL2& a, const PSL2& b, double t) {
    Iwasawa x = iwasawa(a), y = iwasawa(b);
    // theta is defined mod pi on PSL: shortest arc
    double d = std::remainder(y.theta - x.theta, std::numbers::pi);
    return from_iwasawa({x.theta + t * d, x.u + t * (y.u - x.u), x.v + t * (y.v - x.v)});
}

}  // namespace psl2
