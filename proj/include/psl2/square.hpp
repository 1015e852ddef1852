#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "psl2/cover.hpp"

namespace psl2 {

SL2 square(const PSL2& p);
bool in_image_J(const SL2& k);
PSL2 psl_sqrt(const SL2& k);

// g J0 g^-1, an element squaring to -I.
PSL2 fiber_neg_identity(const PSL2& g);
// Upper-triangular g with fiber_neg_identity(g) = t, for a trace-zero t.
SL2 fiber_conjugator(const PSL2& t);

bool in_J_tilde(const CoverElement& x);
CoverElement cover_sqrt(const CoverElement& k);
// Lift of fiber_neg_identity(g) whose square is z^(2k+1).
CoverElement central_fiber_element(const PSL2& g, long k);

struct CrossingSpec {
    std::size_t index = 0;
    long k = 0;
    std::optional<PSL2> pre_hint, post_hint;
};

struct SquarePathOptions {
    double eta_step = 0.05;
    double eta_out = 0.05;
    std::size_t bridge_samples = 32;
    std::size_t cauchy_window = 16;
};

// roots[j] squares to squares[j]; source_index[j] is the input sample it came from.
// Bridge samples inserted at a crossing all carry the crossing's index.
struct SquarePathLift {
    std::vector<CoverElement> roots;
    std::vector<CoverElement> squares;
    std::vector<std::size_t> source_index;
};

SquarePathLift lift_square_path(const std::vector<CoverElement>& path,
                                const std::vector<CrossingSpec>& crossings,
                                const SquarePathOptions& opts = {});

// Elliptic path K_t = g_t R_(pi - t) g_t^-1 whose square roots fail to converge as t -> 0.
SL2 remark_conjugator(double t);
SL2 remark_element(double t);
PSL2 remark_root(double t);
std::vector<SL2> remark_counterexample(const std::vector<double>& tgrid);

}  // namespace psl2
