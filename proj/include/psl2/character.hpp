#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "psl2/sl2.hpp"

namespace psl2 {

struct CharacterTriple {
    double x = 0, y = 0, zc = 0;
};

struct Pair {
    SL2 x, y;
};

CharacterTriple chi(const SL2& x, const SL2& y);
inline CharacterTriple chi(const Pair& p) { return chi(p.x, p.y); }
double kappa(const CharacterTriple& t);
bool in_forbidden_set(const CharacterTriple& t);
double character_distance(const CharacterTriple& s, const CharacterTriple& t);

// Largest Frobenius move of either matrix.
double pair_distance(const Pair& p, const Pair& q);

// Tangent coordinates at X are right translations X exp(xi), xi = (p, q, r) in (p, q; r, -p).
using Sl2Vec = std::array<double, 3>;

// Rows: d tr X, d tr Y, d tr XY along (xi, eta) in R^6.
std::array<std::array<double, 6>, 3> trace_jacobian(const Pair& p);

struct NewtonOptions {
    double tolerance = 1e-12;
    int max_iterations = 25;
    double max_step = 0.5;
    double rank_floor = 1e-7;
};

struct FiberSolution {
    Pair pair;
    int iterations = 0;
    double residual = 0;
};

FiberSolution solve_fiber_report(const CharacterTriple& target, const Pair& seed, const NewtonOptions& opts = {});
inline Pair solve_fiber(const CharacterTriple& target, const Pair& seed, const NewtonOptions& opts = {}) {
    return solve_fiber_report(target, seed, opts).pair;
}

struct TracePathOptions {
    double step_bound = 0.5;
    double eta_pair = 0.05;
    int max_doublings = 10;
    NewtonOptions newton;
};

struct TracePathLift {
    std::vector<CharacterTriple> triples;
    std::vector<Pair> pairs;
    std::vector<std::size_t> source_index;
};

TracePathLift lift_trace_path(const std::vector<CharacterTriple>& path, const Pair& start,
                              const TracePathOptions& opts = {});

// A pair with the given character, built in closed form. Covers every triple outside the forbidden set
// except the parabolic edges |x| = |y| = |zc| = 2.
Pair realize_character(const CharacterTriple& t);

struct Alignment {
    SL2 g;                     // unit |det| representative; g X0 g^-1 = X1 and g Y0 g^-1 = Y1
    bool orientation_preserving = true;  // det g > 0
    double residual = 0;
};

// Least-squares solution of g X0 = X1 g, g Y0 = Y1 g.
Alignment aligning_conjugator(const Pair& from, const Pair& to);

}  // namespace psl2
