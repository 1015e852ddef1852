#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "psl2/classes.hpp"

namespace psl2 {

using Word = std::vector<Letter>;

SL2 evaluate(const Word& w, const std::vector<SL2>& gens);

// W = target, or tr W = value.
struct WordConstraint {
    Word word;
    bool trace_only = false;
    SL2 target;
    double trace = 0;

    static WordConstraint equals(Word w, const SL2& t) { return {std::move(w), false, t, 0}; }
    static WordConstraint trace_of(Word w, double v) { return {std::move(w), true, SL2::identity(), v}; }
};

struct TrackerOptions {
    double tolerance = 1e-11;
    double accept = 1e-9;
    int max_iterations = 30;
    double max_step = 0.5;
    double rank_floor = 1e-9;
};

// Newton with minimum-norm steps g_j <- g_j exp(xi_j) on the generators not frozen.
std::vector<SL2> solve_words(const std::vector<WordConstraint>& cs, std::vector<SL2> gens,
                             const std::vector<bool>& frozen = {}, const TrackerOptions& opts = {});

double constraint_residual(const std::vector<WordConstraint>& cs, const std::vector<SL2>& gens);

// Largest generator-wise PSL distance.
double rep_step(const Representation& a, const Representation& b);

// Adaptive continuation over t in [0, 1]. advance(t, state) returns the state at t, seeded by the state
// at the previous accepted parameter, or nullopt on failure. Steps are accepted when the observed
// representations move by at most `bound`.
template <class State>
struct Continuation {
    std::function<std::optional<State>(double, const State&)> advance;
    std::function<Representation(const State&)> observe;
    double bound = 0.05;
    double first_step = 0.05;
    double min_step = 1e-10;
    std::size_t budget = 1u << 14;
};

template <class State>
struct ContinuationResult {
    std::vector<double> params;
    std::vector<State> states;
    std::vector<Representation> reps;
};

template <class State>
ContinuationResult<State> run_continuation(const Continuation<State>& c, const State& start, const char* stage);

// Conjugation path from the identity to g in SL(2,R): polar factor R_{t alpha} P^t.
SL2 conjugator_path(const SL2& g, double t);

// Iwasawa coordinates of a PSL element: rotation angle (mod pi), log scale, shear.
struct Iwasawa {
    double theta, u, v;
};
Iwasawa iwasawa(const PSL2& g);
PSL2 from_iwasawa(const Iwasawa& w);
PSL2 iwasawa_interpolate(const PSL2& a, const PSL2& b, double t);

}  // namespace psl2

#include "psl2/tracker_impl.hpp"
