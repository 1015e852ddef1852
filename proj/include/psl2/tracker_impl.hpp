#pragma once

#include <algorithm>
#include <string>

namespace psl2 {

template <class State>
ContinuationResult<State> run_continuation(const Continuation<State>& c, const State& start, const char* stage) {
    ContinuationResult<State> out;
    out.params.push_back(0);
    out.states.push_back(start);
    out.reps.push_back(c.observe(start));
    double t = 0, h = c.first_step;
    while (t < 1) {
        if (out.states.size() > c.budget)
            throw Error(Fault::TrackerFailure, std::string(stage) + ": sample budget exhausted at t=" + std::to_string(t));
        double next = std::min(1.0, t + h);
        std::optional<State> s;
        try {
            s = c.advance(next, out.states.back());
        } catch (const Error& e) {
            if (e.fault() != Fault::NoConvergence && e.fault() != Fault::SingularFiber &&
                e.fault() != Fault::NotInImage && e.fault() != Fault::NegIdentityFiber)
                throw;
            s.reset();
        }
        bool ok = false;
        Representation rep;
        if (s) {
            rep = c.observe(*s);
            ok = rep_step(out.reps.back(), rep) <= c.bound;
        }
        if (!ok) {
            h /= 2;
            if (h < c.min_step)
                throw Error(Fault::TrackerFailure, std::string(stage) + ": step collapsed at t=" + std::to_string(t));
            continue;
        }
        t = next;
        out.params.push_back(t);
        out.states.push_back(*s);
        out.reps.push_back(rep);
        h = std::min(h * 1.5, 0.25);
    }
    return out;
}

}  // namespace psl2
