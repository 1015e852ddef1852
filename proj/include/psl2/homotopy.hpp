#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psl2/character.hpp"
#include "psl2/classes.hpp"
#include "psl2/square.hpp"

namespace psl2 {

struct RepPath {
    SurfacePresentation presentation;
    std::vector<Representation> samples;
    double step_bound = 0.05;
};

struct PathBounds {
    double residual = 1e-6;
    double step = 0.05;
    bool boundary_hyperbolic = false;  // count non-hyperbolic boundary samples as failures
};

struct PathReport {
    std::size_t samples = 0;
    double max_residual = 0;
    std::size_t residual_index = 0;
    double max_step = 0;
    std::size_t step_index = 0;
    std::vector<std::size_t> boundary_violations;
    std::optional<ClassValue> start_class, end_class;
    std::optional<std::size_t> first_failure;
    bool pass = false;
};

PathReport verify_rep_path(const RepPath& p, const PathBounds& bounds = {});
void write_report(std::ostream& os, const PathReport& r);

void write_rep_path(std::ostream& os, const RepPath& p);
RepPath read_rep_path(std::istream& is);

// Moves the first boundary generator along `target` (sample by sample) keeping every other boundary
// trace and every handle commutator trace fixed.
RepPath lift_boundary_path(const Representation& r0, const std::vector<PSL2>& target);

// A bump path and its boundary cover path: `boundary[j]` is the lift whose z^epsilon shift is tracked.
struct BumpPath {
    RepPath path;
    std::vector<CoverElement> boundary;
    int epsilon = 1;
};

BumpPath euler_bump_pants(const Representation& r0);
BumpPath euler_bump_torus(const Representation& r0);
RepPath euler_bump_general(const Representation& r0);

std::pair<PSL2, PSL2> commutator_solve(const CoverElement& kt);

inline constexpr double hyperbolize_margin = 0.5;

// Drives the square of crosscap `mobius_index` to a hyperbolic element of trace 2 + margin.
RepPath hyperbolize_interface(const Representation& r0, int mobius_index);

// base_path lives on the remainder of the Mobius split of r0_full's presentation (see check_additivity).
RepPath extend_over_mobius(const RepPath& base_path, const Representation& r0_full);

// Mobius: hyperbolize the first crosscap's square and connect the complement. Roots: move the free
// generators to a fixed hub while the last crosscap follows as a principal square root. Automatic tries
// Mobius and falls back to Roots when a tracking stage fails.
enum class ConnectRoute { Automatic, Mobius, Roots };

RepPath connect_representations(const Representation& r1, const Representation& r2,
                                ConnectRoute route = ConnectRoute::Automatic);

}  // namespace psl2
