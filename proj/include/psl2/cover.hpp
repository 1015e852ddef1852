#pragma once

#include <string>
#include <utility>

#include "psl2/sl2.hpp"

namespace psl2 {

// Element of the universal cover: a projective base together with the value at
// direction 0 of the lifted action on the line of directions (period pi).
class CoverElement {
public:
    CoverElement() = default;
    // Snaps lift onto the admissible lattice; throws if it is more than 1e-6 away.
    CoverElement(const PSL2& base, double lift);

    const PSL2& base() const { return base_; }
    double lift() const { return lift_; }

private:
    friend CoverElement unchecked_cover(const PSL2&, double);
    PSL2 base_;
    double lift_ = 0;
};

// Same as the constructor but snaps unconditionally.
CoverElement unchecked_cover(const PSL2& base, double lift);

enum class RegionKind { E, H, Pplus, Pminus, Z };

struct Region {
    RegionKind kind = RegionKind::Z;
    int index = 0;
    bool operator==(const Region&) const = default;
};

std::string to_string(const Region& r);

// Angle in [0, pi) of the direction of the first column.
double base_angle(const SL2& m);
double base_angle(const PSL2& p);

// Increasing lift of the direction action, evaluated at t.
double cover_apply(const CoverElement& x, double t);

CoverElement lift_base(const PSL2& p);
CoverElement cover_mul(const CoverElement& x, const CoverElement& y);
CoverElement cover_inv(const CoverElement& x);
CoverElement z_power(long k);
SL2 project_sl2(const CoverElement& x);
double cover_trace(const CoverElement& x);

inline CoverElement operator*(const CoverElement& x, const CoverElement& y) { return cover_mul(x, y); }

CoverElement cover_commutator(const CoverElement& x, const CoverElement& y);
CoverElement cover_conjugate(const CoverElement& g, const CoverElement& x);

// (min, max) of (f(t) - t)/pi over a period.
std::pair<double, double> displacement_extrema(const CoverElement& x);

Region classify_region(const CoverElement& x);

CoverElement canonical_hyperbolic_lift(const PSL2& g);

double cover_distance(const CoverElement& x, const CoverElement& y);

}  // namespace psl2
