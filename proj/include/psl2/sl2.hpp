#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "psl2/error.hpp"

namespace psl2 {

namespace tol {
inline constexpr double det = 1e-12;
inline constexpr double det_drift = 1e-6;
inline constexpr double trace_sign = 1e-9;
inline constexpr double classify = 1e-9;
inline constexpr double rotation = 1e-9;
inline constexpr double region = 1e-7;
inline constexpr double central = 1e-7;
inline constexpr double relation = 1e-8;
}  // namespace tol

using Rng = std::mt19937_64;

// Row-major 2x2 matrix with determinant one.
struct SL2 {
    double a = 1, b = 0, c = 0, d = 1;

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    SL2 operator-() const { return {-a, -b, -c, -d}; }
    bool operator==(const SL2&) const = default;

    static SL2 identity() { return {}; }
};

// Element of PSL(2,R), stored through its canonical-sign representative.
class PSL2 {
public:
    PSL2() = default;
    explicit PSL2(const SL2& m);

    const SL2& rep() const { return rep_; }
    double trace() const { return rep_.trace(); }
    bool operator==(const PSL2&) const = default;

    static PSL2 identity() { return PSL2(); }

private:
    SL2 rep_;
};

enum class ConjugacyType { Elliptic, Parabolic, Hyperbolic, Identity };

std::string to_string(ConjugacyType t);

SL2 make_unit_det(double a, double b, double c, double d);
// Rescales any positive-determinant matrix onto SL(2,R); used by samplers and drift control.
SL2 renormalize(double a, double b, double c, double d);

SL2 multiply(const SL2& x, const SL2& y);
SL2 invert(const SL2& x);
SL2 conjugate(const SL2& g, const SL2& x);
SL2 commutator(const SL2& x, const SL2& y);

inline SL2 operator*(const SL2& x, const SL2& y) { return multiply(x, y); }

PSL2 projectivize(const SL2& m);
PSL2 operator*(const PSL2& x, const PSL2& y);
PSL2 inverse(const PSL2& x);
PSL2 conjugate(const PSL2& g, const PSL2& x);

ConjugacyType conj_type(const PSL2& p);
bool is_identity(const PSL2& p, double eps = tol::classify);

SL2 rotation(double theta);
SL2 hyperbolic(double t);
SL2 parabolic(double u);
SL2 quarter_turn();

// exp of the trace-free matrix (p, q; r, -p)
SL2 exp_sl2(double p, double q, double r);

double frobenius(const SL2& x, const SL2& y);
double distance(const PSL2& x, const PSL2& y);
double distance_to_identity(const SL2& m);

SL2 random_sl2(Rng& rng);
PSL2 random_psl2(Rng& rng);

}  // namespace psl2
