#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psl2/cover.hpp"

namespace psl2 {

// Relator A_1^2 ... A_c^2 [X_1,Y_1] ... [X_h,Y_h] C_1 ... C_m with [X,Y] = X Y X^-1 Y^-1.
// Generators are listed in that order: crosscaps, then X_1, Y_1, ..., then boundaries.
struct SurfacePresentation {
    int crosscaps = 0;
    int handles = 0;
    int boundary = 0;

    static SurfacePresentation orientable(int genus, int boundary) { return {0, genus, boundary}; }
    static SurfacePresentation nonorientable(int genus, int boundary) { return {genus, 0, boundary}; }
    // one crosscap and handles; non-orientable genus 1 + 2 * handles
    static SurfacePresentation mixed(int handles, int boundary) { return {1, handles, boundary}; }

    bool is_orientable() const { return crosscaps == 0; }
    bool is_mixed() const { return crosscaps > 0 && handles > 0; }
    bool closed() const { return boundary == 0; }
    int genus() const { return is_orientable() ? handles : crosscaps + 2 * handles; }
    int euler_characteristic() const { return 2 - crosscaps - 2 * handles - boundary; }
    int generator_count() const { return crosscaps + 2 * handles + boundary; }
    int handle_x(int j) const { return crosscaps + 2 * j; }
    int handle_y(int j) const { return crosscaps + 2 * j + 1; }
    int boundary_index(int l) const { return crosscaps + 2 * handles + l; }

    bool operator==(const SurfacePresentation&) const = default;
};

std::string describe(const SurfacePresentation& p);

struct Letter {
    int generator;
    bool inverse;
};

std::vector<Letter> relator_word(const SurfacePresentation& p);

struct Representation {
    SurfacePresentation presentation;
    std::vector<PSL2> images;
};

enum class ClassKind { EulerInteger, SWMod2 };

struct ClassValue {
    ClassKind kind;
    long value;
    bool operator==(const ClassValue&) const = default;
};

std::string to_string(const ClassValue& v);

namespace tol {
inline constexpr double rel = 1e-8;
inline constexpr double not_central = 1e-6;
}  // namespace tol

PSL2 relator_value(const Representation& r);
double relation_residual(const Representation& r);
bool in_W(const Representation& r);

// Default lifts: lift_base for free generators, canonical H_0 lifts for boundary generators.
std::vector<CoverElement> default_lifts(const Representation& r);

// Exponent N with lifted relator = z^N, from caller-chosen lifts.
long relator_exponent(const Representation& r, const std::vector<CoverElement>& lifts);

ClassValue sw_class_closed(const Representation& r);
ClassValue sw_class_closed(const Representation& r, const std::vector<CoverElement>& lifts);
ClassValue sw_class_relative(const Representation& r);
ClassValue sw_class_relative(const Representation& r, const std::vector<CoverElement>& lifts);
ClassValue euler_relative(const Representation& r);
ClassValue euler_relative(const Representation& r, const std::vector<CoverElement>& lifts);

// Class of a representation in W: sw for non-orientable (closed or relative), Euler for orientable.
ClassValue surface_class(const Representation& r);

bool milnor_wood_check(const Representation& r);

enum class SplitTemplate {
    MobiusOrientable,     // one crosscap plus handles = Mobius band and orientable remainder
    MobiusNonorientable,  // at least two crosscaps = Mobius band and non-orientable remainder
    TorusPants,           // [X,Y] C_1 C_2 = one-holed torus and pants
};

struct AdditivityReport {
    Representation piece1, piece2;
    ClassValue total, first, second;
    long combined;  // first + second, reduced mod 2 when the total is a Stiefel-Whitney class
    bool agrees;
};

AdditivityReport check_additivity(const Representation& r, SplitTemplate split);

Representation sample_representation(const SurfacePresentation& p, std::uint64_t seed,
                                     std::optional<long> target_class = std::nullopt, int budget = 10000);

// Standard genus-3 generators (a, b, c) to the mixed generators (A, X, Y) = (abc, ca, ab), and back.
Representation genus3_to_mixed(const Representation& r);
Representation genus3_from_mixed(const Representation& r);

void write_representation(std::ostream& os, const Representation& r);
Representation read_representation(std::istream& is);
// One block; later content is left in the stream.
Representation read_representation_block(std::istream& is, bool to_end = false);

}  // namespace psl2
