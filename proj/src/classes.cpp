#include "psl2/classes.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "psl2/square.hpp"

namespace psl2 {

namespace {

constexpr double pi = std::numbers::pi;

void validate(const SurfacePresentation& p) {
    if (p.crosscaps < 0 || p.handles < 0 || p.boundary < 0)
        throw Error(Fault::TemplateUnsupported, "negative generator count");
    if (p.crosscaps > 1 && p.handles > 0)
        throw Error(Fault::TemplateUnsupported, "mixed presentations carry exactly one crosscap");
}

void check_images(const Representation& r) {
    validate(r.presentation);
    if (static_cast<int>(r.images.size()) != r.presentation.generator_count())
        throw Error(Fault::ParseError, "expected " + std::to_string(r.presentation.generator_count()) +
                                           " images, got " + std::to_string(r.images.size()));
}

void require_class_surface(const SurfacePresentation& p) {
    if (!p.closed() && p.euler_characteristic() > -1)
        throw Error(Fault::TemplateUnsupported, "bounded surface with Euler characteristic > -1");
}

bool boundary_hyperbolic(const Representation& r) {
    for (int l = 0; l < r.presentation.boundary; ++l)
        if (conj_type(r.images[r.presentation.boundary_index(l)]) != ConjugacyType::Hyperbolic) return false;
    return true;
}

ClassValue sw(long n) { return {ClassKind::SWMod2, ((n % 2) + 2) % 2}; }

}  // namespace

std::string describe(const SurfacePresentation& p) {
    std::string s = p.is_orientable() ? "orientable" : "nonorientable";
    s += " " + std::to_string(p.genus()) + " " + std::to_string(p.boundary);
    if (p.is_mixed()) s += " mixed";
    return s;
}

std::vector<Letter> relator_word(const SurfacePresentation& p) {
    std::vector<Letter> w;
    for (int i = 0; i < p.crosscaps; ++i) {
        w.push_back({i, false});
        w.push_back({i, false});
    }
    for (int j = 0; j < p.handles; ++j) {
        int x = p.handle_x(j), y = p.handle_y(j);
        w.push_back({x, false});
        w.push_back({y, false});
        w.push_back({x, true});
        w.push_back({y, true});
    }
    for (int l = 0; l < p.boundary; ++l) w.push_back({p.boundary_index(l), false});
    return w;
}

std::string to_string(const ClassValue& v) {
    return (v.kind == ClassKind::EulerInteger ? "euler=" : "sw=") + std::to_string(v.value);
}

PSL2 relator_value(const Representation& r) {
    check_images(r);
    PSL2 acc = PSL2::identity();
    for (const Letter& l : relator_word(r.presentation)) {
        const PSL2& g = r.images[l.generator];
        acc = acc * (l.inverse ? inverse(g) : g);
    }
    return acc;
}

double relation_residual(const Representation& r) { return distance(relator_value(r), PSL2::identity()); }

bool in_W(const Representation& r) { return boundary_hyperbolic(r) && relation_residual(r) <= tol::rel; }

std::vector<CoverElement> default_lifts(const Representation& r) {
    check_images(r);
    std::vector<CoverElement> lifts;
    const int free_count = r.presentation.boundary_index(0);
    for (int i = 0; i < r.presentation.generator_count(); ++i)
        lifts.push_back(i < free_count ? lift_base(r.images[i]) : canonical_hyperbolic_lift(r.images[i]));
    return lifts;
}

long relator_exponent(const Representation& r, const std::vector<CoverElement>& lifts) {
    check_images(r);
    auto word = relator_word(r.presentation);
    CoverElement acc = z_power(0);
    for (const Letter& l : word) acc = cover_mul(acc, l.inverse ? cover_inv(lifts[l.generator]) : lifts[l.generator]);
    double off = distance(acc.base(), PSL2::identity());
    if (off > tol::not_central * static_cast<double>(word.size()))
        throw Error(Fault::NotCentral, "lifted relator is " + std::to_string(off) + " away from the centre");
    return std::lround(acc.lift() / pi);
}

ClassValue sw_class_closed(const Representation& r) { return sw_class_closed(r, default_lifts(r)); }

ClassValue sw_class_closed(const Representation& r, const std::vector<CoverElement>& lifts) {
    check_images(r);
    if (r.presentation.is_orientable() || !r.presentation.closed())
        throw Error(Fault::TemplateUnsupported, "sw_class_closed needs a closed non-orientable surface");
    if (relation_residual(r) > tol::rel) throw Error(Fault::RelationViolated, "relator residual exceeds 1e-8");
    return sw(relator_exponent(r, lifts));
}

ClassValue sw_class_relative(const Representation& r) {
    if (!in_W(r)) throw Error(Fault::NotInW, "representation is not in W");
    return sw_class_relative(r, default_lifts(r));
}

ClassValue sw_class_relative(const Representation& r, const std::vector<CoverElement>& lifts) {
    check_images(r);
    if (r.presentation.is_orientable() || r.presentation.closed())
        throw Error(Fault::TemplateUnsupported, "sw_class_relative needs a bounded non-orientable surface");
    require_class_surface(r.presentation);
    if (!in_W(r)) throw Error(Fault::NotInW, "representation is not in W");
    return sw(relator_exponent(r, lifts));
}

ClassValue euler_relative(const Representation& r) {
    if (!in_W(r)) throw Error(Fault::NotInW, "representation is not in W");
    return euler_relative(r, default_lifts(r));
}

ClassValue euler_relative(const Representation& r, const std::vector<CoverElement>& lifts) {
    check_images(r);
    if (!r.presentation.is_orientable()) throw Error(Fault::TemplateUnsupported, "euler_relative needs an orientable surface");
    require_class_surface(r.presentation);
    if (!in_W(r)) throw Error(Fault::NotInW, "representation is not in W");
    return {ClassKind::EulerInteger, relator_exponent(r, lifts)};
}

ClassValue surface_class(const Representation& r) {
    if (r.presentation.is_orientable()) return euler_relative(r);
    return r.presentation.closed() ? sw_class_closed(r) : sw_class_relative(r);
}

bool milnor_wood_check(const Representation& r) {
    return std::abs(euler_relative(r).value) <= std::abs(r.presentation.euler_characteristic());
}

namespace {

void require_hyperbolic_interface(const PSL2& e) {
    if (conj_type(e) != ConjugacyType::Hyperbolic)
        throw Error(Fault::InterfaceNotHyperbolic, "interface curve image is " + to_string(conj_type(e)));
}

// Relative classes of the pieces are computed without the Euler characteristic restriction:
// the Mobius band and the annulus have characteristic 0.
long piece_exponent(const Representation& r) {
    if (!in_W(r)) throw Error(Fault::NotInW, "piece is not in W");
    return relator_exponent(r, default_lifts(r));
}

}  // namespace

AdditivityReport check_additivity(const Representation& r, SplitTemplate split) {
    check_images(r);
    const SurfacePresentation& p = r.presentation;
    AdditivityReport rep;
    auto boundaries = [&](std::vector<PSL2>& out) {
        for (int l = 0; l < p.boundary; ++l) out.push_back(r.images[p.boundary_index(l)]);
    };
    switch (split) {
    case SplitTemplate::MobiusOrientable:
    case SplitTemplate::MobiusNonorientable: {
        bool orientable_rest = split == SplitTemplate::MobiusOrientable;
        if (orientable_rest ? p.crosscaps != 1 : p.crosscaps < 2 || p.handles > 0)
            throw Error(Fault::TemplateUnsupported, "split template does not match the presentation");
        PSL2 a = r.images[0];
        PSL2 e = a * a;
        require_hyperbolic_interface(e);
        rep.piece1 = {SurfacePresentation::nonorientable(1, 1), {a, inverse(e)}};
        SurfacePresentation rest = orientable_rest ? SurfacePresentation::orientable(p.handles, p.boundary + 1)
                                                   : SurfacePresentation::nonorientable(p.crosscaps - 1, p.boundary + 1);
        std::vector<PSL2> imgs(r.images.begin() + 1, r.images.end());
        imgs.push_back(e);
        rep.piece2 = {rest, imgs};
        break;
    }
    case SplitTemplate::TorusPants: {
        if (!(p.crosscaps == 0 && p.handles == 1 && p.boundary == 2))
            throw Error(Fault::TemplateUnsupported, "torus-pants split needs a two-holed torus");
        PSL2 d = inverse(projectivize(commutator(r.images[0].rep(), r.images[1].rep())));
        require_hyperbolic_interface(d);
        rep.piece1 = {SurfacePresentation::orientable(1, 1), {r.images[0], r.images[1], d}};
        std::vector<PSL2> imgs{inverse(d)};
        boundaries(imgs);
        rep.piece2 = {SurfacePresentation::orientable(0, 3), imgs};
        break;
    }
    }
    long n = p.is_orientable() ? euler_relative(r).value : (p.closed() ? sw_class_closed(r) : sw_class_relative(r)).value;
    long n1 = piece_exponent(rep.piece1), n2 = piece_exponent(rep.piece2);
    bool mod2 = !p.is_orientable();
    rep.total = {mod2 ? ClassKind::SWMod2 : ClassKind::EulerInteger, n};
    rep.first = rep.piece1.presentation.is_orientable() ? ClassValue{ClassKind::EulerInteger, n1} : sw(n1);
    rep.second = rep.piece2.presentation.is_orientable() ? ClassValue{ClassKind::EulerInteger, n2} : sw(n2);
    rep.combined = rep.first.value + rep.second.value;
    if (mod2) rep.combined = ((rep.combined % 2) + 2) % 2;
    rep.agrees = rep.combined == n;
    return rep;
}

namespace {

SL2 square_product(const std::vector<PSL2>& imgs, int count) {
    SL2 acc = SL2::identity();
    for (int i = 0; i < count; ++i) acc = multiply(acc, square(imgs[i]));
    return acc;
}

// Image of the word before the crosscap squares, as an SL element (handles), well defined in SL.
SL2 handle_product(const std::vector<PSL2>& imgs, const SurfacePresentation& p) {
    SL2 acc = SL2::identity();
    for (int j = 0; j < p.handles; ++j)
        acc = multiply(acc, commutator(imgs[p.handle_x(j)].rep(), imgs[p.handle_y(j)].rep()));
    return acc;
}

}  // namespace

Representation sample_representation(const SurfacePresentation& p, std::uint64_t seed,
                                     std::optional<long> target_class, int budget) {
    validate(p);
    Rng rng(seed);
    std::uniform_int_distribution<int> coin(0, 1);
    const int n = p.generator_count();
    for (int attempt = 0; attempt < budget; ++attempt) {
        std::vector<PSL2> imgs(n);
        for (auto& g : imgs) g = random_psl2(rng);
        Representation r{p, imgs};
        if (p.closed()) {
            if (p.is_orientable()) throw Error(Fault::TemplateUnsupported, "closed orientable sampling");
            // last crosscap square A^2 = s * (rest of the relator)^-1 in SL, with s = (-1)^class
            const int idx = p.is_mixed() ? 0 : p.crosscaps - 1;
            SL2 rest = p.is_mixed() ? handle_product(imgs, p) : square_product(imgs, idx);
            int s = target_class ? (*target_class % 2 == 0 ? 1 : -1) : (coin(rng) ? 1 : -1);
            SL2 k = s > 0 ? invert(rest) : -invert(rest);
            if (!(k.trace() > -2 + 1e-6)) continue;
            r.images[idx] = psl_sqrt(k);
            if (relation_residual(r) > 1e-9) continue;
            if (target_class && sw_class_closed(r).value != ((*target_class % 2) + 2) % 2) continue;
            return r;
        }
        // bounded: the last boundary generator closes the relator
        PSL2 w = PSL2::identity();
        auto word = relator_word(p);
        word.pop_back();
        for (const Letter& l : word) w = w * (l.inverse ? inverse(imgs[l.generator]) : imgs[l.generator]);
        r.images[p.boundary_index(p.boundary - 1)] = inverse(w);
        if (!in_W(r)) continue;
        if (target_class) {
            ClassValue v = surface_class(r);
            long want = v.kind == ClassKind::SWMod2 ? ((*target_class % 2) + 2) % 2 : *target_class;
            if (v.value != want) continue;
        }
        return r;
    }
    throw Error(Fault::TargetUnreachable, "no sample of the requested class within the retry budget");
}

Representation genus3_to_mixed(const Representation& r) {
    if (!(r.presentation == SurfacePresentation::nonorientable(3, 0)))
        throw Error(Fault::TemplateUnsupported, "expected the standard closed genus-3 presentation");
    const PSL2 &a = r.images[0], &b = r.images[1], &c = r.images[2];
    return {SurfacePresentation::mixed(1, 0), {a * b * c, c * a, a * b}};
}

Representation genus3_from_mixed(const Representation& r) {
    if (!(r.presentation == SurfacePresentation::mixed(1, 0)))
        throw Error(Fault::TemplateUnsupported, "expected the mixed closed genus-3 presentation");
    const PSL2 &A = r.images[0], &X = r.images[1], &Y = r.images[2];
    PSL2 a = inverse(A) * Y * X;
    PSL2 b = inverse(X) * inverse(Y) * A * Y;
    PSL2 c = inverse(Y) * A;
    return {SurfacePresentation::nonorientable(3, 0), {a, b, c}};
}

void write_representation(std::ostream& os, const Representation& r) {
    os << "surface " << describe(r.presentation) << "\n";
    char buf[160];
    for (const PSL2& g : r.images) {
        const SL2& m = g.rep();
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", m.a, m.b, m.c, m.d);
        os << buf;
    }
}

Representation read_representation_block(std::istream& is, bool to_end) {
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            auto pos = line.find('#');
            if (pos != std::string::npos) line.erase(pos);
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line()) throw Error(Fault::ParseError, "empty representation file");
    std::istringstream head(line);
    std::string word, kind, extra;
    int genus = -1, m = -1;
    head >> word >> kind >> genus >> m;
    if (word != "surface" || head.fail() || (kind != "orientable" && kind != "nonorientable") || genus < 0 || m < 0)
        throw Error(Fault::ParseError, "bad header: '" + line + "'");
    SurfacePresentation p;
    if (head >> extra) {
        if (extra != "mixed" || kind != "nonorientable" || genus < 3 || genus % 2 == 0)
            throw Error(Fault::ParseError, "bad header token '" + extra + "'");
        p = SurfacePresentation::mixed((genus - 1) / 2, m);
    } else {
        p = kind == "orientable" ? SurfacePresentation::orientable(genus, m) : SurfacePresentation::nonorientable(genus, m);
    }
    if (!p.is_orientable() && p.closed() && p.crosscaps < 1)
        throw Error(Fault::ParseError, "closed non-orientable surface needs genus >= 1");
    Representation r{p, {}};
    for (int i = 0; i < p.generator_count(); ++i) {
        if (!next_line()) throw Error(Fault::ParseError, "missing matrix for generator " + std::to_string(i));
        std::istringstream row(line);
        double a, b, c, d;
        if (!(row >> a >> b >> c >> d)) throw Error(Fault::ParseError, "bad matrix line: '" + line + "'");
        r.images.push_back(PSL2(make_unit_det(a, b, c, d)));
    }
    if (to_end && next_line()) throw Error(Fault::ParseError, "trailing content: '" + line + "'");
    return r;
}

Representation read_representation(std::istream& is) { return read_representation_block(is, true); }

}  // namespace psl2
