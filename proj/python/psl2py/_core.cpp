#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "psl2/character.hpp"
#include "psl2/classes.hpp"
#include "psl2/cover.hpp"
#include "psl2/homotopy.hpp"
#include "psl2/square.hpp"

namespace py = pybind11;
using namespace psl2;

namespace {

std::string sl2_repr(const SL2& m) {
    std::ostringstream ss;
    ss.precision(17);
    ss << "SL2(" << m.a << ", " << m.b << ", " << m.c << ", " << m.d << ")";
    return ss.str();
}

SL2 sl2_from(py::object o) {
    if (py::isinstance<SL2>(o)) return o.cast<SL2>();
    if (py::isinstance<PSL2>(o)) return o.cast<PSL2>().rep();
    auto seq = o.cast<std::vector<std::vector<double>>>();
    if (seq.size() != 2 || seq[0].size() != 2 || seq[1].size() != 2) throw py::value_error("expected a 2x2 nested sequence");
    return make_unit_det(seq[0][0], seq[0][1], seq[1][0], seq[1][1]);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Representations of surface groups into PSL(2,R)";

    py::enum_<Fault> fault(m, "Fault");
    for (int f = 0; f <= static_cast<int>(Fault::ParseError); ++f) fault.value(fault_name(static_cast<Fault>(f)), static_cast<Fault>(f));

    static py::exception<Error> error(m, "Psl2Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            // args = (message, fault)
            PyErr_SetObject(error.ptr(), py::make_tuple(e.what(), py::cast(e.fault())).ptr());
        }
    });

    py::class_<SL2>(m, "SL2")
        .def(py::init([](double a, double b, double c, double d) { return make_unit_det(a, b, c, d); }), py::arg("a"), py::arg("b"),
             py::arg("c"), py::arg("d"))
        .def_readonly("a", &SL2::a)
        .def_readonly("b", &SL2::b)
        .def_readonly("c", &SL2::c)
        .def_readonly("d", &SL2::d)
        .def_property_readonly("trace", &SL2::trace)
        .def_property_readonly("det", &SL2::det)
        .def("tolist", [](const SL2& x) { return std::vector<std::vector<double>>{{x.a, x.b}, {x.c, x.d}}; })
        .def("__mul__", [](const SL2& x, const SL2& y) { return x * y; })
        .def("__neg__", [](const SL2& x) { return -x; })
        .def("__eq__", [](const SL2& x, const SL2& y) { return x == y; })
        .def("__repr__", sl2_repr);

    py::class_<PSL2>(m, "PSL2")
        .def(py::init([](py::object o) { return PSL2(sl2_from(o)); }))
        .def_property_readonly("rep", &PSL2::rep)
        .def_property_readonly("trace", &PSL2::trace)
        .def("__mul__", [](const PSL2& x, const PSL2& y) { return x * y; })
        .def("inverse", [](const PSL2& x) { return inverse(x); })
        .def("__eq__", [](const PSL2& x, const PSL2& y) { return x == y; })
        .def("__repr__", [](const PSL2& x) { return "PSL2(" + sl2_repr(x.rep()) + ")"; });

    py::enum_<ConjugacyType>(m, "ConjugacyType")
        .value("Elliptic", ConjugacyType::Elliptic)
        .value("Parabolic", ConjugacyType::Parabolic)
        .value("Hyperbolic", ConjugacyType::Hyperbolic)
        .value("Identity", ConjugacyType::Identity);

    m.def("rotation", &rotation);
    m.def("hyperbolic", &hyperbolic);
    m.def("parabolic", &parabolic);
    m.def("invert", [](const SL2& x) { return invert(x); });
    m.def("conj_type", [](py::object o) { return conj_type(PSL2(sl2_from(o))); });
    m.def("distance", [](const PSL2& x, const PSL2& y) { return distance(x, y); });
    m.def("frobenius", &frobenius);

    py::class_<CoverElement>(m, "CoverElement")
        .def(py::init<const PSL2&, double>())
        .def_property_readonly("base", &CoverElement::base)
        .def_property_readonly("lift", &CoverElement::lift)
        .def("__mul__", [](const CoverElement& x, const CoverElement& y) { return cover_mul(x, y); })
        .def("inverse", [](const CoverElement& x) { return cover_inv(x); })
        .def("__repr__", [](const CoverElement& x) { return "CoverElement(" + sl2_repr(x.base().rep()) + ", " + std::to_string(x.lift()) + ")"; });

    py::enum_<RegionKind>(m, "RegionKind")
        .value("E", RegionKind::E)
        .value("H", RegionKind::H)
        .value("Pplus", RegionKind::Pplus)
        .value("Pminus", RegionKind::Pminus)
        .value("Z", RegionKind::Z);
    py::class_<Region>(m, "Region")
        .def_readonly("kind", &Region::kind)
        .def_readonly("index", &Region::index)
        .def("__eq__", [](const Region& a, const Region& b) { return a == b; })
        .def("__str__", [](const Region& r) { return to_string(r); })
        .def("__repr__", [](const Region& r) { return "Region(" + to_string(r) + ")"; });

    m.def("lift_base", &lift_base);
    m.def("z_power", &z_power);
    m.def("project_sl2", &project_sl2);
    m.def("displacement_extrema", &displacement_extrema);
    m.def("classify_region", &classify_region);
    m.def("canonical_hyperbolic_lift", &canonical_hyperbolic_lift);

    m.def("square", &square);
    m.def("psl_sqrt", [](py::object o) { return psl_sqrt(sl2_from(o)); });
    m.def("in_image_J", &in_image_J);
    m.def("in_J_tilde", &in_J_tilde);
    m.def("cover_sqrt", &cover_sqrt);
    m.def("remark_element", &remark_element);
    m.def("remark_root", &remark_root);

    m.def("chi", [](const SL2& x, const SL2& y) {
        CharacterTriple t = chi(x, y);
        return py::make_tuple(t.x, t.y, t.zc);
    });
    m.def("kappa", [](double x, double y, double z) { return kappa({x, y, z}); });

    py::class_<SurfacePresentation>(m, "SurfacePresentation")
        .def_static("orientable", &SurfacePresentation::orientable, py::arg("genus"), py::arg("boundary") = 0)
        .def_static("nonorientable", &SurfacePresentation::nonorientable, py::arg("genus"), py::arg("boundary") = 0)
        .def_static("mixed", &SurfacePresentation::mixed, py::arg("handles"), py::arg("boundary") = 0)
        .def_readonly("crosscaps", &SurfacePresentation::crosscaps)
        .def_readonly("handles", &SurfacePresentation::handles)
        .def_readonly("boundary", &SurfacePresentation::boundary)
        .def_property_readonly("genus", &SurfacePresentation::genus)
        .def_property_readonly("euler_characteristic", &SurfacePresentation::euler_characteristic)
        .def("__eq__", [](const SurfacePresentation& a, const SurfacePresentation& b) { return a == b; })
        .def("__repr__", [](const SurfacePresentation& p) { return "SurfacePresentation(" + describe(p) + ")"; });

    py::class_<Representation>(m, "Representation")
        .def(py::init([](const SurfacePresentation& p, const std::vector<PSL2>& images) {
                 if (static_cast<int>(images.size()) != p.generator_count()) throw py::value_error("wrong number of generator images");
                 return Representation{p, images};
             }),
             py::arg("presentation"), py::arg("images"))
        .def_readonly("presentation", &Representation::presentation)
        .def_readonly("images", &Representation::images)
        .def("to_text", [](const Representation& r) {
            std::ostringstream ss;
            write_representation(ss, r);
            return ss.str();
        })
        .def_static("from_text", [](const std::string& s) {
            std::istringstream ss(s);
            return read_representation(ss);
        });

    py::enum_<ClassKind>(m, "ClassKind").value("EulerInteger", ClassKind::EulerInteger).value("SWMod2", ClassKind::SWMod2);
    py::class_<ClassValue>(m, "ClassValue")
        .def_readonly("kind", &ClassValue::kind)
        .def_readonly("value", &ClassValue::value)
        .def("__eq__", [](const ClassValue& a, const ClassValue& b) { return a == b; })
        .def("__repr__", [](const ClassValue& v) { return "ClassValue(" + to_string(v) + ")"; });

    m.def("sample_representation", &sample_representation, py::arg("presentation"), py::arg("seed"),
          py::arg("target_class") = py::none(), py::arg("budget") = 10000);
    m.def("relation_residual", &relation_residual);
    m.def("in_W", &in_W);
    m.def("sw_class_closed", [](const Representation& r) { return sw_class_closed(r); });
    m.def("euler_relative", [](const Representation& r) { return euler_relative(r); });
    m.def("surface_class", &surface_class);
    m.def("milnor_wood_check", &milnor_wood_check);

    py::class_<RepPath>(m, "RepPath")
        .def_readonly("presentation", &RepPath::presentation)
        .def_readonly("samples", &RepPath::samples)
        .def_readonly("step_bound", &RepPath::step_bound)
        .def("__len__", [](const RepPath& p) { return p.samples.size(); });

    py::class_<PathReport>(m, "PathReport")
        .def_readonly("samples", &PathReport::samples)
        .def_readonly("max_residual", &PathReport::max_residual)
        .def_readonly("max_step", &PathReport::max_step)
        .def_readonly("start_class", &PathReport::start_class)
        .def_readonly("end_class", &PathReport::end_class)
        .def_readonly("passed", &PathReport::pass);

    m.def(
        "verify_rep_path",
        [](const RepPath& p, double residual, double step) {
            PathBounds b;
            b.residual = residual;
            b.step = step;
            return verify_rep_path(p, b);
        },
        py::arg("path"), py::arg("residual") = 1e-6, py::arg("step") = 0.05);

    py::enum_<ConnectRoute>(m, "ConnectRoute")
        .value("Automatic", ConnectRoute::Automatic)
        .value("Mobius", ConnectRoute::Mobius)
        .value("Roots", ConnectRoute::Roots);
    m.def("connect_representations", &connect_representations, py::arg("r1"), py::arg("r2"),
          py::arg("route") = ConnectRoute::Automatic, py::call_guard<py::gil_scoped_release>());
    m.def("euler_bump_pants", [](const Representation& r) { return euler_bump_pants(r).path; });
    m.def("euler_bump_torus", [](const Representation& r) { return euler_bump_torus(r).path; });
}
