#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kspec/bounds.hpp"
#include "kspec/calculus.hpp"
#include "kspec/errors.hpp"
#include "kspec/estimator.hpp"
#include "kspec/geometry.hpp"
#include "kspec/ratfun.hpp"

namespace py = pybind11;
using namespace kspec;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const ComplexArray& arr) {
    if (arr.ndim() != 2 || arr.shape(0) != arr.shape(1)) throw InvalidInput("expected a square 2-d array");
    const auto n = static_cast<std::size_t>(arr.shape(0));
    const cplx* p = arr.data();
    return Matrix(n, std::vector<cplx>(p, p + n * n));
}

ComplexArray to_array(const Matrix& a) {
    const auto n = static_cast<py::ssize_t>(a.size());
    ComplexArray out({n, n});
    std::copy(a.data().begin(), a.data().end(), out.mutable_data());
    return out;
}

py::object point(const SpherePoint& p) {
    if (p.infinite) return py::float_(std::numeric_limits<double>::infinity());
    return py::cast(p.z);
}

py::tuple map_coefficients(const MoebiusMap& m) { return py::make_tuple(m.m11(), m.m12(), m.m21(), m.m22()); }

py::dict ratio_dict(const estimator::RatioResult& r) {
    py::dict d;
    d["ratio"] = r.ratio;
    d["f"] = r.f;
    d["samples"] = r.samples;
    d["sampling_slack"] = r.sampling_slack;
    d["certified"] = r.certified;
    return d;
}

}  // namespace

PYBIND11_MODULE(_kspec, m) {
    m.doc() = "K-spectral sets: disk geometry, annulus functional calculus, bounds and estimators";

    auto base = py::register_exception<Error>(m, "KspecError");
    auto invalid = py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", invalid.ptr());
    py::register_exception<SingularMatrix>(m, "SingularMatrix", base.ptr());
    auto pole = py::register_exception<PoleError>(m, "PoleError", base.ptr());
    py::register_exception<PoleInRegion>(m, "PoleInRegion", pole.ptr());
    py::register_exception<PoleMeetsSpectrum>(m, "PoleMeetsSpectrum", pole.ptr());
    py::register_exception<AdmissibilityError>(m, "AdmissibilityError", base.ptr());
    py::register_exception<QuadratureFailure>(m, "QuadratureFailure", base.ptr());
    py::register_exception<PositivityError>(m, "PositivityError", base.ptr());
    py::register_exception<PrecisionError>(m, "PrecisionError", base.ptr());
    py::register_exception<WrongCase>(m, "WrongCase", base.ptr());
    py::register_exception<AmbiguousClassification>(m, "AmbiguousClassification", base.ptr());

    // linalg
    m.def("spectral_norm", [](const ComplexArray& a) { return spectral_norm(to_matrix(a)); });
    m.def("inverse", [](const ComplexArray& a) { return to_array(inverse(to_matrix(a))); });
    m.def("polar_decompose", [](const ComplexArray& a) {
        const auto p = polar_decompose(to_matrix(a));
        return py::make_tuple(to_array(p.unitary), to_array(p.positive));
    }, "Returns (U, G) with A = U G.");
    m.def("hermitian_part_max_eig", [](const ComplexArray& a) { return hermitian_part_max_eig(to_matrix(a)); });

    // geometry
    py::class_<SphereDisk>(m, "SphereDisk")
        .def(py::init<double, cplx, double>(), py::arg("a"), py::arg("b"), py::arg("c"))
        .def_static("disk", &SphereDisk::disk, py::arg("center"), py::arg("radius"))
        .def_static("codisk", &SphereDisk::codisk, py::arg("center"), py::arg("radius"))
        .def_static("half_plane", &SphereDisk::half_plane, py::arg("omega"), py::arg("offset"))
        .def_property_readonly("a", &SphereDisk::a)
        .def_property_readonly("b", &SphereDisk::b)
        .def_property_readonly("c", &SphereDisk::c)
        .def_property_readonly("kind", [](const SphereDisk& d) {
            switch (d.kind()) {
                case DiskKind::Disk: return "disk";
                case DiskKind::Codisk: return "codisk";
                default: return "halfplane";
            }
        })
        .def("__repr__", [](const SphereDisk& d) {
            return "SphereDisk(a=" + std::to_string(d.a()) + ", b=(" + std::to_string(d.b().real()) + "," +
                   std::to_string(d.b().imag()) + "), c=" + std::to_string(d.c()) + ")";
        });

    m.def("classify", [](const SphereDisk& d1, const SphereDisk& d2, double tol) {
        const auto c = classify(d1, d2, tol);
        py::dict out;
        out["case"] = std::string(to_string(c.label));
        py::list pts;
        for (const auto& p : c.boundary_points) pts.append(point(p));
        out["boundary_points"] = pts;
        out["canonical_map"] = c.canonical_map ? py::object(map_coefficients(*c.canonical_map)) : py::none();
        out["canonical_R"] = c.canonical_R ? py::object(py::float_(*c.canonical_R)) : py::none();
        return out;
    }, py::arg("d1"), py::arg("d2"), py::arg("tol") = kDefaultGeometryTol);
    m.def("normalize_annulus", [](const SphereDisk& d1, const SphereDisk& d2) {
        const auto n = normalize_annulus(d1, d2);
        return py::make_tuple(map_coefficients(n.map), n.R);
    }, "Returns ((m11, m12, m21, m22), R).");
    m.def("certify_spectral", [](const SphereDisk& d, const ComplexArray& a) {
        return certify_spectral(d, to_matrix(a));
    });

    // ratfun
    py::class_<RationalFunction>(m, "RationalFunction")
        .def(py::init<std::vector<cplx>, std::vector<cplx>, int>(), py::arg("numerator"),
             py::arg("denominator") = std::vector<cplx>{1.0}, py::arg("laurent_low") = 0)
        .def_static("laurent", &RationalFunction::laurent, py::arg("low"), py::arg("coeffs"))
        .def_property_readonly("numerator", &RationalFunction::numerator)
        .def_property_readonly("denominator", &RationalFunction::denominator)
        .def_property_readonly("laurent_low", &RationalFunction::laurent_low)
        .def("__call__", [](const RationalFunction& f, cplx z) { return eval_scalar(f, z); })
        .def("derivative", [](const RationalFunction& f, cplx z) { return derivative_at(f, z); })
        .def("__mul__", &RationalFunction::operator*);
    m.def("eval_matrix", [](const RationalFunction& f, const ComplexArray& a) {
        return to_array(eval_matrix(f, to_matrix(a)));
    });
    m.def("sup_norm_annulus", [](const RationalFunction& f, double R, int samples) {
        return sup_norm_annulus(f, R, samples);
    }, py::arg("f"), py::arg("R"), py::arg("samples") = kDefaultBoundarySamples);

    // calculus
    m.def("represent", [](const ComplexArray& a, double R, const RationalFunction& f, double margin, int nodes,
                          double tol, int max_nodes) {
        const auto ctx = AnnulusContext::make(to_matrix(a), R, margin);
        return to_array(represent(ctx, f, QuadratureConfig{nodes, tol, max_nodes}));
    }, py::arg("a"), py::arg("R"), py::arg("f"), py::arg("margin") = kDefaultMargin, py::arg("nodes") = 64,
       py::arg("tol") = 1e-10, py::arg("max_nodes") = 8192,
       "f(A) from the three boundary integrals of the annulus calculus.");
    m.def("k_formula", [](const ComplexArray& a, double R, double margin) {
        return k_formula(AnnulusContext::make(to_matrix(a), R, margin));
    }, py::arg("a"), py::arg("R"), py::arg("margin") = kDefaultMargin);

    // bounds
    m.def("shields", &bounds::shields, py::arg("r"), py::arg("R"));
    m.def("thm1_upper", &bounds::thm1_upper, py::arg("R"));
    m.def("lower_simple", &bounds::lower_simple, py::arg("R"));
    m.def("j_closed", &bounds::j_closed, py::arg("R"));
    m.def("j_quadrature", &bounds::j_quadrature, py::arg("R"), py::arg("phi"), py::arg("nodes") = 4096);
    m.def("caratheodory_product", &bounds::caratheodory_product, py::arg("R"), py::arg("tail_tol") = 1e-14);
    m.def("gamma_lower", &bounds::gamma_lower, py::arg("R"), py::arg("tail_tol") = 1e-14);
    m.def("curve_table", [](const std::vector<double>& Rs, double tail_tol) {
        py::list rows;
        for (const auto& r : bounds::curve_table(Rs, tail_tol)) {
            py::dict d;
            d["R"] = r.R;
            d["lower_simple"] = r.lower_simple;
            d["gamma"] = r.gamma;
            d["upper_new"] = r.upper_new;
            d["upper_shields"] = r.upper_shields;
            d["upper_min"] = r.upper_min;
            rows.append(d);
        }
        return rows;
    }, py::arg("R_values"), py::arg("tail_tol") = 1e-14);

    // estimator
    m.def("jordan_witness", [](double R) { return to_array(estimator::jordan_witness(R)); });
    m.def("random_admissible", [](std::size_t n, double R, std::uint64_t seed) {
        return to_array(estimator::random_admissible(n, R, seed));
    }, py::arg("n"), py::arg("R"), py::arg("seed"));
    m.def("ratio", [](const ComplexArray& a, double R, const RationalFunction& f, int samples) {
        return ratio_dict(estimator::ratio(to_matrix(a), R, f, samples));
    }, py::arg("a"), py::arg("R"), py::arg("f"), py::arg("samples") = estimator::kCertifySamples);
    m.def("maximize_ratio", [](const ComplexArray& a, double R, int degree, long budget, std::uint64_t seed) {
        const auto s = estimator::maximize_ratio(to_matrix(a), R, degree, budget, seed);
        py::dict d = ratio_dict(s.best);
        d["converged"] = s.converged;
        d["evaluations"] = s.evaluations;
        d["seed"] = s.seed;
        return d;
    }, py::arg("a"), py::arg("R"), py::arg("degree"), py::arg("budget"), py::arg("seed") = 1);
    m.def("extremal_derivative", [](double R, int degree, int samples) {
        const auto e = estimator::extremal_derivative(R, degree, samples);
        py::dict d;
        d["value"] = e.value;
        d["upper_estimate"] = e.upper_estimate;
        d["f"] = e.f;
        d["converged"] = e.converged;
        return d;
    }, py::arg("R"), py::arg("degree"), py::arg("samples"));
}
