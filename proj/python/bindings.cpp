#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "annulus/config.hpp"
#include "annulus/errors.hpp"
#include "annulus/eulersim.hpp"
#include "annulus/kernel.hpp"
#include "annulus/nonlinear.hpp"

#include <memory>

namespace py = pybind11;
using namespace annulus;

namespace {

// Profile, z-grid and band operator for one (config, eps, kappa).
struct Model {
    AnnulusConfig cfg;
    std::unique_ptr<Profile> prof;
    std::unique_ptr<ZGrid> zg;
    std::unique_ptr<BandOperator> op;
    Model(const AnnulusConfig& c, double eps, double kappa)
        : cfg(c), prof(new Profile(cfg, eps, kappa)), zg(new ZGrid(kappa)), op(new BandOperator(*prof, *zg))
    {
        cfg.validate();
    }
};

py::dict rotation_dict(const RotationReport& r)
{
    py::dict d;
    d["lambda_expected"] = r.lambda_expected;
    d["lambda_meas"] = r.lambda_meas;
    d["period"] = r.period;
    d["dt"] = r.dt;
    d["steps"] = r.steps;
    d["return_error"] = r.return_error;
    d["pattern_return_error"] = r.pattern_return_error;
    d["circulation_drift"] = r.circulation_drift;
    d["mean_drift"] = r.mean_drift;
    d["energy_drift"] = r.energy_drift;
    py::list series;
    for (const auto& s : r.series)
        series.append(py::make_tuple(s.t, s.shift, s.lambda_meas, s.return_error, s.circulation, s.energy));
    d["series"] = series;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Rotating vorticity waves near Taylor-Couette flow in an annulus";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    py::class_<AnnulusConfig>(m, "AnnulusConfig")
        .def(py::init([](double r1, double r2, double R1, double R2, double A, double B) {
                 AnnulusConfig c{r1, r2, R1, R2, A, B};
                 c.validate();
                 return c;
             }),
             py::arg("r1") = 1.0, py::arg("r2") = 2.0, py::arg("R1") = 1.2, py::arg("R2") = 1.5, py::arg("A") = 0.0,
             py::arg("B") = 0.1)
        .def_readwrite("r1", &AnnulusConfig::r1)
        .def_readwrite("r2", &AnnulusConfig::r2)
        .def_readwrite("R1", &AnnulusConfig::R1)
        .def_readwrite("R2", &AnnulusConfig::R2)
        .def_readwrite("A", &AnnulusConfig::A)
        .def_readwrite("B", &AnnulusConfig::B)
        .def("validate", &AnnulusConfig::validate);

    m.def("lambda0", &lambda0);
    m.def("lambda0_direct", &lambda0_direct);
    m.def("circulation", &circulation);
    m.def("u_tc", &u_tc);

    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("geometry", &RunConfig::geometry)
        .def_readonly("eps", &RunConfig::eps)
        .def_readonly("kappa", &RunConfig::kappa)
        .def_readonly("m", &RunConfig::m)
        .def_readonly("M", &RunConfig::M)
        .def_readonly("sigma", &RunConfig::sigma)
        .def_readonly("nr", &RunConfig::nr)
        .def_readonly("ntheta", &RunConfig::ntheta)
        .def("to_text", &RunConfig::to_text);
    m.def("parse_config_text", &parse_config_text, py::arg("text"), py::arg("overrides") = std::vector<std::string>{});

    py::class_<EigenSolution>(m, "EigenSolution")
        .def_property_readonly("m", [](const EigenSolution& s) { return s.lead.m; })
        .def_property_readonly("lambda0", [](const EigenSolution& s) { return s.lead.lambda0; })
        .def_property_readonly("lambda1", [](const EigenSolution& s) { return s.lead.lambda1; })
        .def_readonly("lambda2", &EigenSolution::lambda2)
        .def_property_readonly("lambda_", &EigenSolution::lambda)
        .def_readonly("residual", &EigenSolution::residual)
        .def_readonly("residual_first", &EigenSolution::residual_first)
        .def_readonly("iterations", &EigenSolution::iterations)
        .def("contraction_ratio", &EigenSolution::contraction_ratio)
        .def("h", &EigenSolution::h);

    py::class_<KernelDiagnostics>(m, "KernelDiagnostics")
        .def_readonly("ratio", &KernelDiagnostics::ratio)
        .def_readonly("cosine", &KernelDiagnostics::cosine)
        .def_readonly("other_modes", &KernelDiagnostics::other_modes)
        .def_readonly("kernel_ok", &KernelDiagnostics::kernel_ok)
        .def_readonly("others_ok", &KernelDiagnostics::others_ok);

    py::class_<BranchPoint>(m, "BranchPoint")
        .def_readonly("sigma", &BranchPoint::sigma)
        .def_readonly("lambda_", &BranchPoint::lambda)
        .def_readonly("profile", &BranchPoint::profile)
        .def_readonly("residual", &BranchPoint::residual)
        .def_readonly("full_residual", &BranchPoint::full_residual)
        .def_readonly("newton_iterations", &BranchPoint::newton_iterations);

    py::class_<Model>(m, "Model")
        .def(py::init<const AnnulusConfig&, double, double>(), py::arg("config"), py::arg("eps") = 0.01,
             py::arg("kappa") = 0.1)
        .def_property_readonly("z", [](const Model& s) { return s.zg->z(); })
        .def_property_readonly("weights", [](const Model& s) { return s.zg->w(); })
        .def("phi", [](const Model& s, double z) { return s.prof->phi(z); })
        .def("omega", [](const Model& s, double r) { return s.prof->omega(r); })
        .def("assemble", [](const Model& s, int n, double lam) { return s.op->assemble(n, lam); })
        .def("assemble_adjoint", [](const Model& s, int n, double lam) { return s.op->assemble_adjoint(n, lam); })
        .def("inner", [](const Model& s, const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return s.op->inner(x, y); })
        .def("fixed_point", [](const Model& s, int mode) { return fixed_point(*s.op, mode); }, py::arg("m"))
        .def("validate_kernel", [](const Model& s, const EigenSolution& e, int M) { return validate_kernel(*s.op, e, M); },
             py::arg("solution"), py::arg("max_mode") = 8)
        .def("transversality",
             [](const Model& s, const EigenSolution& e) {
                 Transversality t = transversality(*s.op, e, adjoint_kernel(*s.op, e));
                 py::dict d;
                 d["band1"] = t.band1;
                 d["band2"] = t.band2;
                 d["total"] = t.total;
                 d["leading"] = t.leading;
                 return d;
             })
        .def("linearization",
             [](const Model& s, double lam, const Eigen::VectorXd& h, int mode, const std::vector<double>& taus, int nt) {
                 Nonlinear nl(*s.op, nt);
                 std::vector<std::pair<double, double>> out;
                 for (const auto& r : linearization_check(nl, lam, h, mode, taus)) out.emplace_back(r.tau, r.rel_error);
                 return out;
             },
             py::arg("lambda_"), py::arg("h"), py::arg("m"), py::arg("taus"), py::arg("ntheta") = 32)
        .def("continue_branch",
             [](const Model& s, const EigenSolution& e, double sigma, int steps, int nt) {
                 Nonlinear nl(*s.op, nt);
                 return continue_branch(nl, e, sigma, steps);
             },
             py::arg("solution"), py::arg("sigma"), py::arg("steps") = 4, py::arg("ntheta") = 32)
        .def("sobolev",
             [](const Model& s, double index) {
                 SobolevNorms n = sobolev_norms(*s.prof, *s.zg, LevelSet::zero(s.zg->size(), 16));
                 py::dict d;
                 d["l2"] = n.l2;
                 d["h1"] = n.h1;
                 d["h2"] = n.h2;
                 d["hs"] = sobolev_interpolate(n, index);
                 return d;
             },
             py::arg("s") = 1.0)
        .def("simulate",
             [](const Model& s, const BranchPoint& bp, int mode, int nr, int nt, double dt, int every, double period) {
                 Nonlinear nl(*s.op, nt, sim_grid_spec(nr, s.prof->eps()));
                 Simulator sim(nl);
                 RotationReport rep;
                 {
                     py::gil_scoped_release release;
                     rep = verify_rotation(sim, sim.initial_state(bp.profile, mode), mode, bp.lambda, dt, every, period);
                 }
                 return rotation_dict(rep);
             },
             py::arg("point"), py::arg("m"), py::arg("nr") = 128, py::arg("ntheta") = 64, py::arg("dt") = 1.0,
             py::arg("checkpoint_every") = 10, py::arg("period") = 0.0);
}
