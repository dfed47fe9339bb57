// Command-line front end: one subcommand per stage of the construction.
// Every subcommand writes CSV files and report.txt into --out.
#include "annulus/config.hpp"
#include "annulus/errors.hpp"
#include "annulus/eulersim.hpp"
#include "annulus/kernel.hpp"
#include "annulus/nonlinear.hpp"
#include "annulus/poisson.hpp"
#include "annulus/profile.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

using namespace annulus;
namespace fs = std::filesystem;

namespace {

struct Model {
    std::unique_ptr<Profile> prof;
    std::unique_ptr<ZGrid> zg;
    std::unique_ptr<BandOperator> op;
    Model(const RunConfig& c, double eps)
        : prof(new Profile(c.geometry, eps, c.kappa)), zg(new ZGrid(c.kappa)), op(new BandOperator(*prof, *zg))
    {
    }
};

class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }
    std::ofstream csv(const std::string& name, const std::string& header) const
    {
        std::ofstream f(dir_ / name);
        if (!f) throw NumericError("cannot write " + (dir_ / name).string());
        f << header << '\n' << std::setprecision(17);
        return f;
    }
    std::ostringstream& report() { return rep_; }
    void finish(const std::string& title) const
    {
        std::ofstream f(dir_ / "report.txt");
        f << title << "\n\n" << rep_.str();
        std::cout << title << '\n' << rep_.str();
    }

private:
    fs::path dir_;
    std::ostringstream rep_;
};

// Random smooth band profile with unit L2(dz) norm; seeded for reproducible output.
Eigen::VectorXd random_direction(const ZGrid& zg, std::mt19937& gen)
{
    std::normal_distribution<double> nd;
    const int N = zg.size();
    Eigen::VectorXd h(2 * N);
    for (int b = 0; b < 2; ++b) {
        double c[5];
        for (double& x : c) x = nd(gen);
        for (int k = 0; k < N; ++k) {
            double v = 0.0;
            for (int j = 0; j < 5; ++j) v += c[j] * std::cos(0.5 * j * M_PI * (zg.z()[k] + 1.0)) / (1.0 + j);
            h(b * N + k) = v;
        }
    }
    return h / std::sqrt(band_dot(zg, h, h));
}

int profile_dump(const RunConfig& c, Output& out, int points)
{
    Profile p(c.geometry, c.eps, c.kappa);
    {
        auto f = out.csv("profile.csv", "z,phi,dphi,d2phi");
        for (int i = 0; i < points; ++i) {
            double z = -1.0 + 2.0 * i / (points - 1);
            f << z << ',' << p.phi(z) << ',' << p.dphi(z) << ',' << p.d2phi(z) << '\n';
        }
    }
    RadialGrid g(c.geometry, c.eps, c.kappa);
    auto f = out.csv("vorticity.csv", "r,omega,dvarpi,d2varpi");
    for (double r : g.nodes()) f << r << ',' << p.omega(r) << ',' << p.dvarpi(r) << ',' << p.d2varpi(r) << '\n';
    out.report() << std::setprecision(10) << "eps " << c.eps << "  kappa " << c.kappa << "\nradial nodes " << g.size()
                 << "\nphi(-1) " << p.phi(-1.0) << "  phi(1) " << p.phi(1.0) << '\n';
    return 0;
}

int poisson_test(const RunConfig& c, Output& out)
{
    const AnnulusConfig& g = c.geometry;
    RadialGridSpec spec;
    spec.nodes = {72, 148, 72, 148, 72};
    RadialGrid G(g, c.eps, c.kappa, spec);
    auto f = out.csv("poisson_modes.csv", "n,rel_l2_error");
    double worst = 0.0;
    // manufactured solution sin(pi (r - r1)/(r2 - r1)) e^r
    const double k = M_PI / (g.r2 - g.r1);
    for (int n = 1; n <= 16; ++n) {
        std::vector<double> rhs(G.size()), ex(G.size());
        for (int i = 0; i < G.size(); ++i) {
            double r = G.nodes()[i], t = k * (r - g.r1), e = std::exp(r);
            double f0 = std::sin(t) * e, f1 = e * (std::sin(t) + k * std::cos(t));
            double f2 = e * (std::sin(t) + 2 * k * std::cos(t) - k * k * std::sin(t));
            rhs[i] = f2 + f1 / r - double(n) * n * f0 / (r * r);
            ex[i] = f0;
        }
        auto sol = solve_mode(G, n, rhs);
        std::vector<double> d2(G.size()), e2(G.size());
        for (int i = 0; i < G.size(); ++i) {
            d2[i] = (sol[i] - ex[i]) * (sol[i] - ex[i]);
            e2[i] = ex[i] * ex[i];
        }
        double err = std::sqrt(G.integrate(d2.data()) / G.integrate(e2.data()));
        worst = std::max(worst, err);
        f << n << ',' << err << '\n';
    }
    std::vector<double> om(G.size(), 2.0 * g.A), dpsi;
    solve_axisymmetric(G, om, circulation(g), &dpsi);
    double tc = 0.0;
    for (int i = 0; i < G.size(); ++i) tc = std::max(tc, std::abs(-dpsi[i] - u_tc(g, G.nodes()[i])));
    out.report() << std::setprecision(3) << std::scientific << "radial nodes " << G.size()
                 << "\nworst modal rel L2 error (n=1..16) " << worst << "\nTaylor-Couette max |u - (A r + B/r)| " << tc
                 << '\n';
    return (worst <= 1e-7 && tc <= 1e-10) ? 0 : 3;
}

int find_eigen(const RunConfig& c, Output& out)
{
    auto f = out.csv("eigen.csv", "eps,m,lambda0,lambda1,lambda2,lambda,residual_first,residual,iterations,contraction");
    out.report() << std::setprecision(12);
    for (double eps : {c.eps, 0.5 * c.eps, 0.25 * c.eps}) {
        Model mdl(c, eps);
        EigenSolution s = fixed_point(*mdl.op, c.m);
        f << eps << ',' << c.m << ',' << s.lead.lambda0 << ',' << s.lead.lambda1 << ',' << s.lambda2 << ','
          << s.lambda() << ',' << s.residual_first << ',' << s.residual << ',' << s.iterations << ','
          << s.contraction_ratio() << '\n';
        if (eps == c.eps) {
            out.report() << "m " << c.m << "\nlambda0 " << s.lead.lambda0 << "\nlambda1 " << s.lead.lambda1
                         << "\nlambda2 " << s.lambda2 << "\nlambda " << s.lambda() << "\n\neps, first-iterate residual, converged residual\n";
        }
        out.report() << std::scientific << std::setprecision(4) << eps << "  " << s.residual_first << "  " << s.residual
                     << std::defaultfloat << std::setprecision(12) << '\n';
    }
    return 0;
}

int validate(const RunConfig& c, Output& out)
{
    Model mdl(c, c.eps);
    EigenSolution s = fixed_point(*mdl.op, c.m);
    KernelDiagnostics d = validate_kernel(*mdl.op, s, c.M);
    {
        auto f = out.csv("modes.csv", "n,sigma_min_over_sigma_max");
        for (int n = 1; n <= c.M; ++n) f << n << ',' << d.other_modes[n] << '\n';
    }
    auto f = out.csv("null_vector.csv", "z,a,b");
    const int N = mdl.zg->size();
    for (int k = 0; k < N; ++k) f << mdl.zg->z()[k] << ',' << d.null_vector(k) << ',' << d.null_vector(N + k) << '\n';
    out.report() << std::setprecision(4) << std::scientific << "m " << c.m << "  lambda " << s.lambda()
                 << "\nsigma_min " << d.sigma_min << "  sigma_second " << d.sigma_second << "  ratio " << d.ratio
                 << "\ncosine with constructed kernel " << std::defaultfloat << std::setprecision(12) << d.cosine
                 << "\none-dimensional kernel: " << (d.kernel_ok ? "yes" : "NO")
                 << "\nother modes invertible: " << (d.others_ok ? "yes" : "NO") << '\n';
    return d.kernel_ok && d.others_ok ? 0 : 3;
}

int adjoint(const RunConfig& c, Output& out)
{
    auto f = out.csv("adjoint.csv", "eps,norm_a,b0_coeff,b0_distance,duality_residue");
    out.report() << std::setprecision(6) << std::scientific;
    for (double eps : {c.eps, 0.5 * c.eps}) {
        Model mdl(c, eps);
        EigenSolution s = fixed_point(*mdl.op, c.m);
        AdjointKernel k = adjoint_kernel(*mdl.op, s);
        f << eps << ',' << k.norm_a << ',' << k.b0_coeff << ',' << k.b0_distance << ',' << k.duality_residue << '\n';
        out.report() << "eps " << eps << "  |a*| " << k.norm_a << "  min_C |b* - C b0| " << k.b0_distance
                     << "  K " << k.b0_distance / eps << "  duality " << k.duality_residue << '\n';
        if (eps == c.eps) {
            auto g = out.csv("adjoint_kernel.csv", "z,a_star,b_star");
            const int N = mdl.zg->size();
            for (int i = 0; i < N; ++i) g << mdl.zg->z()[i] << ',' << k.h(i) << ',' << k.h(N + i) << '\n';
        }
    }
    return 0;
}

int transversality_cmd(const RunConfig& c, Output& out)
{
    auto f = out.csv("transversality.csv", "eps,band1,band2,total,leading");
    bool ok = true;
    out.report() << std::setprecision(8);
    for (double eps : {c.eps, 0.5 * c.eps}) {
        Model mdl(c, eps);
        EigenSolution s = fixed_point(*mdl.op, c.m);
        Transversality t = transversality(*mdl.op, s, adjoint_kernel(*mdl.op, s));
        f << eps << ',' << t.band1 << ',' << t.band2 << ',' << t.total << ',' << t.leading << '\n';
        out.report() << "eps " << eps << "  T " << t.total << "  leading " << t.leading << "  |T|/leading "
                     << std::abs(t.total) / t.leading << '\n';
        ok = ok && std::abs(t.total) >= 0.5 * t.leading;
    }
    return ok ? 0 : 3;
}

int residual(const RunConfig& c, Output& out)
{
    Model mdl(c, c.eps);
    EigenSolution s = fixed_point(*mdl.op, c.m);
    Nonlinear nl(*mdl.op, c.branch_ntheta);
    std::mt19937 gen(c.seed);
    double worst = 0.0;
    {
        auto f = out.csv("linearization.csv", "direction,tau,rel_error,off_mode");
        for (int d = 0; d < 5; ++d) {
            Eigen::VectorXd h = random_direction(*mdl.zg, gen);
            for (const auto& row : linearization_check(nl, s.lambda(), h, c.m, {1e-3, 5e-4, 1e-4, 5e-5})) {
                f << d << ',' << row.tau << ',' << row.rel_error << ',' << row.off_mode << '\n';
                if (row.tau == 1e-4) worst = std::max(worst, row.rel_error);
            }
        }
    }
    auto f = out.csv("functional.csv", "sigma,sup,l2");
    Eigen::VectorXd h = normalized_kernel(*mdl.zg, s);
    const double trivial = nl.functional(s.lambda(), LevelSet::zero(mdl.zg->size(), c.branch_ntheta)).sup;
    for (double sg : {1e-3, 5e-4, 2.5e-4}) {
        FunctionalValue F = nl.functional(s.lambda(), LevelSet::mode(h, c.m, sg, c.branch_ntheta));
        f << sg << ',' << F.sup << ',' << F.l2 << '\n';
    }
    out.report() << std::scientific << std::setprecision(4) << "sup F[lambda, 0] " << trivial
                 << "\nworst linearization error at tau=1e-4 over 5 directions " << worst << '\n';
    return worst <= 0.02 ? 0 : 3;
}

int continue_cmd(const RunConfig& c, Output& out, double s_index)
{
    Model mdl(c, c.eps);
    EigenSolution s = fixed_point(*mdl.op, c.m);
    Nonlinear nl(*mdl.op, c.branch_ntheta);
    auto pts = continue_branch(nl, s, c.sigma, c.steps);
    auto f = out.csv("branch.csv", "sigma,lambda,residual,full_residual,newton_iterations,hs_distance");
    for (const auto& p : pts) {
        LevelSet ls = LevelSet::mode(p.profile, c.m, 1.0, c.branch_ntheta);
        double hs = sobolev_interpolate(sobolev_norms(*mdl.prof, *mdl.zg, ls), s_index);
        f << p.sigma << ',' << p.lambda << ',' << p.residual << ',' << p.full_residual << ',' << p.newton_iterations << ','
          << hs << '\n';
    }
    const Eigen::VectorXd h = normalized_kernel(*mdl.zg, s);
    Eigen::VectorXd g = pts.back().profile / pts.back().sigma - h;
    out.report() << std::setprecision(12) << "m " << c.m << "  lambda_eps " << s.lambda() << "\nsigma "
                 << pts.back().sigma << "  lambda " << pts.back().lambda << std::scientific << std::setprecision(4)
                 << "\nrelative lambda gap " << std::abs(pts.back().lambda - s.lambda()) / std::abs(s.lambda())
                 << "\n|f/sigma - h| " << std::sqrt(band_dot(*mdl.zg, g, g)) << "\nhs_distance column: s = " << std::defaultfloat << s_index << '\n';
    return 0;
}

int distance(const RunConfig& c, Output& out, const std::vector<double>& indices)
{
    auto f = out.csv("distance.csv", "eps,kappa,s,norm");
    out.report() << std::setprecision(6) << std::scientific;
    for (double eps : {2.0 * c.eps, c.eps, 0.5 * c.eps}) {
        Model mdl(c, eps);
        SobolevNorms n = sobolev_norms(*mdl.prof, *mdl.zg, LevelSet::zero(mdl.zg->size(), 16));
        for (double s : indices) f << eps << ',' << c.kappa << ',' << s << ',' << sobolev_interpolate(n, s) << '\n';
        out.report() << "eps " << eps << "  L2 " << n.l2 << "  H1 " << n.h1 << "  H2 " << n.h2 << "  band H2^2 "
                     << n.band_h2_sq[1] << " <= " << 4.0 * std::pow(mollifier(0.0), 2) / (eps * c.kappa) << '\n';
    }
    return 0;
}

int simulate(const RunConfig& c, Output& out, bool snapshot)
{
    Model mdl(c, c.eps);
    EigenSolution s = fixed_point(*mdl.op, c.m);
    Nonlinear branch_nl(*mdl.op, c.branch_ntheta);
    auto pts = continue_branch(branch_nl, s, c.sigma, c.steps);
    const BranchPoint& bp = pts.back();
    Nonlinear nl(*mdl.op, c.ntheta, sim_grid_spec(c.nr, c.eps));
    Simulator sim(nl, c.two_thirds);
    SimState s0 = sim.initial_state(bp.profile, c.m);
    RotationReport rep = verify_rotation(sim, s0, c.m, bp.lambda, c.dt, c.checkpoint_every, c.T);
    {
        auto f = out.csv("rotation.csv", "t,lambda_meas,return_error,circulation,energy,shift,mean_vorticity");
        for (const auto& r : rep.series)
            f << r.t << ',' << r.lambda_meas << ',' << r.return_error << ',' << r.circulation << ',' << r.energy << ','
              << r.shift << ',' << r.mean_vorticity << '\n';
    }
    if (snapshot) {
        auto f = out.csv("omega0.csv", "r,theta,omega");
        const auto& r = sim.grid().nodes();
        for (int i = 0; i < s0.omega.nr; ++i)
            for (int l = 0; l < s0.omega.nt; ++l) f << r[i] << ',' << 2.0 * M_PI * l / s0.omega.nt << ',' << s0.omega(i, l) << '\n';
    }
    const double rel = std::abs(rep.lambda_meas - bp.lambda) / std::abs(bp.lambda);
    out.report() << std::setprecision(10) << "grid " << sim.grid().size() << " x " << sim.ntheta() << "  steps "
                 << rep.steps << "  dt " << rep.dt << "  T " << rep.period << "\nlambda_sigma " << bp.lambda
                 << "\nlambda_meas " << rep.lambda_meas << std::scientific << std::setprecision(4)
                 << "\nrelative rate gap " << rel << "\nreturn error " << rep.return_error
                 << "\npattern return error " << rep.pattern_return_error << "\ncirculation drift "
                 << rep.circulation_drift << "\nmean vorticity drift " << rep.mean_drift << "\nenergy drift "
                 << rep.energy_drift << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"annulus-rotor: rotating vorticity waves near Taylor-Couette flow"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "out";
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
    app.add_option("-o,--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--set", overrides, "override one key (key=value), repeatable");

    int points = 2001;
    auto* pd = app.add_subcommand("profile-dump", "mollified profile and band vorticity samples");
    pd->add_option("--points", points, "uniform z samples")->check(CLI::Range(2, 1000000));
    auto* pt = app.add_subcommand("poisson-test", "manufactured modal solutions and Taylor-Couette recovery");
    auto* fe = app.add_subcommand("find-eigen", "lambda expansion and fixed point for mode m");
    auto* vk = app.add_subcommand("validate-kernel", "SVD kernel check for mode m and invertibility of other modes");
    auto* ad = app.add_subcommand("adjoint", "adjoint kernel and its expansion");
    auto* tr = app.add_subcommand("transversality", "transversality pairing");
    auto* rs = app.add_subcommand("residual", "linearization table and functional decay");
    double s_index = 1.0;
    auto* co = app.add_subcommand("continue", "small-amplitude branch continuation");
    co->add_option("--s", s_index, "Sobolev index for the distance column")->check(CLI::Range(0.0, 1.4999));
    std::vector<double> indices{0.0, 0.5, 1.0, 1.25};
    auto* di = app.add_subcommand("distance", "Sobolev distance sweep over eps");
    di->add_option("--s", indices, "Sobolev indices in [0, 3/2)");
    auto* si = app.add_subcommand("simulate", "time integration of the constructed rotating wave");
    double T = -1.0, dt = -1.0;
    int nr = -1, nth = -1, every = -1;
    bool snapshot = false;
    si->add_option("--T", T, "final time (0: one rotation period)");
    si->add_option("--dt", dt, "requested time step");
    si->add_option("--nr", nr, "radial nodes");
    si->add_option("--ntheta", nth, "angular nodes");
    si->add_option("--checkpoint-every", every, "steps between samples");
    si->add_flag("--snapshot", snapshot, "write the initial vorticity field");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig c = config_path.empty() ? parse_config_text("", overrides) : parse_config(config_path, overrides);
        if (T >= 0.0) c.T = T;
        if (dt > 0.0) c.dt = dt;
        if (nr > 0) c.nr = nr;
        if (nth > 0) c.ntheta = nth;
        if (every > 0) c.checkpoint_every = every;
        c.validate();

        Output out(out_dir);
        std::ofstream(fs::path(out_dir) / "config.txt") << c.to_text();
        int rc = 0;
        auto* sub = app.get_subcommands().front();
        if (sub == pd) rc = profile_dump(c, out, points);
        else if (sub == pt) rc = poisson_test(c, out);
        else if (sub == fe) rc = find_eigen(c, out);
        else if (sub == vk) rc = validate(c, out);
        else if (sub == ad) rc = adjoint(c, out);
        else if (sub == tr) rc = transversality_cmd(c, out);
        else if (sub == rs) rc = residual(c, out);
        else if (sub == co) rc = continue_cmd(c, out, s_index);
        else if (sub == di) rc = distance(c, out, indices);
        else if (sub == si) rc = simulate(c, out, snapshot);
        out.finish(sub->get_name() + (rc == 0 ? " ok" : " FAILED"));
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
