// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all twelve)
#include "annulus/eulersim.hpp"
#include "annulus/kernel.hpp"
#include "annulus/nonlinear.hpp"
#include "annulus/poisson.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace annulus;

namespace {

struct Model {
    AnnulusConfig cfg;
    std::unique_ptr<Profile> prof;
    std::unique_ptr<ZGrid> zg;
    std::unique_ptr<BandOperator> op;
    explicit Model(double eps, double kappa = 0.1, AnnulusConfig c = AnnulusConfig())
        : cfg(c), prof(new Profile(cfg, eps, kappa)), zg(new ZGrid(kappa)), op(new BandOperator(*prof, *zg))
    {
    }
};

struct Result {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

Eigen::VectorXd random_vector(int n, std::mt19937& gen)
{
    std::normal_distribution<double> nd;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = nd(gen);
    return v;
}

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

void lambda0_identity(Result& r)
{
    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        AnnulusConfig c;
        c.r1 = 0.2 + 2.0 * u(gen);
        c.R1 = c.r1 + 0.05 + u(gen);
        c.R2 = c.R1 + 0.05 + u(gen);
        c.r2 = c.R2 + 0.05 + u(gen);
        c.A = 2.0 * u(gen) - 1.0;
        c.B = (u(gen) < 0.5 ? -1.0 : 1.0) * (0.01 + 2.0 * u(gen));
        c.validate();
        worst = std::max(worst, std::abs(lambda0(c) - lambda0_direct(c)) / std::abs(lambda0_direct(c)));
    }
    r.detail << "max rel gap over 100 configs " << worst;
    r.require(worst <= 1e-13, "rel gap <= 1e-13");
}

void poisson(Result& r)
{
    AnnulusConfig c;
    const double eps = 0.01;
    RadialGridSpec spec;
    spec.nodes = {72, 148, 72, 148, 72};
    RadialGrid G(c, eps, 0.1, spec);
    const double k = M_PI / (c.r2 - c.r1);
    double worst = 0.0;
    for (int n = 1; n <= 16; ++n) {
        std::vector<double> g(G.size()), ex(G.size()), d2(G.size()), e2(G.size());
        for (int i = 0; i < G.size(); ++i) {
            double x = G.nodes()[i], t = k * (x - c.r1), e = std::exp(x);
            double f0 = std::sin(t) * e, f1 = e * (std::sin(t) + k * std::cos(t));
            double f2 = e * (std::sin(t) + 2 * k * std::cos(t) - k * k * std::sin(t));
            g[i] = f2 + f1 / x - double(n) * n * f0 / (x * x);
            ex[i] = f0;
        }
        auto f = solve_mode(G, n, g);
        for (int i = 0; i < G.size(); ++i) {
            d2[i] = (f[i] - ex[i]) * (f[i] - ex[i]);
            e2[i] = ex[i] * ex[i];
        }
        worst = std::max(worst, std::sqrt(G.integrate(d2.data()) / G.integrate(e2.data())));
    }

    // band-localized source against the finite-difference oracle
    Profile p(c, eps, 0.1);
    RadialGrid Gb(c, eps, 0.1);
    auto src = [&](double x) {
        return p.dvarpi(x) / (-0.3 + 0.1 * (x - c.R2) / eps - 0.05 * (x - c.R1) / eps);
    };
    double fd = 0.0;
    for (int n : {1, 2, 5}) {
        std::vector<double> gs(Gb.size());
        for (int i = 0; i < Gb.size(); ++i) gs[i] = src(Gb.nodes()[i]);
        auto f = solve_mode(Gb, n, gs);
        oracle::MappedGrid M(c.r1, c.r2, {c.R1, c.R2}, eps, 60.0);
        std::vector<double> rs, fo;
        oracle::fd_richardson(M, n, src, 8192, 0.0, rs, fo);
        double num = 0, den = 0;
        for (size_t q = 0; q < rs.size(); ++q) {
            double d = Gb.interpolate(f.data(), rs[q]) - fo[q];
            num += d * d;
            den += fo[q] * fo[q];
        }
        fd = std::max(fd, std::sqrt(num / den));
    }

    AnnulusConfig t;
    t.A = 0.4;
    t.B = 0.3;
    RadialGrid Gt(t, eps, 0.1);
    std::vector<double> om(Gt.size(), 2 * t.A), dpsi;
    solve_axisymmetric(Gt, om, circulation(t), &dpsi);
    double tc = 0.0;
    for (int i = 0; i < Gt.size(); ++i) tc = std::max(tc, std::abs(-dpsi[i] - u_tc(t, Gt.nodes()[i])));
    r.detail << "modal rel L2 " << worst << " (" << G.size() << " nodes), FD oracle " << fd << ", Taylor-Couette " << tc;
    r.require(worst <= 1e-7, "modal <= 1e-7");
    r.require(fd <= 1e-6, "oracle <= 1e-6");
    r.require(tc <= 1e-10, "Taylor-Couette <= 1e-10");
}

void duality(Result& r)
{
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> lam(-0.5, 0.5);
    double worst = 0.0;
    for (double eps : {1e-2, 5e-3}) {
        Model m(eps);
        for (int n = 1; n <= 8; ++n) {
            double l = lam(gen);
            Eigen::MatrixXd M = m.op->assemble(n, l), Ms = m.op->assemble_adjoint(n, l);
            for (int t = 0; t < 50; ++t) {
                Eigen::VectorXd u = random_vector(m.op->size(), gen), w = random_vector(m.op->size(), gen);
                double gap = std::abs(m.op->inner(M * u, w) - m.op->inner(u, Ms * w));
                worst = std::max(worst, gap / (m.op->norm(u) * m.op->norm(w)));
            }
        }
    }
    r.detail << "max |<Lu,w> - <u,L*w>| / (|u||w|) " << worst;
    r.require(worst <= 1e-10, "<= 1e-10");
}

void lambda1_root(Result& r)
{
    Model base(0.01);
    double res = 0.0, lo = 1e9, hi = 0.0;
    bool below = true;
    for (int m : {1, 2, 3}) {
        LeadingOrder L = solve_lambda1(*base.op, m);
        res = std::max(res, std::abs(lambda1_function(*base.op, m, L.lambda1) - 1.0));
        below = below && L.lambda1 < L.lambda_star;
        double gaps[3];
        int i = 0;
        for (double kappa : {0.2, 0.1, 0.05}) {
            Model mk(0.01, kappa);
            gaps[i++] = std::abs(solve_lambda1(*mk.op, m).lambda1 - lambda1_closed_form(mk.cfg, mk.op->upsilon(), m));
        }
        for (int j = 0; j < 2; ++j) {
            lo = std::min(lo, gaps[j] / gaps[j + 1]);
            hi = std::max(hi, gaps[j] / gaps[j + 1]);
        }
    }
    r.detail << "|I-1| " << res << ", gap ratios in [" << lo << ", " << hi << "]";
    r.require(res <= 1e-10, "|I(lambda1)-1| <= 1e-10");
    r.require(below, "lambda1 < lambda*");
    r.require(lo >= 1.6 && hi <= 2.6, "gap ratio in [1.6, 2.6]");
}

void kernel(Result& r)
{
    Model m1(1e-2), m2(5e-3);
    double ratio = 0.0, cosine = 1.0, order = 1e9, other = 1e9;
    for (int m : {1, 2, 3}) {
        EigenSolution e1 = fixed_point(*m1.op, m), e2 = fixed_point(*m2.op, m);
        KernelDiagnostics d1 = validate_kernel(*m1.op, e1, 8), d2 = validate_kernel(*m2.op, e2, 8);
        ratio = std::max({ratio, d1.ratio, d2.ratio});
        cosine = std::min(cosine, d2.cosine);
        order = std::min(order, e1.residual_first / e2.residual_first);
        for (int n = 1; n <= 8; ++n) {
            if (n == m) continue;
            other = std::min({other, d1.other_modes[n] / 1e-2, d2.other_modes[n] / 5e-3});
        }
    }
    r.detail << "sigma_min/sigma_second " << ratio << ", cosine " << cosine << ", residual ratio " << order
             << ", min_n sigma_min/(eps |L_n|) " << other;
    r.require(ratio <= 1e-6, "ratio <= 1e-6");
    r.require(cosine >= 1 - 1e-4, "cosine >= 1-1e-4");
    r.require(order >= 6.0, "residual ratio >= 6");
    r.require(other >= 1e-3, "other modes >= 1e-3 eps |L_n|");
}

void fixed_point_rate(Result& r)
{
    Model m1(1e-2), m2(5e-3);
    double worst = 0.0, qlo = 1e9, qhi = 0.0;
    for (int m : {1, 2, 3}) {
        double c1 = fixed_point(*m1.op, m).contraction_ratio(), c2 = fixed_point(*m2.op, m).contraction_ratio();
        worst = std::max(worst, c1);
        qlo = std::min(qlo, c2 / c1);
        qhi = std::max(qhi, c2 / c1);
    }
    r.detail << "max ratio at eps=1e-2 " << worst << ", ratio(5e-3)/ratio(1e-2) in [" << qlo << ", " << qhi << "]";
    r.require(worst <= 0.5, "ratio <= 0.5");
    r.require(qlo >= 0.35 && qhi <= 0.7, "roughly halves");
}

void adjoint(Result& r)
{
    Model m1(1e-2), m2(5e-3);
    double alo = 1e9, ahi = 0.0, klo = 1e9, khi = 0.0;
    for (int m : {1, 2, 3}) {
        AdjointKernel k1 = adjoint_kernel(*m1.op, fixed_point(*m1.op, m));
        AdjointKernel k2 = adjoint_kernel(*m2.op, fixed_point(*m2.op, m));
        double a = k1.norm_a / k2.norm_a, K = (k1.b0_distance / 1e-2) / (k2.b0_distance / 5e-3);
        alo = std::min(alo, a);
        ahi = std::max(ahi, a);
        klo = std::min(klo, K);
        khi = std::max(khi, K);
    }
    r.detail << "|a*| halving ratio in [" << alo << ", " << ahi << "], K ratio in [" << klo << ", " << khi << "]";
    r.require(alo >= 1.8 && ahi <= 2.2, "|a*| halves (+-10%)");
    r.require(klo >= 0.8 && khi <= 1.2, "K stable (+-20%)");
}

void transversality_bound(Result& r)
{
    double worst = 1e9;
    for (double eps : {1e-2, 5e-3}) {
        Model md(eps);
        for (int m : {1, 2, 3}) {
            EigenSolution s = fixed_point(*md.op, m);
            Transversality t = transversality(*md.op, s, adjoint_kernel(*md.op, s));
            worst = std::min(worst, std::abs(t.total) / t.leading);
        }
    }
    r.detail << "min |T|/leading " << worst;
    r.require(worst >= 0.5, ">= 0.5");
}

void linearization(Result& r)
{
    Model md(1e-2);
    Nonlinear nl(*md.op, 32);
    std::mt19937 gen(99);
    double worst = 0.0, hlo = 1e9, hhi = 0.0;
    for (int m : {1, 2, 3}) {
        double lam = fixed_point(*md.op, m).lambda();
        for (int t = 0; t < 5; ++t) {
            auto rows = linearization_check(nl, lam, random_direction(*md.zg, gen), m, {1e-4, 5e-5});
            worst = std::max(worst, rows[0].rel_error);
            hlo = std::min(hlo, rows[0].rel_error / rows[1].rel_error);
            hhi = std::max(hhi, rows[0].rel_error / rows[1].rel_error);
        }
    }
    r.detail << "max rel error at tau=1e-4 " << worst << ", halving ratio in [" << hlo << ", " << hhi << "]";
    r.require(worst <= 0.02, "<= 0.02");
    r.require(hlo >= 1.7 && hhi <= 2.3, "halves");
}

void branch(Result& r)
{
    Model md(1e-2);
    Nonlinear nl(*md.op, 32);
    double res = 0.0, hgap = 0.0, lgap = 0.0;
    for (int m : {1, 2, 3}) {
        EigenSolution s = fixed_point(*md.op, m);
        auto pts = continue_branch(nl, s, 1e-3, 4);
        for (size_t i = 1; i < pts.size(); ++i) res = std::max(res, pts[i].residual);
        Eigen::VectorXd g = pts.back().profile / pts.back().sigma - normalized_kernel(*md.zg, s);
        hgap = std::max(hgap, std::sqrt(band_dot(*md.zg, g, g)));
        lgap = std::max(lgap, std::abs(pts.back().lambda - s.lambda()) / std::abs(s.lambda()));
    }
    r.detail << "max step residual " << res << ", |f/sigma - h| " << hgap << ", rel lambda gap " << lgap;
    r.require(res <= 1e-9, "residual <= 1e-9");
    r.require(hgap <= 0.05, "f/sigma within 5%");
    r.require(lgap <= 0.01, "lambda within 1%");
}

void distance(Result& r)
{
    double x[3], y[3], margin = 1e9;
    int i = 0;
    for (double eps : {2e-2, 1e-2, 5e-3}) {
        Model md(eps);
        SobolevNorms n = sobolev_norms(*md.prof, *md.zg, LevelSet::zero(md.zg->size(), 16));
        x[i] = std::log(eps);
        y[i++] = std::log(n.h1);
        double bound = 4.0 * std::pow(mollifier(0.0), 2) / (eps * 0.1);
        for (int b = 0; b < 2; ++b) margin = std::min(margin, bound / n.band_h2_sq[b]);
    }
    double mx = (x[0] + x[1] + x[2]) / 3, my = (y[0] + y[1] + y[2]) / 3, sxy = 0, sxx = 0;
    for (int k = 0; k < 3; ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
    }
    r.detail << "H1 slope " << sxy / sxx << ", H2 band bound / norm >= " << margin;
    r.require(std::abs(sxy / sxx - 0.5) <= 0.05, "slope 0.5 +- 0.05");
    r.require(margin > 1.0, "H2 band bound holds");
}

void rotation(Result& r)
{
    const int m = 2;
    Model md(1e-2);
    EigenSolution s = fixed_point(*md.op, m);
    Nonlinear coarse(*md.op, 32);
    BranchPoint bp = continue_branch(coarse, s, 1e-3, 4).back();
    double err[2];
    int k = 0;
    for (int scale : {1, 2}) {
        Nonlinear nl(*md.op, 256 * scale, sim_grid_spec(384 * scale, 1e-2));
        Simulator sim(nl);
        RotationReport rep = verify_rotation(sim, sim.initial_state(bp.profile, m), m, bp.lambda, 10.0, 20);
        err[k++] = rep.return_error;
        double rel = std::abs(rep.lambda_meas - bp.lambda) / std::abs(bp.lambda);
        r.detail << (scale == 1 ? "" : "; ") << sim.ntheta() << "x" << sim.grid().size() << ": rate gap " << rel
                 << ", return " << rep.return_error << ", circulation drift " << rep.circulation_drift;
        if (scale == 1) {
            r.require(rel <= 0.05, "rate within 5%");
            r.require(rep.return_error <= 0.1, "return error <= 10%");
            r.require(rep.circulation_drift <= 1e-8, "circulation drift <= 1e-8");
        }
    }
    r.detail << "; refinement ratio " << err[0] / err[1];
    r.require(err[0] / err[1] >= 2.0, "doubling halves the return error");
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<void(Result&)>>> criteria = {
        {"lambda0 identity", lambda0_identity},
        {"Poisson correctness", poisson},
        {"operator/adjoint duality", duality},
        {"lambda1 root", lambda1_root},
        {"one-dimensional kernel", kernel},
        {"fixed-point contraction", fixed_point_rate},
        {"adjoint kernel expansion", adjoint},
        {"transversality", transversality_bound},
        {"linearization", linearization},
        {"branch continuation", branch},
        {"distance scaling", distance},
        {"rigid rotation", rotation},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Result r;
        r.detail.precision(4);
        auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(r);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail << " [exception: " << e.what() << "]";
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d %s  %s: %s (%.1f s)\n", id, r.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    r.detail.str().c_str(), sec);
        std::fflush(stdout);
        failed += !r.pass;
    }
    return failed == 0 ? 0 : 1;
}
