#include <doctest.h>

#include "annulus/domain.hpp"
#include "annulus/errors.hpp"
#include "annulus/poisson.hpp"
#include "annulus/profile.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace annulus;

namespace {

RadialGridSpec spec512()
{
    RadialGridSpec s;
    s.nodes = {72, 148, 72, 148, 72};
    return s;
}

// Zero-boundary test function and its modal Laplacian.
struct Manufactured {
    double r1, r2;
    int n;
    double f(double r) const { return std::sin(M_PI * (r - r1) / (r2 - r1)) * std::exp(r); }
    double g(double r) const
    {
        double k = M_PI / (r2 - r1), t = k * (r - r1);
        double s = std::sin(t), c = std::cos(t), e = std::exp(r);
        double f0 = s * e, f1 = e * (s + k * c), f2 = e * (s + 2 * k * c - k * k * s);
        return f2 + f1 / r - double(n) * n * f0 / (r * r);
    }
};

double rel_l2(const RadialGrid& G, const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> d(a.size()), n(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        d[i] = (a[i] - b[i]) * (a[i] - b[i]);
        n[i] = b[i] * b[i];
    }
    return std::sqrt(G.integrate(d.data()) / G.integrate(n.data()));
}

}  // namespace

TEST_SUITE("poisson") {

TEST_CASE("hyperbolic helpers")
{
    CHECK(sn(3, 2.0) == doctest::Approx(0.5 * (8 - 0.125)));
    CHECK(cn(2, 2.0) == doctest::Approx(0.5 * (4 + 0.25)));
    CHECK(sn_ratio(5, 1.5, 2.0) == doctest::Approx(sn(5, 1.5) / sn(5, 2.0)).epsilon(1e-14));
    CHECK(sn_ratio(5, 0.7, 2.0) == doctest::Approx(sn(5, 0.7) / sn(5, 2.0)).epsilon(1e-14));
    double big = sn_ratio(2000, 1.9, 2.0);
    CHECK(std::isfinite(big));
    CHECK(big == doctest::Approx(std::exp(2000 * std::log(1.9 / 2.0))).epsilon(1e-10));
}

TEST_CASE("finite-difference weights are exact on polynomials")
{
    double x[5] = {0.0, 0.1, 0.25, 0.3, 0.5};
    auto w = fd_weights(0.2, x, 5, 1);
    double s = 0;
    for (int i = 0; i < 5; ++i) s += w[i] * std::pow(x[i], 4);
    CHECK(s == doctest::Approx(4 * std::pow(0.2, 3)).epsilon(1e-10));
}

TEST_CASE("radial grid invariants")
{
    AnnulusConfig c;
    RadialGrid G(c, 0.01, 0.1);
    const auto& r = G.nodes();
    const auto& w = G.weights();
    for (size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
    for (double wi : w) CHECK(wi > 0.0);
    CHECK(r.front() == c.r1);
    CHECK(r.back() == c.r2);
    for (double e : {c.R1 - 0.01, c.R1 + 0.01, c.R2 - 0.01, c.R2 + 0.01}) {
        bool found = false;
        for (double ri : r) found |= (std::abs(ri - e) < 1e-15);
        CHECK(found);
    }
    std::vector<double> f(r.size());
    for (size_t i = 0; i < r.size(); ++i) f[i] = std::pow(r[i], 5);
    CHECK(G.integrate(f.data()) == doctest::Approx((64.0 - 1.0) / 6.0).epsilon(1e-14));
    CHECK(G.interpolate(f.data(), 1.333) == doctest::Approx(std::pow(1.333, 5)).epsilon(1e-13));
}

TEST_CASE("manufactured modal solutions")
{
    AnnulusConfig c;
    RadialGrid G(c, 0.01, 0.1, spec512());
    CHECK(G.size() >= 500);
    for (int n = 1; n <= 16; ++n) {
        Manufactured m{c.r1, c.r2, n};
        std::vector<double> g(G.size()), ex(G.size());
        for (int i = 0; i < G.size(); ++i) {
            g[i] = m.g(G.nodes()[i]);
            ex[i] = m.f(G.nodes()[i]);
        }
        auto f = solve_mode(G, n, g);
        CHECK(rel_l2(G, f, ex) < 1e-7);
    }
}

TEST_CASE("modal derivative output")
{
    AnnulusConfig c;
    RadialGrid G(c, 0.01, 0.1);
    Manufactured m{c.r1, c.r2, 3};
    ModeSolver s(G, 3);
    std::vector<double> g(G.size()), f(G.size()), df(G.size());
    for (int i = 0; i < G.size(); ++i) g[i] = m.g(G.nodes()[i]);
    s.solve(g.data(), f.data(), df.data());
    for (int i = 0; i < G.size(); i += 17) {
        double r = G.nodes()[i], k = M_PI / (c.r2 - c.r1), t = k * (r - c.r1);
        CHECK(std::abs(df[i] - std::exp(r) * (std::sin(t) + k * std::cos(t))) < 1e-9);
    }
}

TEST_CASE("high modes stay finite and bounded")
{
    AnnulusConfig c;
    RadialGrid G(c, 0.01, 0.1);
    std::vector<double> g(G.size(), 1.0);
    auto f = solve_mode(G, 400, g);
    for (int i = 1; i + 1 < G.size(); ++i) {
        double r = G.nodes()[i];
        CHECK(std::isfinite(f[i]));
        // away from walls, f ~ -r^2 g / n^2
        if (r > 1.1 && r < 1.9) CHECK(f[i] == doctest::Approx(-r * r / (400.0 * 400.0)).epsilon(1e-3));
    }
}

TEST_CASE("agreement with the finite-difference oracle on a band source")
{
    AnnulusConfig c;
    const double eps = 0.01;
    Profile p(c, eps, 0.1);
    RadialGrid G(c, eps, 0.1);
    // smooth band weight in place of a kernel function
    auto weight = [&](double r) { return 1.0 / (-0.3 + 0.1 * (r - c.R2) / eps - 0.05 * (r - c.R1) / eps); };
    auto g = [&](double r) { return p.dvarpi(r) * weight(r); };
    for (int n : {1, 2, 5}) {
        std::vector<double> gs(G.size());
        for (int i = 0; i < G.size(); ++i) gs[i] = g(G.nodes()[i]);
        auto f = solve_mode(G, n, gs);
        oracle::MappedGrid M(c.r1, c.r2, {c.R1, c.R2}, eps, 60.0);
        std::vector<double> rs, fo;
        oracle::fd_richardson(M, n, g, 8192, 0.0, rs, fo);
        double num = 0, den = 0;
        for (size_t k = 0; k < rs.size(); ++k) {
            double d = G.interpolate(f.data(), rs[k]) - fo[k];
            num += d * d;
            den += fo[k] * fo[k];
        }
        CHECK(std::sqrt(num / den) < 1e-6);
    }
}

TEST_CASE("finite-difference oracle converges at second order")
{
    AnnulusConfig c;
    RadialGrid G(c, 0.01, 0.1);
    Manufactured m{c.r1, c.r2, 2};
    oracle::MappedGrid M(c.r1, c.r2, {c.R1, c.R2}, 0.01, 10.0);
    double prev = 0;
    for (int N : {256, 512, 1024}) {
        std::vector<double> rs, fo;
        oracle::fd_solve(M, 2, [&](double r) { return m.g(r); }, N, 0.0, rs, fo);
        double e = 0;
        for (size_t k = 0; k < rs.size(); ++k) e = std::max(e, std::abs(fo[k] - m.f(rs[k])));
        if (prev > 0) CHECK(prev / e == doctest::Approx(4.0).epsilon(0.1));
        prev = e;
    }
}

TEST_CASE("Taylor-Couette recovery")
{
    AnnulusConfig c;
    c.A = 0.4;
    c.B = 0.3;
    RadialGrid G(c, 0.01, 0.1);
    std::vector<double> om(G.size(), 2 * c.A), dpsi;
    auto psi = solve_axisymmetric(G, om, circulation(c), &dpsi);
    for (int i = 0; i < G.size(); ++i) CHECK(std::abs(-dpsi[i] - u_tc(c, G.nodes()[i])) < 1e-10);
    CHECK(std::abs(psi.front()) < 1e-15);
    CHECK(std::abs(psi.back() - circulation(c)) < 1e-12);
}

TEST_CASE("two-dimensional solve of a multi-mode field")
{
    AnnulusConfig c;
    RadialGrid G(c, 0.01, 0.1);
    const int nt = 32;
    PoissonSolver S(G, nt, circulation(c));
    Manufactured m2{c.r1, c.r2, 2}, m5{c.r1, c.r2, 5};
    Field om(G.size(), nt), psi, dr, dt;
    for (int i = 0; i < G.size(); ++i) {
        double r = G.nodes()[i];
        for (int l = 0; l < nt; ++l) {
            double th = 2 * M_PI * l / nt;
            // Delta psi = -omega with psi = TC + f2 cos 2th + f5 sin 5th
            om(i, l) = 2 * c.A - m2.g(r) * std::cos(2 * th) - m5.g(r) * std::sin(5 * th);
        }
    }
    S.solve(om, psi, &dr, &dt);
    BaseStream tc(c, nullptr);
    double err = 0, errt = 0;
    for (int i = 0; i < G.size(); ++i) {
        double r = G.nodes()[i];
        for (int l = 0; l < nt; ++l) {
            double th = 2 * M_PI * l / nt;
            double ex = tc.phi(r) + m2.f(r) * std::cos(2 * th) + m5.f(r) * std::sin(5 * th);
            double ext = -2 * m2.f(r) * std::sin(2 * th) + 5 * m5.f(r) * std::cos(5 * th);
            err = std::max(err, std::abs(psi(i, l) - ex));
            errt = std::max(errt, std::abs(dt(i, l) - ext));
        }
    }
    CHECK(err < 1e-10);
    CHECK(errt < 1e-9);
}

}
