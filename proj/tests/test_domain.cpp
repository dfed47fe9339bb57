#include <doctest.h>

#include "annulus/domain.hpp"
#include "annulus/errors.hpp"
#include "annulus/profile.hpp"

#include <cmath>
#include <random>

using namespace annulus;

TEST_SUITE("domain") {

TEST_CASE("swirl velocity examples")
{
    AnnulusConfig c;
    c.A = 2; c.B = 0;
    CHECK(u_tc(c, 1.0) == doctest::Approx(2.0));
    c.A = 0; c.B = 1;
    CHECK(u_tc(c, 2.0) == doctest::Approx(0.5));
    c.A = 1; c.B = 1;
    CHECK(u_tc(c, 1.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(u_tc(c, 0.5), DomainError);
    CHECK_THROWS_AS(u_tc(c, 2.5), DomainError);
}

TEST_CASE("circulation examples")
{
    AnnulusConfig c;
    c.A = 0; c.B = 0;
    CHECK(circulation(c) == 0.0);
    c.B = 1;
    CHECK(circulation(c) == doctest::Approx(-0.6931472).epsilon(1e-7));
    c.A = 1; c.B = 0;
    CHECK(circulation(c) == doctest::Approx(-1.5));
}

TEST_CASE("rotation frequency examples")
{
    AnnulusConfig c;
    c.A = 0; c.B = 1;
    CHECK(lambda0(c) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    c.A = 1; c.B = 1; c.R1 = 0.9; c.r1 = 0.5; c.R2 = 1.0;
    CHECK(lambda0(c) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("frequency identity over random configurations")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0, 1);
    for (int k = 0; k < 100; ++k) {
        AnnulusConfig c;
        c.r1 = 0.5 + U(rng);
        c.r2 = c.r1 + 0.5 + 2 * U(rng);
        c.R1 = c.r1 + (c.r2 - c.r1) * (0.1 + 0.3 * U(rng));
        c.R2 = c.r1 + (c.r2 - c.r1) * (0.6 + 0.3 * U(rng));
        c.A = 4 * U(rng) - 2;
        c.B = (U(rng) < 0.5 ? -1 : 1) * (0.05 + 2 * U(rng));
        c.validate();
        CHECK(std::abs(lambda0(c) - lambda0_direct(c)) <= 1e-13 * std::abs(lambda0_direct(c)));
    }
}

TEST_CASE("validation names the broken invariant")
{
    AnnulusConfig c;
    CHECK_NOTHROW(c.validate());
    c.R1 = 1.6;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("ordering"), ConfigError);
    c = AnnulusConfig{};
    c.B = 0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("B must be nonzero"), ConfigError);
    c = AnnulusConfig{};
    c.A = 1; c.B = c.R1 * c.R2;  // A R + B/R equal at both bands
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("base stream without bands is Taylor-Couette")
{
    AnnulusConfig c;
    c.A = 0.7; c.B = -0.3;
    BaseStream s(c, nullptr);
    CHECK(s.phi(c.r1) == doctest::Approx(0.0));
    CHECK(std::abs(s.phi(c.r2) - circulation(c)) < 1e-14);
    for (double r : {1.0, 1.3, 1.77, 2.0})
        CHECK(std::abs(-s.dphi(r) - u_tc(c, r)) < 1e-13);
}

TEST_CASE("base stream with bands")
{
    AnnulusConfig c;
    Profile p(c, 0.01, 0.1);
    BaseStream s(c, &p);
    CHECK(std::abs(s.phi(c.r1)) < 1e-15);
    CHECK(std::abs(s.phi(c.r2) - circulation(c)) < 1e-10);
    // phi' against a centered difference at O(h^2)
    for (double r : {1.1, 1.195, 1.205, 1.35, 1.497, 1.8}) {
        double e1 = std::abs((s.phi(r + 1e-4) - s.phi(r - 1e-4)) / 2e-4 - s.dphi(r));
        double e2 = std::abs((s.phi(r + 5e-5) - s.phi(r - 5e-5)) / 1e-4 - s.dphi(r));
        CHECK(e1 < 1e-6);
        CHECK(e2 < 0.3 * e1 + 1e-11);
    }
    // -(phi'' + phi'/r) reproduces the vorticity
    for (double r : {1.1, 1.3, 1.45, 1.9}) {
        double h = 1e-4;
        double lap = (s.phi(r + h) - 2 * s.phi(r) + s.phi(r - h)) / (h * h) + s.dphi(r) / r;
        CHECK(std::abs(-lap - p.omega(r)) < 1e-5);
    }
}

}
