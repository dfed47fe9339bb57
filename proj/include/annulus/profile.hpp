#pragma once
#include "annulus/domain.hpp"

#include <iosfwd>
#include <vector>

namespace annulus {

// Normalized bump c exp(-1/(1-u^2)) on (-1, 1).
double mollifier(double u);
// int_{-1}^{v} of the normalized bump.
double mollifier_cdf(double v);

// Mollified step phi_kappa on [-1, 1] (1 at z=-1, 0 at z=1) and the band
// profile varpi_{eps,kappa}(r) built from it.
class Profile {
public:
    Profile(const AnnulusConfig& cfg, double eps, double kappa, int table_points = 4096);

    double eps() const { return eps_; }
    double kappa() const { return kappa_; }
    const AnnulusConfig& config() const { return cfg_; }

    // Table lookup with cubic Hermite interpolation.
    double phi(double z) const;
    // Same value by direct quadrature (slow; used at grid nodes).
    double phi_exact(double z) const;
    double dphi(double z) const;
    double d2phi(double z) const;

    // varpi and its r-derivatives; zero outside [R1 - eps, R2 + eps] except
    // the plateau eps between the bands.
    double varpi(double r) const;
    double dvarpi(double r) const;
    double d2varpi(double r) const;
    // Full vorticity 2A + varpi.
    double omega(double r) const { return 2.0 * cfg_.A + varpi(r); }

    // Breakpoints where varpi is not analytic, sorted, inside [r1, r2].
    std::vector<double> breakpoints() const;

    // CSV rows z, phi, dphi, d2phi on n uniform points.
    void dump(std::ostream& os, int n) const;

private:
    AnnulusConfig cfg_;
    double eps_, kappa_;
    std::vector<double> zt_, ft_, dt_;
};

}  // namespace annulus
