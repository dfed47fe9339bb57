#pragma once
#include "annulus/kernel.hpp"
#include "annulus/linop.hpp"
#include "annulus/poisson.hpp"

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace annulus {

// Level-set displacement f(rho, theta) sampled on the band z-nodes (rows)
// and uniform angles theta_l = 2 pi l / nt (columns); f[0] is band R1.
struct LevelSet {
    int nt = 0;
    Eigen::MatrixXd f[2];

    static LevelSet zero(int N, int nt);
    // f = sigma h(z) cos(m theta), h stacked (band 1, band 2) as in BandOperator.
    static LevelSet mode(const Eigen::VectorXd& h, int m, double sigma, int nt);
};

// Grid used for the nonlinear functional: the band regions are widened by
// `margin` and refined uniformly so displaced transitions stay resolved.
RadialGridSpec nonlinear_grid_spec(double eps);

struct FunctionalValue {
    Eigen::MatrixXd F[2];  // N x nt per band
    double sup = 0.0, l2 = 0.0;
};

class Nonlinear {
public:
    Nonlinear(const BandOperator& op, int ntheta = 64);
    Nonlinear(const BandOperator& op, int ntheta, const RadialGridSpec& spec);
    ~Nonlinear();

    const BandOperator& op() const { return *op_; }
    const RadialGrid& grid() const { return *grid_; }
    int ntheta() const { return nt_; }

    // Throws NumericError unless r -> r + f is strictly increasing on each
    // band and the deformed bands stay ordered inside the annulus.
    void check_admissible(const LevelSet& f) const;

    // omega = 2A + varpi(Phi^{-1}) on the deformed bands, 2A + eps on the
    // deformed plateau, 2A elsewhere; sampled on grid() x uniform theta.
    Field vorticity(const LevelSet& f) const;
    // Same construction at one angle index l and arbitrary radius r.
    double omega_at(const LevelSet& f, int l, double r) const;

    // F = lambda (rho + f)^2 / 2 + psi(rho + f, theta) minus its angular mean.
    FunctionalValue functional(double lambda, const LevelSet& f) const;

    // cos(m theta) coefficient of a band field (2N stacked).
    Eigen::VectorXd cos_coefficient(const FunctionalValue& F, int m) const;
    // Largest |coefficient| over all angular modes other than m (and 0).
    double off_mode_sup(const FunctionalValue& F, int m) const;

    // L h / stacked on the band nodes, from the linear operator matrix.
    Eigen::VectorXd linear_response(int m, double lambda, const Eigen::VectorXd& h) const;

    // Solve the Poisson problem for omega (exposed for tests and the CLI).
    void stream(const Field& omega, Field& psi) const;

private:
    const BandOperator* op_;
    int nt_;
    std::unique_ptr<RadialGrid> grid_;
    std::unique_ptr<PoissonSolver> poisson_;
};

struct LinearizationRow {
    double tau = 0.0;
    double rel_error = 0.0;  // |(F[tau h] - F[0])/tau - L h| / |L h|
    double off_mode = 0.0;   // relative size of non-m content
};

std::vector<LinearizationRow> linearization_check(const Nonlinear& nl, double lambda, const Eigen::VectorXd& h, int m,
                                                  const std::vector<double>& taus);

struct SobolevNorms {
    double l2 = 0.0;  // |omega - 2A|_{L2}
    double h1 = 0.0;  // |grad omega|_{L2}
    double h2 = 0.0;  // |Hess omega|_{L2}
    // one-dimensional band norms |varpi'|^2, |varpi''|^2 on [R_i - eps, R_i + eps]
    double band_h1_sq[2] = {0.0, 0.0};
    double band_h2_sq[2] = {0.0, 0.0};
};

// Norms computed in level-set coordinates with the Jacobian of r = rho + f.
SobolevNorms sobolev_norms(const Profile& prof, const ZGrid& zg, const LevelSet& f);
// Interpolated homogeneous H^s bound, s in [0, 3/2).
double sobolev_interpolate(const SobolevNorms& n, double s);

struct BranchPoint {
    double sigma = 0.0, lambda = 0.0;
    Eigen::VectorXd profile;     // cos(m theta) band profile of f (2N)
    double residual = 0.0;       // sup of the mode-m residual
    double full_residual = 0.0;  // sup over the other angular modes
    int newton_iterations = 0;
};

struct BranchOptions {
    double tol = 1e-9;
    int max_newton = 40;
    int max_halvings = 5;
};

// Continue the bifurcating branch from sigma = 0 in `steps` equal amplitude
// steps, with amplitude fixed by <f, h> = sigma (|h| = 1 in L2(dz)).
std::vector<BranchPoint> continue_branch(const Nonlinear& nl, const EigenSolution& sol, double sigma_target, int steps,
                                         const BranchOptions& opt = {});

// Kernel element normalized to unit L2(dz) norm over both bands.
Eigen::VectorXd normalized_kernel(const ZGrid& zg, const EigenSolution& sol);
double band_dot(const ZGrid& zg, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace annulus
