#pragma once
#include "annulus/nonlinear.hpp"
#include "annulus/poisson.hpp"

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace annulus {

// Radial grid with about nr nodes, two thirds of them in the (widened) bands.
RadialGridSpec sim_grid_spec(int nr, double eps);

struct SimState {
    Field omega;
    double t = 0.0;
};

struct Conserved {
    double circulation = 0.0;    // -(1/2pi) int int u_theta dr dtheta
    double mean_vorticity = 0.0;  // int omega dA / |annulus|
    double energy = 0.0;          // (1/2) int |u|^2 dA
};

// Explicit RK4 integrator of the 2D Euler vorticity equation on the grid of
// `nl`; psi(r1) = 0 and psi(r2) = gamma with the Taylor-Couette circulation.
class Simulator {
public:
    explicit Simulator(const Nonlinear& nl, bool two_thirds = false);
    ~Simulator();

    const RadialGrid& grid() const { return nl_->grid(); }
    int ntheta() const { return nt_; }
    double gamma() const { return gamma_; }

    // Vorticity of the level set f = profile(rho) cos(m theta).
    SimState initial_state(const Eigen::VectorXd& profile, int m) const;
    SimState radial_state(const std::function<double(double)>& omega) const;

    // u_r = (1/r) psi_theta, u_theta = -psi_r.
    void velocity(const Field& omega, Field& ur, Field& ut) const;
    // 0.5 min(dr/|u_r|, r dtheta/|u_theta|) over the grid.
    double max_dt(const Field& omega) const;
    // Throws NumericError (with the suggested dt) when dt violates the CFL bound.
    void step(SimState& s, double dt) const;

    Conserved conserved(const Field& omega) const;
    // d omega / dr by fourth-order finite differences (one-sided at the walls).
    void dr(const Field& f, Field& out) const;
    void rhs(const Field& omega, Field& out) const;

private:
    const Nonlinear* nl_;
    int nt_;
    double gamma_;
    std::unique_ptr<PoissonSolver> poisson_;
    std::vector<int> fd_start_;
    std::vector<std::array<double, 5>> fd_w_;
};

struct RotationSample {
    double t = 0.0;
    double shift = 0.0;       // unwrapped counter-clockwise rotation angle
    double lambda_meas = 0.0;  // fitted rate up to t
    double return_error = 0.0;
    double circulation = 0.0, energy = 0.0, mean_vorticity = 0.0;
};

struct RotationReport {
    double lambda_expected = 0.0, lambda_meas = 0.0;
    double period = 0.0, dt = 0.0;
    int steps = 0;
    double return_error = 0.0;       // |omega(T) - omega(0)| / |omega(0)|
    double pattern_return_error = 0.0;  // same, relative to the non-radial part of omega(0)
    double circulation_drift = 0.0, mean_drift = 0.0, energy_drift = 0.0;
    std::vector<RotationSample> series;
};

// Angle by which the mode-m part of `now` is rotated counter-clockwise
// relative to `ref`, in (-pi/m, pi/m]; throws NumericError when the
// correlation drops below 0.5 (pattern lost).
double mode_shift(const Simulator& sim, const Field& ref, const Field& now, int m);

// Integrates to T = 2 pi / (m lambda_expected) (or `period` when > 0) with
// the largest step <= dt that divides T, sampling every `checkpoint_every` steps.
RotationReport verify_rotation(const Simulator& sim, const SimState& s0, int m, double lambda_expected, double dt,
                               int checkpoint_every = 10, double period = 0.0);

}  // namespace annulus
