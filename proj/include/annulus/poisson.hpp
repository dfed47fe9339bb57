#pragma once
#include "annulus/domain.hpp"
#include "annulus/quadrature.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <vector>

namespace annulus {

// S_n(x) = (x^n - x^-n)/2 and C_n(x) = (x^n + x^-n)/2.
double sn(int n, double x);
double cn(int n, double x);
// S_n(a)/S_n(b), evaluated in log form so that large n|log x| cannot overflow.
double sn_ratio(int n, double a, double b);

struct RadialGridSpec {
    // Nodes in [r1,R1-eps], band 1, gap, band 2, [R2+eps,r2].
    std::array<int, 5> nodes{64, 128, 64, 128, 64};
    // Largest Lobatto panel; regions are split into equal sub-panels.
    int max_panel = 17;
    // When > 0, each band region is widened to [R - eps - margin, R + eps + margin]
    // and split into equal panels (for level sets displaced off the band grid).
    double margin = 0.0;
};

// Composite Gauss-Lobatto grid on [r1, r2]; walls and band edges are nodes.
class RadialGrid {
public:
    struct Panel {
        LagrangePanel poly;
        int first;  // global index of the panel's first node
    };

    RadialGrid(const AnnulusConfig& cfg, double eps, double kappa, const RadialGridSpec& spec = {});

    int size() const { return static_cast<int>(r_.size()); }
    const std::vector<double>& nodes() const { return r_; }
    const std::vector<double>& weights() const { return w_; }
    const std::vector<Panel>& panels() const { return panels_; }
    const AnnulusConfig& config() const { return cfg_; }

    int locate(double r) const;
    double interpolate(const double* values, double r) const;
    // Integral over [r1, r2] of the sampled function.
    double integrate(const double* values) const;

private:
    AnnulusConfig cfg_;
    std::vector<double> r_, w_;
    std::vector<Panel> panels_;
};

// Solver for f'' + f'/r - n^2 f/r^2 = g with f(r1) = 0, f(r2) = bc2 (bc2 only
// for n = 0). Built once per (grid, n); applying it costs O(N p).
class ModeSolver {
public:
    ModeSolver(const RadialGrid& grid, int n);
    int mode() const { return n_; }
    // f and, if df != nullptr, f' at the grid nodes.
    void solve(const double* g, double* f, double* df, double bc2 = 0.0) const;

private:
    const RadialGrid* grid_;
    int n_;
    // per panel: row-major p x p local weights for the left and right integrals
    std::vector<std::vector<double>> left_, right_;
    std::vector<double> pl_, pr_;  // node-wise Green prefactors
};

std::vector<double> solve_mode(const RadialGrid& grid, int n, const std::vector<double>& g);
// Radial mode: Delta psi = -omega with psi(r1) = 0, psi(r2) = gamma.
std::vector<double> solve_axisymmetric(const RadialGrid& grid, const std::vector<double>& omega,
                                       double gamma, std::vector<double>* dpsi = nullptr);

// Real field sampled on (radial node i, angle l), theta_l = 2 pi l / nt.
struct Field {
    int nr = 0, nt = 0;
    std::vector<double> v;
    Field() = default;
    Field(int nr_, int nt_, double fill = 0.0) : nr(nr_), nt(nt_), v(size_t(nr_) * nt_, fill) {}
    double& operator()(int i, int l) { return v[size_t(i) * nt + l]; }
    double operator()(int i, int l) const { return v[size_t(i) * nt + l]; }
};

// Per-mode radial coefficients: f(r, theta) = sum_n re_n(r) cos(n theta) + im_n(r) sin(n theta).
struct ModalField {
    int nmodes = 0, nr = 0;
    std::vector<double> re, im;  // [n * nr + i]
};

// Full annulus solve of Delta psi = -omega, psi|r1 = 0, psi|r2 = gamma.
class PoissonSolver {
public:
    PoissonSolver(const RadialGrid& grid, int ntheta, double gamma, bool two_thirds = false);
    ~PoissonSolver();
    PoissonSolver(const PoissonSolver&) = delete;
    PoissonSolver& operator=(const PoissonSolver&) = delete;

    const RadialGrid& grid() const { return *grid_; }
    int ntheta() const { return nt_; }

    void solve(const Field& omega, Field& psi, Field* dpsi_dr = nullptr, Field* dpsi_dtheta = nullptr);
    ModalField modes(const Field& omega);
    // theta-derivative of any field by the same transform.
    void dtheta(const Field& f, Field& out);

private:
    struct Plans;
    const RadialGrid* grid_;
    int nt_;
    double gamma_;
    bool two_thirds_;
    std::vector<std::unique_ptr<ModeSolver>> solvers_;
    std::unique_ptr<Plans> plans_;
};

// Finite-difference weights (Fornberg) for derivative order m at x0.
std::vector<double> fd_weights(double x0, const double* x, int npts, int m);

}  // namespace annulus
