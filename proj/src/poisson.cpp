#include "annulus/poisson.hpp"
#include "annulus/errors.hpp"
#include "annulus/parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>

namespace annulus {

double sn(int n, double x) { return 0.5 * (std::pow(x, n) - std::pow(x, -n)); }
double cn(int n, double x) { return 0.5 * (std::pow(x, n) + std::pow(x, -n)); }

double sn_ratio(int n, double a, double b)
{
    // S_n(x) = sign(log x) e^{n|log x|} (1 - e^{-2n|log x|}) / 2
    const double la = n * std::log(a), lb = n * std::log(b);
    if (lb == 0.0) throw NumericError("sn_ratio: S_n(b) = 0");
    if (la == 0.0) return 0.0;
    auto part = [](double l) { return -std::expm1(-2.0 * std::abs(l)); };
    double sgn = ((la > 0) == (lb > 0)) ? 1.0 : -1.0;
    return sgn * std::exp(std::abs(la) - std::abs(lb)) * part(la) / part(lb);
}

RadialGrid::RadialGrid(const AnnulusConfig& cfg, double eps, double kappa, const RadialGridSpec& spec)
    : cfg_(cfg)
{
    if (spec.max_panel < 3) throw ConfigError("max_panel must be >= 3");
    for (int n : spec.nodes)
        if (n < 4) throw ConfigError("nodes_per_panel entries must be >= 4");
    const double c = eps * (1.0 - 2.0 * kappa);
    struct Region { double a, b; int n; };
    std::vector<Region> regions;
    const double mg = spec.margin;
    if (mg < 0.0) throw ConfigError("radial grid margin must be >= 0");
    auto band = [&](double R, int n) {
        if (mg > 0.0) {
            regions.push_back({R - eps - mg, R + eps + mg, n});
            return;
        }
        int side = std::max(2, static_cast<int>(std::lround(0.375 * n)));
        int mid = std::max(2, n - 2 * side);
        regions.push_back({R - eps, R - c, side});
        regions.push_back({R - c, R + c, mid});
        regions.push_back({R + c, R + eps, side});
    };
    regions.push_back({cfg.r1, cfg.R1 - eps - mg, spec.nodes[0]});
    band(cfg.R1, spec.nodes[1]);
    regions.push_back({cfg.R1 + eps + mg, cfg.R2 - eps - mg, spec.nodes[2]});
    band(cfg.R2, spec.nodes[3]);
    regions.push_back({cfg.R2 + eps + mg, cfg.r2, spec.nodes[4]});

    r_.push_back(cfg.r1);
    w_.push_back(0.0);
    for (const Region& reg : regions) {
        if (!(reg.b > reg.a)) throw ConfigError("radial grid: degenerate region (check eps, kappa)");
        int s = (reg.n - 1 + spec.max_panel - 2) / (spec.max_panel - 1);
        int p = std::max(3, static_cast<int>(std::lround(double(reg.n - 1) / s)) + 1);
        Rule ref = gauss_lobatto(p);
        for (int k = 0; k < s; ++k) {
            double a = reg.a + (reg.b - reg.a) * k / s;
            double b = (k == s - 1) ? reg.b : reg.a + (reg.b - reg.a) * (k + 1) / s;
            Rule q = mapped(ref, a, b);
            q.x.front() = a;
            q.x.back() = b;
            int first = size() - 1;
            w_[first] += q.w[0];
            for (int i = 1; i < p; ++i) {
                r_.push_back(q.x[i]);
                w_.push_back(q.w[i]);
            }
            panels_.push_back({LagrangePanel(a, b, q.x), first});
        }
    }
}

int RadialGrid::locate(double r) const
{
    if (!(r >= cfg_.r1 && r <= cfg_.r2)) throw DomainError("radius outside [r1, r2]");
    int lo = 0, hi = static_cast<int>(panels_.size()) - 1;
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (panels_[mid].poly.a() <= r) lo = mid; else hi = mid - 1;
    }
    return lo;
}

double RadialGrid::interpolate(const double* values, double r) const
{
    const Panel& P = panels_[locate(r)];
    return P.poly.interpolate(r, values + P.first);
}

double RadialGrid::integrate(const double* values) const
{
    double s = 0.0;
    for (int i = 0; i < size(); ++i) s += w_[i] * values[i];
    return s;
}

ModeSolver::ModeSolver(const RadialGrid& grid, int n) : grid_(&grid), n_(n)
{
    if (n < 0) throw NumericError("ModeSolver: negative mode");
    const double r1 = grid.config().r1, r2 = grid.config().r2;
    for (const auto& P : grid.panels()) {
        const int p = P.poly.size();
        const auto& t = P.poly.nodes();
        std::vector<double> L(size_t(p) * p, 0.0), R(size_t(p) * p, 0.0);
        if (n == 0) {
            Eigen::MatrixXd C = P.poly.cumulative_matrix();
            for (int j = 0; j < p; ++j)
                for (int k = 0; k < p; ++k) {
                    L[j * p + k] = C(j, k);
                    R[j * p + k] = C(p - 1, k) - C(j, k);
                }
        } else {
            std::vector<double> l(p);
            const double a = P.poly.a(), b = P.poly.b();
            for (int j = 0; j < p; ++j) {
                // left: int_a^{t_j} (s/t_j)^n (1 - (r1/s)^{2n}) s l_k(s) ds
                if (j > 0) {
                    int q = std::min(400, p + 8 + static_cast<int>(std::ceil(n * std::log(t[j] / a))));
                    Rule g = mapped(gauss_legendre(q), a, t[j]);
                    for (int m = 0; m < q; ++m) {
                        double s = g.x[m];
                        double f = std::exp(n * std::log(s / t[j])) * -std::expm1(2.0 * n * std::log(r1 / s)) * s * g.w[m];
                        P.poly.basis(s, l.data());
                        for (int k = 0; k < p; ++k) L[j * p + k] += f * l[k];
                    }
                }
                // right: int_{t_j}^b (t_j/s)^n (1 - (s/r2)^{2n}) s l_k(s) ds
                if (j < p - 1) {
                    int q = std::min(400, p + 8 + static_cast<int>(std::ceil(n * std::log(b / t[j]))));
                    Rule g = mapped(gauss_legendre(q), t[j], b);
                    for (int m = 0; m < q; ++m) {
                        double s = g.x[m];
                        double f = std::exp(n * std::log(t[j] / s)) * -std::expm1(2.0 * n * std::log(s / r2)) * s * g.w[m];
                        P.poly.basis(s, l.data());
                        for (int k = 0; k < p; ++k) R[j * p + k] += f * l[k];
                    }
                }
            }
        }
        left_.push_back(std::move(L));
        right_.push_back(std::move(R));
    }
    if (n > 0) {
        const auto& r = grid.nodes();
        const double D = -std::expm1(2.0 * n * std::log(r1 / r2));
        pl_.resize(r.size());
        pr_.resize(r.size());
        for (size_t i = 0; i < r.size(); ++i) {
            pl_[i] = -std::expm1(2.0 * n * std::log(r[i] / r2)) / D;
            pr_[i] = -std::expm1(2.0 * n * std::log(r1 / r[i])) / D;
        }
    }
}

void ModeSolver::solve(const double* g, double* f, double* df, double bc2) const
{
    const auto& r = grid_->nodes();
    const int N = grid_->size();
    const double r1 = grid_->config().r1, r2 = grid_->config().r2;
    const auto& panels = grid_->panels();
    std::vector<double> Lv(N, 0.0), Rv(N, 0.0), h(N);

    if (n_ == 0) {
        for (int i = 0; i < N; ++i) h[i] = r[i] * g[i] * std::log(r[i] / r1);
    } else {
        for (int i = 0; i < N; ++i) h[i] = g[i];
    }
    for (size_t P = 0; P < panels.size(); ++P) {
        const int p = panels[P].poly.size(), o = panels[P].first;
        const double a = panels[P].poly.a();
        const double base = Lv[o];
        const auto& M = left_[P];
        for (int j = 1; j < p; ++j) {
            double s = (n_ == 0) ? base : base * std::exp(n_ * std::log(a / r[o + j]));
            for (int k = 0; k < p; ++k) s += M[j * p + k] * h[o + k];
            Lv[o + j] = s;
        }
    }
    if (n_ == 0)
        for (int i = 0; i < N; ++i) h[i] = r[i] * g[i] * std::log(r2 / r[i]);
    for (size_t P = panels.size(); P-- > 0;) {
        const int p = panels[P].poly.size(), o = panels[P].first;
        const double b = panels[P].poly.b();
        const double base = Rv[o + p - 1];
        const auto& M = right_[P];
        for (int j = p - 2; j >= 0; --j) {
            double s = (n_ == 0) ? base : base * std::exp(n_ * std::log(r[o + j] / b));
            for (int k = 0; k < p; ++k) s += M[j * p + k] * h[o + k];
            Rv[o + j] = s;
        }
    }

    if (n_ == 0) {
        const double Lg = std::log(r2 / r1);
        for (int i = 0; i < N; ++i) {
            double a = std::log(r2 / r[i]), b = std::log(r[i] / r1);
            f[i] = -(a * Lv[i] + b * Rv[i]) / Lg + bc2 * b / Lg;
            if (df) df[i] = -(Rv[i] - Lv[i]) / (r[i] * Lg) + bc2 / (r[i] * Lg);
        }
        return;
    }
    const double n = n_, D = -std::expm1(2.0 * n * std::log(r1 / r2));
    for (int i = 0; i < N; ++i) {
        f[i] = -(pl_[i] * Lv[i] + pr_[i] * Rv[i]) / (2.0 * n);
        if (df) {
            double eL = std::exp(2.0 * n * std::log(r[i] / r2)) / D;
            double eR = std::exp(2.0 * n * std::log(r1 / r[i])) / D;
            df[i] = -(-2.0 * n * eL * Lv[i] - n * pl_[i] * Lv[i] + 2.0 * n * eR * Rv[i] + n * pr_[i] * Rv[i])
                    / (2.0 * n * r[i]);
        }
    }
}

std::vector<double> solve_mode(const RadialGrid& grid, int n, const std::vector<double>& g)
{
    if (static_cast<int>(g.size()) != grid.size()) throw NumericError("solve_mode: size mismatch");
    ModeSolver s(grid, n);
    std::vector<double> f(g.size());
    s.solve(g.data(), f.data(), nullptr);
    return f;
}

std::vector<double> solve_axisymmetric(const RadialGrid& grid, const std::vector<double>& omega,
                                       double gamma, std::vector<double>* dpsi)
{
    if (static_cast<int>(omega.size()) != grid.size()) throw NumericError("solve_axisymmetric: size mismatch");
    ModeSolver s(grid, 0);
    std::vector<double> g(omega.size()), f(omega.size());
    for (size_t i = 0; i < g.size(); ++i) g[i] = -omega[i];
    if (dpsi) dpsi->resize(omega.size());
    s.solve(g.data(), f.data(), dpsi ? dpsi->data() : nullptr, gamma);
    return f;
}

namespace {
std::mutex& fftw_mutex()
{
    static std::mutex m;
    return m;
}
}  // namespace

struct PoissonSolver::Plans {
    fftw_plan fwd = nullptr, bwd = nullptr;
    int nr, nt, nc;
    Plans(int nr_, int nt_) : nr(nr_), nt(nt_), nc(nt_ / 2 + 1)
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        double* in = fftw_alloc_real(size_t(nr) * nt);
        fftw_complex* out = fftw_alloc_complex(size_t(nr) * nc);
        fwd = fftw_plan_many_dft_r2c(1, &nt, nr, in, nullptr, 1, nt, out, nullptr, 1, nc, FFTW_ESTIMATE);
        bwd = fftw_plan_many_dft_c2r(1, &nt, nr, out, nullptr, 1, nc, in, nullptr, 1, nt, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        if (!fwd || !bwd) throw NumericError("FFTW planning failed");
    }
    ~Plans()
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    // Spectrum layout [i * nc + n].
    std::vector<std::complex<double>> forward(const Field& f) const
    {
        double* in = fftw_alloc_real(f.v.size());
        fftw_complex* out = fftw_alloc_complex(size_t(nr) * nc);
        std::copy(f.v.begin(), f.v.end(), in);
        fftw_execute_dft_r2c(fwd, in, out);
        std::vector<std::complex<double>> c(size_t(nr) * nc);
        for (size_t k = 0; k < c.size(); ++k) c[k] = {out[k][0] / nt, out[k][1] / nt};
        fftw_free(in);
        fftw_free(out);
        return c;
    }
    void backward(const std::vector<std::complex<double>>& c, Field& f) const
    {
        double* outr = fftw_alloc_real(size_t(nr) * nt);
        fftw_complex* in = fftw_alloc_complex(c.size());
        for (size_t k = 0; k < c.size(); ++k) {
            in[k][0] = c[k].real();
            in[k][1] = c[k].imag();
        }
        fftw_execute_dft_c2r(bwd, in, outr);
        f = Field(nr, nt);
        std::copy(outr, outr + f.v.size(), f.v.begin());
        fftw_free(outr);
        fftw_free(in);
    }
};

PoissonSolver::PoissonSolver(const RadialGrid& grid, int ntheta, double gamma, bool two_thirds)
    : grid_(&grid), nt_(ntheta), gamma_(gamma), two_thirds_(two_thirds)
{
    if (ntheta < 4 || ntheta % 2) throw ConfigError("n_theta must be even and >= 4");
    const int nm = ntheta / 2 + 1;
    solvers_.resize(nm);
    parallel_for(nm, [&](int n) { solvers_[n] = std::make_unique<ModeSolver>(grid, n); });
    plans_ = std::make_unique<Plans>(grid.size(), ntheta);
}

PoissonSolver::~PoissonSolver() = default;

void PoissonSolver::solve(const Field& omega, Field& psi, Field* dpsi_dr, Field* dpsi_dtheta)
{
    const int nr = grid_->size(), nc = nt_ / 2 + 1;
    if (omega.nr != nr || omega.nt != nt_) throw NumericError("PoissonSolver: field shape mismatch");
    auto w = plans_->forward(omega);
    std::vector<std::complex<double>> P(w.size()), dP(dpsi_dr ? w.size() : 0);
    const int cut = two_thirds_ ? nt_ / 3 : nc - 1;
    parallel_for(nc, [&](int n) {
        if (n > cut) return;
        std::vector<double> g(nr), f(nr), df(nr);
        for (int part = 0; part < 2; ++part) {
            if (n == 0 && part == 1) break;
            if (n == nc - 1 && part == 1) break;  // Nyquist mode is real
            for (int i = 0; i < nr; ++i) {
                auto c = w[size_t(i) * nc + n];
                g[i] = -(part == 0 ? c.real() : c.imag());
            }
            solvers_[n]->solve(g.data(), f.data(), dpsi_dr ? df.data() : nullptr, n == 0 ? gamma_ : 0.0);
            for (int i = 0; i < nr; ++i) {
                auto& c = P[size_t(i) * nc + n];
                (part == 0 ? reinterpret_cast<double*>(&c)[0] : reinterpret_cast<double*>(&c)[1]) = f[i];
                if (dpsi_dr) {
                    auto& d = dP[size_t(i) * nc + n];
                    (part == 0 ? reinterpret_cast<double*>(&d)[0] : reinterpret_cast<double*>(&d)[1]) = df[i];
                }
            }
        }
    });
    plans_->backward(P, psi);
    if (dpsi_dr) plans_->backward(dP, *dpsi_dr);
    if (dpsi_dtheta) {
        for (int i = 0; i < nr; ++i)
            for (int n = 0; n < nc; ++n) {
                auto& c = P[size_t(i) * nc + n];
                c = (n == nc - 1) ? 0.0 : std::complex<double>(0.0, n) * c;
            }
        plans_->backward(P, *dpsi_dtheta);
    }
}

ModalField PoissonSolver::modes(const Field& omega)
{
    auto w = plans_->forward(omega);
    ModalField m;
    m.nmodes = nt_ / 2 + 1;
    m.nr = grid_->size();
    m.re.resize(size_t(m.nmodes) * m.nr);
    m.im.resize(m.re.size());
    for (int i = 0; i < m.nr; ++i)
        for (int n = 0; n < m.nmodes; ++n) {
            auto c = w[size_t(i) * m.nmodes + n];
            double s = (n == 0 || n == m.nmodes - 1) ? 1.0 : 2.0;
            m.re[size_t(n) * m.nr + i] = s * c.real();
            m.im[size_t(n) * m.nr + i] = -s * c.imag();
        }
    return m;
}

void PoissonSolver::dtheta(const Field& f, Field& out)
{
    auto c = plans_->forward(f);
    const int nc = nt_ / 2 + 1;
    for (int i = 0; i < f.nr; ++i)
        for (int n = 0; n < nc; ++n) {
            auto& v = c[size_t(i) * nc + n];
            v = (n == nc - 1) ? 0.0 : std::complex<double>(0.0, n) * v;
        }
    plans_->backward(c, out);
}

std::vector<double> fd_weights(double x0, const double* x, int npts, int m)
{
    // Fornberg's recursion; returns weights for derivative order m
    std::vector<std::vector<double>> c(npts, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < npts; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(npts);
    for (int i = 0; i < npts; ++i) w[i] = c[i][m];
    return w;
}

}  // namespace annulus
