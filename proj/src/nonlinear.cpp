#include "annulus/nonlinear.hpp"
#include "annulus/errors.hpp"
#include "annulus/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace annulus {

namespace {

double theta_of(int l, int nt) { return 2.0 * M_PI * l / nt; }

// Derivative of order k in theta of each row (spectral, real data).
Eigen::MatrixXd theta_derivative(const Eigen::MatrixXd& F, int k)
{
    const int nt = static_cast<int>(F.cols());
    Eigen::MatrixXd out(F.rows(), nt);
    std::vector<std::complex<double>> c(nt);
    for (int row = 0; row < F.rows(); ++row) {
        for (int n = 0; n < nt; ++n) {
            std::complex<double> s = 0.0;
            for (int l = 0; l < nt; ++l) s += F(row, l) * std::polar(1.0, -theta_of(n * l % nt, nt));
            c[n] = s / double(nt);
        }
        for (int l = 0; l < nt; ++l) {
            std::complex<double> s = 0.0;
            for (int n = 0; n < nt; ++n) {
                int kk = n <= nt / 2 ? n : n - nt;
                if (2 * n == nt) continue;  // drop Nyquist for odd derivatives' symmetry
                s += c[n] * std::pow(std::complex<double>(0.0, kk), k) * std::polar(1.0, theta_of(n * l % nt, nt));
            }
            out(row, l) = s.real();
        }
    }
    return out;
}

struct Inverter {
    const ZGrid& zg;
    double R, eps;
    std::vector<double> f, df;
    double value(double z) const { return R + eps * z + zg.interpolate(f.data(), z); }
    double slope(double z) const { return eps + zg.interpolate(df.data(), z); }
    // z in [-1, 1] with R + eps z + f(z) = r; bracketed Newton with bisection fallback.
    double solve(double r) const
    {
        double lo = -1.0, hi = 1.0;
        double z = std::clamp((r - R) / eps, -1.0, 1.0);
        for (int it = 0; it < 200; ++it) {
            double g = value(z) - r;
            if (std::abs(g) <= 1e-14 || (hi - lo) * eps <= 1e-14) break;
            (g < 0 ? lo : hi) = z;
            double zn = z - g / slope(z);
            z = (zn > lo && zn < hi) ? zn : 0.5 * (lo + hi);
        }
        return z;
    }
};

}  // namespace

LevelSet LevelSet::zero(int N, int nt)
{
    LevelSet s;
    s.nt = nt;
    s.f[0] = Eigen::MatrixXd::Zero(N, nt);
    s.f[1] = Eigen::MatrixXd::Zero(N, nt);
    return s;
}

LevelSet LevelSet::mode(const Eigen::VectorXd& h, int m, double sigma, int nt)
{
    const int N = static_cast<int>(h.size() / 2);
    LevelSet s = zero(N, nt);
    for (int l = 0; l < nt; ++l) {
        double c = sigma * std::cos(m * theta_of(l, nt));
        s.f[0].col(l) = c * h.head(N);
        s.f[1].col(l) = c * h.tail(N);
    }
    return s;
}

RadialGridSpec nonlinear_grid_spec(double eps)
{
    RadialGridSpec s;
    s.nodes = {64, 448, 64, 448, 64};
    s.margin = 0.3 * eps;
    return s;
}

Nonlinear::Nonlinear(const BandOperator& op, int ntheta)
    : Nonlinear(op, ntheta, nonlinear_grid_spec(op.profile().eps()))
{
}

Nonlinear::Nonlinear(const BandOperator& op, int ntheta, const RadialGridSpec& spec) : op_(&op), nt_(ntheta)
{
    if (ntheta < 8) throw ConfigError("ntheta must be >= 8");
    const Profile& p = op.profile();
    grid_ = std::make_unique<RadialGrid>(p.config(), p.eps(), p.kappa(), spec);
    poisson_ = std::make_unique<PoissonSolver>(*grid_, nt_, circulation(p.config()));
}

Nonlinear::~Nonlinear() = default;

void Nonlinear::check_admissible(const LevelSet& f) const
{
    const ZGrid& zg = op_->zgrid();
    const AnnulusConfig& c = op_->profile().config();
    const double e = op_->profile().eps();
    const int N = zg.size();
    if (f.nt != nt_ || f.f[0].rows() != N || f.f[1].rows() != N)
        throw ConfigError("level set does not match the z-grid / theta resolution");
    for (int l = 0; l < nt_; ++l) {
        double edge[2][2];
        for (int b = 0; b < 2; ++b) {
            Eigen::VectorXd col = f.f[b].col(l);
            Eigen::VectorXd d = zg.diff() * col;
            if ((d.array() / e <= -1.0).any()) {
                std::ostringstream os;
                os << "level set not monotone: 1 + f_r <= 0 on band " << b + 1 << " at theta index " << l;
                throw NumericError(os.str());
            }
            double R = b == 0 ? c.R1 : c.R2;
            edge[b][0] = R - e + zg.interpolate(col.data(), -1.0);
            edge[b][1] = R + e + zg.interpolate(col.data(), 1.0);
        }
        if (!(c.r1 < edge[0][0] && edge[0][1] < edge[1][0] && edge[1][1] < c.r2))
            throw NumericError("deformed bands overlap or leave the annulus");
    }
}

namespace {

// Per-column band inverters; edge[b] = deformed band ends.
struct Column {
    Inverter inv[2];
    double edge[2][2];
};

Column make_column(const ZGrid& zg, const AnnulusConfig& c, double e, const LevelSet& f, int l)
{
    Column col{{Inverter{zg, c.R1, e, {}, {}}, Inverter{zg, c.R2, e, {}, {}}}, {}};
    for (int b = 0; b < 2; ++b) {
        Eigen::VectorXd v = f.f[b].col(l), d = zg.diff() * v;
        col.inv[b].f.assign(v.data(), v.data() + v.size());
        col.inv[b].df.assign(d.data(), d.data() + d.size());
        col.edge[b][0] = col.inv[b].value(-1.0);
        col.edge[b][1] = col.inv[b].value(1.0);
    }
    return col;
}

double column_omega(const Column& col, const Profile& p, double r)
{
    const double base = 2.0 * p.config().A;
    for (int b = 0; b < 2; ++b) {
        if (r < col.edge[b][0] || r > col.edge[b][1]) continue;
        double z = col.inv[b].solve(r);
        return base + p.eps() * p.phi(b == 0 ? -z : z);
    }
    if (r > col.edge[0][1] && r < col.edge[1][0]) return base + p.eps();
    return base;
}

}  // namespace

Field Nonlinear::vorticity(const LevelSet& f) const
{
    check_admissible(f);
    const Profile& p = op_->profile();
    const auto& r = grid_->nodes();
    const int nr = grid_->size();
    Field w(nr, nt_);
    parallel_for(nt_, [&](int l) {
        Column col = make_column(op_->zgrid(), p.config(), p.eps(), f, l);
        for (int i = 0; i < nr; ++i) w(i, l) = column_omega(col, p, r[i]);
    });
    return w;
}

double Nonlinear::omega_at(const LevelSet& f, int l, double r) const
{
    check_admissible(f);
    const Profile& p = op_->profile();
    return column_omega(make_column(op_->zgrid(), p.config(), p.eps(), f, l), p, r);
}

void Nonlinear::stream(const Field& omega, Field& psi) const { poisson_->solve(omega, psi); }

FunctionalValue Nonlinear::functional(double lambda, const LevelSet& f) const
{
    Field omega = vorticity(f);
    Field psi;
    stream(omega, psi);
    const ZGrid& zg = op_->zgrid();
    const AnnulusConfig& c = op_->profile().config();
    const double e = op_->profile().eps();
    const int N = zg.size(), nr = grid_->size();
    FunctionalValue out;
    for (int b = 0; b < 2; ++b) out.F[b].resize(N, nt_);
    parallel_for(nt_, [&](int l) {
        std::vector<double> col(nr);
        for (int i = 0; i < nr; ++i) col[i] = psi(i, l);
        for (int b = 0; b < 2; ++b) {
            double R = b == 0 ? c.R1 : c.R2;
            for (int k = 0; k < N; ++k) {
                double rr = R + e * zg.z()[k] + f.f[b](k, l);
                out.F[b](k, l) = 0.5 * lambda * rr * rr + grid_->interpolate(col.data(), rr);
            }
        }
    });
    double sup = 0.0, l2 = 0.0;
    for (int b = 0; b < 2; ++b) {
        for (int k = 0; k < N; ++k) {
            double mean = out.F[b].row(k).mean();
            out.F[b].row(k).array() -= mean;
            sup = std::max(sup, out.F[b].row(k).cwiseAbs().maxCoeff());
            l2 += zg.w()[k] * out.F[b].row(k).squaredNorm() * (2.0 * M_PI / nt_);
        }
    }
    out.sup = sup;
    out.l2 = std::sqrt(l2);
    return out;
}

Eigen::VectorXd Nonlinear::cos_coefficient(const FunctionalValue& F, int m) const
{
    const int N = op_->zgrid().size();
    Eigen::VectorXd c(nt_);
    for (int l = 0; l < nt_; ++l) c(l) = 2.0 * std::cos(m * theta_of(l, nt_)) / nt_;
    Eigen::VectorXd out(2 * N);
    out.head(N) = F.F[0] * c;
    out.tail(N) = F.F[1] * c;
    return out;
}

double Nonlinear::off_mode_sup(const FunctionalValue& F, int m) const
{
    double sup = 0.0;
    for (int n = 1; n <= nt_ / 2; ++n) {
        if (n == m) continue;
        Eigen::VectorXd cs(nt_), sn_(nt_);
        for (int l = 0; l < nt_; ++l) {
            double f = (2 * n == nt_ ? 1.0 : 2.0) / nt_;
            cs(l) = f * std::cos(n * theta_of(l, nt_));
            sn_(l) = f * std::sin(n * theta_of(l, nt_));
        }
        for (int b = 0; b < 2; ++b) {
            Eigen::VectorXd a = F.F[b] * cs, s = F.F[b] * sn_;
            sup = std::max({sup, a.cwiseAbs().maxCoeff(), s.cwiseAbs().maxCoeff()});
        }
    }
    return sup;
}

Eigen::VectorXd Nonlinear::linear_response(int m, double lambda, const Eigen::VectorXd& h) const
{
    const ZGrid& zg = op_->zgrid();
    const AnnulusConfig& c = op_->profile().config();
    const double e = op_->profile().eps();
    const int N = zg.size();
    Eigen::VectorXd y = op_->assemble(m, lambda) * h;
    for (int k = 0; k < N; ++k) {
        y(k) /= c.R1 + e * zg.z()[k];
        y(N + k) /= c.R2 + e * zg.z()[k];
    }
    return y;
}

std::vector<LinearizationRow> linearization_check(const Nonlinear& nl, double lambda, const Eigen::VectorXd& h, int m,
                                                  const std::vector<double>& taus)
{
    const ZGrid& zg = nl.op().zgrid();
    const int N = zg.size(), nt = nl.ntheta();
    const Eigen::VectorXd Lh = nl.linear_response(m, lambda, h);
    FunctionalValue F0 = nl.functional(lambda, LevelSet::zero(N, nt));
    std::vector<LinearizationRow> rows;
    for (double tau : taus) {
        FunctionalValue Ft = nl.functional(lambda, LevelSet::mode(h, m, tau, nt));
        double err = 0.0, ref = 0.0, off = 0.0;
        for (int b = 0; b < 2; ++b) {
            for (int k = 0; k < N; ++k) {
                for (int l = 0; l < nt; ++l) {
                    double cl = std::cos(m * 2.0 * M_PI * l / nt);
                    double d = (Ft.F[b](k, l) - F0.F[b](k, l)) / tau;
                    double lin = Lh(b * N + k) * cl;
                    err += zg.w()[k] * (d - lin) * (d - lin);
                    ref += zg.w()[k] * lin * lin;
                }
            }
        }
        FunctionalValue D;
        for (int b = 0; b < 2; ++b) D.F[b] = (Ft.F[b] - F0.F[b]) / tau;
        off = nl.off_mode_sup(D, m) / Lh.cwiseAbs().maxCoeff();
        rows.push_back({tau, std::sqrt(err / ref), off});
    }
    return rows;
}

SobolevNorms sobolev_norms(const Profile& prof, const ZGrid& zg, const LevelSet& f)
{
    const AnnulusConfig& c = prof.config();
    const double e = prof.eps();
    const int N = zg.size(), nt = f.nt;
    const double dth = 2.0 * M_PI / nt;
    const Eigen::MatrixXd& D = zg.diff();
    SobolevNorms out;
    double l2 = 0.0, h1 = 0.0, h2 = 0.0;
    double edge_hi1 = 0.0, edge_lo2 = 0.0;
    for (int b = 0; b < 2; ++b) {
        const double R = b == 0 ? c.R1 : c.R2;
        const Eigen::MatrixXd& F = f.f[b];
        Eigen::MatrixXd Fr = D * F / e, Frr = D * (D * F) / (e * e);
        Eigen::MatrixXd Ft = theta_derivative(F, 1), Ftt = theta_derivative(F, 2), Frt = D * Ft / e;
        for (int k = 0; k < N; ++k) {
            const double z = zg.z()[k], rho = R + e * z;
            const double v = prof.varpi(rho), v1 = prof.dvarpi(rho), v2 = prof.d2varpi(rho);
            out.band_h1_sq[b] += e * zg.w()[k] * v1 * v1;
            out.band_h2_sq[b] += e * zg.w()[k] * v2 * v2;
            for (int l = 0; l < nt; ++l) {
                const double J = 1.0 + Fr(k, l), r = rho + F(k, l), ft = Ft(k, l);
                const double g = v1 / J;
                const double g_r = v2 / J - v1 * Frr(k, l) / (J * J);
                const double g_t = -v1 * Frt(k, l) / (J * J);
                const double w_r = g, w_t = -ft * g;
                const double w_rr = g_r / J;
                const double w_rt = g_t - g_r * ft / J;
                const double q_r = -Frt(k, l) * g - ft * g_r, q_t = -Ftt(k, l) * g - ft * g_t;
                const double w_tt = q_t - q_r * ft / J;
                const double Hrr = w_rr, Hrt = w_rt / r - w_t / (r * r), Htt = w_tt / (r * r) + w_r / r;
                const double dA = r * J * e * zg.w()[k] * dth;
                l2 += v * v * dA;
                h1 += (w_r * w_r + w_t * w_t / (r * r)) * dA;
                h2 += (Hrr * Hrr + 2.0 * Hrt * Hrt + Htt * Htt) * dA;
            }
        }
    }
    // plateau eps between the deformed bands
    for (int l = 0; l < nt; ++l) {
        Eigen::VectorXd c0 = f.f[0].col(l), c1 = f.f[1].col(l);
        edge_hi1 = c.R1 + e + zg.interpolate(c0.data(), 1.0);
        edge_lo2 = c.R2 - e + zg.interpolate(c1.data(), -1.0);
        l2 += e * e * 0.5 * (edge_lo2 * edge_lo2 - edge_hi1 * edge_hi1) * dth;
    }
    out.l2 = std::sqrt(l2);
    out.h1 = std::sqrt(h1);
    out.h2 = std::sqrt(h2);
    return out;
}

double sobolev_interpolate(const SobolevNorms& n, double s)
{
    if (!(s >= 0.0 && s < 1.5)) throw DomainError("Sobolev index must lie in [0, 3/2)");
    if (s <= 1.0) return std::pow(n.l2, 1.0 - s) * std::pow(n.h1, s);
    return std::pow(n.h1, 2.0 - s) * std::pow(n.h2, s - 1.0);
}

double band_dot(const ZGrid& zg, const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    const int N = zg.size();
    double s = 0.0;
    for (int k = 0; k < N; ++k) s += zg.w()[k] * (x(k) * y(k) + x(N + k) * y(N + k));
    return s;
}

Eigen::VectorXd normalized_kernel(const ZGrid& zg, const EigenSolution& sol)
{
    Eigen::VectorXd h = sol.h();
    return h / std::sqrt(band_dot(zg, h, h));
}

std::vector<BranchPoint> continue_branch(const Nonlinear& nl, const EigenSolution& sol, double sigma_target, int steps,
                                         const BranchOptions& opt)
{
    if (!(sigma_target > 0.0) || steps < 1) throw ConfigError("continuation needs sigma > 0 and steps >= 1");
    const BandOperator& op = nl.op();
    const ZGrid& zg = op.zgrid();
    const AnnulusConfig& c = op.profile().config();
    const double e = op.profile().eps();
    const int N = zg.size(), nt = nl.ntheta(), m = sol.lead.m;
    const Eigen::VectorXd h = normalized_kernel(zg, sol);
    Eigen::VectorXd zeta(2 * N), Wh(2 * N);
    for (int k = 0; k < N; ++k) {
        zeta(k) = c.R1 + e * zg.z()[k];
        zeta(N + k) = c.R2 + e * zg.z()[k];
        Wh(k) = zg.w()[k] * h(k);
        Wh(N + k) = zg.w()[k] * h(N + k);
    }

    std::vector<BranchPoint> pts;
    BranchPoint p0;
    p0.lambda = sol.lambda();
    p0.profile = Eigen::VectorXd::Zero(2 * N);
    pts.push_back(p0);

    // unknowns: f = sigma (h + w) cos(m theta), <w, h> = 0, and lambda
    Eigen::VectorXd w = Eigen::VectorXd::Zero(2 * N);
    double lam = sol.lambda(), sigma = 0.0, step = sigma_target / steps;
    int halvings = 0;
    while (sigma < sigma_target * (1.0 - 1e-12)) {
        const double s = std::min(sigma_target, sigma + step);
        Eigen::VectorXd wn = w;
        double ln = lam;
        bool ok = false;
        BranchPoint bp;
        double prev = INFINITY;
        for (int it = 0; it < opt.max_newton; ++it) {
            LevelSet f = LevelSet::mode(h + wn, m, s, nt);
            FunctionalValue F;
            try {
                F = nl.functional(ln, f);
            } catch (const NumericError&) {
                break;
            }
            Eigen::VectorXd r = nl.cos_coefficient(F, m);
            double res = r.cwiseAbs().maxCoeff();
            double con = Wh.dot(wn);
            if (!std::isfinite(res) || res > 10.0 * prev) break;
            prev = res;
            // always apply at least one correction so every point is Newton-refined
            if (it > 0 && res <= opt.tol && std::abs(con) <= 1e-12) {
                ok = true;
                bp.sigma = s;
                bp.lambda = ln;
                bp.profile = s * (h + wn);
                bp.residual = res;
                bp.full_residual = nl.off_mode_sup(F, m);
                bp.newton_iterations = it;
                break;
            }
            Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * N + 1, 2 * N + 1);
            J.topLeftCorner(2 * N, 2 * N) = zeta.cwiseInverse().asDiagonal() * op.assemble(m, ln);
            J.block(0, 2 * N, 2 * N, 1) = zeta.cwiseProduct(h + wn);
            J.block(2 * N, 0, 1, 2 * N) = Wh.transpose();
            Eigen::VectorXd rhs(2 * N + 1);
            rhs.head(2 * N) = -r / s;
            rhs(2 * N) = -con;
            Eigen::VectorXd dx = J.partialPivLu().solve(rhs);
            wn += dx.head(2 * N);
            ln += dx(2 * N);
        }
        if (!ok) {
            if (++halvings > opt.max_halvings) {
                std::ostringstream os;
                os << "continuation failed at sigma = " << s << " after " << opt.max_halvings << " step halvings";
                throw NumericError(os.str());
            }
            step *= 0.5;
            continue;
        }
        sigma = s;
        w = wn;
        lam = ln;
        pts.push_back(bp);
    }
    return pts;
}

}  // namespace annulus
