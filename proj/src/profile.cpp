#include "annulus/profile.hpp"
#include "annulus/errors.hpp"
#include "annulus/quadrature.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace annulus {

namespace {

double bump(double u)
{
    double s = 1.0 - u * u;
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

// Gauss rule on [a, b] split into k equal panels.
template <class F>
double integrate(F&& f, double a, double b, int n, int k = 1)
{
    if (b <= a) return 0.0;
    const Rule& ref = gauss_legendre(n);
    double sum = 0.0, h = (b - a) / k;
    for (int p = 0; p < k; ++p) {
        Rule r = mapped(ref, a + p * h, a + (p + 1) * h);
        for (size_t i = 0; i < r.x.size(); ++i) sum += r.w[i] * f(r.x[i]);
    }
    return sum;
}

// int_a^b of the bump for -1 <= a < b <= 0. Panels are graded toward the
// essential singularity at -1; below -1 + 1/1400 the bump underflows.
double bump_integral(double a, double b)
{
    const double cut = -1.0 + 1.0 / 1400.0;
    a = std::max(a, cut);
    double s = 0.0, d = 1.0 / 1400.0;
    while (a < b) {
        double e = std::min(b, std::max(a, -1.0 + 2.0 * d));
        if (e > a) s += integrate(bump, a, e, 24);
        a = std::max(a, e);
        d *= 2.0;
    }
    return s;
}

double bump_mass()
{
    static const double m = 2.0 * bump_integral(-1.0, 0.0);
    return m;
}

}  // namespace

double mollifier(double u) { return bump(u) / bump_mass(); }

double mollifier_cdf(double v)
{
    if (v <= -1.0) return 0.0;
    if (v >= 1.0) return 1.0;
    if (v > 0.0) return 1.0 - mollifier_cdf(-v);
    return bump_integral(-1.0, v) / bump_mass();
}

Profile::Profile(const AnnulusConfig& cfg, double eps, double kappa, int table_points)
    : cfg_(cfg), eps_(eps), kappa_(kappa)
{
    if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
    if (!(kappa > 0.0 && kappa < 0.5)) throw ConfigError("kappa must lie in (0, 0.5)");
    if (cfg.R1 - eps <= cfg.r1 || cfg.R2 + eps >= cfg.r2 || cfg.R1 + eps >= cfg.R2 - eps)
        throw ConfigError("eps too large: bands [R_i - eps, R_i + eps] must be disjoint and inside (r1, r2)");
    if (table_points < 16) throw ConfigError("profile table needs at least 16 points");

    const int n = table_points;
    zt_.resize(n);
    ft_.resize(n);
    dt_.resize(n);
    for (int i = 0; i < n; ++i) {
        zt_[i] = -1.0 + 2.0 * i / (n - 1);
        dt_[i] = dphi(zt_[i]);
    }
    ft_[0] = 1.0;
    for (int i = 1; i < n; ++i)
        ft_[i] = ft_[i - 1] + integrate([this](double z) { return dphi(z); }, zt_[i - 1], zt_[i], 8);
}

double Profile::dphi(double z) const
{
    const double k = kappa_;
    double lo = std::max(-1.0, (z - 1.0 + k) / k);
    double hi = std::min(1.0, (z + 1.0 - k) / k);
    if (hi <= lo) return 0.0;
    double inner = k * (mollifier_cdf(hi) - mollifier_cdf(lo));
    return -inner / (k * (2.0 - 2.0 * k));
}

double Profile::d2phi(double z) const
{
    const double k = kappa_;
    return -(mollifier((z + 1.0 - k) / k) - mollifier((z - 1.0 + k) / k)) / (k * (2.0 - 2.0 * k));
}

double Profile::phi_exact(double z) const
{
    if (z <= -1.0) return 1.0;
    if (z >= 1.0) return 0.0;
    // split at the kink-free points +-(1 - 2 kappa) for fast convergence
    const double c = 1.0 - 2.0 * kappa_;
    auto f = [this](double t) { return dphi(t); };
    double s = 0.0, a = -1.0;
    for (double b : {-c, c, 1.0}) {
        double e = std::min(b, z);
        if (e > a) s += integrate(f, a, e, 40);
        a = b;
        if (z <= b) break;
    }
    return 1.0 + s;
}

double Profile::phi(double z) const
{
    if (z <= -1.0) return 1.0;
    if (z >= 1.0) return 0.0;
    const int n = static_cast<int>(zt_.size());
    const double h = 2.0 / (n - 1);
    int i = std::min(n - 2, static_cast<int>((z + 1.0) / h));
    double t = (z - zt_[i]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * ft_[i] + h10 * h * dt_[i] + h01 * ft_[i + 1] + h11 * h * dt_[i + 1];
}

double Profile::varpi(double r) const
{
    const double e = eps_;
    if (r < cfg_.R1 - e) return 0.0;
    if (r <= cfg_.R1 + e) return e * phi((cfg_.R1 - r) / e);
    if (r < cfg_.R2 - e) return e;
    if (r <= cfg_.R2 + e) return e * phi((r - cfg_.R2) / e);
    return 0.0;
}

double Profile::dvarpi(double r) const
{
    const double e = eps_;
    if (std::abs(r - cfg_.R1) < e) return -dphi((cfg_.R1 - r) / e);
    if (std::abs(r - cfg_.R2) < e) return dphi((r - cfg_.R2) / e);
    return 0.0;
}

double Profile::d2varpi(double r) const
{
    const double e = eps_;
    if (std::abs(r - cfg_.R1) < e) return d2phi((cfg_.R1 - r) / e) / e;
    if (std::abs(r - cfg_.R2) < e) return d2phi((r - cfg_.R2) / e) / e;
    return 0.0;
}

std::vector<double> Profile::breakpoints() const
{
    const double e = eps_, c = e * (1.0 - 2.0 * kappa_);
    return {cfg_.R1 - e, cfg_.R1 - c, cfg_.R1 + c, cfg_.R1 + e,
            cfg_.R2 - e, cfg_.R2 - c, cfg_.R2 + c, cfg_.R2 + e};
}

void Profile::dump(std::ostream& os, int n) const
{
    os << "z,phi,dphi,d2phi\n" << std::setprecision(17);
    for (int i = 0; i < n; ++i) {
        double z = -1.0 + 2.0 * i / (n - 1);
        os << z << ',' << phi(z) << ',' << dphi(z) << ',' << d2phi(z) << '\n';
    }
}

}  // namespace annulus
