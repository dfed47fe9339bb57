#include "annulus/domain.hpp"
#include "annulus/errors.hpp"
#include "annulus/profile.hpp"
#include "annulus/quadrature.hpp"

#include <cmath>
#include <string>

namespace annulus {

void AnnulusConfig::validate() const
{
    auto fin = [](double v) { return std::isfinite(v); };
    if (!(fin(r1) && fin(r2) && fin(R1) && fin(R2) && fin(A) && fin(B)))
        throw ConfigError("geometry and flow constants must be finite");
    if (!(0.0 < r1 && r1 < R1 && R1 < R2 && R2 < r2))
        throw ConfigError("ordering invariant violated: need 0 < r1 < R1 < R2 < r2");
    if (B == 0.0) throw ConfigError("B must be nonzero (B != 0 is required for a rotating wave)");
    if (std::abs(u_tc(*this, R1) - u_tc(*this, R2)) < 1e-14 * (std::abs(A) * r2 + std::abs(B) / r1))
        throw ConfigError("u_tc(R1) must differ from u_tc(R2)");
    if (u_tc(*this, R2) == 0.0) throw ConfigError("u_tc(R2) must be nonzero");
}

double u_tc(const AnnulusConfig& cfg, double r)
{
    if (!(r >= cfg.r1 && r <= cfg.r2))
        throw DomainError("u_tc: radius " + std::to_string(r) + " outside [r1, r2]");
    return cfg.A * r + cfg.B / r;
}

double circulation(const AnnulusConfig& cfg)
{
    return -(0.5 * cfg.A * (cfg.r2 * cfg.r2 - cfg.r1 * cfg.r1) + cfg.B * std::log(cfg.r2 / cfg.r1));
}

double lambda0(const AnnulusConfig& cfg)
{
    const double L = std::log(cfg.r2 / cfg.r1), R22 = cfg.R2 * cfg.R2;
    return cfg.A * (1.0 - (cfg.r2 * cfg.r2 - cfg.r1 * cfg.r1) / (2.0 * R22 * L))
         - circulation(cfg) / (R22 * L);
}

double lambda0_direct(const AnnulusConfig& cfg) { return u_tc(cfg, cfg.R2) / cfg.R2; }

BaseStream::BaseStream(const AnnulusConfig& cfg, const Profile* profile) : cfg_(cfg), prof_(profile)
{
    const double r1 = cfg.r1, r2 = cfg.r2, L = std::log(r2 / r1);
    C_ = (circulation(cfg) + cfg.A * (0.5 * (r2 * r2 - r1 * r1) - r1 * r1 * L)
          + std::log(r2) * moment1(r2) - moment_log(r2)) / L;
}

namespace {

template <class F>
double profile_integral(const Profile* p, double r, F&& g)
{
    if (!p) return 0.0;
    const Rule& ref = gauss_legendre(40);
    double a = p->breakpoints().front(), s = 0.0;
    auto bps = p->breakpoints();
    for (size_t k = 1; k < bps.size() && a < r; ++k) {
        double b = std::min(bps[k], r);
        if (b > a) {
            Rule q = mapped(ref, a, b);
            for (size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * q.x[i] * p->varpi(q.x[i]) * g(q.x[i]);
        }
        a = bps[k];
    }
    return s;
}

}  // namespace

double BaseStream::moment1(double r) const
{
    return profile_integral(prof_, r, [](double) { return 1.0; });
}

double BaseStream::moment_log(double r) const
{
    return profile_integral(prof_, r, [](double t) { return std::log(t); });
}

double BaseStream::phi(double r) const
{
    if (!(r >= cfg_.r1 && r <= cfg_.r2)) throw DomainError("phi: radius outside [r1, r2]");
    const double r1 = cfg_.r1, l = std::log(r / r1);
    return C_ * l - cfg_.A * (0.5 * (r * r - r1 * r1) - r1 * r1 * l)
         - (std::log(r) * moment1(r) - moment_log(r));
}

double BaseStream::dphi(double r) const
{
    if (!(r >= cfg_.r1 && r <= cfg_.r2)) throw DomainError("dphi: radius outside [r1, r2]");
    const double r1 = cfg_.r1;
    return C_ / r - cfg_.A * (r - r1 * r1 / r) - moment1(r) / r;
}

}  // namespace annulus
