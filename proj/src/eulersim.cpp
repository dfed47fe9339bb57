#include "annulus/eulersim.hpp"
#include "annulus/errors.hpp"
#include "annulus/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace annulus {

RadialGridSpec sim_grid_spec(int nr, double eps)
{
    if (nr < 64) throw ConfigError("simulation needs nr >= 64");
    RadialGridSpec s;
    const int band = nr / 3, rest = (nr - 2 * band) / 3;
    s.nodes = {rest, band, nr - 2 * band - 2 * rest, band, rest};
    s.margin = 0.3 * eps;
    return s;
}

Simulator::Simulator(const Nonlinear& nl, bool two_thirds)
    : nl_(&nl), nt_(nl.ntheta()), gamma_(circulation(nl.op().profile().config()))
{
    poisson_ = std::make_unique<PoissonSolver>(nl.grid(), nt_, gamma_, two_thirds);
    const auto& r = nl.grid().nodes();
    const int n = static_cast<int>(r.size());
    fd_start_.resize(n);
    fd_w_.resize(n);
    for (int i = 0; i < n; ++i) {
        int s = std::clamp(i - 2, 0, n - 5);
        auto w = fd_weights(r[i], r.data() + s, 5, 1);
        fd_start_[i] = s;
        std::copy(w.begin(), w.end(), fd_w_[i].begin());
    }
}

Simulator::~Simulator() = default;

SimState Simulator::initial_state(const Eigen::VectorXd& profile, int m) const
{
    return {nl_->vorticity(LevelSet::mode(profile, m, 1.0, nt_)), 0.0};
}

SimState Simulator::radial_state(const std::function<double(double)>& omega) const
{
    const auto& r = grid().nodes();
    SimState s{Field(grid().size(), nt_), 0.0};
    for (int i = 0; i < s.omega.nr; ++i)
        for (int l = 0; l < nt_; ++l) s.omega(i, l) = omega(r[i]);
    return s;
}

void Simulator::velocity(const Field& omega, Field& ur, Field& ut) const
{
    Field psi;
    poisson_->solve(omega, psi, &ut, &ur);
    const auto& r = grid().nodes();
    for (int i = 0; i < ur.nr; ++i) {
        for (int l = 0; l < nt_; ++l) {
            ur(i, l) /= r[i];
            ut(i, l) = -ut(i, l);
        }
    }
    // no penetration: psi is constant on each wall
    for (int l = 0; l < nt_; ++l) {
        ur(0, l) = 0.0;
        ur(ur.nr - 1, l) = 0.0;
    }
}

double Simulator::max_dt(const Field& omega) const
{
    Field ur, ut;
    velocity(omega, ur, ut);
    const auto& r = grid().nodes();
    const double dth = 2.0 * M_PI / nt_;
    double dt = INFINITY;
    for (int i = 0; i < ur.nr; ++i) {
        double dr = INFINITY;
        if (i > 0) dr = r[i] - r[i - 1];
        if (i + 1 < ur.nr) dr = std::min(dr, r[i + 1] - r[i]);
        for (int l = 0; l < nt_; ++l) {
            if (ur(i, l) != 0.0) dt = std::min(dt, dr / std::abs(ur(i, l)));
            if (ut(i, l) != 0.0) dt = std::min(dt, r[i] * dth / std::abs(ut(i, l)));
        }
    }
    return 0.5 * dt;
}

void Simulator::dr(const Field& f, Field& out) const
{
    out = Field(f.nr, f.nt);
    for (int i = 0; i < f.nr; ++i) {
        const int s = fd_start_[i];
        const auto& w = fd_w_[i];
        for (int l = 0; l < f.nt; ++l) {
            double d = 0.0;
            for (int k = 0; k < 5; ++k) d += w[k] * f(s + k, l);
            out(i, l) = d;
        }
    }
}

void Simulator::rhs(const Field& omega, Field& out) const
{
    Field ur, ut, wr, wt;
    velocity(omega, ur, ut);
    dr(omega, wr);
    poisson_->dtheta(omega, wt);
    const auto& r = grid().nodes();
    out = Field(omega.nr, omega.nt);
    for (int i = 0; i < omega.nr; ++i)
        for (int l = 0; l < nt_; ++l) out(i, l) = -ur(i, l) * wr(i, l) - ut(i, l) / r[i] * wt(i, l);
}

void Simulator::step(SimState& s, double dt) const
{
    const double lim = max_dt(s.omega);
    if (dt > lim * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "CFL violation: dt = " << dt << " exceeds the bound; suggested dt = " << lim;
        throw NumericError(os.str());
    }
    const size_t n = s.omega.v.size();
    Field k1, k2, k3, k4, tmp = s.omega;
    rhs(s.omega, k1);
    for (size_t j = 0; j < n; ++j) tmp.v[j] = s.omega.v[j] + 0.5 * dt * k1.v[j];
    rhs(tmp, k2);
    for (size_t j = 0; j < n; ++j) tmp.v[j] = s.omega.v[j] + 0.5 * dt * k2.v[j];
    rhs(tmp, k3);
    for (size_t j = 0; j < n; ++j) tmp.v[j] = s.omega.v[j] + dt * k3.v[j];
    rhs(tmp, k4);
    for (size_t j = 0; j < n; ++j) s.omega.v[j] += dt / 6.0 * (k1.v[j] + 2.0 * k2.v[j] + 2.0 * k3.v[j] + k4.v[j]);
    s.t += dt;
}

Conserved Simulator::conserved(const Field& omega) const
{
    Field ur, ut;
    velocity(omega, ur, ut);
    const auto& r = grid().nodes();
    const auto& w = grid().weights();
    const double dth = 2.0 * M_PI / nt_;
    const AnnulusConfig& c = nl_->op().profile().config();
    Conserved q;
    double circ = 0.0, mass = 0.0, e = 0.0;
    for (int i = 0; i < omega.nr; ++i) {
        for (int l = 0; l < nt_; ++l) {
            circ += w[i] * ut(i, l) * dth;
            mass += w[i] * r[i] * omega(i, l) * dth;
            e += w[i] * r[i] * (ur(i, l) * ur(i, l) + ut(i, l) * ut(i, l)) * dth;
        }
    }
    q.circulation = -circ / (2.0 * M_PI);
    q.mean_vorticity = mass / (M_PI * (c.r2 * c.r2 - c.r1 * c.r1));
    q.energy = 0.5 * e;
    return q;
}

namespace {

std::vector<std::complex<double>> mode_coefficients(const Field& f, int m)
{
    std::vector<std::complex<double>> c(f.nr);
    for (int i = 0; i < f.nr; ++i) {
        std::complex<double> s = 0.0;
        for (int l = 0; l < f.nt; ++l) s += f(i, l) * std::polar(1.0, -2.0 * M_PI * double(m * l % f.nt) / f.nt);
        c[i] = s / double(f.nt);
    }
    return c;
}

double l2_norm(const RadialGrid& g, const Field& f)
{
    double s = 0.0;
    for (int i = 0; i < f.nr; ++i)
        for (int l = 0; l < f.nt; ++l) s += g.weights()[i] * g.nodes()[i] * f(i, l) * f(i, l);
    return std::sqrt(s * 2.0 * M_PI / f.nt);
}

}  // namespace

double mode_shift(const Simulator& sim, const Field& ref, const Field& now, int m)
{
    auto a = mode_coefficients(ref, m), b = mode_coefficients(now, m);
    const auto& r = sim.grid().nodes();
    const auto& w = sim.grid().weights();
    std::complex<double> cross = 0.0;
    double na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        cross += w[i] * r[i] * b[i] * std::conj(a[i]);
        na += w[i] * r[i] * std::norm(a[i]);
        nb += w[i] * r[i] * std::norm(b[i]);
    }
    if (!(na > 0.0) || std::abs(cross) < 0.5 * std::sqrt(na * nb)) {
        std::ostringstream os;
        os << "rotation fit ill-conditioned: mode-" << m << " correlation "
           << (na > 0.0 && nb > 0.0 ? std::abs(cross) / std::sqrt(na * nb) : 0.0) << " (pattern lost)";
        throw NumericError(os.str());
    }
    // omega(r, theta - a) has mode-m coefficient c exp(-i m a)
    return -std::arg(cross) / m;
}

RotationReport verify_rotation(const Simulator& sim, const SimState& s0, int m, double lambda_expected, double dt,
                               int checkpoint_every, double period)
{
    if (m < 1 || checkpoint_every < 1 || !(dt > 0.0)) throw ConfigError("verify_rotation: need m >= 1, dt > 0, checkpoint_every >= 1");
    RotationReport rep;
    rep.lambda_expected = lambda_expected;
    rep.period = period > 0.0 ? period : 2.0 * M_PI / (m * std::abs(lambda_expected));
    const double lim = sim.max_dt(s0.omega);
    // keep a margin below the bound: the velocity changes slightly along the run
    rep.steps = static_cast<int>(std::ceil(rep.period / std::min(dt, 0.95 * lim)));
    rep.dt = rep.period / rep.steps;

    Field pattern0 = s0.omega;
    for (int i = 0; i < s0.omega.nr; ++i) {
        double mu = 0.0;
        for (int l = 0; l < s0.omega.nt; ++l) mu += s0.omega(i, l);
        mu /= s0.omega.nt;
        for (int l = 0; l < s0.omega.nt; ++l) pattern0(i, l) -= mu;
    }
    const double norm0 = l2_norm(sim.grid(), s0.omega), pnorm0 = l2_norm(sim.grid(), pattern0);
    const Conserved q0 = sim.conserved(s0.omega);

    SimState s = s0;
    double shift = 0.0, stt = 0.0, sts = 0.0;
    const double wrap = 2.0 * M_PI / m;
    auto sample = [&]() {
        double raw = mode_shift(sim, s0.omega, s.omega, m);
        double d = std::remainder(raw - shift, wrap);
        shift += d;
        stt += s.t * s.t;
        sts += s.t * shift;
        Field diff = s.omega;
        for (size_t j = 0; j < diff.v.size(); ++j) diff.v[j] -= s0.omega.v[j];
        Conserved q = sim.conserved(s.omega);
        RotationSample rs;
        rs.t = s.t;
        rs.shift = shift;
        rs.lambda_meas = stt > 0.0 ? sts / stt : 0.0;
        rs.return_error = l2_norm(sim.grid(), diff) / norm0;
        rs.circulation = q.circulation;
        rs.energy = q.energy;
        rs.mean_vorticity = q.mean_vorticity;
        rep.series.push_back(rs);
        rep.circulation_drift = std::max(rep.circulation_drift, std::abs(q.circulation - q0.circulation));
        rep.mean_drift = std::max(rep.mean_drift, std::abs(q.mean_vorticity - q0.mean_vorticity) /
                                                      std::max(std::abs(q0.mean_vorticity), 1e-300));
        rep.energy_drift = std::max(rep.energy_drift, std::abs(q.energy - q0.energy) / q0.energy);
        return diff;
    };
    sample();
    Field diff;
    for (int k = 1; k <= rep.steps; ++k) {
        sim.step(s, rep.dt);
        // the return comparison wants the exact period, not the accumulated sum
        if (k == rep.steps) s.t = rep.period;
        if (k % checkpoint_every == 0 || k == rep.steps) diff = sample();
    }
    rep.lambda_meas = rep.series.back().lambda_meas;
    rep.return_error = rep.series.back().return_error;
    rep.pattern_return_error = l2_norm(sim.grid(), diff) / pnorm0;
    return rep;
}

}  // namespace annulus
