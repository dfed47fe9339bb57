#include "annulus/kernel.hpp"
#include "annulus/domain.hpp"
#include "annulus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace annulus {

namespace {

double dz_dot(const ZGrid& zg, const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    double s = 0.0;
    for (int i = 0; i < zg.size(); ++i) s += zg.w()[i] * x(i) * y(i);
    return s;
}

// int phi'(s) g(s) ds on the z-grid
double phi_moment(const BandOperator& op, const Eigen::VectorXd& g)
{
    const ZGrid& zg = op.zgrid();
    double s = 0.0;
    for (int i = 0; i < zg.size(); ++i) s += zg.w()[i] * op.profile().dphi(zg.z()[i]) * g(i);
    return s;
}

Eigen::VectorXd band_weights(const BandOperator& op, int band)
{
    const int N = op.zgrid().size();
    return op.inner_weights().segment(band * N, N);
}

}  // namespace

double lambda_star(const AnnulusConfig& c, const UpsilonTerms& ups)
{
    return -(2.0 * c.B / c.R2 + ups.ups1_origin[1]) / (c.R2 * c.R2);
}

double lambda_bracket_top(const AnnulusConfig& c, const UpsilonTerms& ups)
{
    return -(2.0 * std::abs(c.B) / c.R2 + ups.ups1_origin[1]) / (c.R2 * c.R2);
}

double alpha0_R1(const AnnulusConfig& c, const UpsilonTerms& ups)
{
    return lambda0(c) * c.R1 * c.R1 + ups.ups0[0];
}

Eigen::VectorXd alpha1_R2(const BandOperator& op, double lam)
{
    const AnnulusConfig& c = op.profile().config();
    const ZGrid& zg = op.zgrid();
    const double l0 = lambda0(c);
    Eigen::VectorXd a(zg.size());
    for (int i = 0; i < zg.size(); ++i)
        a(i) = 2.0 * l0 * c.R2 * zg.z()[i] + lam * c.R2 * c.R2 + op.upsilon().ups1[1][i];
    return a;
}

double lambda1_function(const BandOperator& op, int m, double lam)
{
    Eigen::VectorXd a = alpha1_R2(op, lam);
    return p_coeff(op.profile().config(), 1, m) * phi_moment(op, a.cwiseInverse());
}

double lambda1_closed_form(const AnnulusConfig& c, const UpsilonTerms& ups, int m)
{
    const double k = 2.0 * c.B / c.R2, p2 = p_coeff(c, 1, m);
    return -(k / (c.R2 * c.R2)) * (1.0 + 2.0 / std::expm1(2.0 * k / p2)) - ups.ups1_origin[1] / (c.R2 * c.R2);
}

LeadingOrder solve_lambda1(const BandOperator& op, int m)
{
    if (m < 1) throw ConfigError("mode m must be >= 1");
    const AnnulusConfig& c = op.profile().config();
    LeadingOrder L;
    L.m = m;
    L.lambda0 = lambda0(c);
    L.lambda_star = lambda_star(c, op.upsilon());
    L.p1 = p_coeff(c, 0, m);
    L.p2 = p_coeff(c, 1, m);
    const double top = lambda_bracket_top(c, op.upsilon());
    auto I = [&](double lam) { return lambda1_function(op, m, lam); };

    double Delta = 1.0;
    while (I(top - Delta) >= 1.0) {
        Delta *= 2.0;
        if (Delta > 1e8) throw NumericError("lambda_1 bracket failure: I stays >= 1 far below lambda*");
    }
    double delta = std::min(1e-2, 0.5 * Delta);
    while (I(top - delta) <= 1.0) {
        delta *= 0.5;
        if (delta < 1e-14) {
            std::ostringstream os;
            os << "lambda_1 bracket failure: I(lambda*^-) = " << I(top - delta)
               << " < 1 (invalid configuration or kappa too large)";
            throw NumericError(os.str());
        }
    }
    double lo = top - Delta, hi = top - delta;
    int it = 0;
    for (; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (I(mid) < 1.0 ? lo : hi) = mid;
    }
    L.iterations = it;
    L.lambda1 = std::abs(I(lo) - 1.0) < std::abs(I(hi) - 1.0) ? lo : hi;
    L.I_residual = I(L.lambda1) - 1.0;
    L.alpha1 = alpha1_R2(op, L.lambda1);
    if ((L.alpha1.array() >= 0.0).any()) throw NumericError("alpha_1^{R2} vanishes on the z-grid");
    L.b0 = L.alpha1.cwiseInverse();
    L.alpha0 = alpha0_R1(c, op.upsilon());
    L.a1 = L.p1 / (L.p2 * L.alpha0);
    return L;
}

Eigen::VectorXd beta_term(const BandOperator& op, const LeadingOrder& lead)
{
    const ZGrid& zg = op.zgrid();
    const double R2 = op.profile().config().R2;
    Eigen::VectorXd b(zg.size());
    for (int i = 0; i < zg.size(); ++i) {
        double z = zg.z()[i];
        b(i) = lead.lambda0 * z * z + 2.0 * lead.lambda1 * z * R2;
    }
    return b;
}

Q2Inverse invert_q2hat(const BandOperator& op, const LeadingOrder& lead, const Eigen::VectorXd& G)
{
    const double R2 = op.profile().config().R2;
    const Eigen::VectorXd beta = beta_term(op, lead);
    const Eigen::VectorXd b0sq = lead.b0.cwiseProduct(lead.b0);
    const double den = R2 * R2 * phi_moment(op, b0sq);
    if (std::abs(den) < 1e-14) throw NumericError("invert_q2hat: int b0^2 phi' vanishes");
    Q2Inverse out;
    out.mu = (phi_moment(op, G.cwiseProduct(lead.b0)) - phi_moment(op, beta.cwiseProduct(b0sq))) / den;
    out.g = lead.b0.cwiseProduct(G - (out.mu * R2 * R2 * Eigen::VectorXd::Ones(G.size()) + beta).cwiseProduct(lead.b0));
    return out;
}

Eigen::VectorXd apply_q2hat(const BandOperator& op, const LeadingOrder& lead, const Eigen::VectorXd& g, double mu)
{
    const double R2 = op.profile().config().R2;
    const Eigen::VectorXd beta = beta_term(op, lead);
    Eigen::VectorXd out = lead.alpha1.cwiseProduct(g);
    out.array() -= lead.p2 * phi_moment(op, g);
    out += (mu * R2 * R2 * Eigen::VectorXd::Ones(g.size()) + beta).cwiseProduct(lead.b0);
    return out;
}

Eigen::VectorXd EigenSolution::h() const
{
    const int N = static_cast<int>(b1.size());
    Eigen::VectorXd x(2 * N);
    x.head(N) = eps * lead.a1 * Eigen::VectorXd::Ones(N) + eps * eps * a2;
    x.tail(N) = lead.b0 + eps * b1;
    return x;
}

double EigenSolution::contraction_ratio() const
{
    // median of successive ratios over the geometric phase (before roundoff)
    std::vector<double> r;
    for (size_t k = 1; k < distances.size(); ++k)
        if (distances[k] > 1e-13 && distances[k - 1] > 0) r.push_back(distances[k] / distances[k - 1]);
    if (r.empty()) return 0.0;
    std::sort(r.begin(), r.end());
    return r[r.size() / 2];
}

double operator_residual(const BandOperator& op, const Eigen::MatrixXd& M, const Eigen::VectorXd& h)
{
    const ZGrid& zg = op.zgrid();
    const AnnulusConfig& c = op.profile().config();
    const double e = op.profile().eps();
    const int N = zg.size();
    Eigen::VectorXd r = M * h;
    double s = 0.0;
    for (int i = 0; i < N; ++i) {
        double z = zg.z()[i];
        double u = r(i) / (c.R1 + e * z), v = r(N + i) / (c.R2 + e * z);
        s += zg.w()[i] * (u * u + v * v);
    }
    return std::sqrt(s);
}

EigenSolution fixed_point(const BandOperator& op, int m, double tol, int max_iter)
{
    const ZGrid& zg = op.zgrid();
    const AnnulusConfig& c = op.profile().config();
    const int N = zg.size();
    const double e = op.profile().eps();
    const double R2 = c.R2;

    EigenSolution s;
    s.lead = solve_lambda1(op, m);
    s.eps = e;
    s.a2 = Eigen::VectorXd::Zero(N);
    s.b1 = Eigen::VectorXd::Zero(N);
    s.lambda2 = 0.0;
    const LeadingOrder& L = s.lead;
    const Eigen::MatrixXd C = op.coupling(m, e);
    const Eigen::VectorXd beta = beta_term(op, L);
    auto matrix = [&](double lam) {
        Eigen::MatrixXd M = C;
        M.diagonal() += op.diagonal(lam);
        return M;
    };

    int growth = 0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd h = s.h();
        Eigen::VectorXd r = matrix(s.lambda()) * h;
        const double mb1 = phi_moment(op, s.b1);
        Eigen::VectorXd GB = L.alpha1.cwiseProduct(s.b1);
        GB.array() -= L.p2 * mb1;
        GB += (s.lambda2 * R2 * R2 * Eigen::VectorXd::Ones(N) + beta).cwiseProduct(L.b0);
        GB -= r.tail(N) / (e * e);
        Eigen::VectorXd GA = L.alpha0 * s.a2;
        GA.array() -= L.p1 * mb1;
        GA -= r.head(N) / (e * e);

        Q2Inverse q = invert_q2hat(op, L, GB);
        Eigen::VectorXd a2n = GA;
        a2n.array() += L.p1 * phi_moment(op, q.g);
        a2n /= L.alpha0;

        Eigen::VectorXd da = a2n - s.a2, db = q.g - s.b1;
        double dist = std::sqrt(dz_dot(zg, da, da) + dz_dot(zg, db, db) + (q.mu - s.lambda2) * (q.mu - s.lambda2));
        s.a2 = a2n;
        s.b1 = q.g;
        s.lambda2 = q.mu;
        s.distances.push_back(dist);
        s.iterations = it + 1;
        if (it == 0) {
            s.lambda2_first = s.lambda2;
            s.h_first = s.h();
            s.residual_first = operator_residual(op, matrix(s.lambda_first()), s.h_first);
        }
        if (dist <= tol) break;
        if (it > 0 && dist > s.distances[it - 1]) {
            if (++growth >= 3) {
                std::ostringstream os;
                os << "fixed point is not contracting at eps = " << e << " (Lipschitz estimate "
                   << dist / s.distances[it - 1] << "); eps too large";
                throw NumericError(os.str());
            }
        } else {
            growth = 0;
        }
    }
    if (s.distances.back() > tol) throw NumericError("fixed point did not converge within the iteration cap");
    s.residual = operator_residual(op, matrix(s.lambda()), s.h());
    return s;
}

KernelDiagnostics validate_kernel(const BandOperator& op, const EigenSolution& sol, int max_mode)
{
    const ZGrid& zg = op.zgrid();
    const int N = zg.size();
    const double e = sol.eps;
    const double lam = sol.lambda();
    KernelDiagnostics d;
    d.other_modes.assign(max_mode + 1, 0.0);

    Eigen::MatrixXd M = op.assemble(sol.lead.m, lam);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& S = svd.singularValues();
    const int n = static_cast<int>(S.size());
    d.sigma_max = S(0);
    d.sigma_min = S(n - 1);
    d.sigma_second = S(n - 2);
    d.ratio = d.sigma_min / d.sigma_second;
    d.null_vector = svd.matrixV().col(n - 1);

    // cosine in the L2(dz) product on both bands
    Eigen::VectorXd h = sol.h();
    auto dot = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return dz_dot(zg, x.head(N), y.head(N)) + dz_dot(zg, x.tail(N), y.tail(N));
    };
    d.cosine = std::abs(dot(h, d.null_vector)) / std::sqrt(dot(h, h) * dot(d.null_vector, d.null_vector));
    d.kernel_ok = d.ratio <= 1e-6;

    d.others_ok = true;
    for (int k = 1; k <= max_mode; ++k) {
        if (k == sol.lead.m) continue;
        Eigen::MatrixXd Mk = op.assemble(k, lam);
        Eigen::BDCSVD<Eigen::MatrixXd> sk(Mk);
        const auto& Sk = sk.singularValues();
        d.other_modes[k] = Sk(Sk.size() - 1) / Sk(0);
        if (d.other_modes[k] < 1e-3 * e) d.others_ok = false;
    }
    return d;
}

AdjointKernel adjoint_kernel(const BandOperator& op, const EigenSolution& sol)
{
    const ZGrid& zg = op.zgrid();
    const int N = zg.size();
    const double lam = sol.lambda();
    AdjointKernel k;
    Eigen::MatrixXd Ms = op.assemble_adjoint(sol.lead.m, lam);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Ms, Eigen::ComputeFullV);
    const auto& S = svd.singularValues();
    const int n = static_cast<int>(S.size());
    k.sigma_min = S(n - 1);
    k.sigma_second = S(n - 2);
    if (k.sigma_min > 1e-6 * k.sigma_second) throw NumericError("adjoint kernel is not one-dimensional");
    k.h = svd.matrixV().col(n - 1);
    k.h /= op.norm(k.h);

    const Eigen::VectorXd W2 = band_weights(op, 1);
    const Eigen::VectorXd bs = k.h.tail(N), b0 = sol.lead.b0;
    auto wdot = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return (W2.array() * x.array() * y.array()).sum(); };
    k.b0_coeff = wdot(bs, b0) / wdot(b0, b0);
    if (k.b0_coeff < 0) {
        k.h = -k.h;
        k.b0_coeff = -k.b0_coeff;
    }
    Eigen::VectorXd res = k.h.tail(N) - k.b0_coeff * b0;
    k.b0_distance = std::sqrt(wdot(res, res));
    const Eigen::VectorXd W1 = band_weights(op, 0);
    k.norm_a = std::sqrt((W1.array() * k.h.head(N).array().square()).sum());

    // range orthogonality: <M u, h*> for a fixed pseudo-random u
    Eigen::MatrixXd M = op.assemble(sol.lead.m, lam);
    Eigen::VectorXd u(2 * N);
    for (int i = 0; i < 2 * N; ++i) u(i) = std::sin(1.0 + 0.37 * i * i);
    k.duality_residue = std::abs(op.inner(M * u, k.h)) / (op.norm(M * u) * op.norm(k.h));
    return k;
}

Transversality transversality(const BandOperator& op, const EigenSolution& sol, const AdjointKernel& adj)
{
    const ZGrid& zg = op.zgrid();
    const AnnulusConfig& c = op.profile().config();
    const int N = zg.size();
    const double e = sol.eps;
    const Eigen::VectorXd h = sol.h();
    const Eigen::VectorXd hs = adj.h / adj.b0_coeff;
    const Eigen::VectorXd& W = op.inner_weights();
    Transversality t;
    for (int i = 0; i < N; ++i) {
        double z = zg.z()[i];
        t.band1 += (c.R1 + e * z) * h(i) * hs(i) * W(i);
        t.band2 += (c.R2 + e * z) * h(N + i) * hs(N + i) * W(N + i);
        t.leading += (c.R2 + e * z) * sol.lead.b0(i) * sol.lead.b0(i) * W(N + i);
    }
    t.total = t.band1 + t.band2;
    return t;
}

}  // namespace annulus
