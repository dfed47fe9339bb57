#include "annulus/linop.hpp"
#include "annulus/errors.hpp"
#include "annulus/poisson.hpp"

#include <cmath>
#include <type_traits>
#include <iomanip>
#include <ostream>

namespace annulus {

ZGrid::ZGrid(double kappa, int n)
{
    if (n < 12) throw ConfigError("z-grid needs at least 12 nodes");
    if (!(kappa > 0.0 && kappa < 0.5)) throw ConfigError("kappa must lie in (0, 0.5)");
    const double c = 1.0 - 2.0 * kappa;
    int side = static_cast<int>(std::lround(n * 5.0 / 12.0));
    int mid = n - 2 * side;
    const double edges[4] = {-1.0, -c, c, 1.0};
    const int counts[3] = {side, mid, side};
    for (int p = 0; p < 3; ++p) {
        Rule r = mapped(gauss_legendre(counts[p]), edges[p], edges[p + 1]);
        first_.push_back(size());
        z_.insert(z_.end(), r.x.begin(), r.x.end());
        w_.insert(w_.end(), r.w.begin(), r.w.end());
        panels_.emplace_back(edges[p], edges[p + 1], r.x);
    }
    const int N = size();
    Q_ = Eigen::MatrixXd::Zero(N, N);
    D_ = Eigen::MatrixXd::Zero(N, N);
    for (int p = 0; p < 3; ++p) {
        const int o = first_[p], m = panels_[p].size();
        Eigen::MatrixXd C = panels_[p].cumulative_matrix();
        D_.block(o, o, m, m) = panels_[p].diff_matrix();
        for (int k = o; k < N; ++k) {
            if (k < o + m) {
                Q_.block(k, o, 1, m) = C.row(k - o);
            } else {
                for (int i = 0; i < m; ++i) Q_(k, o + i) = w_[o + i];
            }
        }
    }
}

double ZGrid::interpolate(const double* values, double z) const
{
    int p = (z < panels_[1].a()) ? 0 : (z < panels_[2].a() ? 1 : 2);
    return panels_[p].interpolate(z, values + first_[p]);
}

double ZGrid::integrate(const double* values) const
{
    double s = 0.0;
    for (int i = 0; i < size(); ++i) s += w_[i] * values[i];
    return s;
}

std::vector<double> UpsilonTerms::total(int band, double eps) const
{
    std::vector<double> t(ups1[band].size());
    for (size_t i = 0; i < t.size(); ++i) t[i] = ups0[band] + eps * ups1[band][i] + eps * eps * ups2[band][i];
    return t;
}

UpsilonTerms upsilon_terms(const Profile& prof, const ZGrid& zg)
{
    const AnnulusConfig& c = prof.config();
    const double e = prof.eps(), L = std::log(c.r2 / c.r1);
    const double R1 = c.R1, R2 = c.R2, A = c.A, B = c.B;
    const int N = zg.size();
    const auto& z = zg.z();
    const auto& Q = zg.cumulative();

    // g1(t) = (R1 + e t) phi(-t), g2(t) = (R2 + e t) phi(t)
    Eigen::VectorXd g1(N), g2(N), g1l(N), g2l(N);
    for (int i = 0; i < N; ++i) {
        double x1 = R1 + e * z[i], x2 = R2 + e * z[i];
        g1(i) = x1 * prof.phi_exact(-z[i]);
        g2(i) = x2 * prof.phi_exact(z[i]);
        g1l(i) = g1(i) * std::log(x1);
        g2l(i) = g2(i) * std::log(x2);
    }
    Eigen::VectorXd G1 = Q * g1, G2 = Q * g2;
    double I1 = zg.integrate(g1.data()), I2 = zg.integrate(g2.data());
    double I1l = zg.integrate(g1l.data()), I2l = zg.integrate(g2l.data());
    // (1/e) int_0^e [(R2 - x) log(R2 - x) + (R1 + x) log(R1 + x)] dx
    Rule q = mapped(gauss_legendre(24), 0.0, e);
    double edge = 0.0;
    for (size_t k = 0; k < q.x.size(); ++k) {
        double x = q.x[k];
        edge += q.w[k] * ((R2 - x) * std::log(R2 - x) + (R1 + x) * std::log(R1 + x));
    }
    edge /= e;
    const double rem = std::log(c.r2) * (I1 + I2 - (R1 + R2)) - (I1l + I2l) + edge;
    const double c1 = 0.5 * (R2 * R2 - R1 * R1) * (std::log(c.r2) + 0.5) + 0.5 * R1 * R1 * std::log(R1)
                    - 0.5 * R2 * R2 * std::log(R2);

    UpsilonTerms u;
    u.ups0[0] = -(A * R1 * R1 + B);
    u.ups0[1] = -(A * R2 * R2 + B);
    BaseStream base(c, &prof);
    const double up21_at_1 = rem / L - A - I1;
    u.ups1_origin[0] = c1 / L;
    u.ups1_origin[1] = c1 / L - 0.5 * (R2 * R2 - R1 * R1);
    for (int b = 0; b < 2; ++b) {
        u.ups1[b].resize(N);
        u.ups2[b].resize(N);
        u.direct[b].resize(N);
    }
    for (int i = 0; i < N; ++i) {
        u.ups1[0][i] = c1 / L - 2.0 * A * R1 * z[i];
        u.ups1[1][i] = c1 / L - 2.0 * A * R2 * z[i] - 0.5 * (R2 * R2 - R1 * R1);
        u.ups2[0][i] = rem / L - A * z[i] * z[i] - G1(i);
        u.ups2[1][i] = up21_at_1 + A * (1.0 - z[i] * z[i]) - (G2(i) - (R1 + R2));
        for (int b = 0; b < 2; ++b) {
            double r = (b == 0 ? R1 : R2) + e * z[i];
            u.direct[b][i] = r * base.dphi(r);
        }
    }
    return u;
}

double p_coeff(const AnnulusConfig& c, int band, int m)
{
    if (m < 1) throw NumericError("p_coeff: mode must be >= 1");
    const double Ri = band == 0 ? c.R1 : c.R2;
    return Ri * c.R2 * sn_ratio(m, Ri / c.r1, c.r2 / c.r1) * sn(m, c.r2 / c.R2) / m;
}


namespace {

// Forward-mode dual number for eps-derivatives of the kernels.
struct Dual {
    double v, d;
    Dual(double v_ = 0.0, double d_ = 0.0) : v(v_), d(d_) {}
};
Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator-(Dual a) { return {-a.v, -a.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
Dual ipow(Dual x, int n) { double p = std::pow(x.v, n - 1); return {p * x.v, n * p * x.d}; }
double ipow(double x, int n) { return std::pow(x, n); }
double value(double x) { return x; }
double deriv(Dual x) { return x.d; }

template <class T>
T snT(int n, T x) { return 0.5 * (ipow(x, n) - T(1.0) / ipow(x, n)); }

}  // namespace

BandOperator::BandOperator(const Profile& prof, const ZGrid& zg)
    : prof_(&prof), zg_(&zg), ups_(upsilon_terms(prof, zg))
{
    const int N = zg.size();
    c1_.resize(N);
    c2_.resize(N);
    W_.resize(2 * N);
    for (int i = 0; i < N; ++i) {
        c1_[i] = prof.dphi(-zg.z()[i]);
        c2_[i] = prof.dphi(zg.z()[i]);
        W_(i) = -c1_[i] * zg.w()[i];
        W_(N + i) = -c2_[i] * zg.w()[i];
    }
}

Eigen::VectorXd BandOperator::diagonal(double lambda) const
{
    const int N = zg_->size();
    const AnnulusConfig& c = prof_->config();
    const double e = prof_->eps();
    Eigen::VectorXd d(2 * N);
    for (int i = 0; i < N; ++i) {
        double z = zg_->z()[i], x1 = c.R1 + e * z, x2 = c.R2 + e * z;
        d(i) = lambda * x1 * x1 + ups_.direct[0][i];
        d(N + i) = lambda * x2 * x2 + ups_.direct[1][i];
    }
    return d;
}

// Integral part of the band operator. Kernels F_ij (full integrals) and
// V_ii (integrals up to z) are evaluated with eps of scalar type T; the
// column factor phi'(-+s) and quadrature weight are applied afterwards.
template <class T>
Eigen::MatrixXd BandOperator::coupling_impl(int n, double eps, bool adjoint) const
{
    if (n < 1) throw NumericError("band operator: mode must be >= 1");
    const int N = zg_->size();
    const AnnulusConfig& c = prof_->config();
    const auto& z = zg_->z();
    const auto& w = zg_->w();
    const auto& Q = zg_->cumulative();
    T e;
    if constexpr (std::is_same_v<T, Dual>) e = Dual(eps, 1.0);
    else e = eps;
    const double S = sn(n, c.r2 / c.r1);
    const T r1(c.r1), r2(c.r2);

    std::vector<T> x1(N), x2(N), pre1(N), pre2(N), out1(N), out2(N);
    for (int i = 0; i < N; ++i) {
        x1[i] = T(c.R1) + e * T(z[i]);
        x2[i] = T(c.R2) + e * T(z[i]);
        // (R+e z) S_n((R+e z)/r1) / S_n(r2/r1)
        pre1[i] = x1[i] * snT(n, x1[i] / r1) / T(S);
        pre2[i] = x2[i] * snT(n, x2[i] / r1) / T(S);
        // (R+e s) S_n(r2/(R+e s))
        out1[i] = x1[i] * snT(n, r2 / x1[i]);
        out2[i] = x2[i] * snT(n, r2 / x2[i]);
    }
    const T en = e / T(double(n));
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    auto put = [&](int row, int col, T k, double colfac, double wt) {
        double v;
        if constexpr (std::is_same_v<T, Dual>) v = deriv(k);
        else v = value(k);
        if (adjoint) M(col, row) += v * colfac * wt;
        else M(row, col) += v * colfac * wt;
    };
    for (int k = 0; k < N; ++k) {
        for (int i = 0; i < N; ++i) {
            // kernel rows/cols: (band of row k, band of column i)
            T F11 = en * pre1[k] * out1[i];
            T F12 = -en * pre1[k] * out2[i];
            T F21 = en * pre2[k] * out1[i] - en * x2[k] * x1[i] * snT(n, x2[k] / x1[i]);
            T F22 = -en * pre2[k] * out2[i];
            T V11 = -en * x1[k] * x1[i] * snT(n, x1[k] / x1[i]);
            T V22 = en * x2[k] * x2[i] * snT(n, x2[k] / x2[i]);
            if (!adjoint) {
                put(k, i, F11, c1_[i], w[i]);
                put(k, N + i, F12, c2_[i], w[i]);
                put(N + k, i, F21, c1_[i], w[i]);
                put(N + k, N + i, F22, c2_[i], w[i]);
                put(k, i, V11, c1_[i], Q(k, i));
                put(N + k, N + i, V22, c2_[i], Q(k, i));
            } else {
                // adjoint entry (col, row) = kernel(row k, col i) * factor at k
                put(k, i, F11, c1_[k], w[k]);
                put(k, N + i, F12, c1_[k], w[k]);
                put(N + k, i, F21, c2_[k], w[k]);
                put(N + k, N + i, F22, c2_[k], w[k]);
                put(k, i, V11, c1_[k], Q(k, i) * w[k] / w[i]);
                put(N + k, N + i, V22, c2_[k], Q(k, i) * w[k] / w[i]);
            }
        }
    }
    return M;
}

Eigen::MatrixXd BandOperator::assemble(int n, double lambda) const
{
    Eigen::MatrixXd M = coupling_impl<double>(n, prof_->eps(), false);
    M.diagonal() += diagonal(lambda);
    return M;
}

Eigen::MatrixXd BandOperator::assemble_adjoint(int n, double lambda) const
{
    Eigen::MatrixXd M = coupling_impl<double>(n, prof_->eps(), true);
    M.diagonal() += diagonal(lambda);
    return M;
}

Eigen::MatrixXd BandOperator::coupling(int n, double eps) const { return coupling_impl<double>(n, eps, false); }

Eigen::MatrixXd BandOperator::coupling_derivative(int n, double eps) const
{
    return coupling_impl<Dual>(n, eps, false);
}

double BandOperator::inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const
{
    return (W_.array() * x.array() * y.array()).sum();
}

double BandOperator::norm(const Eigen::VectorXd& x) const { return std::sqrt(inner(x, x)); }

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& M)
{
    os << std::setprecision(17) << "row,col,value\n";
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) os << i << ',' << j << ',' << M(i, j) << '\n';
}

}  // namespace annulus
