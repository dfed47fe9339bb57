#include "annulus/quadrature.hpp"
#include "annulus/errors.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <map>
#include <mutex>

namespace annulus {

Rule gauss_legendre(int n)
{
    if (n < 1) throw NumericError("gauss_legendre: need at least one node");
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;

    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i)
        gsl_integration_glfixed_point(-1.0, 1.0, i, &r.x[i], &r.w[i], t);
    gsl_integration_glfixed_table_free(t);
    cache[n] = r;
    return r;
}

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp)
{
    double p0 = 1.0, p1 = x;
    if (n == 0) { p = 1; dp = 0; return; }
    for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

Rule gauss_lobatto(int n)
{
    if (n < 2) throw NumericError("gauss_lobatto: need at least two nodes");
    const int N = n - 1;
    Rule r;
    r.x.assign(n, 0.0);
    r.w.assign(n, 0.0);
    r.x[0] = -1.0;
    r.x[N] = 1.0;
    // interior nodes are the roots of P_N'; Newton from Chebyshev-Gauss-Lobatto guesses
    for (int i = 1; i < N; ++i) {
        double x = -std::cos(M_PI * i / N);
        for (int it = 0; it < 100; ++it) {
            // with q = P_N': (1-x^2) q' = 2x q - N(N+1) P_N
            double p, dp;
            legendre(N, x, p, dp);
            double ddp = (2.0 * x * dp - N * (N + 1.0) * p) / (1.0 - x * x);
            double dx = dp / ddp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.x[i] = x;
    }
    for (int i = 0; i < n; ++i) {
        double p, dp;
        if (i == 0 || i == N) {
            p = (i == 0 && N % 2 == 1) ? -1.0 : 1.0;
        } else {
            legendre(N, r.x[i], p, dp);
        }
        r.w[i] = 2.0 / (N * (N + 1.0) * p * p);
    }
    return r;
}

Rule mapped(const Rule& ref, double a, double b)
{
    Rule r;
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    r.x.resize(ref.x.size());
    r.w.resize(ref.w.size());
    for (size_t i = 0; i < ref.x.size(); ++i) {
        r.x[i] = c + h * ref.x[i];
        r.w[i] = h * ref.w[i];
    }
    return r;
}

LagrangePanel::LagrangePanel(double a, double b, std::vector<double> nodes)
    : a_(a), b_(b), x_(std::move(nodes))
{
    const int n = size();
    bw_.assign(n, 1.0);
    // scale by panel width to keep weights O(1)
    const double s = 2.0 / (b_ - a_);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i) bw_[i] /= s * (x_[i] - x_[j]);
}

void LagrangePanel::basis(double t, double* out) const
{
    const int n = size();
    for (int i = 0; i < n; ++i) {
        if (t == x_[i]) {
            for (int j = 0; j < n; ++j) out[j] = (j == i) ? 1.0 : 0.0;
            return;
        }
    }
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        out[i] = bw_[i] / (t - x_[i]);
        sum += out[i];
    }
    for (int i = 0; i < n; ++i) out[i] /= sum;
}

double LagrangePanel::interpolate(double t, const double* values) const
{
    const int n = size();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = t - x_[i];
        if (d == 0.0) return values[i];
        double c = bw_[i] / d;
        num += c * values[i];
        den += c;
    }
    return num / den;
}

Eigen::MatrixXd LagrangePanel::diff_matrix() const
{
    const int n = size();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        double diag = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            D(k, i) = (bw_[i] / bw_[k]) / (x_[k] - x_[i]);
            diag -= D(k, i);
        }
        D(k, k) = diag;
    }
    return D;
}

void LagrangePanel::integral_to(double t, double* out) const
{
    const int n = size();
    Rule g = mapped(gauss_legendre(n / 2 + 2), a_, t);
    std::vector<double> l(n);
    for (int i = 0; i < n; ++i) out[i] = 0.0;
    for (size_t q = 0; q < g.x.size(); ++q) {
        basis(g.x[q], l.data());
        for (int i = 0; i < n; ++i) out[i] += g.w[q] * l[i];
    }
}

Eigen::MatrixXd LagrangePanel::cumulative_matrix() const
{
    const int n = size();
    Eigen::MatrixXd C(n, n);
    std::vector<double> row(n);
    for (int k = 0; k < n; ++k) {
        integral_to(x_[k], row.data());
        for (int i = 0; i < n; ++i) C(k, i) = row[i];
    }
    return C;
}

}  // namespace annulus
