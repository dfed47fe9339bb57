#pragma once
#include <Eigen/Dense>
#include <vector>

namespace annulus {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);
// Gauss-Lobatto-Legendre rule on [-1, 1], endpoints included.
Rule gauss_lobatto(int n);
// Affine map of a rule on [-1, 1] to [a, b].
Rule mapped(const Rule& ref, double a, double b);

// Polynomial interpolation on one panel of nodes (barycentric form).
class LagrangePanel {
public:
    LagrangePanel() = default;
    LagrangePanel(double a, double b, std::vector<double> nodes);

    double a() const { return a_; }
    double b() const { return b_; }
    int size() const { return static_cast<int>(x_.size()); }
    const std::vector<double>& nodes() const { return x_; }

    // Values of all basis polynomials at t.
    void basis(double t, double* out) const;
    double interpolate(double t, const double* values) const;
    // D(k,i) = l_i'(x_k).
    Eigen::MatrixXd diff_matrix() const;
    // C(k,i) = integral of l_i from a to x_k.
    Eigen::MatrixXd cumulative_matrix() const;
    // Integral of l_i from a to t for all i.
    void integral_to(double t, double* out) const;

private:
    double a_ = -1, b_ = 1;
    std::vector<double> x_, bw_;
};

}  // namespace annulus
