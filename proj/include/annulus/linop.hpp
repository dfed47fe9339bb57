#pragma once
#include "annulus/domain.hpp"
#include "annulus/profile.hpp"
#include "annulus/quadrature.hpp"

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

namespace annulus {

// Gauss-Legendre nodes on [-1, 1] in three panels split at +-(1 - 2 kappa),
// where phi_kappa' switches between its constant and transition parts.
class ZGrid {
public:
    ZGrid(double kappa, int n = 96);

    int size() const { return static_cast<int>(z_.size()); }
    const std::vector<double>& z() const { return z_; }
    const std::vector<double>& w() const { return w_; }
    // Q(k, i) = int_{-1}^{z_k} l_i for the piecewise interpolant.
    const Eigen::MatrixXd& cumulative() const { return Q_; }
    // Block-diagonal spectral differentiation.
    const Eigen::MatrixXd& diff() const { return D_; }
    double interpolate(const double* values, double z) const;
    double integrate(const double* values) const;

private:
    std::vector<double> z_, w_;
    std::vector<LagrangePanel> panels_;
    std::vector<int> first_;
    Eigen::MatrixXd Q_, D_;
};

// Coefficients of Upsilon^{R_i}(z) = (R_i + eps z) phi'(R_i + eps z)
//   = ups0 + eps ups1(z) + eps^2 ups2(z)  (exact; ups2 depends on eps).
struct UpsilonTerms {
    double ups0[2];
    double ups1_origin[2];  // ups1 at z = 0
    std::vector<double> ups1[2], ups2[2];
    // direct evaluation through the base stream, for checking
    std::vector<double> direct[2];
    std::vector<double> total(int band, double eps) const;
};

UpsilonTerms upsilon_terms(const Profile& prof, const ZGrid& zg);

// Mode coupling strength p_i(m) = R_i R_2 S_m(R_i/r1) S_m(r2/R_2) / (m S_m(r2/r1)).
double p_coeff(const AnnulusConfig& cfg, int band, int m);

// Rescaled band operator pair acting on (a, b) sampled on the z-grid;
// rows 0..N-1 are the R1 band, rows N..2N-1 the R2 band. Applying the
// matrix gives (R_i + eps z) * L_n h at the band nodes.
class BandOperator {
public:
    BandOperator(const Profile& prof, const ZGrid& zg);

    const Profile& profile() const { return *prof_; }
    const ZGrid& zgrid() const { return *zg_; }
    const UpsilonTerms& upsilon() const { return ups_; }
    int size() const { return 2 * zg_->size(); }

    // Lambda^{R_i}(z) = lambda (R_i + eps z)^2 + Upsilon^{R_i}(z).
    Eigen::VectorXd diagonal(double lambda) const;
    Eigen::MatrixXd assemble(int n, double lambda) const;
    // Adjoint in the sigma-weighted L^2 product.
    Eigen::MatrixXd assemble_adjoint(int n, double lambda) const;
    // Integral (coupling) part only, at an arbitrary eps, and its eps-derivative.
    Eigen::MatrixXd coupling(int n, double eps) const;
    Eigen::MatrixXd coupling_derivative(int n, double eps) const;

    // sigma_-(z) = -phi'(-z) on band 1, sigma_+(z) = -phi'(z) on band 2, times weights.
    const Eigen::VectorXd& inner_weights() const { return W_; }
    double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    double norm(const Eigen::VectorXd& x) const;

private:
    template <class T>
    Eigen::MatrixXd coupling_impl(int n, double eps, bool adjoint) const;

    const Profile* prof_;
    const ZGrid* zg_;
    UpsilonTerms ups_;
    std::vector<double> c1_, c2_;  // phi'(-z), phi'(z) at nodes
    Eigen::VectorXd W_;
};

// Triplet CSV: header "row,col,value", one line per entry.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& M);

}  // namespace annulus
