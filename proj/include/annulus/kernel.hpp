#pragma once
#include "annulus/linop.hpp"

#include <Eigen/Dense>
#include <vector>

namespace annulus {

// Value of lambda_1 at which alpha_1^{R2} vanishes at the band edge z = 1.
double lambda_star(const AnnulusConfig& cfg, const UpsilonTerms& ups);

// Upper end of the lambda_1 bracket: the value where alpha_1^{R2} first
// touches zero on [-1, 1]. Equals lambda_star for B > 0; for B < 0 the zero
// sits at z = -1.
double lambda_bracket_top(const AnnulusConfig& cfg, const UpsilonTerms& ups);

// alpha_0^{R1}[lambda0] = lambda0 R1^2 + ups0^{R1}.
double alpha0_R1(const AnnulusConfig& cfg, const UpsilonTerms& ups);

// alpha_1^{R2}[lambda0, lam](z) on the z-grid.
Eigen::VectorXd alpha1_R2(const BandOperator& op, double lam);

// I(lam) = p_2(m) int phi'(s) / alpha_1^{R2}[lambda0, lam](s) ds.
double lambda1_function(const BandOperator& op, int m, double lam);

// kappa -> 0 limit of the root of I = 1.
double lambda1_closed_form(const AnnulusConfig& cfg, const UpsilonTerms& ups, int m);

// Leading-order eigenpair data for mode m.
struct LeadingOrder {
    int m = 0;
    double lambda0 = 0, lambda1 = 0, lambda_star = 0;
    double p1 = 0, p2 = 0, alpha0 = 0, a1 = 0;
    Eigen::VectorXd alpha1, b0;
    double I_residual = 0;
    int iterations = 0;
};

LeadingOrder solve_lambda1(const BandOperator& op, int m);

// Solution (g, mu) of alpha_1 g - p_2 int phi' g + (mu R2^2 + beta) b0 = G
// normalized by int phi' g = 0.
struct Q2Inverse {
    Eigen::VectorXd g;
    double mu = 0;
};

Eigen::VectorXd beta_term(const BandOperator& op, const LeadingOrder& lead);
Q2Inverse invert_q2hat(const BandOperator& op, const LeadingOrder& lead, const Eigen::VectorXd& G);
Eigen::VectorXd apply_q2hat(const BandOperator& op, const LeadingOrder& lead, const Eigen::VectorXd& g, double mu);

struct EigenSolution {
    LeadingOrder lead;
    double eps = 0, lambda2 = 0;
    Eigen::VectorXd a2, b1;
    std::vector<double> distances;  // successive-iterate distances
    int iterations = 0;
    // first Picard iterate from zero (consistent through O(eps^2))
    double lambda2_first = 0;
    Eigen::VectorXd h_first;
    double residual_first = 0;
    double residual = 0;

    double lambda() const { return lead.lambda0 + eps * lead.lambda1 + eps * eps * lambda2; }
    double lambda_first() const { return lead.lambda0 + eps * lead.lambda1 + eps * eps * lambda2_first; }
    // samples of (a, b) stacked as in BandOperator
    Eigen::VectorXd h() const;
    // geometric contraction ratio estimated from the distance sequence
    double contraction_ratio() const;
};

// L2(dz) norm of L_m h where M = (R + eps z) L_m.
double operator_residual(const BandOperator& op, const Eigen::MatrixXd& M, const Eigen::VectorXd& h);

// Picard iteration for (a2, b1, lambda2) at the profile's eps.
EigenSolution fixed_point(const BandOperator& op, int m, double tol = 1e-11, int max_iter = 200);

struct KernelDiagnostics {
    double sigma_min = 0, sigma_second = 0, sigma_max = 0;
    double ratio = 0;    // sigma_min / sigma_second
    double cosine = 0;   // |cos| between SVD null vector and constructed h
    Eigen::VectorXd null_vector;
    // per mode n = 1..M: sigma_min / sigma_max of L_n at the same lambda
    std::vector<double> other_modes;
    bool kernel_ok = false, others_ok = false;
};

KernelDiagnostics validate_kernel(const BandOperator& op, const EigenSolution& sol, int max_mode = 8);

struct AdjointKernel {
    Eigen::VectorXd h;  // (a*, b*), unit weighted norm
    double sigma_min = 0, sigma_second = 0;
    double norm_a = 0;       // weighted norm of a*
    double b0_coeff = 0;     // C minimizing |b* - C b0|
    double b0_distance = 0;  // min_C |b* - C b0| (weighted)
    double duality_residue = 0;
};

AdjointKernel adjoint_kernel(const BandOperator& op, const EigenSolution& sol);

struct Transversality {
    double band1 = 0, band2 = 0, total = 0;
    double leading = 0;  // int (R2 + eps z) b0^2 sigma_+
};

// Pairing with the adjoint kernel rescaled so that b* ~ b0.
Transversality transversality(const BandOperator& op, const EigenSolution& sol, const AdjointKernel& adj);

}  // namespace annulus
