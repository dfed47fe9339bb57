#pragma once

namespace annulus {

class Profile;

// Annulus r1 < R1 < R2 < r2 with Taylor-Couette swirl u = A r + B / r.
struct AnnulusConfig {
    double r1 = 1.0;
    double r2 = 2.0;
    double R1 = 1.2;
    double R2 = 1.5;
    double A = 0.0;
    double B = 0.1;

    // Throws ConfigError naming the violated invariant.
    void validate() const;
};

double u_tc(const AnnulusConfig& cfg, double r);
// gamma = psi(r2) - psi(r1) for the Taylor-Couette flow.
double circulation(const AnnulusConfig& cfg);
// Rotation frequency from the circulation and geometry.
double lambda0(const AnnulusConfig& cfg);
// Same quantity as u_tc(R2) / R2.
double lambda0_direct(const AnnulusConfig& cfg);

// Radial stream function with vorticity 2A + varpi_{eps,kappa} and
// psi(r1) = 0, psi(r2) = gamma. A null profile gives pure Taylor-Couette.
class BaseStream {
public:
    BaseStream(const AnnulusConfig& cfg, const Profile* profile);

    double phi(double r) const;
    double dphi(double r) const;
    // Integration constant C in phi' = C/r - A(r - r1^2/r) - (1/r) int t varpi.
    double constant() const { return C_; }

    // int_{r1}^{r} t varpi(t) dt and int_{r1}^{r} t log(t) varpi(t) dt.
    double moment1(double r) const;
    double moment_log(double r) const;

private:
    AnnulusConfig cfg_;
    const Profile* prof_;
    double C_ = 0.0;
};

}  // namespace annulus
