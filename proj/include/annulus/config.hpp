#pragma once
#include "annulus/domain.hpp"

#include <string>
#include <vector>

namespace annulus {

// Flat run configuration read from key=value files. Defaults:
//   r1=1 r2=2 R1=1.2 R2=1.5 A=0 B=0.1   geometry and Taylor-Couette swirl
//   eps=0.01 kappa=0.1                  band half-width and mollifier width
//   m=1 M=8                             target mode, largest mode checked
//   sigma=0.001 steps=4 branch_ntheta=32   branch continuation
//   nr=384 ntheta=256 dt=0.5 T=0 checkpoint_every=10 two_thirds=0   simulation (T=0: one period)
//   seed=1                              random directions in the linearization table
struct RunConfig {
    AnnulusConfig geometry;
    double eps = 0.01, kappa = 0.1;
    int m = 1, M = 8;
    double sigma = 1e-3;
    int steps = 4, branch_ntheta = 32;
    int nr = 384, ntheta = 256;
    double dt = 0.5, T = 0.0;
    int checkpoint_every = 10;
    bool two_thirds = false;
    unsigned seed = 1;

    // Throws ConfigError naming the offending key and its admissible range.
    void validate() const;
    // key=value lines in the file format, every key present.
    std::string to_text() const;
};

// `overrides` are key=value strings applied after the text and may repeat its keys.
RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});
// Throws ConfigError if the file cannot be read.
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace annulus
