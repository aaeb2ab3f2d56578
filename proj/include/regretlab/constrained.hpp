#pragma once

#include <utility>
#include <vector>

#include "regretlab/ab_solver.hpp"

// Two-stage Arimoto-Blahut solver for the constrained setting, where the
// universal predictor must be a mixture over the flagged subset Theta.
// Stage 1 updates the adversarial prior pi over Phi against the current
// Theta-mixture; stage 2 restricts pi to Theta and renormalizes.  The lower
// bound additionally needs the inner minimization min_{pi0} D(Q_pi || Q_pi0),
// computed by an iterative mixture projection and reported with its residual
// so the bound's accuracy can be audited.

namespace regretlab {

struct constrained_report {
    prior pi_phi;
    prior pi0_theta;  // over the same grid, zero off Theta
    double lower_bits = 0.0;
    double upper_bits = 0.0;
    std::vector<std::pair<double, double>> history;  // (R_L, R_U) in bits
    bool converged = false;
    long iterations = 0;
    double inner_projection_gap_bits = 0.0;  // last per-step decrease of the projection

    double midpoint_bits() const { return 0.5 * (lower_bits + upper_bits); }
};

constrained_report ab_two_stage(const param_grid& g, const ab_config& cfg);

struct mixture_projection_result {
    prior pi0;            // over the full grid, zero off Theta
    double kl_bits = 0.0; // achieved D(Q_pi || Q_pi0); +inf on support mismatch
    long iterations = 0;
    double last_decrease_bits = 0.0;
};

// Project the mixture induced by `target` onto Theta-mixtures at horizon n.
// Each multiplicative update cannot increase the divergence; iteration stops
// once the per-step decrease falls below tol_bits.
mixture_projection_result mixture_projection(const prior& target, const param_grid& g,
                                             int n, double tol_bits);

// Sup-norm distance between two priors, matching grid points by value.
double compare_priors(const prior& a, const prior& b);

}  // namespace regretlab
