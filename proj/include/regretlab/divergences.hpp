#pragma once

#include <cstdint>
#include <vector>

#include "regretlab/families.hpp"

// Divergences and information measures behind every regret expression:
// sequence-level KL, conditional (batch) KL, KL-projection onto the flagged
// subset Theta, the epsilon-shell around Theta, and mutual information under
// a prior.  Inputs and outputs are in bits; +inf is a first-class value.

namespace regretlab {

// Binary KL in bits, with 0*log 0 = 0; +inf when q is degenerate and p disagrees.
double kl_bernoulli_symbol(double p, double q);

// Categorical KL in bits over probability vectors of equal length.
double kl_categorical_symbol(const std::vector<double>& p, const std::vector<double>& q);

// Per-symbol divergence rate between two parameters of the same family, bits.
// For the binary chain this is the causal-conditional rate under the stationary
// law of p; for the i.i.d. families it is the single-symbol KL.
double per_symbol_divergence(family_kind family, const std::vector<double>& p,
                             const std::vector<double>& q);

// Sequence-level KL between two laws on the same class list, bits.
double kl_sequence(const sequence_law& p, const sequence_law& q);

struct projection_result {
    std::size_t theta_index;
    std::vector<double> theta_param;
    double d_bits;  // per-symbol divergence to Theta
};

// KL-projection of a grid point onto the flagged subset.  Ties break toward
// the smallest grid index.  For Bernoulli interval flags the result equals
// clamping the parameter to the interval.
projection_result project_onto_theta(const param_grid& g, std::size_t phi_index);

// Same projection for an off-grid Bernoulli parameter value.
projection_result project_scalar_onto_theta(const param_grid& g, double phi);

// D(P_phi || Theta) per grid point, per-symbol, bits.
std::vector<double> theta_divergence_per_symbol(const param_grid& g);

// Mask of points with D(P_phi || Theta) < eps.  n_for_rate only matters for
// Markov grids, where the rate is measured at that horizon (0 = asymptotic).
std::vector<std::uint8_t> theta_epsilon_shell(const param_grid& g, double eps_bits,
                                              int n_for_rate = 0);

// Analytic half-width of the Bernoulli shell around an interval endpoint c.
double shell_delta_nats(double c, double eps_nats);
double shell_delta(double c, double eps_bits);

// D(P_phi(Y_n|Y^{n-1}) || Q_pi(Y_n|Y^{n-1})) for an i.i.d. family, bits.
double conditional_kl_batch(const std::vector<double>& phi, const prior& pi,
                            const param_grid& g, int n);
double conditional_kl_batch(double phi, const prior& pi, const param_grid& g, int n);

// Per-grid-point divergences for a fixed predictor; vs_theta is zero on Theta.
struct divergence_profile {
    std::vector<double> vs_mixture_bits;
    std::vector<double> vs_theta_bits;
};

// E_pi { D(P_phi || Q_pi) } in bits; +inf entries count only when their prior
// weight is nonzero.
double mutual_information(const prior& pi, const divergence_profile& profile);
double expected_divergence(const prior& pi, const std::vector<double>& d_bits);

constexpr double kLog2E = 1.4426950408889634074;  // bits per nat

}  // namespace regretlab
