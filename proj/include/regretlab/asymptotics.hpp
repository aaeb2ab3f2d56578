#pragma once

#include <vector>

// Closed-form asymptotic regret evaluators: the Bernoulli-interval individual
// regret, smooth-parametric and exponential-family online regrets, the
// constrained batch expansion with the Godambe matrix, the Gaussian location
// model, the binary Markov correction series, and the combined batch-online
// rate.  Everything returns bits; trace terms carry an explicit log2(e).
// Matrix arguments are small dense symmetric matrices (d <= 8) handled by an
// internal Cholesky.

namespace regretlab {

// Row-major dense symmetric matrix.
struct sym_matrix {
    int d = 0;
    std::vector<double> a;  // d*d entries

    static sym_matrix identity(int d);
    static sym_matrix diagonal(const std::vector<double>& diag);
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * d + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * d + j]; }
};

double det_spd(const sym_matrix& m);        // throws on non-positive-definite
sym_matrix inverse_spd(const sym_matrix& m);
double trace_product(const sym_matrix& x, const sym_matrix& y);

// 0.5*log2(n/2pi) + log2(arcsin(2b-1) - arcsin(2a-1))
double gamma_bernoulli(long n, double a, double b);

// Candidate data-generating law described at its projection theta*.
struct smooth_candidate {
    sym_matrix fisher;        // I(theta*)
    sym_matrix hessian;       // J_phi(theta*), expected log-loss Hessian
    sym_matrix score_var;     // K_phi(theta*)
};

struct smooth_model_spec {
    int d = 0;
    double jeffreys_integral = 0.0;  // integral of |I(theta)|^{1/2} over Theta
    std::vector<smooth_candidate> candidates;
};

// (d/2)log2(n/2pi) + log2 J + (1/2) max_c [ log2(|J|/|I|) - tr(K J^{-1}) log2 e ]
double smooth_parametric_online(const smooth_model_spec& spec, long n);

struct expfam_candidate {
    sym_matrix psi_hessian;  // grad^2 psi(theta*)
    sym_matrix cov_t;        // Cov_{P_phi}(T)
};

struct expfam_spec {
    int d = 0;
    double jeffreys_integral = 0.0;  // integral of |grad^2 psi|^{1/2}
    std::vector<expfam_candidate> candidates;
};

// (d/2)log2(n/2pi) + log2 J - (log2 e / 2) min_c tr(Cov(T) (grad^2 psi)^{-1})
double exponential_family_online(const expfam_spec& spec, long n);

struct godambe_candidate {
    sym_matrix godambe;            // G(theta*) = J^T K^{-1} J
    sym_matrix log_ratio_hessian;  // grad^2 log(|I|/|J_phi|) at theta*, natural log
};

// (d/2)log2(1+1/n) + (1/(4n^2)) max_c tr(G^{-1} H) log2 e.
// The correction follows the G-inverse form of the expansion.
double constrained_batch_smooth(int d, const std::vector<godambe_candidate>& candidates,
                                long n);

struct glm_spec {
    int d = 0;
    double volume = 0.0;               // Lebesgue volume of Theta
    sym_matrix sigma;                  // model covariance, positive definite
    std::vector<sym_matrix> sigma_phi; // candidate data covariances
};

struct glm_result {
    double regret_bits = 0.0;
    double individual_bits = 0.0;  // Sigma_phi = 0 endpoint
    double capacity_bits = 0.0;    // Sigma_phi = Sigma endpoint
};

glm_result glm_online(const glm_spec& spec, long n);

struct markov_series_result {
    std::vector<double> partial_sums_bits;
    bool converged = false;
};

// Correction series a_t = (1/2)(1 - P11^{(t+1)} - P00^{(t+1)}) log2 e for the
// binary chain projected onto its stationary memoryless law.  Stops when
// |a_t| < tol or after t_max terms.
markov_series_result markov_constrained_series(double phi01, double phi10,
                                               long t_max = 1000000,
                                               double tol = 1e-12);

// 0.5*log2(n/(2 pi e)) + log2 pi: memoryless capacity entering the Markov bound.
double markov_order0_capacity(long n);

struct combined_asymptotic_result {
    double bits_per_step = 0.0;
    double online_regime_bits = 0.0;  // (d'/2l) log2 l, the l >> n behavior
    double batch_regime_bits = 0.0;   // (d'/2n) log2 e, the n >> l behavior
};

// (d'/2l) log2(1 + l/n) per prediction step.
combined_asymptotic_result combined_asymptotic(int d_prime, long n, long l);

}  // namespace regretlab
