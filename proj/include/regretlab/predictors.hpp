#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regretlab/families.hpp"

// Concrete next-symbol and whole-sequence universal predictors for the
// Bernoulli family: Bayesian mixtures, exact NML over an interval, the
// predictive NML for one more symbol, the implied add-beta smoothing factor,
// and a seeded Monte-Carlo regret estimator for cross-checking the analytic
// quantities.

namespace regretlab {

// Next-symbol probabilities Q(y = 1 | k ones among n-1 symbols), k = 0..n-1.
struct predictive_table {
    int n = 0;
    std::vector<double> q_one;
};

predictive_table mixture_table(const prior& pi, const param_grid& g, int n);

// Exact normalized maximum likelihood over theta in [a, b]; the per-class
// maximizer is the clamped empirical frequency.
struct nml_model {
    int n = 0;
    double a = 0.0, b = 1.0;
    double log_normalizer_bits = 0.0;          // Shtarkov sum, log2
    std::vector<double> class_log_prob;        // natural-log NML per-sequence probability
};

nml_model nml_bernoulli(int n, double a, double b);

// Predictive NML for the (n+1)-th symbol after a history of n symbols with k
// ones; the maximizing theta is the clamped MLE of the extended sequence.
struct pnml_result {
    double q_one = 0.0;
    double regret_bits = 0.0;  // log2 of the per-history normalizer
};

pnml_result pnml_batch(int n, double a, double b, int k);

// Equivalent add-beta smoothing constant implied by a predictive probability:
// beta = (n-1) (Q - p_hat) / (1 - 2 Q) at p_hat = k/(n-1).
// Undefined (nullopt) where Q is within 1e-9 of 1/2.
std::optional<double> add_beta(const predictive_table& table, int k);

struct simulation_result {
    double regret_bits = 0.0;
    double std_error = 0.0;
    long trials = 0;
};

// RNG identifier recorded in run manifests; draws are bit-reproducible.
inline constexpr const char* kRngAlgorithm = "mt19937_64";

// Monte-Carlo estimate of the batch regret E log2( P_theta*(Y_n|Y^{n-1}) /
// Q(Y_n|Y^{n-1}) ) under Ber(phi)^n, with theta* the projection of phi onto
// the flagged subset of g.  Trials use per-trial derived seeds.
simulation_result simulate_regret(double phi, const predictive_table& table,
                                  const param_grid& g, int n, long trials,
                                  std::uint64_t seed);

// Whole-sequence variant: E log2( P_theta*(Y^n) / Q_pi(Y^n) ).
simulation_result simulate_regret_online(double phi, const prior& pi,
                                         const param_grid& g, int n, long trials,
                                         std::uint64_t seed);

}  // namespace regretlab
