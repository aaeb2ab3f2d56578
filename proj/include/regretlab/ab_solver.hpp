#pragma once

#include <utility>
#include <vector>

#include "regretlab/divergences.hpp"
#include "regretlab/families.hpp"

// Arimoto-Blahut style solvers for minimax regret under misspecification.
// The prior over the model grid is updated multiplicatively,
//   pi'(phi_j) ∝ pi(phi_j) * exp(lambda * (D(P_phi_j || Q_pi) - D(P_phi_j || Theta))),
// with divergences in natural units, until the bracketing bounds
//   R_L = E_pi[D(P||Q) - D(P||Theta)]  and  R_U = max_phi[D(P||Q) - D(P||Theta)]
// close to within eps.  Batch mode uses conditional next-symbol divergences;
// online mode uses whole-sequence divergences over type classes.

namespace regretlab {

enum class regret_mode { batch_conditional, online_sequence };

struct ab_config {
    int n = 100;
    double lambda = 1.0;      // exponent step multiplier; 1 recovers classical AB
    double eps_bits = 0.0;    // 0 = default: 1e-4 bits for n <= 100, 1e-5 beyond
    long max_iter = 100000;
    regret_mode mode = regret_mode::batch_conditional;
};

double resolve_eps_bits(const ab_config& cfg);

struct solver_report {
    prior pi;
    double lower_bits = 0.0;
    double upper_bits = 0.0;
    std::vector<std::pair<double, double>> history;  // (R_L, R_U) in bits
    bool converged = false;
    long iterations = 0;

    double midpoint_bits() const { return 0.5 * (lower_bits + upper_bits); }
};

// 2n-scaled coefficient in natural units, the normalization used for
// reporting batch regrets as n-free constants.
double coeff_2n(double value_bits, int n);

solver_report ab_misspecified(const param_grid& g, const ab_config& cfg);
solver_report ab_misspecified(const param_grid& g, const ab_config& cfg,
                              const prior& initial);

// Well-specified capacities: the Phi := Theta special case (penalty vanishes).
solver_report capacity_online(const param_grid& theta, int n, ab_config cfg = {});
solver_report capacity_batch(const param_grid& theta, int n, ab_config cfg = {});

// Three solver runs demonstrating C(Theta) <= F(Theta,Phi) <= C(Theta_eps):
// the flagged-subset capacity, the misspecified regret, and the capacity of
// the eps_n-shell interval with eps_n = n^(alpha-1) in natural units.
struct sandwich_result {
    double theta_capacity_bits = 0.0;
    double misspecified_bits = 0.0;
    double shell_capacity_bits = 0.0;
    double shell_lo = 0.0, shell_hi = 0.0;  // enlarged Theta interval
    bool ordered = false;
    bool converged = false;
    solver_report theta_run, misspecified_run, shell_run;
    // owns the grid shell_run's prior refers to
    std::shared_ptr<const param_grid> shell_grid;
};
sandwich_result verify_sandwich(const param_grid& g, int n, double alpha,
                                ab_config cfg = {});

// Bounds for predicting l outcomes after a batch of n: the upper bound
// averages the batch regrets at horizons n+1..n+l; the lower bound is the
// well-specified combined capacity over the flagged subset.
struct combined_result {
    double lower_bits_per_step = 0.0;
    double upper_bits_per_step = 0.0;
    bool converged = false;
};
combined_result combined_bounds(const param_grid& g, int n, int l,
                                ab_config cfg = {});

// --- internals shared with the constrained solver ---
namespace detail {

// Backend computing D(P_phi_j || Q_w) in nats for every grid point, where Q_w
// is the mixture with log-weights logw over the same grid.
class divergence_backend {
public:
    virtual ~divergence_backend() = default;
    virtual std::size_t size() const = 0;
    // q_logw may address a different weighting of the same grid (e.g. a
    // Theta-restricted prior); out is resized to the grid size.
    virtual void mixture_divergence_nats(const std::vector<double>& q_logw,
                                         std::vector<double>& out) const = 0;
};

std::unique_ptr<divergence_backend> make_backend(const param_grid& g, int n,
                                                 regret_mode mode);

// Penalty vector D(P_phi || Theta) in nats for the given mode and horizon.
std::vector<double> penalty_nats(const param_grid& g, int n, regret_mode mode);

// Values below this are treated as log(0) inside hot loops.
constexpr double kNegHuge = -1e30;
// Divergences above this many nats are reported as +infinity.
constexpr double kInfThresholdNats = 1e20;

std::vector<double> log_weights(const prior& pi);
prior weights_from_log(const param_grid& g, const std::vector<double>& logw);

}  // namespace detail

}  // namespace regretlab
