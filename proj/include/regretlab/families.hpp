#pragma once

#include <cstdint>
#include <memory>
#include <vector>

// Parametric model families (Bernoulli, small multinomial, binary first-order
// Markov) over discretized parameter grids.  Length-n sequence distributions
// are compressed onto sufficient-statistic type classes so that quantities at
// n ~ 10^3 stay exact.  All probabilities are kept in natural-log domain;
// information quantities cross the API boundary in bits.

namespace regretlab {

enum class family_kind { bernoulli, multinomial, markov1_binary };

// Discretized model class Phi with a flagged subset Theta.
struct param_grid {
    family_kind family = family_kind::bernoulli;
    int categories = 2;  // alphabet size (multinomial); 2 for the binary families
    std::vector<std::vector<double>> points;     // lexicographically ordered
    std::vector<std::uint8_t> theta_flags;       // Theta membership mask

    std::size_t size() const { return points.size(); }
    // scalar parameter of a Bernoulli grid point
    double scalar(std::size_t j) const { return points[j][0]; }
    std::size_t theta_count() const;
    std::vector<std::size_t> theta_indices() const;
};

// m points spanning [lo, hi] with theta_flags set on [theta_lo, theta_hi].
// The four anchors are forced onto the grid (per-segment uniform spacing), so
// Theta membership is exact rather than rounded.
param_grid build_bernoulli_grid(double lo, double hi, int m,
                                double theta_lo, double theta_hi);

// Probability vectors with denominator `steps` on the (categories-1)-simplex.
// flagged_categories < categories marks the sub-simplex whose trailing
// components are all zero; 0 flags the whole grid.
param_grid build_simplex_grid(int categories, int steps, int flagged_categories = 0);

// Lattice of binary chains (phi01, phi10) = (i, j)/steps, excluding the
// non-ergodic corner (0,0).  Flags mark the memoryless sub-family
// phi01 + phi10 = 1, whose stationary law is Ber(phi01).
param_grid build_markov_grid(int steps);

// Sub-grid containing only the flagged points (all flagged in the result).
param_grid restrict_to_theta(const param_grid& g);

// One sufficient-statistic class of length-n sequences.
// stat: {k} for Bernoulli; per-category counts for multinomial;
//       {y1, n01, n10, n11} for the binary chain.
struct type_class {
    std::vector<int> stat;
    double log_multiplicity;  // natural log of the class size
};

using class_list = std::vector<type_class>;
using class_list_ptr = std::shared_ptr<const class_list>;

// Exhaustive, duplicate-free class list for sequences of length n.
// Markov multiplicities are counted by dynamic programming; n <= 64 there.
class_list_ptr type_classes(family_kind family, int categories, int n);

// Per-class natural-log probability of a single sequence under one parameter.
struct sequence_law {
    int n = 0;
    std::vector<double> class_log_prob;  // <= 0, -inf allowed at boundary params
    class_list_ptr classes;
};

// Markov laws start from the stationary distribution; phi01 + phi10 = 0 is
// rejected as non-ergodic.
sequence_law make_sequence_law(family_kind family, int categories,
                               const std::vector<double>& param,
                               const class_list_ptr& classes, int n);
sequence_law make_sequence_law(const param_grid& g, std::size_t point,
                               const class_list_ptr& classes, int n);

// Nonnegative weights over a grid, summing to 1.  The grid must outlive the
// prior; priors are cheap value types.
struct prior {
    const param_grid* grid = nullptr;
    std::vector<double> weights;
};

prior uniform_prior(const param_grid& g);
prior point_prior(const param_grid& g, std::size_t point);

// Mixture predictive probability Q(y_n = 1 | history) for a Bernoulli grid,
// where the history of n-1 symbols contains k ones.  Computed in log domain.
// Throws if every supported parameter assigns probability zero to the history.
double conditional_predictive_weight(const prior& pi, const param_grid& g,
                                     int k, int n);

// Stationary probability of symbol 1 for a binary chain.
double markov_stationary_one(double phi01, double phi10);

// --- numeric helpers shared across modules ---

// count * logp with the 0 * log 0 := 0 convention
double mul_log(double count, double logp);
double log_sum_exp(const double* x, std::size_t n);
double log_binomial(int n, int k);

}  // namespace regretlab
