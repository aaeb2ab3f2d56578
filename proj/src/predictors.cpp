#include "regretlab/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "regretlab/divergences.hpp"

namespace regretlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

// splitmix64 step, used to derive independent per-trial seeds
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (trial + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// uniform double in [0,1) from the top 53 bits; bit-identical across platforms
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

predictive_table mixture_table(const prior& pi, const param_grid& g, int n) {
    if (g.family != family_kind::bernoulli)
        throw std::invalid_argument("mixture_table: Bernoulli grid required");
    predictive_table t;
    t.n = n;
    t.q_one.resize(n);
    for (int k = 0; k < n; ++k) t.q_one[k] = conditional_predictive_weight(pi, g, k, n);
    return t;
}

nml_model nml_bernoulli(int n, double a, double b) {
    if (!(0.0 <= a && a <= b && b <= 1.0))
        throw std::invalid_argument("nml_bernoulli: need 0 <= a <= b <= 1");
    nml_model m;
    m.n = n;
    m.a = a;
    m.b = b;
    std::vector<double> terms(n + 1), loglik(n + 1);
    for (int k = 0; k <= n; ++k) {
        double th = clamp01(static_cast<double>(k) / n, a, b);
        loglik[k] = mul_log(k, std::log(th)) + mul_log(n - k, std::log1p(-th));
        terms[k] = log_binomial(n, k) + loglik[k];
    }
    double log_k = log_sum_exp(terms.data(), terms.size());  // nats
    m.log_normalizer_bits = log_k * kLog2E;
    m.class_log_prob.resize(n + 1);
    for (int k = 0; k <= n; ++k) m.class_log_prob[k] = loglik[k] - log_k;
    return m;
}

pnml_result pnml_batch(int n, double a, double b, int k) {
    if (!(0.0 <= a && a <= b && b <= 1.0))
        throw std::invalid_argument("pnml_batch: need 0 <= a <= b <= 1");
    if (k < 0 || k > n) throw std::invalid_argument("pnml_batch: need 0 <= k <= n");
    double th1 = clamp01(static_cast<double>(k + 1) / (n + 1), a, b);
    double th0 = clamp01(static_cast<double>(k) / (n + 1), a, b);
    double w1 = th1;        // P_theta(y = 1) at the extended-sequence MLE
    double w0 = 1.0 - th0;  // P_theta(y = 0)
    pnml_result r;
    r.q_one = w1 / (w0 + w1);
    r.regret_bits = std::log2(w0 + w1);
    return r;
}

std::optional<double> add_beta(const predictive_table& table, int k) {
    if (table.n < 2) throw std::invalid_argument("add_beta: n >= 2 required");
    if (k < 0 || k >= table.n) throw std::invalid_argument("add_beta: need 0 <= k <= n-1");
    double q = table.q_one[k];
    double denom = 1.0 - 2.0 * q;
    if (std::abs(denom) < 1e-9) return std::nullopt;
    double p_hat = static_cast<double>(k) / (table.n - 1);
    return (table.n - 1) * (q - p_hat) / denom;
}

namespace {

simulation_result summarize(const std::vector<double>& samples) {
    simulation_result res;
    res.trials = static_cast<long>(samples.size());
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= res.trials;
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var = res.trials > 1 ? var / (res.trials - 1) : 0.0;
    res.regret_bits = mean;
    res.std_error = std::sqrt(var / res.trials);
    return res;
}

}  // namespace

simulation_result simulate_regret(double phi, const predictive_table& table,
                                  const param_grid& g, int n, long trials,
                                  std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("simulate_regret: trials >= 1");
    if (table.n != n) throw std::invalid_argument("simulate_regret: table horizon mismatch");
    double theta_star = project_scalar_onto_theta(g, phi).theta_param[0];
    std::vector<double> samples(trials);
    for (long t = 0; t < trials; ++t) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        int k = 0;
        for (int i = 0; i < n - 1; ++i) k += (uniform01(rng) < phi) ? 1 : 0;
        int y = (uniform01(rng) < phi) ? 1 : 0;
        double p_star = y ? theta_star : 1.0 - theta_star;
        double q = y ? table.q_one[k] : 1.0 - table.q_one[k];
        samples[t] = std::log2(p_star) - std::log2(q);
    }
    return summarize(samples);
}

simulation_result simulate_regret_online(double phi, const prior& pi,
                                         const param_grid& g, int n, long trials,
                                         std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("simulate_regret_online: trials >= 1");
    double theta_star = project_scalar_onto_theta(g, phi).theta_param[0];
    const double lts = std::log2(theta_star), l1ts = std::log2(1.0 - theta_star);
    std::vector<double> samples(trials);
    std::vector<double> terms(g.size());
    for (long t = 0; t < trials; ++t) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        int k = 0;
        for (int i = 0; i < n; ++i) k += (uniform01(rng) < phi) ? 1 : 0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            double w = pi.weights[j];
            double th = g.scalar(j);
            terms[j] = (w > 0.0 ? std::log(w) : -kInf) +
                       mul_log(k, std::log(th)) + mul_log(n - k, std::log1p(-th));
        }
        double lq_nats = log_sum_exp(terms.data(), terms.size());
        double lp_star = mul_log(k, lts) + mul_log(n - k, l1ts);
        samples[t] = lp_star - lq_nats * kLog2E;
    }
    return summarize(samples);
}

}  // namespace regretlab
