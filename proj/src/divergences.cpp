#include "regretlab/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace regretlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// p*log2(p/q) with the usual conventions, in bits
double xlogx_over(double p, double q) {
    if (p == 0.0) return 0.0;
    if (q == 0.0) return kInf;
    return p * std::log2(p / q);
}
}  // namespace

double kl_bernoulli_symbol(double p, double q) {
    return xlogx_over(p, q) + xlogx_over(1.0 - p, 1.0 - q);
}

double kl_categorical_symbol(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("categorical KL: dimension mismatch");
    double d = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        double t = xlogx_over(p[s], q[s]);
        if (t == kInf) return kInf;
        d += t;
    }
    return d;
}

double per_symbol_divergence(family_kind family, const std::vector<double>& p,
                             const std::vector<double>& q) {
    switch (family) {
        case family_kind::bernoulli:
            return kl_bernoulli_symbol(p[0], q[0]);
        case family_kind::multinomial:
            return kl_categorical_symbol(p, q);
        case family_kind::markov1_binary: {
            double pi1 = markov_stationary_one(p[0], p[1]);
            double d = 0.0;
            if (pi1 < 1.0) {  // next-symbol law after a 0
                double from0 = kl_bernoulli_symbol(p[0], q[0]);
                if (from0 == kInf) return kInf;
                d += (1.0 - pi1) * from0;
            }
            if (pi1 > 0.0) {  // after a 1
                double from1 = kl_bernoulli_symbol(1.0 - p[1], 1.0 - q[1]);
                if (from1 == kInf) return kInf;
                d += pi1 * from1;
            }
            return d;
        }
    }
    throw std::invalid_argument("per_symbol_divergence: unknown family");
}

double kl_sequence(const sequence_law& p, const sequence_law& q) {
    if (p.n != q.n || p.classes->size() != q.classes->size())
        throw std::invalid_argument("kl_sequence: mismatched lengths");
    const auto& cls = *p.classes;
    double d_nats = 0.0;
    for (std::size_t c = 0; c < cls.size(); ++c) {
        double lp = p.class_log_prob[c];
        if (lp == -kInf) continue;  // zero mass contributes nothing
        double mass = std::exp(cls[c].log_multiplicity + lp);
        if (mass == 0.0) continue;
        double lq = q.class_log_prob[c];
        if (lq == -kInf) return kInf;
        d_nats += mass * (lp - lq);
    }
    return std::max(0.0, d_nats) * kLog2E;
}

namespace {

double divergence_to_point(const param_grid& g, const std::vector<double>& phi,
                           std::size_t theta_index) {
    return per_symbol_divergence(g.family, phi, g.points[theta_index]);
}

}  // namespace

projection_result project_onto_theta(const param_grid& g, std::size_t phi_index) {
    const auto& phi = g.points[phi_index];
    projection_result best{0, {}, kInf};
    bool found = false;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (!g.theta_flags[j]) continue;
        double d = divergence_to_point(g, phi, j);
        if (!found || d < best.d_bits) {
            best = {j, g.points[j], d};
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("project_onto_theta: empty Theta");
    return best;
}

projection_result project_scalar_onto_theta(const param_grid& g, double phi) {
    if (g.family != family_kind::bernoulli)
        throw std::invalid_argument("project_scalar_onto_theta: Bernoulli grid required");
    projection_result best{0, {}, kInf};
    bool found = false;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (!g.theta_flags[j]) continue;
        double d = kl_bernoulli_symbol(phi, g.scalar(j));
        if (!found || d < best.d_bits) {
            best = {j, g.points[j], d};
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("project_scalar_onto_theta: empty Theta");
    return best;
}

std::vector<double> theta_divergence_per_symbol(const param_grid& g) {
    std::vector<double> d(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (g.theta_flags[j]) { d[j] = 0.0; continue; }
        d[j] = project_onto_theta(g, j).d_bits;
    }
    return d;
}

std::vector<std::uint8_t> theta_epsilon_shell(const param_grid& g, double eps_bits,
                                              int n_for_rate) {
    if (!(eps_bits > 0.0)) throw std::invalid_argument("theta_epsilon_shell: eps > 0");
    std::vector<std::uint8_t> mask(g.size(), 0);
    if (g.family == family_kind::markov1_binary && n_for_rate > 0) {
        auto classes = type_classes(g.family, g.categories, n_for_rate);
        std::vector<sequence_law> theta_laws;
        for (std::size_t j : g.theta_indices())
            theta_laws.push_back(make_sequence_law(g, j, classes, n_for_rate));
        for (std::size_t j = 0; j < g.size(); ++j) {
            auto law = make_sequence_law(g, j, classes, n_for_rate);
            double best = kInf;
            for (const auto& tl : theta_laws)
                best = std::min(best, kl_sequence(law, tl) / n_for_rate);
            mask[j] = (best < eps_bits) ? 1 : 0;
        }
        return mask;
    }
    auto d = theta_divergence_per_symbol(g);
    for (std::size_t j = 0; j < g.size(); ++j) mask[j] = (d[j] < eps_bits) ? 1 : 0;
    return mask;
}

double shell_delta_nats(double c, double eps_nats) {
    return std::sqrt(2.0 * c * (1.0 - c) * eps_nats);
}

double shell_delta(double c, double eps_bits) {
    return shell_delta_nats(c, eps_bits * std::log(2.0));
}

double conditional_kl_batch(const std::vector<double>& phi, const prior& pi,
                            const param_grid& g, int n) {
    if (g.family == family_kind::bernoulli)
        return conditional_kl_batch(phi[0], pi, g, n);
    throw std::invalid_argument("conditional_kl_batch: i.i.d. family required");
}

double conditional_kl_batch(double phi, const prior& pi, const param_grid& g, int n) {
    if (g.family != family_kind::bernoulli)
        throw std::invalid_argument("conditional_kl_batch: Bernoulli grid required");
    if (n < 1) throw std::invalid_argument("conditional_kl_batch: n >= 1");
    const double lphi = std::log(phi), l1phi = std::log1p(-phi);
    double total = 0.0;
    for (int k = 0; k <= n - 1; ++k) {
        double lw = log_binomial(n - 1, k) + mul_log(k, lphi) + mul_log(n - 1 - k, l1phi);
        double w = std::exp(lw);
        if (w == 0.0) continue;
        double q = conditional_predictive_weight(pi, g, k, n);
        double d = kl_bernoulli_symbol(phi, q);
        if (d == kInf) return kInf;
        total += w * d;
    }
    return total;
}

double expected_divergence(const prior& pi, const std::vector<double>& d_bits) {
    if (pi.weights.size() != d_bits.size())
        throw std::invalid_argument("expected_divergence: size mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < d_bits.size(); ++j) {
        if (pi.weights[j] == 0.0) continue;  // +inf with zero mass is excluded
        if (d_bits[j] == kInf) return kInf;
        total += pi.weights[j] * d_bits[j];
    }
    return total;
}

double mutual_information(const prior& pi, const divergence_profile& profile) {
    return expected_divergence(pi, profile.vs_mixture_bits);
}

}  // namespace regretlab
