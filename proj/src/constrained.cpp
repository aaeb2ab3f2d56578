#include "regretlab/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace regretlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;
using detail::kNegHuge;

double sanitize_log(double x) { return x < kNegHuge ? kNegHuge : x; }

// Sequence-level machinery for min_{pi0 on Theta} D(Q_target || Q_pi0) at a
// fixed horizon.  The EM-style update keeps the divergence nonincreasing.
class sequence_projection {
public:
    sequence_projection(const param_grid& g, int n) : grid_(&g) {
        auto classes = type_classes(g.family, g.categories, n);
        k_ = classes->size();
        m_ = g.size();
        theta_ = g.theta_indices();
        if (theta_.empty()) throw std::invalid_argument("projection: empty Theta mask");
        log_mult_.resize(k_);
        for (std::size_t c = 0; c < k_; ++c) log_mult_[c] = (*classes)[c].log_multiplicity;

        law_cm_.resize(k_ * m_);
        for (std::size_t j = 0; j < m_; ++j) {
            auto law = make_sequence_law(g, j, classes, n);
            for (std::size_t c = 0; c < k_; ++c)
                law_cm_[c * m_ + j] = sanitize_log(law.class_log_prob[c]);
        }

        logw0_.assign(theta_.size(), std::log(1.0 / theta_.size()));
        mass_.resize(k_);
        logq_target_.resize(k_);
        logq0_.resize(k_);
    }

    void set_target(const std::vector<double>& logw) {
        for (std::size_t c = 0; c < k_; ++c) {
            logq_target_[c] = mixture_log_prob(c, logw, nullptr);
            mass_[c] = std::exp(log_mult_[c] + logq_target_[c]);
        }
        refresh_q0();
    }

    // Adopt a candidate pi0 (log-weights over flagged points) if it already
    // beats the warm-started state; the restriction of a Theta-supported
    // target is exact, so this also short-circuits the well-specified case.
    void consider_seed(const std::vector<double>& cand_logw0) {
        double before = current_kl_bits();
        auto saved = logw0_;
        logw0_ = cand_logw0;
        refresh_q0();
        if (current_kl_bits() > before) {
            logw0_ = std::move(saved);
            refresh_q0();
        }
    }

    double current_kl_bits() const {
        double d = 0.0;
        for (std::size_t c = 0; c < k_; ++c) {
            if (mass_[c] == 0.0) continue;
            d += mass_[c] * (logq_target_[c] - logq0_[c]);
        }
        if (d >= detail::kInfThresholdNats) return kInf;
        return std::max(d, 0.0) * kLog2E;
    }

    // One multiplicative update; returns the decrease in bits.
    double step() {
        double before = current_kl_bits();
        std::vector<double> logr(theta_.size());
        std::vector<double> terms(k_);
        for (std::size_t ti = 0; ti < theta_.size(); ++ti) {
            std::size_t j = theta_[ti];
            for (std::size_t c = 0; c < k_; ++c) {
                double lm = mass_[c] > 0.0 ? std::log(mass_[c]) : -kInf;
                terms[c] = lm + law_cm_[c * m_ + j] - logq0_[c];
            }
            logr[ti] = log_sum_exp(terms.data(), k_);
        }
        double mx = -kInf;
        for (std::size_t ti = 0; ti < theta_.size(); ++ti) {
            logw0_[ti] += logr[ti] == -kInf ? kNegHuge : logr[ti];
            mx = std::max(mx, logw0_[ti]);
        }
        double z = 0.0;
        for (double v : logw0_) z += std::exp(v - mx);
        double logz = mx + std::log(z);
        for (auto& v : logw0_) v -= logz;
        refresh_q0();
        return before - current_kl_bits();
    }

    // Iterate until the per-step decrease drops below tol_bits.
    double run(double tol_bits, long max_steps, long* steps_done = nullptr) {
        double dec = kInf;
        long it = 0;
        while (it < max_steps) {
            dec = step();
            ++it;
            if (dec < tol_bits) break;
        }
        if (steps_done) *steps_done = it;
        return dec;
    }

    std::vector<double> pi0_full_logw() const {
        std::vector<double> full(m_, kNegHuge);
        for (std::size_t ti = 0; ti < theta_.size(); ++ti)
            full[theta_[ti]] = sanitize_log(logw0_[ti]);
        return full;
    }

    prior pi0_prior() const {
        prior pi;
        pi.grid = grid_;
        pi.weights.assign(m_, 0.0);
        double z = 0.0;
        for (std::size_t ti = 0; ti < theta_.size(); ++ti) {
            double w = std::exp(logw0_[ti]);
            pi.weights[theta_[ti]] = w;
            z += w;
        }
        for (auto& w : pi.weights) w /= z;
        return pi;
    }

private:
    double mixture_log_prob(std::size_t c, const std::vector<double>& logw,
                            const std::vector<std::size_t>* subset) const {
        const double* lrow = &law_cm_[c * m_];
        double mx = -kInf;
        if (subset) {
            for (std::size_t ti = 0; ti < subset->size(); ++ti)
                mx = std::max(mx, logw[ti] + lrow[(*subset)[ti]]);
        } else {
            for (std::size_t j = 0; j < m_; ++j) mx = std::max(mx, logw[j] + lrow[j]);
        }
        if (mx == -kInf) return kNegHuge;
        double acc = 0.0;
        if (subset) {
            for (std::size_t ti = 0; ti < subset->size(); ++ti)
                acc += std::exp(logw[ti] + lrow[(*subset)[ti]] - mx);
        } else {
            for (std::size_t j = 0; j < m_; ++j) acc += std::exp(logw[j] + lrow[j] - mx);
        }
        return sanitize_log(mx + std::log(acc));
    }

    void refresh_q0() {
        for (std::size_t c = 0; c < k_; ++c) logq0_[c] = mixture_log_prob(c, logw0_, &theta_);
    }

    const param_grid* grid_;
    std::size_t k_ = 0, m_ = 0;
    std::vector<std::size_t> theta_;
    std::vector<double> log_mult_, law_cm_;
    std::vector<double> logw0_;  // over flagged points
    std::vector<double> mass_, logq_target_, logq0_;
};

}  // namespace

// The update drives pi against the projected Theta-mixture rather than the
// plain restriction of pi.  With the restriction alone the adversarial prior
// collapses onto the farthest sources and the two bounds stop short of
// each other; against the inner minimizer the same multiplicative step is an
// exponentiated-gradient ascent on the concave objective and both bounds meet.
// The restriction is still produced (stage 2) and returned alongside.
constrained_report ab_two_stage(const param_grid& g, const ab_config& cfg) {
    if (g.theta_count() == 0) throw std::invalid_argument("two-stage solver: empty Theta mask");
    const double eps_bits = resolve_eps_bits(cfg);
    const double inner_tol_bits = std::min(1e-7, 0.01 * eps_bits);
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("two-stage solver: lambda > 0");

    auto be = detail::make_backend(g, cfg.n, cfg.mode);
    auto pen = detail::penalty_nats(g, cfg.n, cfg.mode);
    bool any_finite = false;
    for (double p : pen) any_finite |= (p != kInf);
    if (!any_finite)
        throw std::domain_error("two-stage solver: every point carries an infinite penalty");

    std::vector<double> logw = detail::log_weights(uniform_prior(g));
    sequence_projection proj(g, cfg.n);

    constrained_report rep;
    std::vector<double> d0, diff(g.size());

    // restriction of pi to Theta, as a projection seed
    auto restriction_seed = [&]() {
        std::vector<double> seed;
        seed.reserve(g.theta_count());
        double mx = -kInf;
        for (std::size_t j = 0; j < g.size(); ++j)
            if (g.theta_flags[j]) mx = std::max(mx, logw[j]);
        if (mx == -kInf)
            throw std::domain_error("two-stage solver: Theta support emptied out");
        double z = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j)
            if (g.theta_flags[j]) z += std::exp(logw[j] - mx);
        double logz = mx + std::log(z);
        for (std::size_t j = 0; j < g.size(); ++j)
            if (g.theta_flags[j]) seed.push_back(sanitize_log(logw[j] - logz));
        return seed;
    };

    // evaluate the bracketing bounds at the current pi with the projected pi0
    auto evaluate = [&]() {
        proj.set_target(logw);
        proj.consider_seed(restriction_seed());
        rep.inner_projection_gap_bits = proj.run(inner_tol_bits, 200000);
        be->mixture_divergence_nats(proj.pi0_full_logw(), d0);
        double lower = 0.0, upper = -kInf;
        bool lower_plus = false, lower_minus = false;
        for (std::size_t j = 0; j < g.size(); ++j) {
            double d;
            if (pen[j] == kInf) d = -kInf;
            else if (d0[j] == kInf) d = kInf;
            else d = d0[j] - pen[j];
            diff[j] = d;
            upper = std::max(upper, d);
            double w = std::exp(logw[j]);
            if (w == 0.0) continue;
            if (d == kInf) lower_plus = true;
            else if (d == -kInf) lower_minus = true;
            else lower += w * d;
        }
        double l = lower_plus ? kInf : (lower_minus ? -kInf : lower);
        return std::pair<double, double>{l * kLog2E, upper * kLog2E};
    };

    auto [rl, ru] = evaluate();
    rep.history.emplace_back(rl, ru);

    long it = 0;
    while (ru - rl > eps_bits && it < cfg.max_iter) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            double d = diff[j];
            if (d == -kInf) logw[j] = -kInf;  // infinite penalty: hard zero
            else if (d == kInf) logw[j] += cfg.lambda * 1e6;
            else logw[j] += cfg.lambda * d;
        }
        double mx = -kInf;
        for (double v : logw) mx = std::max(mx, v);
        double z = 0.0;
        for (double v : logw) z += std::exp(v - mx);
        double logz = mx + std::log(z);
        for (auto& v : logw) v = (v == -kInf) ? -kInf : v - logz;

        std::tie(rl, ru) = evaluate();
        rep.history.emplace_back(rl, ru);
        ++it;
    }

    rep.iterations = it;
    rep.converged = (ru - rl) <= eps_bits;
    rep.lower_bits = rl;
    rep.upper_bits = ru;
    rep.pi_phi = detail::weights_from_log(g, logw);
    rep.pi0_theta = proj.pi0_prior();
    return rep;
}

mixture_projection_result mixture_projection(const prior& target, const param_grid& g,
                                             int n, double tol_bits) {
    sequence_projection proj(g, n);
    proj.set_target(detail::log_weights(target));
    mixture_projection_result res;
    res.last_decrease_bits = proj.run(tol_bits, 100000, &res.iterations);
    res.kl_bits = proj.current_kl_bits();
    res.pi0 = proj.pi0_prior();
    return res;
}

double compare_priors(const prior& a, const prior& b) {
    if (!a.grid || !b.grid) throw std::invalid_argument("compare_priors: missing grid");
    if (a.grid->family != b.grid->family || a.grid->categories != b.grid->categories)
        throw std::invalid_argument("compare_priors: grid mismatch");
    std::map<std::vector<double>, std::pair<double, double>> merged;
    for (std::size_t j = 0; j < a.grid->size(); ++j)
        merged[a.grid->points[j]].first = a.weights[j];
    for (std::size_t j = 0; j < b.grid->size(); ++j)
        merged[b.grid->points[j]].second = b.weights[j];
    double sup = 0.0;
    for (const auto& [pt, w] : merged)
        sup = std::max(sup, std::abs(w.first - w.second));
    return sup;
}

}  // namespace regretlab
