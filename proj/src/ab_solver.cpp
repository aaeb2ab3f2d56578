#include "regretlab/ab_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace regretlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;
}

double resolve_eps_bits(const ab_config& cfg) {
    if (cfg.eps_bits > 0.0) return cfg.eps_bits;
    return cfg.n <= 100 ? 1e-4 : 1e-5;
}

double coeff_2n(double value_bits, int n) {
    return 2.0 * n * value_bits * kLn2;
}

namespace detail {

std::vector<double> log_weights(const prior& pi) {
    std::vector<double> logw(pi.weights.size());
    for (std::size_t j = 0; j < logw.size(); ++j)
        logw[j] = pi.weights[j] > 0.0 ? std::log(pi.weights[j]) : kNegHuge;
    return logw;
}

prior weights_from_log(const param_grid& g, const std::vector<double>& logw) {
    prior pi;
    pi.grid = &g;
    pi.weights.resize(logw.size());
    double m = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (std::size_t j = 0; j < logw.size(); ++j) {
        pi.weights[j] = std::exp(logw[j] - m);
        z += pi.weights[j];
    }
    for (auto& w : pi.weights) w /= z;
    return pi;
}

namespace {

double sanitize_log(double x) { return x < kNegHuge ? kNegHuge : x; }

// Whole-sequence divergences over type classes, any family.
class online_backend : public divergence_backend {
public:
    online_backend(const param_grid& g, int n) : m_(g.size()) {
        auto classes = type_classes(g.family, g.categories, n);
        k_ = classes->size();
        law_cm_.resize(k_ * m_);
        law_mk_.resize(m_ * k_);
        mass_mk_.resize(m_ * k_);
        max_law_.assign(k_, -kInf);
        scaled_cm_.resize(k_ * m_);
        for (std::size_t j = 0; j < m_; ++j) {
            auto law = make_sequence_law(g, j, classes, n);
            for (std::size_t c = 0; c < k_; ++c) {
                double lp = sanitize_log(law.class_log_prob[c]);
                law_cm_[c * m_ + j] = lp;
                law_mk_[j * k_ + c] = lp;
                mass_mk_[j * k_ + c] = std::exp((*classes)[c].log_multiplicity + lp);
            }
        }
        for (std::size_t c = 0; c < k_; ++c)
            for (std::size_t j = 0; j < m_; ++j)
                max_law_[c] = std::max(max_law_[c], law_cm_[c * m_ + j]);
        for (std::size_t c = 0; c < k_; ++c)
            for (std::size_t j = 0; j < m_; ++j)
                scaled_cm_[c * m_ + j] = std::exp(law_cm_[c * m_ + j] - max_law_[c]);
    }

    std::size_t size() const override { return m_; }

    void mixture_divergence_nats(const std::vector<double>& q_logw,
                                 std::vector<double>& out) const override {
        std::vector<double> w(m_), logq(k_);
        for (std::size_t j = 0; j < m_; ++j) w[j] = std::exp(q_logw[j]);
        for (std::size_t c = 0; c < k_; ++c) {
            const double* row = &scaled_cm_[c * m_];
            double s = 0.0;
            for (std::size_t j = 0; j < m_; ++j) s += w[j] * row[j];
            if (s > 0.0) {
                logq[c] = std::log(s) + max_law_[c];
            } else {  // rescue classes whose scaled dot underflows
                const double* lrow = &law_cm_[c * m_];
                double mx = -kInf;
                for (std::size_t j = 0; j < m_; ++j)
                    mx = std::max(mx, q_logw[j] + lrow[j]);
                double acc = 0.0;
                for (std::size_t j = 0; j < m_; ++j)
                    acc += std::exp(q_logw[j] + lrow[j] - mx);
                logq[c] = mx == -kInf ? kNegHuge : mx + std::log(acc);
            }
            logq[c] = sanitize_log(logq[c]);
        }
        out.resize(m_);
        for (std::size_t j = 0; j < m_; ++j) {
            const double* lrow = &law_mk_[j * k_];
            const double* wrow = &mass_mk_[j * k_];
            double d = 0.0;
            for (std::size_t c = 0; c < k_; ++c) d += wrow[c] * (lrow[c] - logq[c]);
            out[j] = d >= kInfThresholdNats ? kInf : std::max(d, 0.0);
        }
    }

private:
    std::size_t m_, k_ = 0;
    std::vector<double> law_cm_, law_mk_, mass_mk_, max_law_, scaled_cm_;
};

// Conditional next-symbol divergences for a Bernoulli grid: the history of
// n-1 symbols reduces to its ones-count k.
class batch_bernoulli_backend : public divergence_backend {
public:
    batch_bernoulli_backend(const param_grid& g, int n) : m_(g.size()), h_(n) {
        theta_.resize(m_);
        negent_.resize(m_);
        hist_km_.resize(h_ * m_);
        max_hist_.assign(h_, -kInf);
        pmf_mk_.resize(m_ * h_);
        for (std::size_t j = 0; j < m_; ++j) {
            double th = g.scalar(j);
            theta_[j] = th;
            double lth = std::log(th), l1th = std::log1p(-th);
            negent_[j] = mul_log(th, lth) + mul_log(1.0 - th, l1th);
            for (int k = 0; k < h_; ++k) {
                double base = mul_log(k, lth) + mul_log(h_ - 1 - k, l1th);
                hist_km_[static_cast<std::size_t>(k) * m_ + j] = sanitize_log(base);
                pmf_mk_[j * h_ + k] = std::exp(log_binomial(h_ - 1, k) + base);
            }
        }
        for (int k = 0; k < h_; ++k)
            for (std::size_t j = 0; j < m_; ++j)
                max_hist_[k] = std::max(max_hist_[k], hist_km_[static_cast<std::size_t>(k) * m_ + j]);
        scaled_km_.resize(h_ * m_);
        for (int k = 0; k < h_; ++k)
            for (std::size_t j = 0; j < m_; ++j)
                scaled_km_[static_cast<std::size_t>(k) * m_ + j] =
                    std::exp(hist_km_[static_cast<std::size_t>(k) * m_ + j] - max_hist_[k]);
    }

    std::size_t size() const override { return m_; }

    void mixture_divergence_nats(const std::vector<double>& q_logw,
                                 std::vector<double>& out) const override {
        std::vector<double> w(m_), lq(h_), l1q(h_);
        for (std::size_t j = 0; j < m_; ++j) w[j] = std::exp(q_logw[j]);
        for (int k = 0; k < h_; ++k) {
            const double* row = &scaled_km_[static_cast<std::size_t>(k) * m_];
            double s = 0.0, s1 = 0.0;
            for (std::size_t j = 0; j < m_; ++j) {
                double t = w[j] * row[j];
                s += t;
                s1 += t * theta_[j];
            }
            if (s <= 0.0) {  // rescue: exact log-sum-exp for this history
                const double* lrow = &hist_km_[static_cast<std::size_t>(k) * m_];
                double mx = -kInf;
                for (std::size_t j = 0; j < m_; ++j)
                    mx = std::max(mx, q_logw[j] + lrow[j]);
                double acc = 0.0, acc1 = 0.0;
                for (std::size_t j = 0; j < m_; ++j) {
                    double e = std::exp(q_logw[j] + lrow[j] - mx);
                    acc += e;
                    acc1 += e * theta_[j];
                }
                s = acc;
                s1 = acc1;
            }
            double q = s > 0.0 ? s1 / s : 0.0;
            lq[k] = q > 0.0 ? std::log(q) : kNegHuge;
            l1q[k] = q < 1.0 ? std::log1p(-q) : kNegHuge;
        }
        out.resize(m_);
        for (std::size_t j = 0; j < m_; ++j) {
            const double* pm = &pmf_mk_[j * h_];
            double a = 0.0, b = 0.0;
            for (int k = 0; k < h_; ++k) {
                a += pm[k] * lq[k];
                b += pm[k] * l1q[k];
            }
            double d = negent_[j] - theta_[j] * a - (1.0 - theta_[j]) * b;
            out[j] = d >= kInfThresholdNats ? kInf : std::max(d, 0.0);
        }
    }

private:
    std::size_t m_;
    int h_;  // history length + 1 = n; counts k = 0..n-1
    std::vector<double> theta_, negent_, hist_km_, scaled_km_, max_hist_, pmf_mk_;
};

// Conditional next-symbol divergences for a multinomial grid; histories are
// the type classes of length n-1.
class batch_multinomial_backend : public divergence_backend {
public:
    batch_multinomial_backend(const param_grid& g, int n)
        : m_(g.size()), cat_(g.categories) {
        if (n < 2) throw std::invalid_argument("batch multinomial: n >= 2 required");
        auto hist = type_classes(g.family, g.categories, n - 1);
        hc_ = hist->size();
        probs_.resize(m_ * cat_);
        negent_.resize(m_);
        hist_cm_.resize(hc_ * m_);
        scaled_cm_.resize(hc_ * m_);
        max_hist_.assign(hc_, -kInf);
        pmf_mc_.resize(m_ * hc_);
        std::vector<double> lp(cat_);
        for (std::size_t j = 0; j < m_; ++j) {
            const auto& p = g.points[j];
            double ne = 0.0;
            for (int s = 0; s < cat_; ++s) {
                probs_[j * cat_ + s] = p[s];
                lp[s] = std::log(p[s]);
                ne += mul_log(p[s], lp[s]);
            }
            negent_[j] = ne;
            for (std::size_t c = 0; c < hc_; ++c) {
                const auto& stat = (*hist)[c].stat;
                double base = 0.0;
                for (int s = 0; s < cat_; ++s) base += mul_log(stat[s], lp[s]);
                base = sanitize_log(base);
                hist_cm_[c * m_ + j] = base;
                pmf_mc_[j * hc_ + c] = std::exp((*hist)[c].log_multiplicity + base);
            }
        }
        for (std::size_t c = 0; c < hc_; ++c)
            for (std::size_t j = 0; j < m_; ++j)
                max_hist_[c] = std::max(max_hist_[c], hist_cm_[c * m_ + j]);
        for (std::size_t c = 0; c < hc_; ++c)
            for (std::size_t j = 0; j < m_; ++j)
                scaled_cm_[c * m_ + j] = std::exp(hist_cm_[c * m_ + j] - max_hist_[c]);
    }

    std::size_t size() const override { return m_; }

    void mixture_divergence_nats(const std::vector<double>& q_logw,
                                 std::vector<double>& out) const override {
        std::vector<double> w(m_);
        for (std::size_t j = 0; j < m_; ++j) w[j] = std::exp(q_logw[j]);
        std::vector<double> lq(hc_ * cat_);
        std::vector<double> num(cat_);
        for (std::size_t c = 0; c < hc_; ++c) {
            const double* row = &scaled_cm_[c * m_];
            double s = 0.0;
            std::fill(num.begin(), num.end(), 0.0);
            for (std::size_t j = 0; j < m_; ++j) {
                double t = w[j] * row[j];
                if (t == 0.0) continue;
                s += t;
                const double* pj = &probs_[j * cat_];
                for (int x = 0; x < cat_; ++x) num[x] += t * pj[x];
            }
            if (s <= 0.0) {  // rescue with exact log-sum-exp
                const double* lrow = &hist_cm_[c * m_];
                double mx = -kInf;
                for (std::size_t j = 0; j < m_; ++j)
                    mx = std::max(mx, q_logw[j] + lrow[j]);
                for (std::size_t j = 0; j < m_; ++j) {
                    double e = std::exp(q_logw[j] + lrow[j] - mx);
                    if (e == 0.0) continue;
                    s += e;
                    const double* pj = &probs_[j * cat_];
                    for (int x = 0; x < cat_; ++x) num[x] += e * pj[x];
                }
            }
            for (int x = 0; x < cat_; ++x) {
                double q = s > 0.0 ? num[x] / s : 0.0;
                lq[c * cat_ + x] = q > 0.0 ? std::log(q) : kNegHuge;
            }
        }
        out.resize(m_);
        for (std::size_t j = 0; j < m_; ++j) {
            const double* pm = &pmf_mc_[j * hc_];
            const double* pj = &probs_[j * cat_];
            double d = 0.0;
            for (std::size_t c = 0; c < hc_; ++c) {
                if (pm[c] == 0.0) continue;
                double cross = 0.0;
                for (int x = 0; x < cat_; ++x) cross += pj[x] * lq[c * cat_ + x];
                d += pm[c] * (negent_[j] - cross);
            }
            out[j] = d >= kInfThresholdNats ? kInf : std::max(d, 0.0);
        }
    }

private:
    std::size_t m_, hc_ = 0;
    int cat_;
    std::vector<double> probs_, negent_, hist_cm_, scaled_cm_, max_hist_, pmf_mc_;
};

}  // namespace

std::unique_ptr<divergence_backend> make_backend(const param_grid& g, int n,
                                                 regret_mode mode) {
    if (mode == regret_mode::online_sequence)
        return std::make_unique<online_backend>(g, n);
    switch (g.family) {
        case family_kind::bernoulli:
            return std::make_unique<batch_bernoulli_backend>(g, n);
        case family_kind::multinomial:
            return std::make_unique<batch_multinomial_backend>(g, n);
        case family_kind::markov1_binary:
            throw std::invalid_argument("batch mode is not defined for Markov grids");
    }
    throw std::invalid_argument("make_backend: unknown family");
}

std::vector<double> penalty_nats(const param_grid& g, int n, regret_mode mode) {
    std::vector<double> pen(g.size());
    if (g.family == family_kind::markov1_binary && mode == regret_mode::online_sequence) {
        auto classes = type_classes(g.family, g.categories, n);
        std::vector<sequence_law> theta_laws;
        for (std::size_t j : g.theta_indices())
            theta_laws.push_back(make_sequence_law(g, j, classes, n));
        if (theta_laws.empty()) throw std::invalid_argument("penalty: empty Theta mask");
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (g.theta_flags[j]) { pen[j] = 0.0; continue; }
            auto law = make_sequence_law(g, j, classes, n);
            double best = kInf;
            for (const auto& tl : theta_laws) best = std::min(best, kl_sequence(law, tl));
            pen[j] = best * kLn2;
        }
        return pen;
    }
    auto per_symbol = theta_divergence_per_symbol(g);  // bits
    double horizon = (mode == regret_mode::online_sequence) ? static_cast<double>(n) : 1.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        pen[j] = per_symbol[j] == kInf ? kInf : per_symbol[j] * kLn2 * horizon;
    return pen;
}

namespace {

struct bound_eval {
    double lower_nats;
    double upper_nats;
    std::vector<double> diff;  // D(P||Q) - D(P||Theta) in nats; -inf where pen = inf
};

bound_eval evaluate_bounds(const std::vector<double>& dq,
                           const std::vector<double>& pen,
                           const std::vector<double>& logw) {
    bound_eval ev;
    ev.diff.resize(dq.size());
    double lower = 0.0, upper = -kInf;
    bool lower_plus_inf = false, lower_minus_inf = false;
    for (std::size_t j = 0; j < dq.size(); ++j) {
        double d;
        if (pen[j] == kInf)
            d = -kInf;  // excluded by an infinite penalty
        else if (dq[j] == kInf)
            d = kInf;
        else
            d = dq[j] - pen[j];
        ev.diff[j] = d;
        upper = std::max(upper, d);
        double w = std::exp(logw[j]);
        if (w == 0.0) continue;  // infinities with zero mass do not enter
        if (d == kInf) lower_plus_inf = true;
        else if (d == -kInf) lower_minus_inf = true;
        else lower += w * d;
    }
    ev.lower_nats = lower_plus_inf ? kInf : (lower_minus_inf ? -kInf : lower);
    ev.upper_nats = upper;
    return ev;
}

}  // namespace

}  // namespace detail

namespace {

solver_report run_ab(const param_grid& g, const detail::divergence_backend& be,
                     const std::vector<double>& pen, const ab_config& cfg,
                     std::vector<double> logw) {
    using namespace detail;
    const double eps_nats = resolve_eps_bits(cfg) * kLn2;
    const double lambda = cfg.lambda;
    if (!(lambda > 0.0)) throw std::invalid_argument("ab solver: lambda > 0");

    bool any_finite = false;
    for (double p : pen) any_finite |= (p != kInf);
    if (!any_finite)
        throw std::domain_error("ab solver: every point carries an infinite penalty");

    solver_report rep;
    std::vector<double> dq;
    be.mixture_divergence_nats(logw, dq);
    auto ev = evaluate_bounds(dq, pen, logw);
    rep.history.emplace_back(ev.lower_nats * kLog2E, ev.upper_nats * kLog2E);

    long it = 0;
    bool recorded = true;
    while (ev.upper_nats - ev.lower_nats > eps_nats && it < cfg.max_iter) {
        // multiplicative exponent update, then renormalize in log domain
        for (std::size_t j = 0; j < logw.size(); ++j) {
            double d = ev.diff[j];
            if (d == -kInf)
                logw[j] = -kInf;  // hard zero, never revived
            else if (d == kInf)
                logw[j] += lambda * 1e6;  // push mass toward an unbounded point
            else
                logw[j] += lambda * d;
        }
        double mx = -kInf;
        for (double v : logw) mx = std::max(mx, v);
        double z = 0.0;
        for (double v : logw) z += std::exp(v - mx);
        double logz = mx + std::log(z);
        for (auto& v : logw) v = (v == -kInf) ? -kInf : v - logz;

        be.mixture_divergence_nats(logw, dq);
        ev = evaluate_bounds(dq, pen, logw);
        ++it;
        // record everything early on, then thin to keep long runs small
        recorded = it <= 100000 || it % 64 == 0;
        if (recorded)
            rep.history.emplace_back(ev.lower_nats * kLog2E, ev.upper_nats * kLog2E);
    }
    if (!recorded)
        rep.history.emplace_back(ev.lower_nats * kLog2E, ev.upper_nats * kLog2E);

    rep.iterations = it;
    rep.converged = (ev.upper_nats - ev.lower_nats) <= eps_nats;
    rep.lower_bits = ev.lower_nats * kLog2E;
    rep.upper_bits = ev.upper_nats * kLog2E;
    rep.pi = detail::weights_from_log(g, logw);
    return rep;
}

}  // namespace

solver_report ab_misspecified(const param_grid& g, const ab_config& cfg) {
    return ab_misspecified(g, cfg, uniform_prior(g));
}

solver_report ab_misspecified(const param_grid& g, const ab_config& cfg,
                              const prior& initial) {
    if (g.size() == 0) throw std::invalid_argument("ab solver: empty grid");
    if (g.theta_count() == 0) throw std::invalid_argument("ab solver: empty Theta mask");
    auto be = detail::make_backend(g, cfg.n, cfg.mode);
    auto pen = detail::penalty_nats(g, cfg.n, cfg.mode);
    return run_ab(g, *be, pen, cfg, detail::log_weights(initial));
}

namespace {

solver_report capacity_impl(const param_grid& theta, int n, ab_config cfg,
                            regret_mode mode) {
    cfg.n = n;
    cfg.mode = mode;
    if (theta.theta_count() == theta.size()) return ab_misspecified(theta, cfg);
    param_grid sub = restrict_to_theta(theta);
    solver_report rep = ab_misspecified(sub, cfg);
    // re-anchor the prior on the caller's grid; the sub-grid dies here
    prior remapped;
    remapped.grid = &theta;
    remapped.weights.assign(theta.size(), 0.0);
    auto idx = theta.theta_indices();
    for (std::size_t t = 0; t < idx.size(); ++t)
        remapped.weights[idx[t]] = rep.pi.weights[t];
    rep.pi = std::move(remapped);
    return rep;
}

}  // namespace

solver_report capacity_online(const param_grid& theta, int n, ab_config cfg) {
    return capacity_impl(theta, n, cfg, regret_mode::online_sequence);
}

solver_report capacity_batch(const param_grid& theta, int n, ab_config cfg) {
    return capacity_impl(theta, n, cfg, regret_mode::batch_conditional);
}

sandwich_result verify_sandwich(const param_grid& g, int n, double alpha,
                                ab_config cfg) {
    if (g.family != family_kind::bernoulli)
        throw std::invalid_argument("verify_sandwich: Bernoulli grid required");
    cfg.n = n;

    auto idx = g.theta_indices();
    if (idx.empty()) throw std::invalid_argument("verify_sandwich: empty Theta mask");
    const double lo = g.scalar(0), hi = g.scalar(g.size() - 1);
    const double a = g.scalar(idx.front()), b = g.scalar(idx.back());

    sandwich_result res;
    auto c_theta = capacity_impl(g, n, cfg, cfg.mode);
    auto f_mis = ab_misspecified(g, cfg);

    const double eps_nats = std::pow(static_cast<double>(n), alpha - 1.0);
    res.shell_lo = std::max(lo, a - shell_delta_nats(a, eps_nats));
    res.shell_hi = std::min(hi, b + shell_delta_nats(b, eps_nats));
    const double spacing = (hi - lo) / static_cast<double>(g.size() - 1);
    int m_shell = std::max(2, static_cast<int>(std::lround((res.shell_hi - res.shell_lo) / spacing)) + 1);
    res.shell_grid = std::make_shared<param_grid>(build_bernoulli_grid(
        res.shell_lo, res.shell_hi, m_shell, res.shell_lo, res.shell_hi));
    auto c_shell = capacity_impl(*res.shell_grid, n, cfg, cfg.mode);

    res.theta_capacity_bits = c_theta.midpoint_bits();
    res.misspecified_bits = f_mis.midpoint_bits();
    res.shell_capacity_bits = c_shell.midpoint_bits();
    res.converged = c_theta.converged && f_mis.converged && c_shell.converged;
    const double tol = resolve_eps_bits(cfg);
    res.ordered = res.theta_capacity_bits <= res.misspecified_bits + tol &&
                  res.misspecified_bits <= res.shell_capacity_bits + tol;
    res.theta_run = std::move(c_theta);
    res.misspecified_run = std::move(f_mis);
    res.shell_run = std::move(c_shell);
    return res;
}

namespace {

// Per-point objective of the combined setting over a fully flagged grid:
// (D(P(Y^{n+l}) || Q) - D(P(Y^n) || Q)) / l, sequence laws at both horizons.
class combined_backend : public detail::divergence_backend {
public:
    combined_backend(const param_grid& g, int n, int l) : n_(n), l_(l) {
        long_ = detail::make_backend(g, n + l, regret_mode::online_sequence);
        if (n > 0) short_ = detail::make_backend(g, n, regret_mode::online_sequence);
    }
    std::size_t size() const override { return long_->size(); }
    void mixture_divergence_nats(const std::vector<double>& q_logw,
                                 std::vector<double>& out) const override {
        long_->mixture_divergence_nats(q_logw, out);
        if (short_) {
            std::vector<double> d2;
            short_->mixture_divergence_nats(q_logw, d2);
            for (std::size_t j = 0; j < out.size(); ++j)
                out[j] = out[j] == kInf ? kInf : std::max(0.0, out[j] - d2[j]);
        }
        for (auto& v : out)
            if (v != kInf) v /= l_;
    }

private:
    int n_, l_;
    std::unique_ptr<detail::divergence_backend> long_, short_;
};

}  // namespace

combined_result combined_bounds(const param_grid& g, int n, int l, ab_config cfg) {
    if (n < 0 || l < 1) throw std::invalid_argument("combined_bounds: n >= 0, l >= 1");
    combined_result res;
    res.converged = true;

    double upper = 0.0;
    for (int t = 1; t <= l; ++t) {
        ab_config c2 = cfg;
        c2.n = n + t;
        c2.mode = regret_mode::batch_conditional;
        auto rep = ab_misspecified(g, c2);
        upper += rep.midpoint_bits();
        res.converged = res.converged && rep.converged;
    }
    res.upper_bits_per_step = upper / l;

    param_grid theta = (g.theta_count() == g.size()) ? g : restrict_to_theta(g);
    combined_backend be(theta, n, l);
    std::vector<double> pen(theta.size(), 0.0);
    ab_config c3 = cfg;
    c3.n = n + l;
    auto low = run_ab(theta, be, pen, c3, detail::log_weights(uniform_prior(theta)));
    res.lower_bits_per_step = low.midpoint_bits();
    res.converged = res.converged && low.converged;
    return res;
}

}  // namespace regretlab
