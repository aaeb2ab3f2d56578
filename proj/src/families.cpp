#include "regretlab/families.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace regretlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double mul_log(double count, double logp) {
    if (count == 0.0) return 0.0;
    return count * logp;
}

double log_sum_exp(const double* x, std::size_t n) {
    double m = -kInf;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] - m);
    return m + std::log(s);
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::size_t param_grid::theta_count() const {
    std::size_t c = 0;
    for (auto f : theta_flags) c += (f != 0);
    return c;
}

std::vector<std::size_t> param_grid::theta_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < theta_flags.size(); ++j)
        if (theta_flags[j]) idx.push_back(j);
    return idx;
}

param_grid build_bernoulli_grid(double lo, double hi, int m,
                                double theta_lo, double theta_hi) {
    if (!(0.0 <= lo && lo <= theta_lo && theta_lo <= theta_hi &&
          theta_hi <= hi && hi <= 1.0))
        throw std::invalid_argument("bernoulli grid: need 0 <= lo <= theta_lo <= theta_hi <= hi <= 1");
    if (m < 2) throw std::invalid_argument("bernoulli grid: m >= 2 required");

    // segments between consecutive distinct anchors
    const double anchors[4] = {lo, theta_lo, theta_hi, hi};
    std::vector<std::pair<double, double>> segs;
    for (int i = 0; i < 3; ++i)
        if (anchors[i + 1] > anchors[i]) segs.emplace_back(anchors[i], anchors[i + 1]);

    param_grid g;
    g.family = family_kind::bernoulli;
    g.categories = 2;

    if (segs.empty()) {  // degenerate interval: all four anchors coincide
        g.points.push_back({lo});
        if (m > 1) throw std::invalid_argument("bernoulli grid: zero-width interval admits one point");
    } else {
        int total = m - 1;
        if (total < static_cast<int>(segs.size()))
            throw std::invalid_argument("bernoulli grid: m too small to contain all anchors");
        // largest-remainder allocation of intervals, at least one per segment
        const double width = hi - lo;
        std::vector<int> alloc(segs.size(), 1);
        int remain = total - static_cast<int>(segs.size());
        std::vector<double> ideal(segs.size());
        for (std::size_t s = 0; s < segs.size(); ++s)
            ideal[s] = (segs[s].second - segs[s].first) / width * total;
        // distribute the remaining intervals toward the largest deficits
        while (remain > 0) {
            std::size_t best = 0;
            double best_deficit = -kInf;
            for (std::size_t s = 0; s < segs.size(); ++s) {
                double deficit = ideal[s] - alloc[s];
                if (deficit > best_deficit) { best_deficit = deficit; best = s; }
            }
            ++alloc[best];
            --remain;
        }
        for (std::size_t s = 0; s < segs.size(); ++s) {
            const auto [a, b] = segs[s];
            for (int i = 0; i < alloc[s]; ++i) {
                double p = (i == 0) ? a : a + (b - a) * (static_cast<double>(i) / alloc[s]);
                g.points.push_back({p});
            }
        }
        g.points.push_back({hi});
    }

    g.theta_flags.resize(g.points.size());
    for (std::size_t j = 0; j < g.points.size(); ++j) {
        double p = g.points[j][0];
        g.theta_flags[j] = (p >= theta_lo && p <= theta_hi) ? 1 : 0;
    }
    return g;
}

namespace {

void enumerate_compositions(int categories, int total,
                            std::vector<int>& cur,
                            const std::function<void(const std::vector<int>&)>& emit) {
    if (static_cast<int>(cur.size()) == categories - 1) {
        int used = 0;
        for (int c : cur) used += c;
        cur.push_back(total - used);
        emit(cur);
        cur.pop_back();
        return;
    }
    int used = 0;
    for (int c : cur) used += c;
    for (int v = 0; v <= total - used; ++v) {
        cur.push_back(v);
        enumerate_compositions(categories, total, cur, emit);
        cur.pop_back();
    }
}

}  // namespace

param_grid build_simplex_grid(int categories, int steps, int flagged_categories) {
    if (categories < 2 || categories > 5)
        throw std::invalid_argument("simplex grid: categories in [2,5]");
    if (steps < 1) throw std::invalid_argument("simplex grid: steps >= 1");
    if (flagged_categories == 0) flagged_categories = categories;
    if (flagged_categories < 1 || flagged_categories > categories)
        throw std::invalid_argument("simplex grid: flagged_categories in [1,categories]");

    param_grid g;
    g.family = family_kind::multinomial;
    g.categories = categories;
    std::vector<int> cur;
    enumerate_compositions(categories, steps, cur, [&](const std::vector<int>& counts) {
        std::vector<double> p(categories);
        for (int c = 0; c < categories; ++c) p[c] = static_cast<double>(counts[c]) / steps;
        bool in_theta = true;
        for (int c = flagged_categories; c < categories; ++c)
            if (counts[c] != 0) in_theta = false;
        g.points.push_back(std::move(p));
        g.theta_flags.push_back(in_theta ? 1 : 0);
    });
    return g;
}

param_grid build_markov_grid(int steps) {
    if (steps < 1) throw std::invalid_argument("markov grid: steps >= 1");
    param_grid g;
    g.family = family_kind::markov1_binary;
    g.categories = 2;
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; j <= steps; ++j) {
            if (i == 0 && j == 0) continue;  // non-ergodic corner
            g.points.push_back({static_cast<double>(i) / steps,
                                static_cast<double>(j) / steps});
            g.theta_flags.push_back((i + j == steps) ? 1 : 0);
        }
    }
    return g;
}

param_grid restrict_to_theta(const param_grid& g) {
    param_grid sub;
    sub.family = g.family;
    sub.categories = g.categories;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (!g.theta_flags[j]) continue;
        sub.points.push_back(g.points[j]);
        sub.theta_flags.push_back(1);
    }
    if (sub.points.empty())
        throw std::invalid_argument("restrict_to_theta: empty Theta mask");
    return sub;
}

namespace {

class_list bernoulli_classes(int n) {
    class_list cl;
    cl.reserve(n + 1);
    for (int k = 0; k <= n; ++k)
        cl.push_back({{k}, log_binomial(n, k)});
    return cl;
}

class_list multinomial_classes(int categories, int n) {
    class_list cl;
    std::vector<int> cur;
    enumerate_compositions(categories, n, cur, [&](const std::vector<int>& counts) {
        double lm = std::lgamma(n + 1.0);
        for (int c : counts) lm -= std::lgamma(c + 1.0);
        cl.push_back({counts, lm});
    });
    return cl;
}

// Count binary strings per (y1, n01, n10, n11) cell.  Counts partition 2^n,
// so each cell fits an unsigned 64-bit integer for n <= 64.
class_list markov_classes(int n) {
    if (n > 64) throw std::invalid_argument("markov classes: n <= 64 required");
    const int t = n;  // transitions counted among n-1 steps
    auto idx = [t](int cur, int n01, int n10, int n11) {
        return ((static_cast<std::size_t>(cur) * t + n01) * t + n10) * t + n11;
    };
    const std::size_t cells = 2ull * t * t * t;
    class_list cl;
    for (int y1 = 0; y1 <= 1; ++y1) {
        std::vector<std::uint64_t> dp(cells, 0), next(cells, 0);
        dp[idx(y1, 0, 0, 0)] = 1;
        for (int step = 1; step < n; ++step) {
            std::fill(next.begin(), next.end(), 0);
            for (int cur = 0; cur <= 1; ++cur)
                for (int a = 0; a < step; ++a)
                    for (int b = 0; b < step; ++b)
                        for (int c = 0; c < step; ++c) {
                            std::uint64_t cnt = dp[idx(cur, a, b, c)];
                            if (!cnt) continue;
                            if (cur == 0) {
                                next[idx(0, a, b, c)] += cnt;      // 0 -> 0
                                next[idx(1, a + 1, b, c)] += cnt;  // 0 -> 1
                            } else {
                                next[idx(0, a, b + 1, c)] += cnt;  // 1 -> 0
                                next[idx(1, a, b, c + 1)] += cnt;  // 1 -> 1
                            }
                        }
            dp.swap(next);
        }
        for (int a = 0; a < t; ++a)
            for (int b = 0; b < t; ++b)
                for (int c = 0; c < t; ++c) {
                    std::uint64_t cnt = dp[idx(0, a, b, c)] + dp[idx(1, a, b, c)];
                    if (!cnt) continue;
                    cl.push_back({{y1, a, b, c},
                                  std::log(static_cast<double>(cnt))});
                }
    }
    return cl;
}

}  // namespace

class_list_ptr type_classes(family_kind family, int categories, int n) {
    if (n < 1) throw std::invalid_argument("type_classes: n >= 1");
    switch (family) {
        case family_kind::bernoulli:
            return std::make_shared<const class_list>(bernoulli_classes(n));
        case family_kind::multinomial:
            return std::make_shared<const class_list>(multinomial_classes(categories, n));
        case family_kind::markov1_binary:
            return std::make_shared<const class_list>(markov_classes(n));
    }
    throw std::invalid_argument("type_classes: unknown family");
}

double markov_stationary_one(double phi01, double phi10) {
    if (phi01 + phi10 <= 0.0)
        throw std::invalid_argument("markov law: phi01 + phi10 = 0 is non-ergodic");
    return phi01 / (phi01 + phi10);
}

sequence_law make_sequence_law(family_kind family, int categories,
                               const std::vector<double>& param,
                               const class_list_ptr& classes, int n) {
    sequence_law law;
    law.n = n;
    law.classes = classes;
    law.class_log_prob.resize(classes->size());

    if (family == family_kind::bernoulli) {
        const double th = param[0];
        const double lth = std::log(th), l1th = std::log1p(-th);
        for (std::size_t c = 0; c < classes->size(); ++c) {
            int k = (*classes)[c].stat[0];
            law.class_log_prob[c] = mul_log(k, lth) + mul_log(n - k, l1th);
        }
    } else if (family == family_kind::multinomial) {
        std::vector<double> lp(categories);
        for (int s = 0; s < categories; ++s) lp[s] = std::log(param[s]);
        for (std::size_t c = 0; c < classes->size(); ++c) {
            const auto& stat = (*classes)[c].stat;
            double v = 0.0;
            for (int s = 0; s < categories; ++s) v += mul_log(stat[s], lp[s]);
            law.class_log_prob[c] = v;
        }
    } else {
        const double p01 = param[0], p10 = param[1];
        const double pi1 = markov_stationary_one(p01, p10);
        const double l01 = std::log(p01), l00 = std::log1p(-p01);
        const double l10 = std::log(p10), l11 = std::log1p(-p10);
        const double lpi1 = std::log(pi1), lpi0 = std::log1p(-pi1);
        for (std::size_t c = 0; c < classes->size(); ++c) {
            const auto& st = (*classes)[c].stat;  // {y1, n01, n10, n11}
            int n00 = (n - 1) - st[1] - st[2] - st[3];
            double v = (st[0] == 1) ? lpi1 : lpi0;
            v += mul_log(n00, l00) + mul_log(st[1], l01) +
                 mul_log(st[2], l10) + mul_log(st[3], l11);
            law.class_log_prob[c] = v;
        }
    }
    return law;
}

sequence_law make_sequence_law(const param_grid& g, std::size_t point,
                               const class_list_ptr& classes, int n) {
    return make_sequence_law(g.family, g.categories, g.points[point], classes, n);
}

prior uniform_prior(const param_grid& g) {
    prior pi;
    pi.grid = &g;
    pi.weights.assign(g.size(), 1.0 / g.size());
    return pi;
}

prior point_prior(const param_grid& g, std::size_t point) {
    prior pi;
    pi.grid = &g;
    pi.weights.assign(g.size(), 0.0);
    pi.weights.at(point) = 1.0;
    return pi;
}

double conditional_predictive_weight(const prior& pi, const param_grid& g,
                                     int k, int n) {
    if (g.family != family_kind::bernoulli)
        throw std::invalid_argument("predictive weight: Bernoulli grid required");
    if (k < 0 || k > n - 1)
        throw std::invalid_argument("predictive weight: need 0 <= k <= n-1");
    const std::size_t m = g.size();
    std::vector<double> num(m), den(m);
    for (std::size_t j = 0; j < m; ++j) {
        double w = pi.weights[j];
        if (w <= 0.0) { num[j] = -kInf; den[j] = -kInf; continue; }
        double th = g.scalar(j);
        double base = std::log(w) + mul_log(k, std::log(th)) +
                      mul_log(n - 1 - k, std::log1p(-th));
        den[j] = base;
        num[j] = base + std::log(th);
    }
    double lden = log_sum_exp(den.data(), m);
    if (lden == -kInf)
        throw std::domain_error("predictive weight: history has zero mass under the prior");
    double lnum = log_sum_exp(num.data(), m);
    return std::exp(lnum - lden);
}

}  // namespace regretlab
