#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "doctest.h"
#include "regretlab/ab_solver.hpp"

using namespace regretlab;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<int>> all_binary_strings(int n) {
    std::vector<std::vector<int>> out;
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<int> s(n);
        for (int i = 0; i < n; ++i) s[i] = (mask >> i) & 1;
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("noiseless two-point grid attains one bit immediately") {
    auto g = build_bernoulli_grid(0.0, 1.0, 2, 0.0, 1.0);
    ab_config cfg;
    cfg.n = 1;
    cfg.mode = regret_mode::online_sequence;
    auto rep = ab_misspecified(g, cfg);
    CHECK(rep.converged);
    CHECK(rep.midpoint_bits() == doctest::Approx(1.0).epsilon(1e-12));
    auto rep5 = capacity_online(g, 5);
    CHECK(rep5.midpoint_bits() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("backends reproduce the public divergence functions") {
    auto g = build_bernoulli_grid(0.0, 1.0, 17, 0.25, 0.75);
    int n = 6;
    auto pi = uniform_prior(g);
    auto logw = detail::log_weights(pi);

    SUBCASE("batch backend vs conditional_kl_batch") {
        auto be = detail::make_backend(g, n, regret_mode::batch_conditional);
        std::vector<double> d;
        be->mixture_divergence_nats(logw, d);
        for (std::size_t j = 0; j < g.size(); ++j) {
            double oracle = conditional_kl_batch(g.scalar(j), pi, g, n);
            CHECK(d[j] * kLog2E == doctest::Approx(oracle).epsilon(1e-10));
        }
    }

    SUBCASE("online backend vs sequence-KL against the explicit mixture") {
        auto be = detail::make_backend(g, n, regret_mode::online_sequence);
        std::vector<double> d;
        be->mixture_divergence_nats(logw, d);
        auto cl = type_classes(family_kind::bernoulli, 2, n);
        std::vector<double> mix(cl->size(), 0.0);
        std::vector<sequence_law> laws;
        for (std::size_t j = 0; j < g.size(); ++j) {
            laws.push_back(make_sequence_law(g, j, cl, n));
            for (std::size_t c = 0; c < cl->size(); ++c)
                mix[c] += pi.weights[j] * std::exp(laws[j].class_log_prob[c]);
        }
        sequence_law mix_law;
        mix_law.n = n;
        mix_law.classes = cl;
        for (double v : mix) mix_law.class_log_prob.push_back(std::log(v));
        for (std::size_t j = 0; j < g.size(); ++j)
            CHECK(d[j] * kLog2E == doctest::Approx(kl_sequence(laws[j], mix_law)).epsilon(1e-10));
    }

    SUBCASE("multinomial batch backend vs direct conditional sum") {
        auto gs = build_simplex_grid(3, 4);
        int nn = 4;
        auto pis = uniform_prior(gs);
        auto logws = detail::log_weights(pis);
        auto be = detail::make_backend(gs, nn, regret_mode::batch_conditional);
        std::vector<double> d;
        be->mixture_divergence_nats(logws, d);
        // oracle: enumerate histories as type classes of length nn-1
        auto hist = type_classes(family_kind::multinomial, 3, nn - 1);
        for (std::size_t j = 0; j < gs.size(); ++j) {
            const auto& pj = gs.points[j];
            double total = 0.0;
            for (const auto& h : *hist) {
                double lph = h.log_multiplicity;
                for (int s = 0; s < 3; ++s) lph += mul_log(h.stat[s], std::log(pj[s]));
                double ph = std::exp(lph);
                if (ph == 0.0) continue;
                // mixture next-symbol law given this history
                double den = 0.0;
                std::vector<double> num(3, 0.0);
                for (std::size_t t = 0; t < gs.size(); ++t) {
                    double lpt = 0.0;
                    for (int s = 0; s < 3; ++s)
                        lpt += mul_log(h.stat[s], std::log(gs.points[t][s]));
                    double w = pis.weights[t] * std::exp(lpt);
                    den += w;
                    for (int s = 0; s < 3; ++s) num[s] += w * gs.points[t][s];
                }
                std::vector<double> q(3);
                for (int s = 0; s < 3; ++s) q[s] = num[s] / den;
                total += ph * kl_categorical_symbol(pj, q);
            }
            CHECK(d[j] * kLog2E == doctest::Approx(total).epsilon(1e-9));
        }
    }
}

TEST_CASE("one online update at lambda = 1 equals the two-step projection") {
    // three-point grid, n = 2, flags on the lower two points
    auto g = build_bernoulli_grid(0.25, 0.75, 3, 0.25, 0.5);
    const int n = 2;
    ab_config cfg;
    cfg.n = n;
    cfg.mode = regret_mode::online_sequence;
    cfg.lambda = 1.0;
    cfg.eps_bits = 1e-15;  // force at least one iteration
    cfg.max_iter = 1;
    auto rep = ab_misspecified(g, cfg);

    // literal two-step update over all 2^n sequences
    const std::size_t m = g.size();
    std::vector<double> pi0(m, 1.0 / m);
    auto seq_prob = [&](std::size_t j, const std::vector<int>& s) {
        double p = 1.0;
        for (int y : s) p *= y ? g.scalar(j) : 1.0 - g.scalar(j);
        return p;
    };
    // theta* per grid point: argmin over flagged of the sequence divergence
    std::vector<std::size_t> tstar(m);
    for (std::size_t j = 0; j < m; ++j) {
        double best = kInf;
        for (std::size_t t = 0; t < m; ++t) {
            if (!g.theta_flags[t]) continue;
            double d = 0.0;
            for (const auto& s : all_binary_strings(n)) {
                double pj = seq_prob(j, s);
                if (pj > 0) d += pj * std::log(pj / seq_prob(t, s));
            }
            if (d < best) {
                best = d;
                tstar[j] = t;
            }
        }
    }
    std::vector<double> log_next(m);
    for (std::size_t j = 0; j < m; ++j) {
        double acc = std::log(pi0[j]);
        for (const auto& s : all_binary_strings(n)) {
            double q = 0.0;
            for (std::size_t t = 0; t < m; ++t) q += pi0[t] * seq_prob(t, s);
            double psi = pi0[j] * seq_prob(j, s) / q;
            double psi_tilde = psi * seq_prob(tstar[j], s) / seq_prob(j, s);
            acc += seq_prob(j, s) * std::log(psi_tilde);
        }
        // log pi + sum_y P log psi~ = log pi + sum_y P [log pi + log P - log q
        //   + log P* - log P] - log pi = the multiplicative exponent form
        log_next[j] = acc - std::log(pi0[j]);
    }
    double mx = *std::max_element(log_next.begin(), log_next.end());
    double z = 0.0;
    for (double v : log_next) z += std::exp(v - mx);
    for (std::size_t j = 0; j < m; ++j) {
        double expect = std::exp(log_next[j] - mx) / z;
        CHECK(rep.pi.weights[j] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("bounds bracket at every iteration and the gap shrinks") {
    auto g = build_bernoulli_grid(0.0, 1.0, 51, 0.25, 0.75);
    ab_config cfg;
    cfg.n = 20;
    cfg.mode = regret_mode::batch_conditional;
    cfg.eps_bits = 2e-5;
    auto rep = ab_misspecified(g, cfg);
    REQUIRE(rep.converged);
    REQUIRE(rep.history.size() >= 2);
    double min_gap = kInf;
    for (const auto& [lo, up] : rep.history) {
        CHECK(lo <= up + 1e-9);
        min_gap = std::min(min_gap, up - lo);
    }
    auto [l0, u0] = rep.history.front();
    auto [lf, uf] = rep.history.back();
    CHECK(uf - lf <= u0 - l0);
    CHECK(uf - lf == doctest::Approx(min_gap).epsilon(1e-9));
}

TEST_CASE("all-flagged misspecified run equals the capacity entry point") {
    auto g = build_bernoulli_grid(0.25, 0.75, 21, 0.25, 0.75);
    ab_config cfg;
    cfg.n = 8;
    cfg.mode = regret_mode::batch_conditional;
    auto a = ab_misspecified(g, cfg);
    auto b = capacity_batch(g, 8, cfg);
    CHECK(a.midpoint_bits() == b.midpoint_bits());
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("zero-probability symbols force the prior onto the sub-simplex") {
    auto g = build_simplex_grid(3, 8, 2);  // Theta: third symbol impossible
    ab_config cfg;
    cfg.n = 6;
    cfg.mode = regret_mode::batch_conditional;
    cfg.eps_bits = 1e-6;
    auto rep = ab_misspecified(g, cfg);
    double off_theta = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        if (!g.theta_flags[j]) off_theta += rep.pi.weights[j];
    CHECK(off_theta < 1e-12);
    CHECK(rep.lower_bits <= rep.upper_bits + 1e-9);
}

TEST_CASE("fully disjoint support is rejected") {
    // multinomial grid where no point is flagged: empty Theta
    auto g = build_simplex_grid(3, 3);
    for (auto& f : g.theta_flags) f = 0;
    ab_config cfg;
    cfg.n = 3;
    CHECK_THROWS(ab_misspecified(g, cfg));
}

TEST_CASE("coarse-grid misspecified batch run lands near the published coefficient") {
    auto g = build_bernoulli_grid(0.0, 1.0, 201, 0.25, 0.75);
    ab_config cfg;
    cfg.n = 100;
    cfg.mode = regret_mode::batch_conditional;
    cfg.eps_bits = 1e-5;
    auto rep = ab_misspecified(g, cfg);
    REQUIRE(rep.converged);
    CHECK(coeff_2n(rep.midpoint_bits(), 100) == doctest::Approx(0.8728).epsilon(0.035));
}

TEST_CASE("sandwich runs are ordered on a small configuration") {
    auto g = build_bernoulli_grid(0.0, 1.0, 101, 0.25, 0.75);
    ab_config cfg;
    cfg.eps_bits = 1e-5;
    cfg.mode = regret_mode::batch_conditional;
    auto res = verify_sandwich(g, 50, 0.1, cfg);
    CHECK(res.converged);
    CHECK(res.ordered);
    CHECK(res.theta_capacity_bits <= res.misspecified_bits + 1e-5);
    CHECK(res.misspecified_bits <= res.shell_capacity_bits + 1e-5);
    CHECK(res.shell_lo < 0.25);
    CHECK(res.shell_hi > 0.75);
    CHECK(res.shell_lo >= 0.0);
    CHECK(res.shell_hi <= 1.0);
}

TEST_CASE("sandwich on a fully flagged grid collapses to one value") {
    auto g = build_bernoulli_grid(0.25, 0.75, 51, 0.25, 0.75);
    ab_config cfg;
    cfg.eps_bits = 1e-5;
    cfg.mode = regret_mode::batch_conditional;
    auto res = verify_sandwich(g, 30, 0.1, cfg);
    CHECK(res.ordered);
    CHECK(res.theta_capacity_bits == doctest::Approx(res.misspecified_bits).epsilon(1e-5));
    CHECK(res.theta_capacity_bits == doctest::Approx(res.shell_capacity_bits).epsilon(1e-5));
}

TEST_CASE("combined bounds reduce to the batch quantities at l = 1") {
    auto g = build_bernoulli_grid(0.25, 0.75, 51, 0.25, 0.75);
    ab_config cfg;
    cfg.eps_bits = 1e-5;
    auto res = combined_bounds(g, 10, 1, cfg);
    auto cap = capacity_batch(g, 11, cfg);
    CHECK(res.upper_bits_per_step == doctest::Approx(cap.midpoint_bits()).epsilon(1e-9));
    CHECK(std::abs(res.lower_bits_per_step - cap.midpoint_bits()) < 3e-5);
    CHECK(res.lower_bits_per_step <= res.upper_bits_per_step + 1e-5);
}

TEST_CASE("a point-mass hypothesis class has zero capacity") {
    auto g = build_bernoulli_grid(0.2, 0.6, 3, 0.4, 0.4);
    ab_config cfg;
    cfg.eps_bits = 1e-9;
    auto rep = capacity_batch(g, 7, cfg);
    CHECK(rep.converged);
    CHECK(rep.midpoint_bits() == doctest::Approx(0.0).epsilon(1e-12));
    auto rep_on = capacity_online(g, 7, cfg);
    CHECK(rep_on.midpoint_bits() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("memoryless chains reproduce the Bernoulli capacity") {
    // the flagged sub-family of the chain lattice is exactly iid Ber(theta)
    auto gm = build_markov_grid(4);
    auto gb = build_bernoulli_grid(0.0, 1.0, 5, 0.0, 1.0);
    ab_config cfg;
    cfg.n = 4;
    cfg.mode = regret_mode::online_sequence;
    cfg.eps_bits = 1e-6;
    auto cm = capacity_online(gm, 4, cfg);
    auto cb = capacity_online(gb, 4, cfg);
    CHECK(std::abs(cm.midpoint_bits() - cb.midpoint_bits()) < 3e-6);

    // misspecified run over the full lattice converges and brackets
    ab_config cfg2;
    cfg2.n = 6;
    cfg2.mode = regret_mode::online_sequence;
    cfg2.eps_bits = 1e-4;
    auto rep = ab_misspecified(gm, cfg2);
    CHECK(rep.converged);
    for (const auto& [lo, up] : rep.history) CHECK(lo <= up + 1e-9);
    CHECK(rep.midpoint_bits() >= cm.midpoint_bits() - 1e-3);

    // batch mode has no conditional reduction for chains
    ab_config cfg3;
    cfg3.n = 6;
    cfg3.mode = regret_mode::batch_conditional;
    CHECK_THROWS_AS(ab_misspecified(gm, cfg3), std::invalid_argument);
}

TEST_CASE("epsilon shell of the chain lattice grows with eps around the flags") {
    auto gm = build_markov_grid(8);
    auto small = theta_epsilon_shell(gm, 0.005, 16);
    auto large = theta_epsilon_shell(gm, 0.2, 16);
    std::size_t small_count = 0, large_count = 0;
    for (std::size_t j = 0; j < gm.size(); ++j) {
        if (gm.theta_flags[j]) CHECK(small[j] == 1);  // flags always belong
        small_count += small[j];
        large_count += large[j];
        if (small[j]) CHECK(large[j] == 1);  // nested in eps
    }
    CHECK(small_count >= gm.theta_count());
    CHECK(large_count > small_count);
}

TEST_CASE("well-specified combined bounds nearly coincide") {
    auto g = build_bernoulli_grid(0.25, 0.75, 101, 0.25, 0.75);
    ab_config cfg;
    cfg.eps_bits = 1e-5;
    auto res = combined_bounds(g, 100, 5, cfg);
    CHECK(res.converged);
    CHECK(res.lower_bits_per_step <= res.upper_bits_per_step + 1e-9);
    CHECK(coeff_2n(res.upper_bits_per_step - res.lower_bits_per_step, 100) < 0.02);
}
