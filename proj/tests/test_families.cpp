#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "regretlab/families.hpp"

using namespace regretlab;

namespace {

// every binary string of length n, as bit vectors
std::vector<std::vector<int>> all_binary_strings(int n) {
    std::vector<std::vector<int>> out;
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<int> s(n);
        for (int i = 0; i < n; ++i) s[i] = (mask >> i) & 1;
        out.push_back(s);
    }
    return out;
}

double string_log_prob_bernoulli(const std::vector<int>& s, double th) {
    double lp = 0.0;
    for (int y : s) lp += y ? mul_log(1, std::log(th)) : mul_log(1, std::log1p(-th));
    return lp;
}

double string_log_prob_markov(const std::vector<int>& s, double p01, double p10) {
    double pi1 = p01 / (p01 + p10);
    double lp = std::log(s[0] == 1 ? pi1 : 1.0 - pi1);
    for (std::size_t t = 1; t < s.size(); ++t) {
        int a = s[t - 1], b = s[t];
        double p = a == 0 ? (b == 1 ? p01 : 1.0 - p01) : (b == 0 ? p10 : 1.0 - p10);
        lp += std::log(p);
    }
    return lp;
}

}  // namespace

TEST_CASE("uniform bernoulli grid with all points flagged") {
    auto g = build_bernoulli_grid(0.0, 1.0, 5, 0.0, 1.0);
    REQUIRE(g.size() == 5);
    std::vector<double> expect = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(g.scalar(j) == doctest::Approx(expect[j]).epsilon(1e-15));
        CHECK(g.theta_flags[j] == 1);
    }
}

TEST_CASE("401-point grid flags exactly the [0.25, 0.75] block") {
    auto g = build_bernoulli_grid(0.0, 1.0, 401, 0.25, 0.75);
    REQUIRE(g.size() == 401);
    // oracle: count by direct enumeration of grid values
    std::size_t flagged = 0;
    for (std::size_t j = 0; j < g.size(); ++j)
        if (g.scalar(j) >= 0.25 && g.scalar(j) <= 0.75) ++flagged;
    CHECK(g.theta_count() == flagged);
    CHECK(g.theta_count() == 201);
    // anchors must be exact grid points
    CHECK(std::any_of(g.points.begin(), g.points.end(),
                      [](const auto& p) { return p[0] == 0.25; }));
    CHECK(std::any_of(g.points.begin(), g.points.end(),
                      [](const auto& p) { return p[0] == 0.75; }));
}

TEST_CASE("degenerate-interval grid and ordering violations are rejected") {
    auto g = build_bernoulli_grid(0.25, 0.75, 3, 0.25, 0.75);
    REQUIRE(g.size() == 3);
    CHECK(g.scalar(0) == 0.25);
    CHECK(g.scalar(1) == doctest::Approx(0.5));
    CHECK(g.scalar(2) == 0.75);
    CHECK(g.theta_count() == 3);

    CHECK_THROWS_AS(build_bernoulli_grid(0.5, 0.4, 5, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(build_bernoulli_grid(0.0, 1.0, 1, 0.0, 1.0), std::invalid_argument);
    // four distinct anchors cannot fit in three points
    CHECK_THROWS_AS(build_bernoulli_grid(0.0, 1.0, 3, 0.3, 0.6), std::invalid_argument);
}

TEST_CASE("off-lattice anchors are snapped onto the grid") {
    auto g = build_bernoulli_grid(0.2226, 0.7774, 557, 0.2226, 0.7774);
    CHECK(g.scalar(0) == 0.2226);
    CHECK(g.scalar(g.size() - 1) == 0.7774);
    CHECK(g.size() == 557);
    for (std::size_t j = 1; j < g.size(); ++j) CHECK(g.scalar(j) > g.scalar(j - 1));
}

TEST_CASE("bernoulli type classes: counts and multiplicities") {
    auto cl1 = type_classes(family_kind::bernoulli, 2, 1);
    REQUIRE(cl1->size() == 2);
    CHECK((*cl1)[0].log_multiplicity == doctest::Approx(0.0));
    CHECK((*cl1)[1].log_multiplicity == doctest::Approx(0.0));

    auto cl5 = type_classes(family_kind::bernoulli, 2, 5);
    REQUIRE(cl5->size() == 6);
    // oracle: enumerate all 32 strings and bucket by ones-count
    std::map<int, int> counts;
    for (const auto& s : all_binary_strings(5)) {
        int k = 0;
        for (int y : s) k += y;
        counts[k]++;
    }
    for (const auto& c : *cl5)
        CHECK(std::exp(c.log_multiplicity) == doctest::Approx(counts[c.stat[0]]).epsilon(1e-12));
    CHECK(std::exp((*cl5)[2].log_multiplicity) == doctest::Approx(10.0));
}

TEST_CASE("markov type classes match brute-force grouping at n = 3") {
    auto cl = type_classes(family_kind::markov1_binary, 2, 3);
    // oracle: group all 8 strings by (y1, n01, n10, n11)
    std::map<std::vector<int>, int> groups;
    for (const auto& s : all_binary_strings(3)) {
        int n01 = 0, n10 = 0, n11 = 0;
        for (int t = 1; t < 3; ++t) {
            if (s[t - 1] == 0 && s[t] == 1) n01++;
            if (s[t - 1] == 1 && s[t] == 0) n10++;
            if (s[t - 1] == 1 && s[t] == 1) n11++;
        }
        groups[{s[0], n01, n10, n11}]++;
    }
    REQUIRE(cl->size() == groups.size());
    double total = 0.0;
    for (const auto& c : *cl) {
        REQUIRE(groups.count(c.stat));
        CHECK(std::exp(c.log_multiplicity) == doctest::Approx(groups[c.stat]).epsilon(1e-12));
        total += std::exp(c.log_multiplicity);
    }
    CHECK(total == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("type class multiplicities cover the whole cube for n <= 12") {
    for (int n : {1, 4, 8, 12}) {
        auto cl = type_classes(family_kind::bernoulli, 2, n);
        double total = 0.0;
        for (const auto& c : *cl) total += std::exp(c.log_multiplicity);
        CHECK(total == doctest::Approx(std::pow(2.0, n)).epsilon(1e-10));
    }
    for (int n : {2, 5, 9}) {
        auto cl = type_classes(family_kind::markov1_binary, 2, n);
        double total = 0.0;
        for (const auto& c : *cl) total += std::exp(c.log_multiplicity);
        CHECK(total == doctest::Approx(std::pow(2.0, n)).epsilon(1e-10));
    }
    auto cl3 = type_classes(family_kind::multinomial, 3, 5);
    double total = 0.0;
    for (const auto& c : *cl3) total += std::exp(c.log_multiplicity);
    CHECK(total == doctest::Approx(std::pow(3.0, 5)).epsilon(1e-10));
}

TEST_CASE("sequence law: fair coin, degenerate endpoint, normalization") {
    auto cl4 = type_classes(family_kind::bernoulli, 2, 4);
    auto law = make_sequence_law(family_kind::bernoulli, 2, {0.5}, cl4, 4);
    for (double lp : law.class_log_prob)
        CHECK(lp == doctest::Approx(4.0 * std::log(0.5)).epsilon(1e-14));

    auto cl3 = type_classes(family_kind::bernoulli, 2, 3);
    auto degenerate = make_sequence_law(family_kind::bernoulli, 2, {0.0}, cl3, 3);
    CHECK(degenerate.class_log_prob[0] == 0.0);
    for (std::size_t c = 1; c < degenerate.class_log_prob.size(); ++c)
        CHECK(degenerate.class_log_prob[c] == -std::numeric_limits<double>::infinity());

    auto cl6 = type_classes(family_kind::bernoulli, 2, 6);
    auto law3 = make_sequence_law(family_kind::bernoulli, 2, {0.3}, cl6, 6);
    double total = 0.0;
    for (std::size_t c = 0; c < cl6->size(); ++c)
        total += std::exp((*cl6)[c].log_multiplicity + law3.class_log_prob[c]);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sequence laws equal brute-force enumeration for n <= 12") {
    // total-variation distance between class-based and string-based laws
    for (double th : {0.0, 0.3, 0.5, 1.0}) {
        int n = 7;
        auto cl = type_classes(family_kind::bernoulli, 2, n);
        auto law = make_sequence_law(family_kind::bernoulli, 2, {th}, cl, n);
        std::map<int, double> by_class;
        for (const auto& s : all_binary_strings(n)) {
            int k = 0;
            for (int y : s) k += y;
            by_class[k] += std::exp(string_log_prob_bernoulli(s, th));
        }
        double tv = 0.0;
        for (std::size_t c = 0; c < cl->size(); ++c) {
            double mass = std::exp((*cl)[c].log_multiplicity + law.class_log_prob[c]);
            tv += std::abs(mass - by_class[(*cl)[c].stat[0]]);
        }
        CHECK(tv < 1e-10);
    }
    {
        int n = 6;
        double p01 = 0.3, p10 = 0.1;
        auto cl = type_classes(family_kind::markov1_binary, 2, n);
        auto law = make_sequence_law(family_kind::markov1_binary, 2, {p01, p10}, cl, n);
        std::map<std::vector<int>, double> by_class;
        for (const auto& s : all_binary_strings(n)) {
            int n01 = 0, n10 = 0, n11 = 0;
            for (int t = 1; t < n; ++t) {
                if (s[t - 1] == 0 && s[t] == 1) n01++;
                if (s[t - 1] == 1 && s[t] == 0) n10++;
                if (s[t - 1] == 1 && s[t] == 1) n11++;
            }
            by_class[{s[0], n01, n10, n11}] += std::exp(string_log_prob_markov(s, p01, p10));
        }
        double tv = 0.0, total = 0.0;
        for (std::size_t c = 0; c < cl->size(); ++c) {
            double mass = std::exp((*cl)[c].log_multiplicity + law.class_log_prob[c]);
            tv += std::abs(mass - by_class[(*cl)[c].stat]);
            total += mass;
        }
        CHECK(tv < 1e-10);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("markov stationary initialization matches the transition eigenvector") {
    double p01 = 0.3, p10 = 0.1;
    double pi1 = markov_stationary_one(p01, p10);
    // stationary vector of [[1-p01, p01], [p10, 1-p10]]
    CHECK(pi1 * p10 == doctest::Approx((1.0 - pi1) * p01).epsilon(1e-12));
    CHECK(pi1 == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS(markov_stationary_one(0.0, 0.0), std::invalid_argument);

    int n = 1;
    auto cl = type_classes(family_kind::markov1_binary, 2, n);
    auto law = make_sequence_law(family_kind::markov1_binary, 2, {p01, p10}, cl, n);
    for (std::size_t c = 0; c < cl->size(); ++c) {
        double expect = (*cl)[c].stat[0] == 1 ? pi1 : 1.0 - pi1;
        CHECK(std::exp(law.class_log_prob[c]) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("predictive weight: point prior, degenerate support, exact 3-point sum") {
    auto g1 = build_bernoulli_grid(0.6, 0.8, 3, 0.6, 0.8);
    auto pi1 = point_prior(g1, 1);  // all mass on theta = 0.7
    for (int k = 0; k < 5; ++k)
        CHECK(conditional_predictive_weight(pi1, g1, k, 6) == doctest::Approx(0.7).epsilon(1e-14));

    // all-ones history forces the theta = 1 component
    auto g2 = build_bernoulli_grid(0.0, 1.0, 2, 0.0, 1.0);
    auto pi2 = uniform_prior(g2);
    CHECK(conditional_predictive_weight(pi2, g2, 3, 4) == doctest::Approx(1.0).epsilon(1e-14));
    // a mixed history has zero mass under both endpoint parameters
    CHECK_THROWS_AS(conditional_predictive_weight(pi2, g2, 2, 4), std::domain_error);

    // hand-evaluable rational oracle: uniform over {1/4, 1/2, 3/4}, k = 0, n = 2
    auto g3 = build_bernoulli_grid(0.25, 0.75, 3, 0.25, 0.75);
    auto pi3 = uniform_prior(g3);
    double num = (0.25 * 0.75 + 0.5 * 0.5 + 0.75 * 0.25) / 3.0;
    double den = (0.75 + 0.5 + 0.25) / 3.0;
    CHECK(conditional_predictive_weight(pi3, g3, 0, 2) ==
          doctest::Approx(num / den).epsilon(1e-14));
    CHECK(num / den == doctest::Approx(5.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("predictive weights are monotone in the ones-count for random priors") {
    std::mt19937_64 rng(7);
    auto g = build_bernoulli_grid(0.0, 1.0, 41, 0.2, 0.8);
    for (int rep = 0; rep < 25; ++rep) {
        prior pi;
        pi.grid = &g;
        pi.weights.resize(g.size());
        double z = 0.0;
        for (auto& w : pi.weights) {
            w = -std::log(std::uniform_real_distribution<>(1e-12, 1.0)(rng));
            z += w;
        }
        for (auto& w : pi.weights) w /= z;
        int n = 1 + static_cast<int>(rng() % 30);
        double prev = -1.0;
        for (int k = 0; k <= n - 1; ++k) {
            double q = conditional_predictive_weight(pi, g, k, n);
            CHECK(q >= 0.0);
            CHECK(q <= 1.0);
            CHECK(q >= prev - 1e-12);
            prev = q;
        }
    }
}

TEST_CASE("simplex and markov grids") {
    auto g = build_simplex_grid(3, 4);
    // compositions of 4 into 3 parts
    CHECK(g.size() == 15);
    CHECK(g.theta_count() == 15);
    for (const auto& p : g.points) {
        double s = 0.0;
        for (double v : p) s += v;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    auto sub = build_simplex_grid(3, 4, 2);
    CHECK(sub.size() == 15);
    CHECK(sub.theta_count() == 5);  // points with zero mass on the third symbol

    auto mk = build_markov_grid(4);
    CHECK(mk.size() == 24);  // 25 lattice points minus the (0,0) corner
    for (auto j : mk.theta_indices())
        CHECK(mk.points[j][0] + mk.points[j][1] == doctest::Approx(1.0));
    CHECK(mk.theta_count() == 5);
}
