#include "regretlab/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace regretlab {

namespace {
constexpr double kLog2E = 1.4426950408889634074;
constexpr double kPi = std::numbers::pi;

// lower-triangular Cholesky factor; throws if the matrix is not SPD
std::vector<double> cholesky(const sym_matrix& m) {
    const int d = m.d;
    std::vector<double> l(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m.at(i, j);
            for (int k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
            if (i == j) {
                if (s <= 0.0) throw std::domain_error("matrix is not positive definite");
                l[i * d + j] = std::sqrt(s);
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    return l;
}

}  // namespace

sym_matrix sym_matrix::identity(int d) {
    sym_matrix m;
    m.d = d;
    m.a.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
}

sym_matrix sym_matrix::diagonal(const std::vector<double>& diag) {
    sym_matrix m;
    m.d = static_cast<int>(diag.size());
    m.a.assign(static_cast<std::size_t>(m.d) * m.d, 0.0);
    for (int i = 0; i < m.d; ++i) m.at(i, i) = diag[i];
    return m;
}

double det_spd(const sym_matrix& m) {
    auto l = cholesky(m);
    double det = 1.0;
    for (int i = 0; i < m.d; ++i) det *= l[static_cast<std::size_t>(i) * m.d + i];
    return det * det;
}

sym_matrix inverse_spd(const sym_matrix& m) {
    const int d = m.d;
    auto l = cholesky(m);
    // invert L by forward substitution, then assemble L^{-T} L^{-1}
    std::vector<double> linv(static_cast<std::size_t>(d) * d, 0.0);
    for (int c = 0; c < d; ++c) {
        linv[c * d + c] = 1.0 / l[c * d + c];
        for (int i = c + 1; i < d; ++i) {
            double s = 0.0;
            for (int k = c; k < i; ++k) s += l[i * d + k] * linv[k * d + c];
            linv[i * d + c] = -s / l[i * d + i];
        }
    }
    sym_matrix inv;
    inv.d = d;
    inv.a.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = std::max(i, j); k < d; ++k) s += linv[k * d + i] * linv[k * d + j];
            inv.at(i, j) = s;
        }
    return inv;
}

double trace_product(const sym_matrix& x, const sym_matrix& y) {
    if (x.d != y.d) throw std::invalid_argument("trace_product: dimension mismatch");
    double t = 0.0;
    for (int i = 0; i < x.d; ++i)
        for (int k = 0; k < x.d; ++k) t += x.at(i, k) * y.at(k, i);
    return t;
}

double gamma_bernoulli(long n, double a, double b) {
    if (!(0.0 <= a && a < b && b <= 1.0))
        throw std::invalid_argument("gamma_bernoulli: need 0 <= a < b <= 1");
    double span = std::asin(2.0 * b - 1.0) - std::asin(2.0 * a - 1.0);
    return 0.5 * std::log2(n / (2.0 * kPi)) + std::log2(span);
}

double smooth_parametric_online(const smooth_model_spec& spec, long n) {
    if (spec.candidates.empty())
        throw std::invalid_argument("smooth_parametric_online: no candidates");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : spec.candidates) {
        double det_j = det_spd(c.hessian);
        double det_i = det_spd(c.fisher);
        double tr = trace_product(c.score_var, inverse_spd(c.hessian));
        double v = std::log2(det_j / det_i) - tr * kLog2E;
        best = std::max(best, v);
    }
    return 0.5 * spec.d * std::log2(n / (2.0 * kPi)) +
           std::log2(spec.jeffreys_integral) + 0.5 * best;
}

double exponential_family_online(const expfam_spec& spec, long n) {
    if (spec.candidates.empty())
        throw std::invalid_argument("exponential_family_online: no candidates");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : spec.candidates) {
        double tr = trace_product(c.cov_t, inverse_spd(c.psi_hessian));
        best = std::min(best, tr);
    }
    return 0.5 * spec.d * std::log2(n / (2.0 * kPi)) +
           std::log2(spec.jeffreys_integral) - 0.5 * kLog2E * best;
}

double constrained_batch_smooth(int d, const std::vector<godambe_candidate>& candidates,
                                long n) {
    if (candidates.empty())
        throw std::invalid_argument("constrained_batch_smooth: no candidates");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        double tr = trace_product(inverse_spd(c.godambe), c.log_ratio_hessian);
        best = std::max(best, tr);
    }
    double nn = static_cast<double>(n);
    return 0.5 * d * std::log2(1.0 + 1.0 / nn) + best * kLog2E / (4.0 * nn * nn);
}

glm_result glm_online(const glm_spec& spec, long n) {
    if (spec.volume <= 0.0) throw std::invalid_argument("glm_online: volume > 0");
    sym_matrix sigma_inv = inverse_spd(spec.sigma);
    double base = 0.5 * spec.d * std::log2(n / (2.0 * kPi)) +
                  std::log2(spec.volume / std::sqrt(det_spd(spec.sigma)));
    double min_tr = std::numeric_limits<double>::infinity();
    for (const auto& sp : spec.sigma_phi)
        min_tr = std::min(min_tr, trace_product(sp, sigma_inv));
    if (spec.sigma_phi.empty()) min_tr = 0.0;
    glm_result r;
    r.regret_bits = base - 0.5 * kLog2E * min_tr;
    r.individual_bits = base;                           // Sigma_phi = 0
    r.capacity_bits = base - 0.5 * kLog2E * spec.d;     // Sigma_phi = Sigma
    return r;
}

markov_series_result markov_constrained_series(double phi01, double phi10,
                                               long t_max, double tol) {
    if (!(phi01 >= 0.0 && phi01 <= 1.0 && phi10 >= 0.0 && phi10 <= 1.0))
        throw std::invalid_argument("markov series: transition probabilities in [0,1]");
    markov_series_result res;
    // t-step return probabilities, advanced one step at a time
    double r00 = 1.0, r11 = 1.0;  // Pr{Y_{t+1} = u | Y_1 = u} at t = 0
    double sum = 0.0;
    for (long t = 1; t <= t_max; ++t) {
        double n00 = r00 * (1.0 - phi01) + (1.0 - r00) * phi10;
        double n11 = r11 * (1.0 - phi10) + (1.0 - r11) * phi01;
        r00 = n00;
        r11 = n11;
        double a_t = 0.5 * (1.0 - r11 - r00) * kLog2E;
        sum += a_t;
        res.partial_sums_bits.push_back(sum);
        if (std::abs(a_t) < tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

double markov_order0_capacity(long n) {
    if (n < 2) throw std::invalid_argument("markov_order0_capacity: n >= 2");
    return 0.5 * std::log2(n / (2.0 * kPi * std::numbers::e)) + std::log2(kPi);
}

combined_asymptotic_result combined_asymptotic(int d_prime, long n, long l) {
    if (n < 1 || l < 1) throw std::invalid_argument("combined_asymptotic: n, l >= 1");
    combined_asymptotic_result r;
    double dd = d_prime;
    r.bits_per_step = dd / (2.0 * l) * std::log2(1.0 + static_cast<double>(l) / n);
    r.online_regime_bits = dd / (2.0 * l) * std::log2(static_cast<double>(l));
    r.batch_regime_bits = dd / (2.0 * n) * kLog2E;
    return r;
}

}  // namespace regretlab
