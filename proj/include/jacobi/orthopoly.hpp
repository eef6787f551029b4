#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "jacobi/coeffseq.hpp"
#include "jacobi/spectra.hpp"

namespace jacobi::orthopoly {

using Complex = std::complex<double>;

/// Values p_1(x)..p_n(x) of the orthonormal polynomial recurrence at a fixed
/// point, stored against a shared rescaling exponent: the true value of entry
/// k is values[k] * exp(scale_log). Entries far below the running scale may
/// flush to zero; consumers combine entries of comparable magnitude only.
struct PolySequence {
    std::vector<Complex> values;
    double scale_log = 0.0;

    Complex scaled(long n) const { return values[static_cast<std::size_t>(n - 1)]; }
};

/// Forward three-term recurrence a_n p_{n+1} = (x - b_n) p_n - a_{n-1} p_{n-1}
/// with p_0 = 0, p_1 = 1, rescaled against overflow.
inline PolySequence eval_poly(const seq::CoefficientSpec& spec, long n_max, Complex x) {
    if (n_max < 1) throw std::invalid_argument("eval_poly needs n_max >= 1");
    PolySequence seqv;
    seqv.values.resize(static_cast<std::size_t>(n_max));
    seqv.values[0] = 1.0;
    Complex prev{0.0, 0.0};  // p_0
    double a_prev = 0.0;     // a_0
    for (long n = 1; n < n_max; ++n) {
        const double an = spec.a(n);
        Complex next = ((x - spec.b(n)) * seqv.values[static_cast<std::size_t>(n - 1)] - a_prev * prev) / an;
        prev = seqv.values[static_cast<std::size_t>(n - 1)];
        seqv.values[static_cast<std::size_t>(n)] = next;
        a_prev = an;
        const double mag = std::abs(next);
        if (mag > 1e140) {
            for (long i = 0; i <= n; ++i) seqv.values[static_cast<std::size_t>(i)] /= mag;
            prev /= mag;
            seqv.scale_log += std::log(mag);
        }
    }
    return seqv;
}

/// Christoffel-Darboux identity specialized at x = i, y = -i:
/// sum_{k<=n} |v_k|^2 = a_n Im(v_{n+1} conj(v_n)), v_k = p_k(i).
/// Both sides are evaluated in a common running scale.
struct CDCheck {
    double lhs = 0.0;  // scaled partial sum
    double rhs = 0.0;  // scaled boundary term
    bool ok = false;
};

inline CDCheck cd_check(const seq::CoefficientSpec& spec, long n) {
    if (n < 1) throw std::invalid_argument("cd_check needs n >= 1");
    const Complex I{0.0, 1.0};
    Complex vk{1.0, 0.0};  // v_k, scaled
    Complex vkm1{0.0, 0.0};
    double a_prev = 0.0;
    double sum = 0.0;  // sum of scaled |v_j|^2
    for (long k = 1; k <= n; ++k) {
        sum += std::norm(vk);
        const double ak = spec.a(k);
        Complex vnext = ((I - spec.b(k)) * vk - a_prev * vkm1) / ak;
        vkm1 = vk;
        vk = vnext;
        a_prev = ak;
        const double mag = std::abs(vk);
        if (mag > 1e140) {
            vk /= mag;
            vkm1 /= mag;
            sum /= mag * mag;
        }
        if (k == n) {
            CDCheck out;
            out.lhs = sum;
            out.rhs = ak * std::imag(vk * std::conj(vkm1));
            const double ref = std::max({std::abs(out.lhs), std::abs(out.rhs),
                                         std::numeric_limits<double>::min()});
            out.ok = std::abs(out.lhs - out.rhs) <= 1e-9 * ref;
            return out;
        }
    }
    return {};
}

/// The inequality 1 <= a_n |v_n| |v_{n+1}| that the identity above forces.
inline bool cd0_check(const seq::CoefficientSpec& spec, long n) {
    if (n < 1) throw std::invalid_argument("cd0_check needs n >= 1");
    const Complex I{0.0, 1.0};
    Complex vk{1.0, 0.0};
    Complex vkm1{0.0, 0.0};
    double a_prev = 0.0;
    double scale_log = 0.0;
    for (long k = 1; k <= n; ++k) {
        const double ak = spec.a(k);
        Complex vnext = ((I - spec.b(k)) * vk - a_prev * vkm1) / ak;
        vkm1 = vk;
        vk = vnext;
        a_prev = ak;
        const double mag = std::abs(vk);
        if (mag > 1e140) {
            vk /= mag;
            vkm1 /= mag;
            scale_log += std::log(mag);
        }
        if (k == n) {
            // log(a_n |v_n| |v_{n+1}|) in true scale
            const double lhs = std::log(ak) + std::log(std::abs(vkm1)) + std::log(std::abs(vk)) + 2.0 * scale_log;
            return lhs >= std::log1p(-1e-9);  // 1e-9 slack
        }
    }
    return false;
}

/// Partial sums S_n = sum_{k<=n} |v_k|^2, n = 1..n_max. Sums saturate at
/// +infinity gracefully once |v_k| leaves double range; log10 of the partial
/// sums is returned alongside so trends stay visible in that regime.
struct SumSq {
    std::vector<double> partial;        // S_n, monotone nondecreasing, S_1 = 1
    std::vector<double> value_sq;       // |v_n|^2 (may be inf)
    std::vector<double> log10_partial;  // log10 S_n, always finite
};

inline SumSq sumsq_vi(const seq::CoefficientSpec& spec, long n_max) {
    if (n_max < 1) throw std::invalid_argument("sumsq_vi needs n_max >= 1");
    const Complex I{0.0, 1.0};
    SumSq out;
    out.partial.reserve(static_cast<std::size_t>(n_max));
    out.value_sq.reserve(static_cast<std::size_t>(n_max));
    out.log10_partial.reserve(static_cast<std::size_t>(n_max));
    Complex vk{1.0, 0.0};
    Complex vkm1{0.0, 0.0};
    double a_prev = 0.0;
    double scale_log = 0.0;  // true v = stored * exp(scale_log)
    double sum_scaled = 0.0;
    for (long k = 1; k <= n_max; ++k) {
        sum_scaled += std::norm(vk);
        const double log_sum = std::log(sum_scaled) + 2.0 * scale_log;
        // clamp against sub-ulp wobble of the exp/log representation across rescales
        const double prev = out.partial.empty() ? 0.0 : out.partial.back();
        out.partial.push_back(std::max(prev, std::exp(log_sum)));
        out.value_sq.push_back(std::exp(std::log(std::norm(vk)) + 2.0 * scale_log));
        out.log10_partial.push_back(log_sum / std::log(10.0));
        if (k == n_max) break;
        const double ak = spec.a(k);
        Complex vnext = ((I - spec.b(k)) * vk - a_prev * vkm1) / ak;
        vkm1 = vk;
        vk = vnext;
        a_prev = ak;
        const double mag = std::abs(vk);
        if (mag > 1e140) {
            vk /= mag;
            vkm1 /= mag;
            sum_scaled /= mag * mag;
            scale_log += std::log(mag);
        }
    }
    return out;
}

/// Zeros of p_{N+1}, which are exactly the truncation eigenvalues; routed
/// through the Sturm eigensolver.
inline std::vector<double> zeros_p(const seq::CoefficientSpec& spec, long N, double tol) {
    return spectra::eigenvalues(spectra::truncate(spec, N), tol);
}

/// Real-axis evaluation of p_{N+1}(x) in sign/log form (test and cross-check
/// helper; avoids overflow for large N).
inline std::pair<int, double> p_next_signlog(const seq::CoefficientSpec& spec, long N, double x) {
    double pk = 1.0, pkm1 = 0.0, a_prev = 0.0, scale_log = 0.0;
    for (long n = 1; n <= N; ++n) {
        const double an = spec.a(n);
        const double pnext = ((x - spec.b(n)) * pk - a_prev * pkm1) / an;
        pkm1 = pk;
        pk = pnext;
        a_prev = an;
        const double mag = std::abs(pk);
        if (mag > 1e140 || (mag > 0.0 && mag < 1e-140)) {
            pk /= mag;
            pkm1 /= mag;
            scale_log += std::log(mag);
        }
    }
    if (pk == 0.0) return {0, -std::numeric_limits<double>::infinity()};
    return {pk > 0.0 ? 1 : -1, std::log(std::abs(pk)) + scale_log};
}

}  // namespace jacobi::orthopoly
