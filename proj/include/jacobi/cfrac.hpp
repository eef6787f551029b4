#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "jacobi/coeffseq.hpp"
#include "jacobi/spectra.hpp"

namespace jacobi::cfrac {

using Complex = std::complex<double>;

/// Value on the projective line: pole == true encodes the point at infinity
/// of an approximant (a resolvent singularity), which is data, not an error.
struct CFValue {
    Complex value{0.0, 0.0};
    bool pole = false;
};

/// N-th approximant of the continued fraction
///   K(lambda) = 1/(lambda-b_1) - a_1^2/(lambda-b_2) - a_2^2/(lambda-b_3) - ...
/// by the backward recurrence t_N = lambda-b_N, t_k = lambda-b_k - a_k^2/t_{k+1},
/// result 1/t_1. Interior zeros are handled projectively: a zero tail makes
/// the next level infinite, which in turn contributes nothing one level up.
inline CFValue approximant(const seq::CoefficientSpec& spec, long N, Complex lambda) {
    if (N < 1) throw std::invalid_argument("approximant needs N >= 1");
    bool infinite = false;
    Complex t = lambda - spec.b(N);
    for (long k = N - 1; k >= 1; --k) {
        const double ak = spec.a(k);
        if (infinite) {
            t = lambda - spec.b(k);  // a_k^2 / infinity = 0
            infinite = false;
        } else if (t == Complex{0.0, 0.0}) {
            infinite = true;  // division by zero: this level is the point at infinity
        } else {
            t = lambda - spec.b(k) - ak * ak / t;
        }
    }
    if (infinite) return {Complex{0.0, 0.0}, false};  // 1/infinity
    if (t == Complex{0.0, 0.0}) return {Complex{0.0, 0.0}, true};
    return {1.0 / t, false};
}

namespace detail {

inline CFValue resolvent_11_prefix(const std::vector<double>& diag, const std::vector<double>& offdiag,
                                   long N, Complex lambda) {
    // Solve (lambda I - J_N) y = e_1 by elimination from the first row down;
    // a deliberately different route from the approximant recurrence.
    std::vector<Complex> D(static_cast<std::size_t>(N));
    std::vector<Complex> r(static_cast<std::size_t>(N));
    double scale = std::abs(lambda);
    for (long i = 0; i < N; ++i) scale = std::max(scale, std::abs(diag[static_cast<std::size_t>(i)]));
    for (long i = 0; i + 1 < N; ++i) scale = std::max(scale, offdiag[static_cast<std::size_t>(i)]);
    scale = std::max(scale, 1.0);

    D[0] = lambda - diag[0];
    r[0] = 1.0;
    double min_pivot = std::abs(D[0]);
    for (long k = 1; k < N; ++k) {
        const double a = offdiag[static_cast<std::size_t>(k - 1)];
        if (D[static_cast<std::size_t>(k - 1)] == Complex{0.0, 0.0}) return {Complex{}, true};
        D[static_cast<std::size_t>(k)] =
            (lambda - diag[static_cast<std::size_t>(k)]) - a * a / D[static_cast<std::size_t>(k - 1)];
        r[static_cast<std::size_t>(k)] = a * r[static_cast<std::size_t>(k - 1)] / D[static_cast<std::size_t>(k - 1)];
        min_pivot = std::min(min_pivot, std::abs(D[static_cast<std::size_t>(k)]));
    }
    if (min_pivot < 1e-14 * scale) return {Complex{}, true};
    Complex y = r[static_cast<std::size_t>(N - 1)] / D[static_cast<std::size_t>(N - 1)];
    for (long k = N - 2; k >= 0; --k)
        y = (r[static_cast<std::size_t>(k)] + offdiag[static_cast<std::size_t>(k)] * y) / D[static_cast<std::size_t>(k)];
    return {y, false};
}

}  // namespace detail

/// First diagonal entry of (lambda - J_N)^{-1} by a tridiagonal solve.
/// Near-singular systems return a pole indicator instead of garbage.
inline CFValue resolvent_11(const spectra::Truncation& t, Complex lambda) {
    return detail::resolvent_11_prefix(t.diag, t.offdiag, t.size(), lambda);
}

/// Approximant trace at one lambda with convergence diagnostics.
struct CFEvaluation {
    Complex lambda{};
    std::vector<Complex> approximants;    // N = 1..N_max
    std::vector<double> resolvent_match;  // relative deviation per N; NaN at poles
    bool converged = false;
    std::optional<Complex> limit_estimate;
    std::optional<double> rate;  // fitted geometric rate of the tail deviations
    double tail_dev = std::numeric_limits<double>::infinity();
    bool pole_suspect = false;
};

/// Evaluates the approximant sequence on a grid of lambda values, flags
/// convergence when every successive deviation over the last quarter of the
/// sequence stays below tail_tol, and marks lambdas close to truncation
/// eigenvalues as pole suspects.
inline std::vector<CFEvaluation> convergence_scan(const seq::CoefficientSpec& spec,
                                                  const std::vector<Complex>& lambda_grid, long N_max,
                                                  double tail_tol, double eig_tol = 1e-12) {
    if (N_max < 2) throw std::invalid_argument("convergence scan needs N_max >= 2");
    if (!(tail_tol > 0.0)) throw std::invalid_argument("tail tolerance must be positive");

    std::vector<double> diag, offdiag;
    diag.reserve(static_cast<std::size_t>(N_max));
    for (long n = 1; n <= N_max; ++n) diag.push_back(spec.b(n));
    for (long n = 1; n < N_max; ++n) offdiag.push_back(spec.a(n));

    spectra::Truncation full;
    full.diag = diag;
    full.offdiag = offdiag;
    full.edge = spec.a(N_max);
    const auto evs = spectra::eigenvalues(full, eig_tol);
    double ev_scale = 1.0;
    for (double e : evs) ev_scale = std::max(ev_scale, std::abs(e));
    const double pole_tol = std::max(1e3 * eig_tol, 1e-10) * ev_scale;

    std::vector<CFEvaluation> out;
    out.reserve(lambda_grid.size());
    for (const Complex lambda : lambda_grid) {
        CFEvaluation ev;
        ev.lambda = lambda;
        ev.approximants.reserve(static_cast<std::size_t>(N_max));
        ev.resolvent_match.reserve(static_cast<std::size_t>(N_max));
        for (long N = 1; N <= N_max; ++N) {
            const CFValue ap = approximant(spec, N, lambda);
            ev.approximants.push_back(ap.pole ? Complex{std::numeric_limits<double>::infinity(), 0.0}
                                              : ap.value);
            const CFValue rv = detail::resolvent_11_prefix(diag, offdiag, N, lambda);
            if (ap.pole || rv.pole) {
                ev.resolvent_match.push_back(std::numeric_limits<double>::quiet_NaN());
            } else {
                ev.resolvent_match.push_back(std::abs(ap.value - rv.value) /
                                             std::max(1e-300, std::abs(rv.value)));
            }
        }
        const long tail_start = std::max<long>(1, N_max - N_max / 4);
        std::vector<double> devs;
        double tail_max = 0.0;
        for (long N = tail_start; N < N_max; ++N) {
            const double d = std::abs(ev.approximants[static_cast<std::size_t>(N)] -
                                      ev.approximants[static_cast<std::size_t>(N - 1)]) /
                             (1.0 + std::abs(ev.approximants[static_cast<std::size_t>(N)]));
            devs.push_back(d);
            tail_max = std::max(tail_max, d);
        }
        ev.tail_dev = tail_max;
        ev.converged = std::isfinite(tail_max) && tail_max < tail_tol;
        if (ev.converged) ev.limit_estimate = ev.approximants.back();

        // geometric-rate fit: log dev ~ log C + N log rho over the tail
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < devs.size(); ++i) {
            if (devs[i] > 0.0 && std::isfinite(devs[i])) {
                xs.push_back(static_cast<double>(tail_start + static_cast<long>(i)));
                ys.push_back(std::log(devs[i]));
            }
        }
        if (xs.size() >= 4) {
            double mx = 0, my = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                mx += xs[i];
                my += ys[i];
            }
            mx /= static_cast<double>(xs.size());
            my /= static_cast<double>(xs.size());
            double sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                sxx += (xs[i] - mx) * (xs[i] - mx);
                sxy += (xs[i] - mx) * (ys[i] - my);
            }
            if (sxx > 0) {
                const double slope = sxy / sxx;
                double resid = 0;
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    const double e = ys[i] - my - slope * (xs[i] - mx);
                    resid += e * e;
                }
                resid = std::sqrt(resid / static_cast<double>(xs.size()));
                if (resid < 0.5 && slope < 0.0) ev.rate = std::exp(slope);
            }
        }

        if (std::abs(lambda.imag()) < pole_tol) {
            for (double e : evs) {
                if (std::abs(lambda.real() - e) < pole_tol) {
                    ev.pole_suspect = true;
                    break;
                }
            }
        }
        out.push_back(std::move(ev));
    }
    return out;
}

}  // namespace jacobi::cfrac
