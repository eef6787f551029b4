#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jacobi/coeffseq.hpp"
#include "jacobi/multiindex.hpp"

namespace jacobi::spectra {

/// N x N leading principal submatrix of the operator, plus the first
/// coefficient outside it (a_N), which the residual identity needs.
struct Truncation {
    std::vector<double> diag;     // b_1 .. b_N
    std::vector<double> offdiag;  // a_1 .. a_{N-1}, strictly positive
    double edge = 1.0;            // a_N

    long size() const { return static_cast<long>(diag.size()); }

    void validate() const {
        if (diag.empty()) throw std::invalid_argument("truncation needs N >= 1");
        if (offdiag.size() + 1 != diag.size())
            throw std::invalid_argument("off-diagonal length must be N-1");
        for (double a : offdiag)
            if (!(a > 0.0) || !std::isfinite(a))
                throw std::invalid_argument("off-diagonal entries must be positive and finite");
        if (!(edge > 0.0) || !std::isfinite(edge))
            throw std::invalid_argument("edge coefficient a_N must be positive and finite");
        for (double b : diag)
            if (!std::isfinite(b)) throw std::invalid_argument("diagonal entries must be finite");
    }
};

inline Truncation truncate(const seq::CoefficientSpec& spec, long N) {
    if (N < 1) throw std::invalid_argument("truncation order must be >= 1");
    Truncation t;
    t.diag.reserve(static_cast<std::size_t>(N));
    for (long n = 1; n <= N; ++n) t.diag.push_back(spec.b(n));
    for (long n = 1; n < N; ++n) t.offdiag.push_back(spec.a(n));
    t.edge = spec.a(N);
    t.validate();
    return t;
}

namespace detail {

inline double pivmin_of(const Truncation& t) {
    double m = 1.0;
    for (double a : t.offdiag) m = std::max(m, a * a);
    return std::numeric_limits<double>::min() * m;
}

inline double scale_of(const Truncation& t) {
    double s = 0.0;
    for (double b : t.diag) s = std::max(s, std::abs(b));
    for (double a : t.offdiag) s = std::max(s, a);
    return std::max(s, 1.0);
}

inline double logsumexp(double x, double y) {
    if (x == -std::numeric_limits<double>::infinity()) return y;
    if (y == -std::numeric_limits<double>::infinity()) return x;
    const double hi = std::max(x, y), lo = std::min(x, y);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace detail

/// Sturm count: number of eigenvalues of the truncation strictly below x,
/// from the signs of the shifted LDL^T pivots.
inline long count_below(const Truncation& t, double x) {
    const long N = t.size();
    const double pivmin = detail::pivmin_of(t);
    long cnt = 0;
    double d = 1.0;
    for (long i = 0; i < N; ++i) {
        const double e2 = i ? t.offdiag[static_cast<std::size_t>(i - 1)] * t.offdiag[static_cast<std::size_t>(i - 1)] : 0.0;
        d = (t.diag[static_cast<std::size_t>(i)] - x) - e2 / d;
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0.0) ++cnt;
    }
    return cnt;
}

/// Gershgorin enclosure of the spectrum of the truncation.
inline std::pair<double, double> gershgorin(const Truncation& t) {
    const long N = t.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (long i = 0; i < N; ++i) {
        double r = 0.0;
        if (i > 0) r += t.offdiag[static_cast<std::size_t>(i - 1)];
        if (i + 1 < N) r += t.offdiag[static_cast<std::size_t>(i)];
        lo = std::min(lo, t.diag[static_cast<std::size_t>(i)] - r);
        hi = std::max(hi, t.diag[static_cast<std::size_t>(i)] + r);
    }
    const double pad = 1e-8 + 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
    return {lo - pad, hi + pad};
}

namespace detail {

// k-th eigenvalue (1-based) inside [lo, hi] assuming count(lo) < k <= count(hi).
inline double bisect_kth(const Truncation& t, long k, double lo, double hi, double tol) {
    while (true) {
        const double width = hi - lo;
        const double limit = std::max(tol, 2.0 * std::numeric_limits<double>::epsilon() *
                                               std::max(std::abs(lo), std::abs(hi)));
        if (width <= limit) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval narrower than one ulp
        if (count_below(t, mid) >= k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// All eigenvalues, strictly increasing, each bracketed by Sturm bisection to
/// width <= max(tol, a few ulps). tol = 0 bisects to the ulp limit.
inline std::vector<double> eigenvalues(const Truncation& t, double tol) {
    if (tol < 0.0) throw std::invalid_argument("eigenvalue tolerance must be >= 0");
    const long N = t.size();
    auto [lo, hi] = gershgorin(t);
    std::vector<double> evs(static_cast<std::size_t>(N));
    for (long k = 1; k <= N; ++k)
        evs[static_cast<std::size_t>(k - 1)] = detail::bisect_kth(t, k, lo, hi, tol);
    std::sort(evs.begin(), evs.end());
    return evs;
}

/// Eigenvalues in the half-open window (lo, hi], strictly increasing.
inline std::vector<double> eigenvalues_in(const Truncation& t, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("window must satisfy lo < hi");
    auto [glo, ghi] = gershgorin(t);
    const double l = std::max(lo, glo), h = std::min(hi, ghi);
    if (!(l < h)) return {};
    const long klo = count_below(t, l), khi = count_below(t, h);
    std::vector<double> evs;
    evs.reserve(static_cast<std::size_t>(khi - klo));
    for (long k = klo + 1; k <= khi; ++k) evs.push_back(detail::bisect_kth(t, k, l, h, tol));
    std::sort(evs.begin(), evs.end());
    return evs;
}

/// Normalized eigenvector with its last coordinate delta_N = (x_N, e_N).
struct EigenPair {
    double lambda = 0.0;
    std::vector<double> vector;  // unit Euclidean norm, first-coordinate sign positive
    double last_coord = 0.0;
};

/// Eigenvector by the forward orthogonal-polynomial recurrence (components
/// proportional to p_k(lambda)), rescaled against overflow and validated by a
/// residual check ||J_N x - lambda x|| <= 1e-9 (1 + |lambda|).
inline EigenPair eigenvector(const Truncation& t, double lambda) {
    const long N = t.size();
    std::vector<double> p(static_cast<std::size_t>(N));
    p[0] = 1.0;
    for (long k = 1; k < N; ++k) {
        const double ak = t.offdiag[static_cast<std::size_t>(k - 1)];
        const double akm1 = k >= 2 ? t.offdiag[static_cast<std::size_t>(k - 2)] : 0.0;
        const double prev2 = k >= 2 ? p[static_cast<std::size_t>(k - 2)] : 0.0;
        p[static_cast<std::size_t>(k)] =
            ((lambda - t.diag[static_cast<std::size_t>(k - 1)]) * p[static_cast<std::size_t>(k - 1)] - akm1 * prev2) / ak;
        if (std::abs(p[static_cast<std::size_t>(k)]) > 1e150) {
            const double s = std::abs(p[static_cast<std::size_t>(k)]);
            for (long i = 0; i <= k; ++i) p[static_cast<std::size_t>(i)] /= s;
        }
    }
    double norm2 = 0.0;
    for (double v : p) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw std::runtime_error("eigenvector recurrence produced a degenerate vector");
    for (double& v : p) v /= norm;

    double res2 = 0.0;
    for (long k = 0; k < N; ++k) {
        double r = (t.diag[static_cast<std::size_t>(k)] - lambda) * p[static_cast<std::size_t>(k)];
        if (k > 0) r += t.offdiag[static_cast<std::size_t>(k - 1)] * p[static_cast<std::size_t>(k - 1)];
        if (k + 1 < N) r += t.offdiag[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k + 1)];
        res2 += r * r;
    }
    const double res = std::sqrt(res2);
    if (!(res <= 1e-9 * (1.0 + std::abs(lambda))))
        throw std::runtime_error("eigenpair residual " + std::to_string(res) +
                                 " exceeds 1e-9*(1+|lambda|); lambda is not an eigenvalue to working accuracy");
    const double last = p.back();
    return {lambda, std::move(p), last};
}

/// Signed magnitude of the last eigenvector coordinate in log10 form,
/// computed by the backward recurrence (stable for eigenvectors that decay
/// toward the truncation edge, where |delta_N| underflows double range).
struct LastCoord {
    int sign = 1;
    double log10_abs = 0.0;  // log10 |delta_N|
    double value = 0.0;      // sign * 10^log10_abs, 0 on underflow
};

inline LastCoord last_coord_magnitude(const Truncation& t, double lambda) {
    const long N = t.size();
    double y1 = 1.0, y2 = 0.0;  // y_{k+1}, y_{k+2} in the current scale
    double logacc = 0.0;        // actual y = stored * exp(logacc)
    double lse = 0.0;           // log sum exp of 2 log|y_j|, absolute scale; starts with y_N = 1
    for (long k = N - 1; k >= 1; --k) {
        const double ak = t.offdiag[static_cast<std::size_t>(k - 1)];
        const double akp1 = (k + 1 <= N - 1) ? t.offdiag[static_cast<std::size_t>(k)] : 0.0;
        const double y = ((lambda - t.diag[static_cast<std::size_t>(k)]) * y1 - akp1 * y2) / ak;
        y2 = y1;
        y1 = y;
        if (y != 0.0) lse = detail::logsumexp(lse, 2.0 * (std::log(std::abs(y)) + logacc));
        const double ay = std::abs(y);
        if (ay > 1e150) {
            y1 /= ay;
            y2 /= ay;
            logacc += std::log(ay);
        }
    }
    LastCoord out;
    out.sign = y1 > 0.0 ? 1 : y1 < 0.0 ? -1 : 0;  // aligns x_1 > 0, the p_1 = 1 convention
    out.log10_abs = -0.5 * lse / std::log(10.0);
    out.value = out.sign * std::pow(10.0, out.log10_abs);
    return out;
}

/// ||(T - lambda) x_N||^2 split into its two exact parts:
/// (lambda - lambda_N)^2 and a_N^2 delta_N^2.
struct ResidualSplit {
    double total = 0.0;
    double term1 = 0.0;
    double term2 = 0.0;
};

inline ResidualSplit residual_split(const Truncation& t, const EigenPair& pair, double lambda_target) {
    ResidualSplit r;
    r.term1 = (lambda_target - pair.lambda) * (lambda_target - pair.lambda);
    r.term2 = t.edge * t.edge * pair.last_coord * pair.last_coord;
    r.total = r.term1 + r.term2;
    return r;
}

/// Raised when an expansion pivot lambda_N - b_{N-j} is numerically zero.
class DegeneratePivot : public std::runtime_error {
  public:
    DegeneratePivot(long j, double gap)
        : std::runtime_error("degenerate pivot lambda - b_{N-" + std::to_string(j) +
                             "} (gap " + std::to_string(gap) + ")"),
          j_(j) {}
    long j() const { return j_; }

  private:
    long j_;
};

/// Expands delta_N through the last m eigenvalue equations: the sum over the
/// hatted nonnegative walks of products a_{N-k_s}/(lambda_N - b_{N-j_s})
/// times delta_{N - j_{m+1}}. Must reproduce delta_N exactly.
inline double delta_expansion(const Truncation& t, const EigenPair& pair, int m) {
    const long N = t.size();
    if (m < 1 || m > N) throw std::invalid_argument("delta expansion needs 1 <= m <= N");
    const double scale = std::abs(pair.lambda) + detail::scale_of(t);
    for (long j = 0; j < m; ++j) {
        const double gap = pair.lambda - t.diag[static_cast<std::size_t>(N - 1 - j)];
        if (std::abs(gap) < 1e-12 * scale) throw DegeneratePivot(j, gap);
    }
    double sum = 0.0;
    multiindex::for_each(multiindex::Variant::IHatPlus, m, [&](const multiindex::Walk& w) {
        const long coord_idx = N - w.j_end;  // delta_{N - j_{m+1}}
        if (coord_idx < 1) return;           // delta_0 = 0
        double prod = pair.vector[static_cast<std::size_t>(coord_idx - 1)];
        for (int s = 0; s < m && prod != 0.0; ++s) {
            const long ia = N - w.k[s];
            if (ia < 1) {
                prod = 0.0;  // a_0 = 0
                break;
            }
            const double num = t.offdiag[static_cast<std::size_t>(ia - 1)];
            const double den = pair.lambda - t.diag[static_cast<std::size_t>(N - 1 - w.j[s])];
            prod *= num / den;
        }
        sum += prod;
    });
    return sum;
}

/// The closed bound F_{m,N} >= |delta_N|: sum over nonnegative walks of
/// products a_{N-k_s} / |lambda - b_{N-j_s}|. F_{0,N} = 1. Returns +infinity
/// when a pivot vanishes exactly (the bound holds trivially).
inline double F_bound(const Truncation& t, double lambda, int m) {
    if (m == 0) return 1.0;
    const long N = t.size();
    if (m < 0 || m > N) throw std::invalid_argument("F bound needs 0 <= m <= N");
    double sum = 0.0;
    bool infinite = false;
    multiindex::for_each(multiindex::Variant::IPlus, m, [&](const multiindex::Walk& w) {
        double prod = 1.0;
        for (int s = 0; s < m; ++s) {
            const long ia = N - w.k[s];
            if (ia < 1) {
                prod = 0.0;
                break;
            }
            const double num = t.offdiag[static_cast<std::size_t>(ia - 1)];
            const double den = std::abs(lambda - t.diag[static_cast<std::size_t>(N - 1 - w.j[s])]);
            if (den == 0.0) {
                infinite = true;
                prod = 0.0;
                break;
            }
            prod *= num / den;
        }
        sum += prod;
    });
    return infinite ? std::numeric_limits<double>::infinity() : sum;
}

/// Strict interlacing of the spectra of consecutive truncations.
inline bool interlacing_check(const seq::CoefficientSpec& spec, long N) {
    const auto ev1 = eigenvalues(truncate(spec, N), 0.0);
    const auto ev2 = eigenvalues(truncate(spec, N + 1), 0.0);
    for (long k = 0; k < N; ++k) {
        if (!(ev2[static_cast<std::size_t>(k)] < ev1[static_cast<std::size_t>(k)] &&
              ev1[static_cast<std::size_t>(k)] < ev2[static_cast<std::size_t>(k) + 1]))
            return false;
    }
    return true;
}

/// One stabilized location of truncation eigenvalues, with the decay
/// diagnostic a_N |delta_N| tracked along its nearest-eigenvalue chain.
struct Candidate {
    double location = 0.0;
    double spread = 0.0;
    std::vector<long> support;          // truncation orders contributing
    std::vector<double> lambda_chain;   // nearest eigenvalue per support entry
    std::vector<double> gencond_value;  // a_N |delta_N| (0 on underflow)
    std::vector<double> gencond_log10;  // log10 of the same, always finite
};

struct LimitPointReport {
    double lo = 0.0, hi = 0.0;
    double cluster_tol = 0.0;
    std::vector<std::pair<long, std::vector<double>>> eigenvalues_by_N;  // raw data for re-clustering
    std::vector<Candidate> candidates;
};

/// Estimates the limit points of truncation eigenvalues inside a window:
/// computes the in-window spectrum for every N, groups values across N into
/// clusters of diameter <= cluster_tol, and keeps clusters present in every
/// one of the last ceil(3/4 |N_list|) truncations. Heuristic by design; the
/// report carries the raw spectra.
inline LimitPointReport limit_points(const seq::CoefficientSpec& spec, const std::vector<long>& N_list,
                                     double lo, double hi, double cluster_tol, double eig_tol = 0.0) {
    if (N_list.empty()) throw std::invalid_argument("N list must be nonempty");
    if (!std::is_sorted(N_list.begin(), N_list.end()))
        throw std::invalid_argument("N list must be increasing");
    if (!(cluster_tol > 0.0)) throw std::invalid_argument("cluster tolerance must be positive");

    LimitPointReport rep;
    rep.lo = lo;
    rep.hi = hi;
    rep.cluster_tol = cluster_tol;

    struct Point {
        double lambda;
        long N;
    };
    std::vector<Point> pts;
    for (long N : N_list) {
        auto evs = eigenvalues_in(truncate(spec, N), lo, hi, eig_tol);
        for (double ev : evs) pts.push_back({ev, N});
        rep.eigenvalues_by_N.emplace_back(N, std::move(evs));
    }
    std::sort(pts.begin(), pts.end(), [](const Point& x, const Point& y) { return x.lambda < y.lambda; });

    const std::size_t tail = (3 * N_list.size() + 3) / 4;  // ceil(3/4 |N_list|)
    std::vector<long> required(N_list.end() - static_cast<std::ptrdiff_t>(tail), N_list.end());

    std::size_t i = 0;
    while (i < pts.size()) {
        std::size_t jx = i;
        while (jx + 1 < pts.size() && pts[jx + 1].lambda - pts[i].lambda <= cluster_tol) ++jx;
        std::vector<long> support;
        for (std::size_t s = i; s <= jx; ++s) support.push_back(pts[s].N);
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
        const bool keep = std::includes(support.begin(), support.end(), required.begin(), required.end());
        if (keep) {
            Candidate c;
            c.spread = pts[jx].lambda - pts[i].lambda;
            double mean = 0.0;
            for (std::size_t s = i; s <= jx; ++s) mean += pts[s].lambda;
            c.location = mean / static_cast<double>(jx - i + 1);
            c.support = support;
            for (long N : support) {
                double best = 0.0, bestdist = std::numeric_limits<double>::infinity();
                for (std::size_t s = i; s <= jx; ++s) {
                    if (pts[s].N != N) continue;
                    const double d = std::abs(pts[s].lambda - c.location);
                    if (d < bestdist) {
                        bestdist = d;
                        best = pts[s].lambda;
                    }
                }
                c.lambda_chain.push_back(best);
                const Truncation t = truncate(spec, N);
                const LastCoord lc = last_coord_magnitude(t, best);
                const double log10_aN = spec.log_a(N) / std::log(10.0);
                c.gencond_log10.push_back(log10_aN + lc.log10_abs);
                c.gencond_value.push_back(std::pow(10.0, log10_aN + lc.log10_abs));
            }
            rep.candidates.push_back(std::move(c));
        }
        i = jx + 1;
    }
    return rep;
}

}  // namespace jacobi::spectra
