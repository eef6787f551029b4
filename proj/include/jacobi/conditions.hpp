#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jacobi/coeffseq.hpp"
#include "jacobi/multiindex.hpp"
#include "jacobi/rational.hpp"

namespace jacobi::conditions {

using Json = nlohmann::json;
using seq::CoefficientSpec;
using seq::Growth;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// numeric evaluation of the multi-index sums
// ---------------------------------------------------------------------------

namespace detail {

inline double logsumexp(const std::vector<double>& xs) {
    double hi = -kInf;
    for (double x : xs) hi = std::max(hi, x);
    if (hi == -kInf || hi == kInf) return hi;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - hi);
    return hi + std::log(s);
}

struct GKind {
    multiindex::Variant variant;
    bool squared;  // a^2/b^2 factors (the D-family sums)
    bool shifted;  // indices shifted by j_{m+1} (the D-family sums)
};

inline GKind g_plus_kind() { return {multiindex::Variant::IPlus, false, false}; }
inline GKind g_full_kind() { return {multiindex::Variant::I, false, false}; }
inline GKind g_tilde_kind() { return {multiindex::Variant::IHat, true, true}; }

/// log of the sum, with the conventions: a_k = 0 for k <= 0 kills a term,
/// b = 0 under a nonzero numerator makes the whole sum +infinity.
inline double log_G(const CoefficientSpec& spec, const GKind& kind, int m, long n) {
    std::vector<double> leaf;
    bool infinite = false;
    multiindex::for_each(kind.variant, m, [&](const multiindex::Walk& w) {
        if (infinite) return;
        const long shift = kind.shifted ? w.j_end : 0;
        double acc = 0.0;
        for (int s = 0; s < m; ++s) {
            const long ia = n + shift - w.k[s];
            if (ia < 1) {
                acc = -kInf;
                break;
            }
            const double lb = spec.log_abs_b(n + shift - w.j[s]);
            if (lb == -kInf) {
                infinite = true;
                break;
            }
            acc += spec.log_a(ia) - lb;
        }
        if (infinite || acc == -kInf) return;
        leaf.push_back(kind.squared ? 2.0 * acc : acc);
    });
    if (infinite) return kInf;
    return logsumexp(leaf);
}

/// Plain double-precision evaluation; falls back to the log route when values
/// leave double range.
inline double eval_G(const CoefficientSpec& spec, const GKind& kind, int m, long n) {
    double total = 0.0;
    bool infinite = false;
    bool overflow = false;
    try {
        multiindex::for_each(kind.variant, m, [&](const multiindex::Walk& w) {
            if (infinite || overflow) return;
            const long shift = kind.shifted ? w.j_end : 0;
            double prod = 1.0;
            bool zero = false;
            for (int s = 0; s < m; ++s) {
                const long ia = n + shift - w.k[s];
                if (ia < 1) {
                    zero = true;
                    break;
                }
                const double av = spec.a(ia);
                const double bv = std::abs(spec.b(n + shift - w.j[s]));
                if (bv == 0.0) {
                    infinite = true;
                    break;
                }
                const double f = av / bv;
                prod *= kind.squared ? f * f : f;
            }
            if (zero || infinite) return;
            total += prod;
            if (!std::isfinite(total)) overflow = true;
        });
    } catch (const std::domain_error&) {
        overflow = true;  // coefficient chain overflowed double range
    }
    if (infinite) return kInf;
    if (overflow) return std::exp(log_G(spec, kind, m, n));
    return total;
}

}  // namespace detail

/// G+_{m,n}: sum over nonnegative walks of products a_{n-k_s}/|b_{n-j_s}|.
inline double G_plus(const CoefficientSpec& spec, int m, long n) {
    if (n <= m) throw std::invalid_argument("G_plus needs n > m");
    return detail::eval_G(spec, detail::g_plus_kind(), m, n);
}

/// G_{m,n}: the same sum over the full walk set.
inline double G_full(const CoefficientSpec& spec, int m, long n) {
    if (n <= m) throw std::invalid_argument("G_full needs n > m");
    return detail::eval_G(spec, detail::g_full_kind(), m, n);
}

/// G~_{m,n}: squared-ratio sum over hatted walks with the j_{m+1} index
/// shift; boundary convention a_k = 0 for k <= 0.
inline double G_tilde(const CoefficientSpec& spec, int m, long n) {
    if (n < 1) throw std::invalid_argument("G_tilde needs n >= 1");
    return detail::eval_G(spec, detail::g_tilde_kind(), m, n);
}

/// Verifies the two-term recursion
/// G~_{m+1,n} = (a_{n-1}/b_{n-1})^2 G~_{m,n-1} + (a_n/b_{n+1})^2 G~_{m,n+1}.
inline bool recursion_check_G_tilde(const CoefficientSpec& spec, int m, long n) {
    if (m < 1 || n < 2) throw std::invalid_argument("recursion check needs m >= 1, n >= 2");
    const double lhs = G_tilde(spec, m + 1, n);
    const double cl = spec.a(n - 1) / std::abs(spec.b(n - 1));
    const double cr = spec.a(n) / std::abs(spec.b(n + 1));
    const double rhs = cl * cl * G_tilde(spec, m, n - 1) + cr * cr * G_tilde(spec, m, n + 1);
    if (std::isinf(lhs) || std::isinf(rhs)) return std::isinf(lhs) && std::isinf(rhs);
    return std::abs(lhs - rhs) <= 1e-12 * std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

/// The four coefficient ratios the criteria are built from, at one index.
struct RatioFactors {
    double gamma_minus = 0.0;  // a_{n-1}/|b_n|, +inf when b_n = 0
    double gamma_plus = 0.0;   // a_n/|b_n|
    double c_abs_minus = 0.0;  // a_{n-1}/|lambda - b_n|
    double c_abs_plus = 0.0;   // a_n/|lambda - b_n|
};

inline RatioFactors ratio_factors(const CoefficientSpec& spec, long n, double lambda) {
    RatioFactors r;
    const double an = spec.a(n);
    const double anm1 = n >= 2 ? spec.a(n - 1) : 0.0;  // a_0 = 0
    const double bn = spec.b(n);
    r.gamma_minus = bn == 0.0 ? kInf : anm1 / std::abs(bn);
    r.gamma_plus = bn == 0.0 ? kInf : an / std::abs(bn);
    const double gap = std::abs(lambda - bn);
    r.c_abs_minus = gap == 0.0 ? kInf : anm1 / gap;
    r.c_abs_plus = gap == 0.0 ? kInf : an / gap;
    return r;
}

// ---------------------------------------------------------------------------
// symbolic evaluation (exact rational exponents per residue class)
// ---------------------------------------------------------------------------

/// Aggregated power terms of a positive quantity per residue class of n.
/// An infinite class marks identically-vanishing b under a nonzero numerator.
struct ExponentSum {
    struct Term {
        double coefficient;  // > 0
        Rational exponent;
    };
    struct Class {
        bool infinite = false;
        std::vector<Term> terms;  // at most one term per exponent, descending exponent

        std::optional<Term> dominant() const {
            if (terms.empty()) return std::nullopt;
            return terms.front();
        }
    };
    long modulus = 1;
    std::vector<Class> cls;

    const Class& at(long residue) const {
        return cls[static_cast<std::size_t>(((residue % modulus) + modulus) % modulus)];
    }
};

enum class ProductKind { G_plus_times_a, G_full_times_a, G_tilde };

namespace detail {

struct ClassAccum {
    bool infinite = false;
    std::map<Rational, double> terms;
};

inline std::optional<ExponentSum> symbolic_sum(const CoefficientSpec& spec, const GKind& kind, int m,
                                               bool times_a) {
    const auto rp = spec.ratio_profile();
    if (!rp) return std::nullopt;
    std::optional<seq::PowerProfile> pa;
    if (times_a) {
        pa = spec.power_profile('a');
        if (!pa) return std::nullopt;
    }
    const long Q = std::lcm(rp->modulus, pa ? pa->modulus : 1L);
    std::vector<ClassAccum> acc(static_cast<std::size_t>(Q));
    multiindex::for_each(kind.variant, m, [&](const multiindex::Walk& w) {
        const long shift = kind.shifted ? w.j_end : 0;
        for (long rho = 0; rho < Q; ++rho) {
            double c = 1.0;
            Rational e{0};
            bool infinite = false;
            for (int s = 0; s < m; ++s) {
                const long pos = rho + shift - w.j[s];
                const seq::ClassPower& f = (w.k[s] == w.j[s]) ? rp->gp(pos) : rp->gm(pos);
                if (f.is_inf) {
                    infinite = true;
                    break;
                }
                c *= f.constant;
                e += f.exponent;
            }
            auto& slot = acc[static_cast<std::size_t>(rho)];
            if (infinite) {
                slot.infinite = true;
                continue;
            }
            if (kind.squared) {
                c *= c;
                e *= 2;
            }
            if (times_a) {
                const auto& ac = pa->at(rho);
                c *= ac.constant;
                e += ac.exponent;
            }
            slot.terms[e] += c;
        }
    });
    ExponentSum out;
    out.modulus = Q;
    for (auto& slot : acc) {
        ExponentSum::Class cl;
        cl.infinite = slot.infinite;
        for (auto it = slot.terms.rbegin(); it != slot.terms.rend(); ++it)
            cl.terms.push_back({it->second, it->first});
        out.cls.push_back(std::move(cl));
    }
    return out;
}

}  // namespace detail

/// Per-class power terms of a_n G+_{m,n}, a_n G_{m,n} or G~_{m,n}; absent
/// when the spec has sparse overrides or a non-reducing recursion for the
/// parts the product needs.
inline std::optional<ExponentSum> symbolic_exponent_of(ProductKind kind, const CoefficientSpec& spec, int m) {
    switch (kind) {
        case ProductKind::G_plus_times_a:
            return detail::symbolic_sum(spec, detail::g_plus_kind(), m, true);
        case ProductKind::G_full_times_a:
            return detail::symbolic_sum(spec, detail::g_full_kind(), m, true);
        case ProductKind::G_tilde:
            return detail::symbolic_sum(spec, detail::g_tilde_kind(), m, false);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// verdicts
// ---------------------------------------------------------------------------

enum class Outcome { Holds, Fails, Inconclusive };
enum class Mode { Symbolic, Numeric };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Holds: return "Holds";
        case Outcome::Fails: return "Fails";
        case Outcome::Inconclusive: return "Inconclusive";
    }
    return "?";
}
inline const char* to_string(Mode m) { return m == Mode::Symbolic ? "Symbolic" : "Numeric"; }

/// Outcome of one self-adjointness criterion. "Fails" always means the
/// criterion's hypothesis is violated, never that the operator fails to be
/// self-adjoint: every criterion here is a one-directional sufficient
/// condition.
struct Verdict {
    std::string criterion;  // "B", "C", "D", "G0", "CAR", "DW", "JN", "CJ", "WEAK"
    std::optional<int> m;
    Outcome outcome = Outcome::Inconclusive;
    Mode mode = Mode::Numeric;
    Json evidence;

    std::string display_name() const { return m ? criterion + "_" + std::to_string(*m) : criterion; }
};

struct NumericRange {
    long start = 10;
    long end = 2000;
    long stride = 10;
};

namespace detail {

inline Json classes_json(const ExponentSum& s) {
    Json arr = Json::array();
    for (long c = 0; c < s.modulus; ++c) {
        const auto& cl = s.cls[static_cast<std::size_t>(c)];
        Json e;
        e["residue"] = c;
        if (cl.infinite) {
            e["infinite"] = true;
        } else if (auto d = cl.dominant()) {
            e["dominant_constant"] = d->coefficient;
            e["dominant_exponent"] = to_string(d->exponent);
        }
        arr.push_back(std::move(e));
    }
    return arr;
}

/// Max over classes of the dominant exponent; infinite classes dominate all.
struct WorstExponent {
    bool infinite = false;
    std::optional<Rational> exponent;   // absent if every class is empty
    double tie_constant = 0.0;          // max class-constant among classes at the worst exponent
};

inline WorstExponent worst_of(const ExponentSum& s) {
    WorstExponent w;
    for (const auto& cl : s.cls) {
        if (cl.infinite) {
            w.infinite = true;
            continue;
        }
        auto d = cl.dominant();
        if (!d) continue;
        if (!w.exponent || d->exponent > *w.exponent) {
            w.exponent = d->exponent;
            w.tie_constant = d->coefficient;
        } else if (d->exponent == *w.exponent) {
            w.tie_constant = std::max(w.tie_constant, d->coefficient);
        }
    }
    return w;
}

inline double log10_of_log(double natural) { return natural / std::log(10.0); }

struct FitResult {
    double slope = 0.0;
    double residual = 0.0;
    bool valid = false;
};

inline FitResult fit_loglog(const std::vector<long>& ns, const std::vector<double>& log10v) {
    FitResult f;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (std::isfinite(log10v[i])) {
            xs.push_back(std::log10(static_cast<double>(ns[i])));
            ys.push_back(log10v[i]);
        }
    }
    if (xs.size() < 3) return f;
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
    if (sxx == 0) return f;
    f.slope = sxy / sxx;
    double r2 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - my - f.slope * (xs[i] - mx);
        r2 += e * e;
    }
    f.residual = std::sqrt(r2 / static_cast<double>(xs.size()));
    f.valid = true;
    return f;
}

inline NumericRange sane(std::optional<NumericRange> r, long min_start) {
    NumericRange v = r.value_or(NumericRange{});
    v.start = std::max(v.start, min_start);
    v.stride = std::max(v.stride, 1L);
    v.end = std::max(v.end, v.start + 4 * v.stride);
    return v;
}

inline Json subsample(const std::vector<long>& ns, const std::vector<double>& vals, std::size_t cap = 16) {
    Json out = Json::array();
    const std::size_t n = ns.size();
    const std::size_t step = n <= cap ? 1 : n / cap;
    for (std::size_t i = 0; i < n; i += step) {
        out.push_back(Json{{"n", ns[i]}, {"value", std::isfinite(vals[i]) ? Json(vals[i]) : Json(nullptr)}});
    }
    return out;
}

/// Samples log10 of a positive quantity over the range.
inline void sample_log10(const NumericRange& r, const std::function<double(long)>& log10_fn,
                         std::vector<long>& ns, std::vector<double>& vals) {
    for (long n = r.start; n <= r.end; n += r.stride) {
        ns.push_back(n);
        vals.push_back(log10_fn(n));
    }
}

inline Json numeric_evidence(const CoefficientSpec& spec, const GKind& kind, int m, bool times_a,
                             const NumericRange& r) {
    std::vector<long> ns;
    std::vector<double> vals;
    sample_log10(
        r,
        [&](long n) {
            double lg = log_G(spec, kind, m, n);
            if (times_a) lg += spec.log_a(n);
            return log10_of_log(lg);
        },
        ns, vals);
    const FitResult f = fit_loglog(ns, vals);
    Json e;
    e["kind"] = "numeric";
    e["samples_log10"] = subsample(ns, vals);
    if (f.valid) {
        e["loglog_slope"] = f.slope;
        e["slope_residual"] = f.residual;
    }
    return e;
}

}  // namespace detail

// -- the B family (truncation-spectrum conditions) --------------------------

/// B_m: |b_n| -> infinity together with a_n G+_{m,n} -> 0.
inline Verdict check_Bm(const CoefficientSpec& spec, int m, std::optional<NumericRange> range = {}) {
    Verdict v{"B", m};
    const auto bdiv = spec.b_diverges();
    if (auto sym = symbolic_exponent_of(ProductKind::G_plus_times_a, spec, m); sym && bdiv) {
        const auto w = detail::worst_of(*sym);
        v.mode = Mode::Symbolic;
        v.evidence = Json{{"kind", "symbolic"},
                          {"classes", detail::classes_json(*sym)},
                          {"b_divergent", *bdiv}};
        if (w.infinite || (w.exponent && *w.exponent >= Rational{0})) {
            v.outcome = Outcome::Fails;  // a_n G+ does not vanish
        } else if (*bdiv && w.exponent && *w.exponent < Rational{0}) {
            v.outcome = Outcome::Holds;
            v.evidence["worst_exponent"] = to_string(*w.exponent);
        } else {
            v.outcome = Outcome::Inconclusive;  // vanishing product but b not divergent
        }
        return v;
    }
    // Recursive chains without a power form for a_n itself: the ratio sums
    // still have finite exponents, so superpolynomial growth or decay of a_n
    // decides the limit of a_n G+.
    if (spec.ratio_profile()) {
        const Growth g = spec.growth('a');
        if (g == Growth::Diverges) {
            v.mode = Mode::Symbolic;
            v.outcome = Outcome::Fails;
            v.evidence = Json{{"kind", "symbolic"}, {"note", "a_n grows superpolynomially; a_n G+ diverges"}};
            return v;
        }
        if (g == Growth::Decays && bdiv) {
            v.mode = Mode::Symbolic;
            v.outcome = *bdiv ? Outcome::Holds : Outcome::Fails;
            v.evidence = Json{{"kind", "symbolic"},
                              {"note", "a_n vanishes superpolynomially"},
                              {"b_divergent", *bdiv}};
            return v;
        }
    }
    const auto r = detail::sane(range, m + 1);
    v.mode = Mode::Numeric;
    v.outcome = Outcome::Inconclusive;
    v.evidence = detail::numeric_evidence(spec, detail::g_plus_kind(), m, true, r);
    if (bdiv) v.evidence["b_divergent"] = *bdiv;
    return v;
}

/// The weak condition: |b_n| -> infinity and a_n, a_{n-1} = o(|b_n|^r) for a
/// single r < 1. With per-class power laws this reduces to strict exponent
/// comparisons on every class.
inline Verdict check_weak(const CoefficientSpec& spec) {
    Verdict v{"WEAK", std::nullopt};
    const auto pa = spec.power_profile('a');
    const auto pb = spec.power_profile('b');
    if (!pa || !pb) {
        v.mode = Mode::Numeric;
        v.outcome = Outcome::Inconclusive;
        v.evidence = Json{{"kind", "numeric"}, {"note", "power-law form unavailable"}};
        return v;
    }
    v.mode = Mode::Symbolic;
    const long Q = std::lcm(pa->modulus, pb->modulus);
    Rational max_ratio_num{0}, max_ratio_den{1};
    bool b_div = true, cmp_ok = true;
    Json classes = Json::array();
    for (long c = 0; c < Q; ++c) {
        const auto& bc = pb->at(c);
        const auto& ac = pa->at(c);
        const auto& ap = pa->at(c - 1);
        const bool bpos = bc.sign != 0 && bc.exponent > Rational{0};
        if (!bpos) b_div = false;
        const Rational amax = std::max(ac.exponent, ap.exponent);
        if (!(amax < bc.exponent)) cmp_ok = false;
        classes.push_back(Json{{"residue", c},
                               {"a_exponent", to_string(ac.exponent)},
                               {"a_prev_exponent", to_string(ap.exponent)},
                               {"b_exponent", to_string(bc.exponent)}});
    }
    v.evidence = Json{{"kind", "symbolic"}, {"classes", classes}, {"b_divergent", b_div}};
    if (!b_div || !cmp_ok) {
        v.outcome = Outcome::Fails;
        return v;
    }
    v.outcome = Outcome::Holds;
    return v;
}

/// C_m (Carleman type): divergence of sum 1/(a_n G_{m,n}).
inline Verdict check_Cm(const CoefficientSpec& spec, int m, std::optional<NumericRange> range = {}) {
    Verdict v{"C", m};
    const auto decide = [&](const ExponentSum& sym) {
        // the series restricted to one residue class behaves like sum n^{-delta}
        bool any_div = false, all_conv = true;
        for (const auto& cl : sym.cls) {
            if (cl.infinite) continue;  // terms vanish there (1/(a G) = 0)
            if (auto d = cl.dominant()) {
                if (d->exponent <= Rational{1}) {
                    any_div = true;
                    all_conv = false;
                }
            }
        }
        return std::pair{any_div, all_conv};
    };

    if (auto sym = symbolic_exponent_of(ProductKind::G_full_times_a, spec, m)) {
        const auto [any_div, all_conv] = decide(*sym);
        v.mode = Mode::Symbolic;
        v.outcome = any_div ? Outcome::Holds : Outcome::Fails;
        v.evidence = Json{{"kind", "symbolic"}, {"classes", detail::classes_json(*sym)}};
        const auto w = detail::worst_of(*sym);
        if (w.exponent) v.evidence["cor_car_liminf_finite"] = (*w.exponent <= Rational{0});
        return v;
    }
    if (spec.ratio_profile()) {
        const Growth g = spec.growth('a');
        if (g == Growth::Diverges || g == Growth::Decays) {
            v.mode = Mode::Symbolic;
            v.outcome = g == Growth::Decays ? Outcome::Holds : Outcome::Fails;
            v.evidence = Json{{"kind", "symbolic"},
                              {"note", g == Growth::Decays
                                           ? "a_n vanishes superpolynomially; terms 1/(a_n G) diverge"
                                           : "a_n grows superpolynomially; the series converges"}};
            return v;
        }
    }
    // Sparse overrides with diverging gaps: the series restricted to indices
    // at distance >= m from the override set keeps its power-law form, and
    // restricted divergence implies divergence of the full positive series.
    const auto& ov_a = spec.override_rule('a');
    const auto& ov_b = spec.override_rule('b');
    if (!ov_a && ov_b && ov_b->gaps_diverge()) {
        const CoefficientSpec base = spec.base_spec();
        if (auto sym = symbolic_exponent_of(ProductKind::G_full_times_a, base, m)) {
            const auto [any_div, all_conv] = decide(*sym);
            v.mode = Mode::Symbolic;
            v.outcome = any_div ? Outcome::Holds : Outcome::Fails;
            v.evidence = Json{{"kind", "symbolic_restricted"},
                              {"classes", detail::classes_json(*sym)},
                              {"excluded", "indices within distance m of the override set"}};
            // restricted partial sums as supporting evidence
            const auto r = detail::sane(range, m + 1);
            std::vector<long> ns;
            std::vector<double> sums;
            double acc = 0.0;
            for (long n = m + 1; n <= r.end; ++n) {
                if (ov_b->distance_to(n) < m) continue;
                const double lg = detail::log_G(spec, detail::g_full_kind(), m, n) + spec.log_a(n);
                acc += std::exp(-lg);
                if ((n - (m + 1)) % r.stride == 0) {
                    ns.push_back(n);
                    sums.push_back(acc);
                }
            }
            v.evidence["restricted_partial_sums"] = detail::subsample(ns, sums);
            return v;
        }
    }
    const auto r = detail::sane(range, m + 1);
    v.mode = Mode::Numeric;
    v.outcome = Outcome::Inconclusive;
    std::vector<long> ns;
    std::vector<double> sums;
    double acc = 0.0;
    for (long n = m + 1; n <= r.end; ++n) {
        const double lg = detail::log_G(spec, detail::g_full_kind(), m, n) + spec.log_a(n);
        acc += std::exp(-lg);
        if ((n - (m + 1)) % r.stride == 0) {
            ns.push_back(n);
            sums.push_back(acc);
        }
    }
    v.evidence = Json{{"kind", "numeric"}, {"partial_sums", detail::subsample(ns, sums)}};
    return v;
}

/// D_m: G~_{m,n} < 2^{-m} from some index on; decided through the limsup.
inline Verdict check_Dm(const CoefficientSpec& spec, int m, std::optional<NumericRange> range = {}) {
    Verdict v{"D", m};
    const double threshold = std::ldexp(1.0, -m);  // exact 2^{-m}
    if (auto sym = symbolic_exponent_of(ProductKind::G_tilde, spec, m)) {
        const auto w = detail::worst_of(*sym);
        v.mode = Mode::Symbolic;
        v.evidence = Json{{"kind", "symbolic"},
                          {"classes", detail::classes_json(*sym)},
                          {"threshold", threshold}};
        if (w.infinite || (w.exponent && *w.exponent > Rational{0})) {
            v.outcome = Outcome::Fails;
        } else if (w.exponent && *w.exponent < Rational{0}) {
            v.outcome = Outcome::Holds;  // limsup 0 < 2^{-m}
        } else if (w.exponent) {
            // exponent-zero tie: compare the limsup constant with 2^{-m}
            double c = 0.0;
            for (const auto& cl : sym->cls) {
                if (auto d = cl.dominant(); d && d->exponent == Rational{0}) {
                    double class_const = 0.0;
                    for (const auto& t : cl.terms)
                        if (t.exponent == Rational{0}) class_const += t.coefficient;
                    c = std::max(c, class_const);
                }
            }
            v.evidence["tie_constant"] = c;
            v.outcome = c < threshold ? Outcome::Holds : c > threshold ? Outcome::Fails : Outcome::Inconclusive;
        } else {
            v.outcome = Outcome::Inconclusive;
        }
        return v;
    }
    const auto r = detail::sane(range, 1);
    v.mode = Mode::Numeric;
    v.outcome = Outcome::Inconclusive;
    std::vector<long> ns;
    std::vector<double> vals;
    detail::sample_log10(
        r, [&](long n) { return detail::log10_of_log(detail::log_G(spec, detail::g_tilde_kind(), m, n)); }, ns,
        vals);
    double tail_max = -kInf;
    const std::size_t tail_from = ns.size() - ns.size() / 4;
    for (std::size_t i = tail_from; i < ns.size(); ++i) tail_max = std::max(tail_max, vals[i]);
    v.evidence = Json{{"kind", "numeric"},
                      {"samples_log10", detail::subsample(ns, vals)},
                      {"threshold", threshold},
                      {"tail_max", std::isfinite(tail_max) ? Json(std::pow(10.0, tail_max)) : Json(nullptr)},
                      {"finite_n_satisfied", std::pow(10.0, tail_max) < threshold}};
    return v;
}

/// lim G_{m,n} = 0 (no a_n factor, no divergence hypothesis on b).
inline Verdict check_limit_Gm_zero(const CoefficientSpec& spec, int m, std::optional<NumericRange> range = {}) {
    Verdict v{"G0", m};
    if (auto sym = detail::symbolic_sum(spec, detail::g_full_kind(), m, false)) {
        const auto w = detail::worst_of(*sym);
        v.mode = Mode::Symbolic;
        v.evidence = Json{{"kind", "symbolic"}, {"classes", detail::classes_json(*sym)}};
        if (w.infinite || (w.exponent && *w.exponent >= Rational{0}))
            v.outcome = Outcome::Fails;
        else
            v.outcome = Outcome::Holds;
        return v;
    }
    const auto r = detail::sane(range, m + 1);
    v.mode = Mode::Numeric;
    v.outcome = Outcome::Inconclusive;
    v.evidence = detail::numeric_evidence(spec, detail::g_full_kind(), m, false, r);
    return v;
}

/// Carleman: sum 1/a_n diverges.
inline Verdict check_carleman(const CoefficientSpec& spec, std::optional<NumericRange> range = {}) {
    Verdict v{"CAR", std::nullopt};
    const Growth g = spec.growth('a');
    if (g == Growth::Diverges || g == Growth::Decays) {
        v.mode = Mode::Symbolic;
        v.outcome = g == Growth::Decays ? Outcome::Holds : Outcome::Fails;
        v.evidence = Json{{"kind", "symbolic"},
                          {"note", g == Growth::Decays ? "a_n -> 0 superpolynomially"
                                                       : "a_n grows superpolynomially"}};
        return v;
    }
    if (auto pa = spec.power_profile('a')) {
        v.mode = Mode::Symbolic;
        bool any_div = false;
        Json classes = Json::array();
        for (long c = 0; c < pa->modulus; ++c) {
            const auto& ac = pa->at(c);
            if (ac.exponent <= Rational{1}) any_div = true;
            classes.push_back(Json{{"residue", c}, {"a_exponent", to_string(ac.exponent)}});
        }
        v.outcome = any_div ? Outcome::Holds : Outcome::Fails;
        v.evidence = Json{{"kind", "symbolic"}, {"classes", classes}};
        return v;
    }
    const auto r = detail::sane(range, 1);
    v.mode = Mode::Numeric;
    v.outcome = Outcome::Inconclusive;
    std::vector<long> ns;
    std::vector<double> sums;
    double acc = 0.0;
    for (long n = 1; n <= r.end; ++n) {
        acc += std::exp(-spec.log_a(n));
        if ((n - 1) % r.stride == 0) {
            ns.push_back(n);
            sums.push_back(acc);
        }
    }
    v.evidence = Json{{"kind", "numeric"}, {"partial_sums", detail::subsample(ns, sums)}};
    return v;
}

/// Dennis-Wall: sum |b_n|/(a_n a_{n-1}) diverges.
inline Verdict check_dennis_wall(const CoefficientSpec& spec, std::optional<NumericRange> range = {}) {
    Verdict v{"DW", std::nullopt};
    const auto pa = spec.power_profile('a');
    const auto pb = spec.power_profile('b');
    if (pa && pb) {
        v.mode = Mode::Symbolic;
        const long Q = std::lcm(pa->modulus, pb->modulus);
        bool any_div = false;
        Json classes = Json::array();
        for (long c = 0; c < Q; ++c) {
            const auto& bc = pb->at(c);
            if (bc.sign == 0) {
                classes.push_back(Json{{"residue", c}, {"term", "0"}});
                continue;  // zero terms cannot diverge
            }
            const Rational e = bc.exponent - pa->at(c).exponent - pa->at(c - 1).exponent;
            if (e >= Rational{-1}) any_div = true;
            classes.push_back(Json{{"residue", c}, {"term_exponent", to_string(e)}});
        }
        v.outcome = any_div ? Outcome::Holds : Outcome::Fails;
        v.evidence = Json{{"kind", "symbolic"}, {"classes", classes}};
        return v;
    }
    if (spec.is_recursive('a') && spec.is_recursive('b')) {
        const Growth g = spec.growth('a');
        if (g == Growth::Diverges || g == Growth::Decays) {
            v.mode = Mode::Symbolic;
            // |b_n|/(a_n a_{n-1}) = |psi(n)| / (phi(n) a_{n-1})
            v.outcome = g == Growth::Decays ? Outcome::Holds : Outcome::Fails;
            v.evidence = Json{{"kind", "symbolic"},
                              {"note", g == Growth::Decays ? "terms diverge with 1/a_{n-1}"
                                                           : "terms vanish superpolynomially"}};
            return v;
        }
    }
    const auto r = detail::sane(range, 2);
    v.mode = Mode::Numeric;
    v.outcome = Outcome::Inconclusive;
    std::vector<long> ns;
    std::vector<double> sums;
    double acc = 0.0;
    for (long n = 2; n <= r.end; ++n) {
        acc += std::exp(spec.log_abs_b(n) - spec.log_a(n) - spec.log_a(n - 1));
        if (n % r.stride == 0) {
            ns.push_back(n);
            sums.push_back(acc);
        }
    }
    v.evidence = Json{{"kind", "numeric"}, {"partial_sums", detail::subsample(ns, sums)}};
    return v;
}

/// Janas-Naboko: limsup (a_n^2 + a_{n-1}^2)/b_n^2 < 1/2, paired with
/// divergence of |b_n|.
inline Verdict check_janas_naboko(const CoefficientSpec& spec, std::optional<NumericRange> range = {}) {
    Verdict v{"JN", std::nullopt};
    if (auto rp = spec.ratio_profile()) {
        v.mode = Mode::Symbolic;
        const long Q = rp->modulus;
        bool infinite = false;
        std::optional<Rational> worst;
        double tie_const = 0.0;
        Json classes = Json::array();
        for (long c = 0; c < Q; ++c) {
            const auto& gp = rp->gp(c);
            const auto& gm = rp->gm(c);
            if (gp.is_inf || gm.is_inf) {
                infinite = true;
                classes.push_back(Json{{"residue", c}, {"infinite", true}});
                continue;
            }
            // (gamma+)^2 + (gamma-)^2 per class
            std::map<Rational, double> terms;
            terms[gp.exponent * 2] += gp.constant * gp.constant;
            terms[gm.exponent * 2] += gm.constant * gm.constant;
            const auto dom = terms.rbegin();
            classes.push_back(Json{{"residue", c},
                                   {"dominant_constant", dom->second},
                                   {"dominant_exponent", to_string(dom->first)}});
            if (!worst || dom->first > *worst) {
                worst = dom->first;
                tie_const = dom->second;
            } else if (dom->first == *worst) {
                tie_const = std::max(tie_const, dom->second);
            }
        }
        const auto bdiv = spec.b_diverges();
        v.evidence = Json{{"kind", "symbolic"}, {"classes", classes}, {"threshold", 0.5}};
        if (bdiv) v.evidence["b_divergent"] = *bdiv;
        if (infinite || (worst && *worst > Rational{0})) {
            v.outcome = Outcome::Fails;
            return v;
        }
        const bool bound_ok = worst && (*worst < Rational{0} || tie_const < 0.5);
        const bool bound_fail = worst && *worst == Rational{0} && tie_const > 0.5;
        if (worst && *worst == Rational{0}) v.evidence["tie_constant"] = tie_const;
        if (bound_fail) {
            v.outcome = Outcome::Fails;
        } else if (bound_ok && bdiv && *bdiv) {
            v.outcome = Outcome::Holds;
        } else if (bound_ok) {
            v.outcome = Outcome::Inconclusive;  // ratio bound holds, b-divergence does not
        } else {
            v.outcome = Outcome::Inconclusive;
        }
        return v;
    }
    // Geometric overrides on b blow the ratio up along the override set.
    const auto& ov_b = spec.override_rule('b');
    if (ov_b && ov_b->kind == seq::Override::Kind::Squares && !spec.has_override('a') &&
        spec.power_profile('a')) {
        v.mode = Mode::Symbolic;
        v.outcome = Outcome::Fails;
        v.evidence = Json{{"kind", "symbolic"},
                          {"note", "geometric b-override: the ratio diverges along the override set"}};
        return v;
    }
    const auto r = detail::sane(range, 2);
    v.mode = Mode::Numeric;
    v.outcome = Outcome::Inconclusive;
    std::vector<long> ns;
    std::vector<double> vals;
    detail::sample_log10(
        r,
        [&](long n) {
            const double la = 2.0 * spec.log_a(n);
            const double lap = 2.0 * spec.log_a(n - 1);
            const double lb = 2.0 * spec.log_abs_b(n);
            return detail::log10_of_log(detail::logsumexp({la, lap}) - lb);
        },
        ns, vals);
    double wit = -kInf;
    for (double x : vals) wit = std::max(wit, x);
    v.evidence = Json{{"kind", "numeric"},
                      {"samples_log10", detail::subsample(ns, vals)},
                      {"witnessed_max", std::isfinite(wit) ? Json(std::pow(10.0, wit)) : Json(nullptr)},
                      {"threshold", 0.5}};
    return v;
}

/// Cojuhari-Janas: beta_n = b_n - a_n - a_{n-1} > 0 eventually, with
/// a_n -> infinity and beta_n + beta_{n+1} -> infinity.
inline Verdict check_cojuhari_janas(const CoefficientSpec& spec, std::optional<NumericRange> range = {}) {
    Verdict v{"CJ", std::nullopt};

    // resolves the sign and exponent of a signed sum of power terms
    struct SignedDominant {
        int sign = 0;  // 0 when every coefficient cancels exactly
        Rational exponent{0};
        bool resolved = false;
    };
    const auto resolve = [](std::map<Rational, double>& terms) {
        SignedDominant d;
        for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
            if (it->second != 0.0) {
                d.sign = it->second > 0 ? 1 : -1;
                d.exponent = it->first;
                d.resolved = true;
                return d;
            }
        }
        return d;
    };

    const auto pa = spec.power_profile('a');
    const auto pb = spec.power_profile('b');
    if (pa && pb) {
        v.mode = Mode::Symbolic;
        const long Q = std::lcm(pa->modulus, pb->modulus);
        std::vector<SignedDominant> beta(static_cast<std::size_t>(Q));
        Json classes = Json::array();
        bool any_negative = false, any_unresolved = false;
        for (long c = 0; c < Q; ++c) {
            const auto& bc = pb->at(c);
            std::map<Rational, double> terms;
            if (bc.sign != 0) terms[bc.exponent] += bc.sign * bc.constant;
            terms[pa->at(c).exponent] -= pa->at(c).constant;
            terms[pa->at(c - 1).exponent] -= pa->at(c - 1).constant;
            beta[static_cast<std::size_t>(c)] = resolve(terms);
            const auto& d = beta[static_cast<std::size_t>(c)];
            if (!d.resolved) any_unresolved = true;
            if (d.resolved && d.sign < 0) any_negative = true;
            classes.push_back(Json{{"residue", c},
                                   {"beta_sign", d.resolved ? Json(d.sign) : Json(nullptr)},
                                   {"beta_exponent", d.resolved ? Json(to_string(d.exponent)) : Json(nullptr)}});
        }
        v.evidence = Json{{"kind", "symbolic"}, {"classes", classes}};
        if (any_negative) {
            v.outcome = Outcome::Fails;  // beta_n < 0 on a full residue class
            return v;
        }
        if (any_unresolved) {
            v.outcome = Outcome::Inconclusive;  // exact cancellation at leading order
            return v;
        }
        const auto adiv = spec.a_diverges();
        v.evidence["a_divergent"] = adiv ? Json(*adiv) : Json(nullptr);
        if (!adiv || !*adiv) {
            v.outcome = adiv ? Outcome::Fails : Outcome::Inconclusive;
            return v;
        }
        bool pair_div = true;
        for (long c = 0; c < Q; ++c) {
            const auto& d1 = beta[static_cast<std::size_t>(c)];
            const auto& d2 = beta[static_cast<std::size_t>((c + 1) % Q)];
            const Rational e = std::max(d1.exponent, d2.exponent);
            if (!(e > Rational{0})) pair_div = false;
        }
        v.outcome = pair_div ? Outcome::Holds : Outcome::Fails;
        return v;
    }
    const auto rp = spec.ratio_profile();
    if (spec.is_recursive('a') && spec.is_recursive('b') && rp) {
        // beta_n = (psi(n) - phi(n) - 1) a_{n-1}; the factor branches are
        // recovered from the ratios: |psi| = 1/gamma-, phi = gamma+/gamma-.
        v.mode = Mode::Symbolic;
        const long Q = rp->modulus;
        bool any_negative = false, any_unresolved = false, all_positive = true;
        Json classes = Json::array();
        for (long c = 0; c < Q; ++c) {
            const auto& gm = rp->gm(c);
            const auto& gp = rp->gp(c);
            if (gm.is_inf || gp.is_inf) {
                any_unresolved = true;
                all_positive = false;
                continue;
            }
            const int psi_sign = spec.sign_b((c == 0 ? Q : c) + Q);  // representative index of class c
            std::map<Rational, double> terms;
            terms[-gm.exponent] += psi_sign * (1.0 / gm.constant);
            terms[gp.exponent - gm.exponent] -= gp.constant / gm.constant;
            terms[Rational{0}] -= 1.0;
            auto d = resolve(terms);
            if (!d.resolved) any_unresolved = true;
            if (d.resolved && d.sign < 0) any_negative = true;
            if (!d.resolved || d.sign <= 0) all_positive = false;
            classes.push_back(Json{{"residue", c},
                                   {"beta_sign", d.resolved ? Json(d.sign) : Json(nullptr)}});
        }
        v.evidence = Json{{"kind", "symbolic"}, {"classes", classes}};
        if (any_negative) {
            v.outcome = Outcome::Fails;
            return v;
        }
        if (any_unresolved || !all_positive) {
            v.outcome = Outcome::Inconclusive;
            return v;
        }
        const Growth g = spec.growth('a');
        if (g == Growth::Diverges) {
            v.outcome = Outcome::Holds;  // beta ~ positive power times a_{n-1} -> infinity
        } else if (g == Growth::Decays) {
            v.outcome = Outcome::Fails;  // a_n does not diverge
        } else {
            v.outcome = Outcome::Inconclusive;
        }
        return v;
    }
    const auto& ov_b = spec.override_rule('b');
    if (ov_b && ov_b->kind == seq::Override::Kind::Squares && !spec.has_override('a') &&
        spec.power_profile('a')) {
        v.mode = Mode::Symbolic;
        v.outcome = Outcome::Fails;  // b_n -> 0 geometrically on the override set, so beta_n < 0 there
        v.evidence = Json{{"kind", "symbolic"},
                          {"note", "geometric b-override: beta_n < 0 along the override set"}};
        return v;
    }
    const auto r = detail::sane(range, 2);
    v.mode = Mode::Numeric;
    v.outcome = Outcome::Inconclusive;
    std::vector<long> ns;
    std::vector<double> betas;
    long negative_tail = 0;
    for (long n = r.start; n <= r.end; n += r.stride) {
        double beta;
        try {
            beta = spec.b(n) - spec.a(n) - spec.a(n - 1);
        } catch (const std::domain_error&) {
            break;  // beyond double range; keep what we have
        }
        ns.push_back(n);
        betas.push_back(beta);
        if (beta <= 0.0) ++negative_tail;
    }
    v.evidence = Json{{"kind", "numeric"},
                      {"beta_samples", detail::subsample(ns, betas)},
                      {"nonpositive_count", negative_tail}};
    return v;
}

// ---------------------------------------------------------------------------
// the battery
// ---------------------------------------------------------------------------

struct BatteryResult {
    std::vector<Verdict> verdicts;
    bool self_adjoint = false;         // some sufficient criterion holds
    bool lambda_equals_sigma = false;  // via the B family or the weak condition
    std::vector<std::string> via;

    const char* conclusion() const { return self_adjoint ? "SELF_ADJOINT" : "UNDECIDED"; }
};

/// Runs every criterion: the four classical ones, the weak condition, and the
/// three m-families plus the G_m -> 0 variant for m = 1..m_max. The verdict
/// set never claims "not self-adjoint"; criteria only ever certify.
inline BatteryResult run_battery(const CoefficientSpec& spec, int m_max,
                                 std::optional<NumericRange> range = {}) {
    if (m_max < 1 || m_max > multiindex::kMaxOrder)
        throw std::invalid_argument("m_max must be in [1, " + std::to_string(multiindex::kMaxOrder) + "]");
    BatteryResult out;
    out.verdicts.push_back(check_carleman(spec, range));
    out.verdicts.push_back(check_dennis_wall(spec, range));
    out.verdicts.push_back(check_janas_naboko(spec, range));
    out.verdicts.push_back(check_cojuhari_janas(spec, range));
    out.verdicts.push_back(check_weak(spec));
    for (int m = 1; m <= m_max; ++m) {
        out.verdicts.push_back(check_Bm(spec, m, range));
        out.verdicts.push_back(check_Cm(spec, m, range));
        out.verdicts.push_back(check_Dm(spec, m, range));
        out.verdicts.push_back(check_limit_Gm_zero(spec, m, range));
    }
    for (const auto& v : out.verdicts) {
        if (v.outcome != Outcome::Holds) continue;
        out.self_adjoint = true;
        out.via.push_back(v.display_name());
        if (v.criterion == "B" || v.criterion == "WEAK") out.lambda_equals_sigma = true;
    }
    return out;
}

}  // namespace jacobi::conditions
