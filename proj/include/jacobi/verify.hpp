#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jacobi/cfrac.hpp"
#include "jacobi/conditions.hpp"
#include "jacobi/multiindex.hpp"
#include "jacobi/orthopoly.hpp"
#include "jacobi/spectra.hpp"

namespace jacobi::verify {

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct Params {
    unsigned long seed = 20240101;
    bool inject_fault = false;  // corrupts one input so the suite must fail (negative control)
    double tol_scale = 1.0;     // scales every relative tolerance (0 makes identities unsatisfiable)

    int formula_specs = 200;
    int eigen_truncations = 100;
    int duality_specs = 6;
    long duality_N = 60;
    int cd_specs = 8;
    long cd_n = 400;
    int cfrac_specs = 8;
    long cfrac_N = 120;
    int cfrac_lambdas = 20;
};

/// Full-size sweeps used by the acceptance suite.
inline Params acceptance_params() {
    Params p;
    p.formula_specs = 1000;
    p.eigen_truncations = 200;
    p.duality_specs = 20;
    p.duality_N = 100;
    p.cd_specs = 20;
    p.cd_n = 1000;
    p.cfrac_specs = 20;
    p.cfrac_N = 200;
    p.cfrac_lambdas = 50;
    return p;
}

namespace detail {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

inline Rational random_exponent(std::mt19937_64& rng, int max_num) {
    std::uniform_int_distribution<int> num(-max_num, max_num);
    std::uniform_int_distribution<int> den(1, 2);
    return Rational{num(rng), den(rng)};
}

/// Random pure power-law rules: modulus in {1,2,3}, constants in [0.5, 2],
/// exponents in [-2, 2] (halves allowed); b-classes get random signs.
inline std::pair<seq::SeqRule, seq::SeqRule> random_power_rules(std::mt19937_64& rng, int max_num = 4) {
    std::uniform_int_distribution<long> mod(1, 3);
    std::uniform_real_distribution<double> cst(0.5, 2.0);
    std::uniform_int_distribution<int> coin(0, 1);
    seq::SeqRule a;
    a.modulus = mod(rng);
    for (long c = 0; c < a.modulus; ++c)
        a.branches.push_back(seq::Branch{seq::PowerTerm{cst(rng), random_exponent(rng, max_num)}, 1});
    seq::SeqRule b;
    b.modulus = mod(rng);
    for (long c = 0; c < b.modulus; ++c)
        b.branches.push_back(
            seq::Branch{seq::PowerTerm{cst(rng), random_exponent(rng, max_num)}, coin(rng) ? 1 : -1});
    return {std::move(a), std::move(b)};
}

inline spectra::Truncation random_truncation(std::mt19937_64& rng, long max_N) {
    std::uniform_int_distribution<long> nd(2, max_N);
    std::uniform_real_distribution<double> diag(-2.0, 2.0);
    std::uniform_real_distribution<double> off(0.5, 2.0);
    spectra::Truncation t;
    const long N = nd(rng);
    for (long i = 0; i < N; ++i) t.diag.push_back(diag(rng));
    for (long i = 0; i + 1 < N; ++i) t.offdiag.push_back(off(rng));
    t.edge = off(rng);
    return t;
}

inline double rel_err(double x, double y) {
    const double ref = std::max({std::abs(x), std::abs(y), 1e-300});
    return std::abs(x - y) / ref;
}

inline SuiteResult finish(SuiteResult r, const Timer& t) {
    r.seconds = t.elapsed();
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// multi-index fidelity
// ---------------------------------------------------------------------------

inline SuiteResult multiindex_suite() {
    using namespace multiindex;
    detail::Timer timer;
    SuiteResult r{"multi-index sets", true, ""};
    std::ostringstream why;

    const auto eq = [](const std::vector<Pair>& got, std::vector<std::vector<std::vector<long>>> want) {
        if (got.size() != want.size()) return false;
        for (std::size_t i = 0; i < got.size(); ++i)
            if (got[i].j != want[i][0] || got[i].k != want[i][1]) return false;
        return true;
    };
    // the four explicitly known nonnegative walk sets
    if (!eq(generate(Variant::IPlus, 1), {{{0}, {1}}})) why << "IPlus(1) mismatch; ";
    if (!eq(generate(Variant::IPlus, 2), {{{0, 1}, {1, 1}}, {{0, 1}, {1, 2}}})) why << "IPlus(2) mismatch; ";
    if (!eq(generate(Variant::IPlus, 3),
            {{{0, 1, 0}, {1, 1, 1}}, {{0, 1, 2}, {1, 2, 2}}, {{0, 1, 2}, {1, 2, 3}}}))
        why << "IPlus(3) mismatch; ";
    if (!eq(generate(Variant::IPlus, 4),
            {{{0, 1, 0, 1}, {1, 1, 1, 1}},
             {{0, 1, 0, 1}, {1, 1, 1, 2}},
             {{0, 1, 2, 1}, {1, 2, 2, 1}},
             {{0, 1, 2, 1}, {1, 2, 2, 2}},
             {{0, 1, 2, 3}, {1, 2, 3, 3}},
             {{0, 1, 2, 3}, {1, 2, 3, 4}}}))
        why << "IPlus(4) mismatch; ";

    const std::uint64_t want_plus[] = {1, 2, 3, 6};
    for (int m = 1; m <= 4; ++m)
        if (cardinality(Variant::IPlus, m) != want_plus[m - 1]) why << "|IPlus(" << m << ")| wrong; ";

    for (int m = 1; m <= 10; ++m) {
        if (cardinality(Variant::I, m) != (std::uint64_t{1} << m)) why << "|I(" << m << ")| wrong; ";
        if (cardinality(Variant::IHat, m) != (std::uint64_t{1} << m)) why << "|IHat(" << m << ")| wrong; ";
    }
    for (int m = 1; m <= 8; ++m) {
        for (Variant v : {Variant::I, Variant::IHat, Variant::IPlus, Variant::IHatPlus}) {
            const auto set = generate(v, m);
            if (set.size() != cardinality(v, m)) why << "generate/cardinality disagree; ";
            for (const auto& p : set)
                if (!check_pair(p)) why << "checker rejected a generated walk (m=" << m << "); ";
            for (std::size_t i = 1; i < set.size(); ++i)
                if (!(set[i - 1] < set[i])) why << "output not strictly sorted; ";
        }
        // dropping j_{m+1} maps IHat bijectively onto I
        auto hat = generate(Variant::IHat, m);
        for (auto& p : hat) {
            p.j.pop_back();
            p.variant = Variant::I;
        }
        std::sort(hat.begin(), hat.end());
        const bool dup = std::adjacent_find(hat.begin(), hat.end()) != hat.end();
        auto plain = generate(Variant::I, m);
        for (auto& p : plain) p.variant = Variant::I;
        if (dup || hat.size() != plain.size() || !std::equal(hat.begin(), hat.end(), plain.begin()))
            why << "IHat -> I projection is not a bijection (m=" << m << "); ";
        // the nonnegative variants embed in the unrestricted ones
        auto sub = generate(Variant::IPlus, m);
        for (auto& p : sub) p.variant = Variant::I;
        if (!std::includes(plain.begin(), plain.end(), sub.begin(), sub.end()))
            why << "IPlus not a subset of I (m=" << m << "); ";
        // nonnegative walks never dip below zero and take unit steps
        for (const auto& p : generate(Variant::IHatPlus, m)) {
            for (std::size_t s = 0; s + 1 < p.j.size(); ++s) {
                if (std::abs(p.j[s + 1] - p.j[s]) != 1) why << "walk step not +-1; ";
                if (p.j[s + 1] < 0) why << "walk dips below zero; ";
            }
        }
    }
    r.detail = why.str();
    r.pass = r.detail.empty();
    return detail::finish(std::move(r), timer);
}

// ---------------------------------------------------------------------------
// multi-index sums against the hand-expanded low orders
// ---------------------------------------------------------------------------

inline SuiteResult formula_suite(const Params& prm) {
    detail::Timer timer;
    SuiteResult r{"closed-form expansion equivalence", true, ""};
    std::mt19937_64 rng(prm.seed);
    const double tol = 1e-12 * prm.tol_scale;
    long checked = 0, failed = 0;
    std::ostringstream why;
    for (int s = 0; s < prm.formula_specs; ++s) {
        auto [ra, rb] = detail::random_power_rules(rng);
        const seq::CoefficientSpec spec(std::move(ra), std::move(rb));
        const auto a = [&](long n) { return spec.a(n); };
        const auto ab = [&](long n) { return std::abs(spec.b(n)); };
        const auto b2 = [&](long n) {
            const double v = spec.b(n);
            return v * v;
        };
        for (long n = 6; n <= 50; n += 1) {
            const double gp1 = a(n - 1) / ab(n);
            const double gp2 = gp1 * (a(n - 1) + a(n - 2)) / ab(n - 1);
            const double gp3 =
                a(n - 1) / (ab(n) * ab(n - 1)) *
                (a(n - 1) * a(n - 1) / ab(n) + a(n - 2) * (a(n - 2) + a(n - 3)) / ab(n - 2));
            const double gp4 = a(n - 1) / (ab(n) * ab(n - 1)) *
                               ((a(n - 1) * a(n - 1) / ab(n) + a(n - 2) * a(n - 2) / ab(n - 2)) *
                                    (a(n - 1) + a(n - 2)) / ab(n - 1) +
                                a(n - 2) * a(n - 3) * (a(n - 3) + a(n - 4)) / (ab(n - 2) * ab(n - 3)));
            const double gf1 = (a(n - 1) + a(n)) / ab(n);
            const double gf2 = a(n - 1) / ab(n) * (a(n - 2) + a(n - 1)) / ab(n - 1) +
                               a(n) / ab(n) * (a(n) + a(n + 1)) / ab(n + 1);
            const double gt1 = a(n) * a(n) / b2(n + 1) + a(n - 1) * a(n - 1) / b2(n - 1);
            const double gt2 =
                a(n) * a(n) / b2(n + 1) * (a(n + 1) * a(n + 1) / b2(n + 2) + a(n) * a(n) / b2(n)) +
                a(n - 1) * a(n - 1) / b2(n - 1) *
                    (a(n - 1) * a(n - 1) / b2(n) + a(n - 2) * a(n - 2) / b2(n - 2));
            const std::pair<double, double> checks[] = {
                {conditions::G_plus(spec, 1, n), gp1}, {conditions::G_plus(spec, 2, n), gp2},
                {conditions::G_plus(spec, 3, n), gp3}, {conditions::G_plus(spec, 4, n), gp4},
                {conditions::G_full(spec, 1, n), gf1}, {conditions::G_full(spec, 2, n), gf2},
                {conditions::G_tilde(spec, 1, n), gt1}, {conditions::G_tilde(spec, 2, n), gt2}};
            for (const auto& [got, want] : checks) {
                ++checked;
                if (detail::rel_err(got, want) > tol) {
                    if (++failed <= 3)
                        why << "spec#" << s << " n=" << n << " got " << got << " want " << want << "; ";
                }
            }
        }
    }
    if (failed) {
        r.pass = false;
        why << failed << "/" << checked << " comparisons off";
        r.detail = why.str();
    } else {
        r.detail = std::to_string(checked) + " comparisons within 1e-12";
    }
    return detail::finish(std::move(r), timer);
}

// ---------------------------------------------------------------------------
// eigenpair sweeps: coordinate expansion, bound, residual identity
// ---------------------------------------------------------------------------

namespace detail {

struct EigenSweepStats {
    long pairs = 0;
    long expansion_checked = 0, expansion_failed = 0, degenerate_skipped = 0;
    long bound_checked = 0, bound_violations = 0;
    long residual_checked = 0, residual_failed = 0;
    double worst_expansion = 0.0, worst_residual = 0.0;
};

inline EigenSweepStats eigen_sweep(const Params& prm) {
    EigenSweepStats st;
    std::mt19937_64 rng(prm.seed + 1);
    std::uniform_real_distribution<double> shift(-1.0, 1.0);
    const double tol_exp = 1e-10 * prm.tol_scale;
    const double tol_res = 1e-10 * prm.tol_scale;
    for (int i = 0; i < prm.eigen_truncations; ++i) {
        const spectra::Truncation t = detail::random_truncation(rng, 12);
        const long N = t.size();
        double scale = std::abs(t.edge);
        for (double b : t.diag) scale = std::max(scale, std::abs(b));
        for (double a : t.offdiag) scale = std::max(scale, a);
        const auto evs = spectra::eigenvalues(t, 0.0);
        for (double ev : evs) {
            const spectra::EigenPair pair = spectra::eigenvector(t, ev);
            ++st.pairs;

            // coordinate expansion (skips near-degenerate pivots, counted)
            const int m_hi = static_cast<int>(std::min<long>(5, N));
            for (int m = 1; m <= m_hi; ++m) {
                double min_gap = std::numeric_limits<double>::infinity();
                for (long j = 0; j < m; ++j)
                    min_gap = std::min(min_gap,
                                       std::abs(ev - t.diag[static_cast<std::size_t>(N - 1 - j)]));
                if (min_gap < 1e-4 * (scale + std::abs(ev))) {
                    ++st.degenerate_skipped;
                    continue;
                }
                const double expanded = spectra::delta_expansion(t, pair, m);
                ++st.expansion_checked;
                const double err = std::abs(expanded - pair.last_coord) /
                                   std::max({std::abs(pair.last_coord), 1e-30});
                st.worst_expansion = std::max(st.worst_expansion, err);
                if (err > tol_exp) ++st.expansion_failed;

                const double bound = spectra::F_bound(t, ev, m);
                ++st.bound_checked;
                if (!(std::abs(pair.last_coord) <= bound * (1.0 + 1e-12) + 1e-300)) ++st.bound_violations;
            }

            // residual identity against the brute-force band action
            const double lambda = ev + shift(rng);
            spectra::Truncation t_split = t;
            if (prm.inject_fault) t_split.edge *= 1.5;  // negative control
            const auto split = spectra::residual_split(t_split, pair, lambda);
            double brute = 0.0;
            for (long k = 1; k <= N + 1; ++k) {
                double row = 0.0;
                if (k <= N) row += (t.diag[static_cast<std::size_t>(k - 1)] - lambda) *
                                   pair.vector[static_cast<std::size_t>(k - 1)];
                if (k >= 2 && k - 1 <= N - 1)
                    row += t.offdiag[static_cast<std::size_t>(k - 2)] * pair.vector[static_cast<std::size_t>(k - 2)];
                if (k == N + 1) row += t.edge * pair.vector[static_cast<std::size_t>(N - 1)];
                if (k <= N - 1) row += t.offdiag[static_cast<std::size_t>(k - 1)] * pair.vector[static_cast<std::size_t>(k)];
                brute += row * row;
            }
            ++st.residual_checked;
            const double err = detail::rel_err(split.total, brute);
            st.worst_residual = std::max(st.worst_residual, err);
            if (err > tol_res) ++st.residual_failed;
        }
    }
    return st;
}

}  // namespace detail

inline SuiteResult expansion_suite(const Params& prm) {
    detail::Timer timer;
    const auto st = detail::eigen_sweep(prm);
    SuiteResult r{"last-coordinate expansion identity", st.expansion_failed == 0, ""};
    std::ostringstream os;
    os << st.expansion_checked << " expansions, worst rel err " << st.worst_expansion << ", "
       << st.degenerate_skipped << " degenerate pivots skipped";
    if (st.expansion_failed) os << ", " << st.expansion_failed << " FAILED";
    r.detail = os.str();
    return detail::finish(std::move(r), timer);
}

inline SuiteResult bound_suite(const Params& prm) {
    detail::Timer timer;
    const auto st = detail::eigen_sweep(prm);
    SuiteResult r{"last-coordinate bound", st.bound_violations == 0, ""};
    r.detail = std::to_string(st.bound_checked) + " bound checks, " +
               std::to_string(st.bound_violations) + " violations";
    return detail::finish(std::move(r), timer);
}

inline SuiteResult residual_suite(const Params& prm) {
    detail::Timer timer;
    const auto st = detail::eigen_sweep(prm);
    SuiteResult r{"residual split identity", st.residual_failed == 0, ""};
    std::ostringstream os;
    os << st.residual_checked << " residual comparisons, worst rel err " << st.worst_residual;
    if (st.residual_failed) os << ", " << st.residual_failed << " FAILED (residual split != band action)";
    r.detail = os.str();
    return detail::finish(std::move(r), timer);
}

// ---------------------------------------------------------------------------
// zero/eigenvalue duality + interlacing
// ---------------------------------------------------------------------------

inline SuiteResult duality_suite(const Params& prm) {
    detail::Timer timer;
    SuiteResult r{"zero/eigenvalue duality and interlacing", true, ""};
    std::mt19937_64 rng(prm.seed + 2);
    std::ostringstream why;
    long zero_checks = 0, interlace_checks = 0;
    for (int s = 0; s < prm.duality_specs; ++s) {
        auto [ra, rb] = detail::random_power_rules(rng, 3);
        const seq::CoefficientSpec spec(std::move(ra), std::move(rb));

        // strict interlacing along the whole truncation chain
        std::vector<double> prev = spectra::eigenvalues(spectra::truncate(spec, 1), 0.0);
        for (long N = 2; N <= prm.duality_N; ++N) {
            const auto cur = spectra::eigenvalues(spectra::truncate(spec, N), 0.0);
            for (std::size_t k = 0; k < prev.size(); ++k) {
                ++interlace_checks;
                if (!(cur[k] < prev[k] && prev[k] < cur[k + 1])) {
                    r.pass = false;
                    why << "interlacing broken at N=" << N << " spec#" << s << "; ";
                }
            }
            prev = cur;
        }

        // zeros of p_{N+1} located independently by sign-change bisection
        for (long N : {5L, 10L, 20L, 40L, 70L, prm.duality_N}) {
            if (N > prm.duality_N) continue;
            const spectra::Truncation t = spectra::truncate(spec, N);
            const auto evs = spectra::eigenvalues(t, 0.0);
            const auto [glo, ghi] = spectra::gershgorin(t);
            for (std::size_t k = 0; k < evs.size(); ++k) {
                double lo = k == 0 ? glo : 0.5 * (evs[k - 1] + evs[k]);
                double hi = k + 1 == evs.size() ? ghi : 0.5 * (evs[k] + evs[k + 1]);
                int slo = orthopoly::p_next_signlog(spec, N, lo).first;
                int shi = orthopoly::p_next_signlog(spec, N, hi).first;
                ++zero_checks;
                if (slo == shi) {
                    r.pass = false;
                    why << "no sign change around eigenvalue " << k + 1 << " (N=" << N << "); ";
                    continue;
                }
                while (hi - lo > 1e-10 * std::max(1.0, std::abs(lo) + std::abs(hi))) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    const int sm = orthopoly::p_next_signlog(spec, N, mid).first;
                    if (sm == slo)
                        lo = mid;
                    else
                        hi = mid;
                }
                const double zero = 0.5 * (lo + hi);
                if (std::abs(zero - evs[k]) > 1e-8 * std::max(1.0, std::abs(evs[k])) * prm.tol_scale) {
                    r.pass = false;
                    why << "zero/eigenvalue mismatch " << std::abs(zero - evs[k]) << " (N=" << N << "); ";
                }
            }
        }
    }
    if (r.pass)
        r.detail = std::to_string(zero_checks) + " zero matches, " + std::to_string(interlace_checks) +
                   " interlacing checks";
    else
        r.detail = why.str();
    return detail::finish(std::move(r), timer);
}

// ---------------------------------------------------------------------------
// Christoffel-Darboux identities
// ---------------------------------------------------------------------------

inline SuiteResult cd_suite(const Params& prm) {
    detail::Timer timer;
    SuiteResult r{"Christoffel-Darboux identities", true, ""};
    std::mt19937_64 rng(prm.seed + 3);
    std::ostringstream why;
    long checks = 0, failures = 0;
    for (int s = 0; s < prm.cd_specs; ++s) {
        auto [ra, rb] = detail::random_power_rules(rng, 3);
        const seq::CoefficientSpec spec(std::move(ra), std::move(rb));
        for (long n = 1; n <= prm.cd_n; ++n) {
            ++checks;
            const auto cd = orthopoly::cd_check(spec, n);
            const bool ok0 = orthopoly::cd0_check(spec, n);
            const bool ok = prm.tol_scale == 0.0 ? false : cd.ok && ok0;
            if (!ok) {
                if (++failures <= 3) why << "spec#" << s << " n=" << n << " lhs=" << cd.lhs << " rhs=" << cd.rhs << "; ";
            }
        }
        const auto sums = orthopoly::sumsq_vi(spec, std::min<long>(prm.cd_n, 400));
        if (sums.partial.front() != 1.0) {
            ++failures;
            why << "first partial sum != 1; ";
        }
        for (std::size_t i = 1; i < sums.partial.size(); ++i)
            if (sums.partial[i] < sums.partial[i - 1]) {
                ++failures;
                why << "partial sums not monotone; ";
                break;
            }
    }
    if (failures) {
        r.pass = false;
        why << failures << "/" << checks << " failed";
        r.detail = why.str();
    } else {
        r.detail = std::to_string(checks) + " identity checks";
    }
    return detail::finish(std::move(r), timer);
}

// ---------------------------------------------------------------------------
// approximant-resolvent agreement
// ---------------------------------------------------------------------------

inline SuiteResult cfrac_suite(const Params& prm) {
    detail::Timer timer;
    SuiteResult r{"approximant/resolvent agreement", true, ""};
    std::mt19937_64 rng(prm.seed + 4);
    std::uniform_real_distribution<double> re(-3.0, 3.0);
    std::uniform_real_distribution<double> im(0.5, 3.0);
    std::uniform_int_distribution<int> coin(0, 1);
    std::ostringstream why;
    long checks = 0, failures = 0;
    double worst = 0.0;
    const double tol = 1e-10 * prm.tol_scale;
    for (int s = 0; s < prm.cfrac_specs; ++s) {
        auto [ra, rb] = detail::random_power_rules(rng, 3);
        const seq::CoefficientSpec spec(std::move(ra), std::move(rb));
        for (int l = 0; l < prm.cfrac_lambdas; ++l) {
            const std::complex<double> lambda{re(rng), (coin(rng) ? 1.0 : -1.0) * im(rng)};
            for (long N : {3L, 10L, 50L, 127L, prm.cfrac_N}) {
                if (N > prm.cfrac_N) continue;
                const auto ap = cfrac::approximant(spec, N, lambda);
                const auto rv = cfrac::resolvent_11(spectra::truncate(spec, N), lambda);
                ++checks;
                if (ap.pole || rv.pole) {
                    ++failures;
                    why << "unexpected pole off the real axis; ";
                    continue;
                }
                const double err = std::abs(ap.value - rv.value) / std::max(1e-300, std::abs(rv.value));
                worst = std::max(worst, err);
                if (err > tol) {
                    if (++failures <= 3) why << "spec#" << s << " N=" << N << " err=" << err << "; ";
                }
            }
        }
    }
    if (failures) {
        r.pass = false;
        why << failures << "/" << checks << " failed";
        r.detail = why.str();
    } else {
        std::ostringstream os;
        os << checks << " comparisons, worst rel dev " << worst;
        r.detail = os.str();
    }
    return detail::finish(std::move(r), timer);
}

inline std::vector<SuiteResult> run_all(const Params& prm) {
    std::vector<SuiteResult> out;
    out.push_back(multiindex_suite());
    out.push_back(formula_suite(prm));
    out.push_back(expansion_suite(prm));
    out.push_back(bound_suite(prm));
    out.push_back(residual_suite(prm));
    out.push_back(duality_suite(prm));
    out.push_back(cd_suite(prm));
    out.push_back(cfrac_suite(prm));
    return out;
}

}  // namespace jacobi::verify
