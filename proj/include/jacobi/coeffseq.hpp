#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jacobi/rational.hpp"

namespace jacobi::seq {

/// One power-law piece C * n^e with C > 0 and exact rational exponent e.
struct PowerTerm {
    double constant = 1.0;
    Rational exponent{0};

    double value(double n) const { return constant * std::pow(n, to_double(exponent)); }
    double log_value(double n) const { return std::log(constant) + to_double(exponent) * std::log(n); }
};

/// A signed power-law branch. sign == 0 encodes the identically-zero branch
/// (only meaningful for the diagonal sequence b).
struct Branch {
    PowerTerm term{};
    int sign = 1;

    double value(double n) const { return sign == 0 ? 0.0 : sign * term.value(n); }
};

/// Sparse exceptional values layered on top of the branch rules.
struct Override {
    enum class Kind { List, Squares, Residue };

    Kind kind = Kind::List;
    std::vector<std::pair<long, double>> entries;  // List: strictly increasing indices
    double base = 0.5;                             // Squares: value at n in {k^2} is base^n
    long modulus = 1;                              // Residue
    long residue = 0;
    Branch branch{};                               // Residue value rule

    static bool is_perfect_square(long n) {
        if (n < 1) return false;
        const long r = static_cast<long>(std::llround(std::sqrt(static_cast<double>(n))));
        for (long c = std::max(0L, r - 1); c <= r + 1; ++c)
            if (c * c == n) return true;
        return false;
    }

    bool applies_to(long n) const {
        switch (kind) {
            case Kind::List:
                return std::binary_search(entries.begin(), entries.end(), std::make_pair(n, 0.0),
                                          [](const auto& x, const auto& y) { return x.first < y.first; });
            case Kind::Squares:
                return is_perfect_square(n);
            case Kind::Residue:
                return n % modulus == residue;
        }
        return false;
    }

    std::optional<double> value_at(long n) const {
        if (!applies_to(n)) return std::nullopt;
        switch (kind) {
            case Kind::List: {
                auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(n, 0.0),
                                           [](const auto& x, const auto& y) { return x.first < y.first; });
                return it->second;
            }
            case Kind::Squares:
                return std::pow(base, static_cast<double>(n));
            case Kind::Residue:
                return branch.value(static_cast<double>(n));
        }
        return std::nullopt;
    }

    /// True when the gaps between consecutive override indices diverge, which
    /// is what the restricted-series argument for the Carleman-type criteria
    /// needs. Residue-class overrides have bounded gaps.
    bool gaps_diverge() const { return kind != Kind::Residue; }

    /// Distance from n to the override index set (0 when n is overridden).
    long distance_to(long n) const {
        switch (kind) {
            case Kind::List: {
                long best = std::numeric_limits<long>::max();
                for (const auto& [idx, val] : entries) best = std::min(best, std::abs(idx - n));
                return best;
            }
            case Kind::Squares: {
                const long r = static_cast<long>(std::floor(std::sqrt(static_cast<double>(std::max(1L, n)))));
                long best = std::numeric_limits<long>::max();
                for (long c = std::max(1L, r - 1); c <= r + 2; ++c) best = std::min(best, std::abs(c * c - n));
                return best;
            }
            case Kind::Residue: {
                const long r = ((n - residue) % modulus + modulus) % modulus;
                return std::min(r, modulus - r);
            }
        }
        return 0;
    }
};

/// Declarative rule for one coefficient sequence: per-residue-class power
/// branches, optional sparse overrides, and an optional recursive form in
/// which the branches act as per-step factors.
struct SeqRule {
    long modulus = 1;
    std::vector<Branch> branches;  // indexed by residue class of n
    std::optional<Override> override_rule;
    bool recursive = false;  // value(n) = branch(n) * base_value(n-1), value(1) = seed
    double seed = 1.0;

    const Branch& branch_for(long n) const { return branches[static_cast<std::size_t>(n % modulus)]; }
};

enum class Growth {
    PowerLike,  // asymptotic power law per residue class
    Diverges,   // grows faster than any power of n
    Decays,     // vanishes faster than any power of n
    Unknown,
};

struct SignedClassPower {
    int sign = 1;  // 0 encodes the identically-zero class
    double constant = 1.0;
    Rational exponent{0};
};

/// Per-residue-class asymptotic power form of a (signed) sequence.
struct PowerProfile {
    long modulus = 1;
    std::vector<SignedClassPower> cls;

    const SignedClassPower& at(long residue) const {
        return cls[static_cast<std::size_t>(((residue % modulus) + modulus) % modulus)];
    }
};

/// Power form of a nonnegative ratio; is_inf marks classes where the
/// denominator vanishes identically (ratio taken as +infinity).
struct ClassPower {
    bool is_inf = false;
    double constant = 1.0;
    Rational exponent{0};
};

/// Per-class power forms of gamma+_n = a_n/|b_n| and gamma-_n = a_{n-1}/|b_n|.
/// These exist for pure power specs and also for recursive specs (where the
/// shared recursive base cancels), and they are all the multi-index sums need.
struct RatioProfile {
    long modulus = 1;
    std::vector<ClassPower> gamma_plus;
    std::vector<ClassPower> gamma_minus;

    const ClassPower& gp(long residue) const {
        return gamma_plus[static_cast<std::size_t>(((residue % modulus) + modulus) % modulus)];
    }
    const ClassPower& gm(long residue) const {
        return gamma_minus[static_cast<std::size_t>(((residue % modulus) + modulus) % modulus)];
    }
};

namespace detail {
inline long lcm(long x, long y) { return std::lcm(x, y); }
}  // namespace detail

/// Immutable pair of coefficient sequences a_n > 0, b_n real defining a
/// symmetric tridiagonal operator. Evaluation is thread-safe; recursive
/// specs memoize their value chain (insert-once, mutex-guarded) and expose a
/// log-space path for values beyond double range.
class CoefficientSpec {
  public:
    CoefficientSpec(SeqRule a, SeqRule b) : a_(std::move(a)), b_(std::move(b)) { validate(); }

    // -- point evaluation ---------------------------------------------------

    /// a_n. Throws std::domain_error if the evaluated value is <= 0 or not
    /// finite (recursive chains overflow double range eventually).
    double a(long n) const {
        require_index(n);
        double v;
        if (a_.recursive) {
            v = recursive_value(n, /*for_b=*/false);
        } else if (auto ov = a_.override_rule ? a_.override_rule->value_at(n) : std::nullopt) {
            v = *ov;
        } else {
            v = a_.branch_for(n).value(static_cast<double>(n));
        }
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::domain_error("a_" + std::to_string(n) + " evaluated to " + std::to_string(v));
        return v;
    }

    /// b_n; may be zero or negative. Throws std::domain_error when not finite.
    double b(long n) const {
        require_index(n);
        double v;
        if (b_.recursive) {
            v = recursive_value(n, /*for_b=*/true);
        } else if (auto ov = b_.override_rule ? b_.override_rule->value_at(n) : std::nullopt) {
            v = *ov;
        } else {
            v = b_.branch_for(n).value(static_cast<double>(n));
        }
        if (!std::isfinite(v))
            throw std::domain_error("b_" + std::to_string(n) + " evaluated to a non-finite value");
        return v;
    }

    // -- log-space evaluation (never overflows for valid specs) -------------

    double log_a(long n) const {
        require_index(n);
        if (a_.recursive) return recursive_log(n);
        if (auto ov = a_.override_rule ? a_.override_rule->value_at(n) : std::nullopt) return std::log(*ov);
        return a_.branch_for(n).term.log_value(static_cast<double>(n));
    }

    /// log|b_n|; -infinity when b_n == 0.
    double log_abs_b(long n) const {
        require_index(n);
        if (b_.recursive) {
            const Branch& f = b_.branch_for(n);
            if (n == 1) return b_.seed == 0.0 ? -inf() : std::log(std::abs(b_.seed));
            if (f.sign == 0) return -inf();
            return f.term.log_value(static_cast<double>(n)) + log_a(n - 1);
        }
        if (auto ov = b_.override_rule ? b_.override_rule->value_at(n) : std::nullopt)
            return *ov == 0.0 ? -inf() : std::log(std::abs(*ov));
        const Branch& br = b_.branch_for(n);
        if (br.sign == 0) return -inf();
        return br.term.log_value(static_cast<double>(n));
    }

    int sign_b(long n) const {
        require_index(n);
        if (b_.recursive) {
            if (n == 1) return b_.seed > 0 ? 1 : b_.seed < 0 ? -1 : 0;
            return b_.branch_for(n).sign;
        }
        if (auto ov = b_.override_rule ? b_.override_rule->value_at(n) : std::nullopt)
            return *ov > 0 ? 1 : *ov < 0 ? -1 : 0;
        return b_.branch_for(n).sign;
    }

    // -- symbolic structure --------------------------------------------------

    /// Power-law exponent of the sequence restricted to a residue class, when
    /// the sequence is a pure power family on every class (overrides and
    /// non-telescoping recursions disable symbolic form globally).
    std::optional<Rational> asymptotic_exponent(char which, long residue) const {
        auto prof = power_profile(which);
        if (!prof) return std::nullopt;
        const auto& c = prof->at(residue);
        if (c.sign == 0) return std::nullopt;
        return c.exponent;
    }

    /// Per-class power form of |a_n| (sign +1) or b_n (signed); nullopt when
    /// overrides are present or a recursion does not reduce to a power law.
    std::optional<PowerProfile> power_profile(char which) const {
        const SeqRule& r = rule(which);
        if (r.override_rule) return std::nullopt;
        if (!r.recursive) {
            PowerProfile p;
            p.modulus = r.modulus;
            for (const auto& br : r.branches)
                p.cls.push_back({br.sign, br.term.constant, br.term.exponent});
            return p;
        }
        if (which == 'b') {
            // b_n = psi(n) * a_{n-1}: power form iff a has one.
            auto pa = power_profile('a');
            if (!pa) return std::nullopt;
            const long q = detail::lcm(pa->modulus, b_.modulus);
            PowerProfile p;
            p.modulus = q;
            for (long c = 0; c < q; ++c) {
                const Branch& f = b_.branches[static_cast<std::size_t>(c % b_.modulus)];
                const auto& ac = pa->at(c - 1);
                if (f.sign == 0 || ac.sign == 0) {
                    p.cls.push_back({0, 1.0, Rational{0}});
                } else {
                    p.cls.push_back({f.sign * ac.sign, f.term.constant * ac.constant,
                                     f.term.exponent + ac.exponent});
                }
            }
            return p;
        }
        // Recursive a telescopes to a power law only in the periodic case:
        // all factor exponents zero and factor constants multiplying to one
        // over a full period.
        bool all_zero = true;
        double period_product = 1.0;
        for (const auto& f : a_.branches) {
            if (f.term.exponent != Rational{0}) all_zero = false;
            period_product *= f.term.constant;
        }
        if (!all_zero || period_product != 1.0) return std::nullopt;
        const long q = a_.modulus;
        PowerProfile p;
        p.modulus = q;
        p.cls.resize(static_cast<std::size_t>(q));
        for (long n = q + 1; n <= 2 * q; ++n) {
            const double v = recursive_value(n, false);
            p.cls[static_cast<std::size_t>(n % q)] = {1, v, Rational{0}};
        }
        return p;
    }

    /// Growth classification of |a_n| or |b_n| against the scale of powers.
    Growth growth(char which) const {
        const SeqRule& r = rule(which);
        if (r.override_rule) return Growth::Unknown;
        if (!r.recursive) return Growth::PowerLike;
        if (which == 'b') {
            Growth ga = growth('a');
            return ga == Growth::Unknown ? Growth::Unknown : ga;  // psi(n) is a power factor
        }
        Rational drift{0};
        bool all_zero = true;
        double period_product = 1.0;
        for (const auto& f : a_.branches) {
            drift += f.term.exponent;
            if (f.term.exponent != Rational{0}) all_zero = false;
            period_product *= f.term.constant;
        }
        if (drift > Rational{0}) return Growth::Diverges;
        if (drift < Rational{0}) return Growth::Decays;
        if (!all_zero) return Growth::Unknown;  // zero-drift mixed exponents
        if (period_product > 1.0) return Growth::Diverges;
        if (period_product < 1.0) return Growth::Decays;
        return Growth::PowerLike;  // periodic
    }

    /// Whether |b_n| -> infinity, when decidable symbolically.
    std::optional<bool> b_diverges() const {
        switch (growth('b')) {
            case Growth::Diverges: return true;
            case Growth::Decays: return false;
            case Growth::Unknown: return std::nullopt;
            case Growth::PowerLike: break;
        }
        auto p = power_profile('b');
        if (!p) return std::nullopt;
        for (const auto& c : p->cls)
            if (c.sign == 0 || !(c.exponent > Rational{0})) return false;
        return true;
    }

    /// Whether a_n -> infinity (all classes must diverge).
    std::optional<bool> a_diverges() const {
        switch (growth('a')) {
            case Growth::Diverges: return true;
            case Growth::Decays: return false;
            case Growth::Unknown: return std::nullopt;
            case Growth::PowerLike: break;
        }
        auto p = power_profile('a');
        if (!p) return std::nullopt;
        for (const auto& c : p->cls)
            if (!(c.exponent > Rational{0})) return false;
        return true;
    }

    /// gamma+/gamma- power forms; see RatioProfile.
    std::optional<RatioProfile> ratio_profile() const {
        if (a_.override_rule || b_.override_rule) return std::nullopt;
        auto pa = power_profile('a');
        auto pb = power_profile('b');
        if (pa && pb) {
            const long q = detail::lcm(pa->modulus, pb->modulus);
            RatioProfile rp;
            rp.modulus = q;
            for (long c = 0; c < q; ++c) {
                rp.gamma_plus.push_back(ratio_entry(pa->at(c), pb->at(c)));
                rp.gamma_minus.push_back(ratio_entry(pa->at(c - 1), pb->at(c)));
            }
            return rp;
        }
        if (a_.recursive && b_.recursive) {
            // gamma+_n = phi(n)/|psi(n)|, gamma-_n = 1/|psi(n)|.
            const long q = detail::lcm(a_.modulus, b_.modulus);
            RatioProfile rp;
            rp.modulus = q;
            for (long c = 0; c < q; ++c) {
                const Branch& phi = a_.branches[static_cast<std::size_t>(c % a_.modulus)];
                const Branch& psi = b_.branches[static_cast<std::size_t>(c % b_.modulus)];
                if (psi.sign == 0) {
                    rp.gamma_plus.push_back({true, 1.0, Rational{0}});
                    rp.gamma_minus.push_back({true, 1.0, Rational{0}});
                } else {
                    rp.gamma_plus.push_back({false, phi.term.constant / psi.term.constant,
                                             phi.term.exponent - psi.term.exponent});
                    rp.gamma_minus.push_back({false, 1.0 / psi.term.constant, -psi.term.exponent});
                }
            }
            return rp;
        }
        return std::nullopt;
    }

    bool has_override(char which) const { return rule(which).override_rule.has_value(); }
    bool is_recursive(char which) const { return rule(which).recursive; }
    const std::optional<Override>& override_rule(char which) const { return rule(which).override_rule; }
    long modulus(char which) const { return rule(which).modulus; }
    long combined_modulus() const { return detail::lcm(a_.modulus, b_.modulus); }

    /// The same spec with all sparse overrides dropped (the power-law base the
    /// restricted-series arguments reason about).
    CoefficientSpec base_spec() const {
        SeqRule a2 = a_;
        SeqRule b2 = b_;
        a2.override_rule.reset();
        b2.override_rule.reset();
        return CoefficientSpec(std::move(a2), std::move(b2));
    }

  private:
    static double inf() { return std::numeric_limits<double>::infinity(); }

    static void require_index(long n) {
        if (n < 1) throw std::invalid_argument("sequence index must be >= 1, got " + std::to_string(n));
    }

    const SeqRule& rule(char which) const {
        if (which == 'a') return a_;
        if (which == 'b') return b_;
        throw std::invalid_argument("sequence selector must be 'a' or 'b'");
    }

    static ClassPower ratio_entry(const SignedClassPower& num, const SignedClassPower& den) {
        if (den.sign == 0) return {true, 1.0, Rational{0}};
        if (num.sign == 0) return {false, 0.0, Rational{0}};  // zero numerator class
        return {false, num.constant / den.constant, num.exponent - den.exponent};
    }

    void validate() const {
        for (const SeqRule* r : {&a_, &b_}) {
            if (r->modulus < 1 || r->modulus > 64)
                throw std::invalid_argument("modulus must be in [1, 64]");
            if (static_cast<long>(r->branches.size()) != r->modulus)
                throw std::invalid_argument("every residue class needs exactly one branch");
            if (r->override_rule && r->recursive)
                throw std::invalid_argument("a sequence cannot be both recursive and overridden");
            for (const auto& br : r->branches) {
                if (!(br.term.constant > 0.0) || !std::isfinite(br.term.constant))
                    throw std::invalid_argument("branch constants must be positive and finite");
            }
        }
        for (const auto& br : a_.branches)
            if (br.sign != 1) throw std::invalid_argument("a-branches must have sign +1");
        for (const auto& br : b_.branches)
            if (br.sign < -1 || br.sign > 1) throw std::invalid_argument("b-branch sign must be -1, 0 or +1");
        if (a_.recursive && !(a_.seed > 0.0))
            throw std::invalid_argument("recursive a needs a positive seed a_1");
        if (b_.recursive && !a_.recursive && !std::isfinite(b_.seed))
            throw std::invalid_argument("recursive b needs a finite seed b_1");
        for (const SeqRule* r : {&a_, &b_}) {
            if (!r->override_rule) continue;
            const Override& ov = *r->override_rule;
            if (ov.kind == Override::Kind::List) {
                long prev = 0;
                for (const auto& [idx, val] : ov.entries) {
                    if (idx <= prev) throw std::invalid_argument("override indices must be strictly increasing");
                    prev = idx;
                    if (r == &a_ && !(val > 0.0))
                        throw std::invalid_argument("a-override values must be positive");
                    if (!std::isfinite(val)) throw std::invalid_argument("override values must be finite");
                }
            } else if (ov.kind == Override::Kind::Squares) {
                if (!(ov.base > 0.0 && ov.base < 1.0))
                    throw std::invalid_argument("squares override base must lie in (0,1)");
            } else {
                if (ov.modulus < 1 || ov.residue < 0 || ov.residue >= ov.modulus)
                    throw std::invalid_argument("residue override needs 0 <= residue < modulus");
                if (r == &a_ && ov.branch.sign != 1)
                    throw std::invalid_argument("a-override branch must have sign +1");
            }
        }
    }

    // Recursive chains: a_n = phi(n) a_{n-1} with a_1 = seed, and
    // b_n = psi(n) a_{n-1} with b_1 = seed_b. Values are memoized as a plain
    // product chain so memoized and naively unrolled evaluation agree bit for
    // bit; the log chain accumulates log-factors for the overflow regime.
    void extend_chain(long n) const {
        std::lock_guard<std::mutex> lock(mu_);
        if (static_cast<long>(raw_a_.size()) >= n) return;
        if (raw_a_.empty()) {
            raw_a_.push_back(a_.seed);
            log_a_.push_back(std::log(a_.seed));
        }
        while (static_cast<long>(raw_a_.size()) < n) {
            const long k = static_cast<long>(raw_a_.size()) + 1;
            const Branch& f = a_.branch_for(k);
            raw_a_.push_back(raw_a_.back() * f.value(static_cast<double>(k)));
            log_a_.push_back(log_a_.back() + f.term.log_value(static_cast<double>(k)));
        }
    }

    double recursive_value(long n, bool for_b) const {
        if (!a_.recursive) {
            // b recursive over a power-law a.
            if (n == 1) return b_.seed;
            return b_.branch_for(n).value(static_cast<double>(n)) * a(n - 1);
        }
        if (for_b) {
            if (n == 1) return b_.seed;
            extend_chain(n - 1);
            return b_.branch_for(n).value(static_cast<double>(n)) * raw_a_[static_cast<std::size_t>(n - 2)];
        }
        extend_chain(n);
        return raw_a_[static_cast<std::size_t>(n - 1)];
    }

    double recursive_log(long n) const {
        if (!a_.recursive) return a_.branch_for(n).term.log_value(static_cast<double>(n));
        extend_chain(n);
        return log_a_[static_cast<std::size_t>(n - 1)];
    }

    SeqRule a_;
    SeqRule b_;
    mutable std::mutex mu_;
    mutable std::vector<double> raw_a_;
    mutable std::vector<double> log_a_;
};

// Convenience constructors used all over the test and preset code.

inline SeqRule power_rule(double constant, Rational exponent, int sign = 1) {
    SeqRule r;
    r.modulus = 1;
    r.branches = {Branch{PowerTerm{constant, exponent}, sign}};
    return r;
}

inline SeqRule zero_rule() {
    SeqRule r;
    r.modulus = 1;
    r.branches = {Branch{PowerTerm{1.0, Rational{0}}, 0}};
    return r;
}

inline CoefficientSpec power_spec(double ca, Rational ea, double cb, Rational eb, int sb = 1) {
    return CoefficientSpec(power_rule(ca, ea), power_rule(cb, eb, sb));
}

}  // namespace jacobi::seq
