#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace jacobi::multiindex {

/// The four families of paired index walks (j|k). Each element is built from
/// m binary branch choices starting at j_1 = 0: at step s either
///   k_s = j_s     and j_{s+1} = j_s - 1,   or
///   k_s = j_s + 1 and j_{s+1} = j_s + 1.
/// Hatted variants keep the final walk position j_{m+1} as part of the tuple;
/// plus variants restrict to j_s >= 0, k_s >= 1.
enum class Variant { I, IHat, IPlus, IHatPlus };

inline constexpr int kMaxOrder = 24;  // |I_m| = 2^m; evaluation cost is exponential in m

inline bool hatted(Variant v) { return v == Variant::IHat || v == Variant::IHatPlus; }
inline bool positive(Variant v) { return v == Variant::IPlus || v == Variant::IHatPlus; }

struct Pair {
    std::vector<long> j;  // length m (unhatted) or m+1 (hatted), paper's j_1..j_{m(+1)}
    std::vector<long> k;  // length m
    Variant variant = Variant::I;

    int order() const { return static_cast<int>(k.size()); }

    friend bool operator==(const Pair& x, const Pair& y) = default;
    friend auto operator<=>(const Pair& x, const Pair& y) {
        if (auto c = x.j <=> y.j; c != 0) return c;
        return x.k <=> y.k;
    }
};

namespace detail {
inline void check_order(int m) {
    if (m < 1 || m > kMaxOrder)
        throw std::invalid_argument("multi-index order must be in [1, " + std::to_string(kMaxOrder) +
                                    "], got " + std::to_string(m));
}
}  // namespace detail

/// View of one walk handed to for_each callbacks; j has m+1 entries so j_end
/// (= j_{m+1}) is always available, k has m entries.
struct Walk {
    const long* j;
    const long* k;
    int m;
    long j_end;
};

/// Depth-first traversal of all walks of a variant without materializing the
/// set. The callback gets each walk once, in branch order (A before B).
template <class F>
void for_each(Variant v, int m, F&& f) {
    detail::check_order(m);
    const bool plus = positive(v);
    std::vector<long> j(static_cast<std::size_t>(m) + 1), k(static_cast<std::size_t>(m));
    j[0] = 0;
    auto rec = [&](auto&& self, int s) -> void {
        if (s == m) {
            f(Walk{j.data(), k.data(), m, j[static_cast<std::size_t>(m)]});
            return;
        }
        const long js = j[static_cast<std::size_t>(s)];
        if (!plus || js >= 1) {  // branch A: k_s = j_s, step down
            k[static_cast<std::size_t>(s)] = js;
            j[static_cast<std::size_t>(s) + 1] = js - 1;
            self(self, s + 1);
        }
        k[static_cast<std::size_t>(s)] = js + 1;  // branch B: k_s = j_s + 1, step up
        j[static_cast<std::size_t>(s) + 1] = js + 1;
        self(self, s + 1);
    };
    rec(rec, 0);
}

/// All elements of the requested set, sorted lexicographically by (j, k).
inline std::vector<Pair> generate(Variant v, int m) {
    std::vector<Pair> out;
    for_each(v, m, [&](const Walk& w) {
        Pair p;
        p.variant = v;
        p.j.assign(w.j, w.j + (hatted(v) ? w.m + 1 : w.m));
        p.k.assign(w.k, w.k + w.m);
        out.push_back(std::move(p));
    });
    std::sort(out.begin(), out.end());
    return out;
}

/// |set| via a closed recursion on walk-position counts (no materialization,
/// independent of the generator).
inline std::uint64_t cardinality(Variant v, int m) {
    detail::check_order(m);
    if (!positive(v)) return std::uint64_t{1} << m;
    std::map<long, std::uint64_t> at{{0, 1}};
    for (int s = 0; s < m; ++s) {
        std::map<long, std::uint64_t> next;
        for (const auto& [pos, cnt] : at) {
            if (pos >= 1) next[pos - 1] += cnt;  // branch A needs k_s = j_s >= 1
            next[pos + 1] += cnt;                // branch B always allowed
        }
        at = std::move(next);
    }
    std::uint64_t total = 0;
    for (const auto& [pos, cnt] : at) total += cnt;
    return total;
}

/// Element-wise constraint verification, deliberately written as a separate
/// code path from the generator: replays the branch relations on the stored
/// tuples instead of regenerating them.
inline bool check_pair(const Pair& p) {
    const int m = p.order();
    if (m < 1) return false;
    const std::size_t jlen = hatted(p.variant) ? static_cast<std::size_t>(m) + 1 : static_cast<std::size_t>(m);
    if (p.j.size() != jlen || p.k.size() != static_cast<std::size_t>(m)) return false;
    if (p.j[0] != 0) return false;
    for (int s = 0; s < m; ++s) {
        const long js = p.j[static_cast<std::size_t>(s)];
        const long ks = p.k[static_cast<std::size_t>(s)];
        const bool branch_a = (ks == js);
        const bool branch_b = (ks == js + 1);
        if (!branch_a && !branch_b) return false;
        if (s + 1 < static_cast<int>(p.j.size())) {
            const long jn = p.j[static_cast<std::size_t>(s) + 1];
            if (branch_a && jn != js - 1) return false;
            if (branch_b && jn != js + 1) return false;
        }
    }
    if (positive(p.variant)) {
        for (long js : p.j)
            if (js < 0) return false;
        for (long ks : p.k)
            if (ks < 1) return false;
    }
    return true;
}

/// "(j_1,...,j_m | k_1,...,k_m)" in the conventional notation.
inline std::string to_string(const Pair& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.j.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p.j[i]);
    }
    s += "|";
    for (std::size_t i = 0; i < p.k.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p.k[i]);
    }
    s += ")";
    return s;
}

}  // namespace jacobi::multiindex
