#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "jacobi/coeffseq.hpp"
#include "jacobi/conditions.hpp"
#include "jacobi/multiindex.hpp"
#include "jacobi/rational.hpp"

namespace jacobi::cli {

using Json = nlohmann::json;

/// Configuration/usage problems; the CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// coefficient-spec documents
// ---------------------------------------------------------------------------

struct SpecDoc {
    seq::SeqRule a;
    seq::SeqRule b;
    Json source;  // normalized document, kept for report provenance
};

namespace detail {

inline seq::Branch parse_branch(const Json& j, bool allow_sign) {
    seq::Branch br;
    if (!j.contains("constant") || !j.contains("exponent_num"))
        throw ConfigError("branch needs 'constant' and 'exponent_num'");
    br.term.constant = j.at("constant").get<double>();
    const std::int64_t num = j.at("exponent_num").get<std::int64_t>();
    const std::int64_t den = j.value("exponent_den", std::int64_t{1});
    if (den <= 0) throw ConfigError("exponent_den must be positive");
    br.term.exponent = Rational{num, den};
    br.sign = j.value("sign", 1);
    if (!allow_sign && br.sign != 1) throw ConfigError("a-branches must have sign +1");
    return br;
}

inline Json branch_json(long residue, const seq::Branch& br) {
    return Json{{"residue", residue},
                {"constant", br.term.constant},
                {"exponent_num", br.term.exponent.numerator()},
                {"exponent_den", br.term.exponent.denominator()},
                {"sign", br.sign}};
}

}  // namespace detail

/// Parses one sequence rule: { "modulus": q, "branches": [...],
/// "override": {...}?, "recursive": {"seed": v}? }.
inline seq::SeqRule parse_seq_rule(const Json& j, char which) {
    const bool is_b = which == 'b';
    seq::SeqRule r;
    r.modulus = j.value("modulus", 1L);
    if (r.modulus < 1) throw ConfigError("modulus must be >= 1");
    if (!j.contains("branches") || !j.at("branches").is_array())
        throw ConfigError(std::string("sequence '") + which + "' needs a 'branches' array");
    r.branches.assign(static_cast<std::size_t>(r.modulus), seq::Branch{});
    std::vector<bool> seen(static_cast<std::size_t>(r.modulus), false);
    for (const auto& bj : j.at("branches")) {
        const long residue = bj.value("residue", 0L);
        if (residue < 0 || residue >= r.modulus) throw ConfigError("branch residue out of range");
        if (seen[static_cast<std::size_t>(residue)]) throw ConfigError("duplicate branch residue");
        seen[static_cast<std::size_t>(residue)] = true;
        r.branches[static_cast<std::size_t>(residue)] = detail::parse_branch(bj, is_b);
    }
    for (bool s : seen)
        if (!s) throw ConfigError("every residue class needs exactly one branch");
    if (j.contains("override")) {
        const Json& oj = j.at("override");
        seq::Override ov;
        const std::string kind = oj.value("kind", "");
        if (kind == "list") {
            ov.kind = seq::Override::Kind::List;
            for (const auto& e : oj.value("entries", Json::array()))
                ov.entries.emplace_back(e.at(0).get<long>(), e.at(1).get<double>());
        } else if (kind == "squares") {
            ov.kind = seq::Override::Kind::Squares;
            ov.base = oj.value("base", 0.5);
        } else if (kind == "residue") {
            ov.kind = seq::Override::Kind::Residue;
            ov.modulus = oj.value("modulus", 1L);
            ov.residue = oj.value("residue", 0L);
            ov.branch = detail::parse_branch(oj, is_b);
        } else {
            throw ConfigError("override kind must be 'list', 'squares' or 'residue'");
        }
        r.override_rule = std::move(ov);
    }
    if (j.contains("recursive")) {
        r.recursive = true;
        r.seed = j.at("recursive").value("seed", 1.0);
    }
    return r;
}

inline Json seq_rule_json(const seq::SeqRule& r) {
    Json out;
    out["modulus"] = r.modulus;
    Json branches = Json::array();
    for (long c = 0; c < r.modulus; ++c)
        branches.push_back(detail::branch_json(c, r.branches[static_cast<std::size_t>(c)]));
    out["branches"] = std::move(branches);
    if (r.override_rule) {
        const seq::Override& ov = *r.override_rule;
        Json oj;
        switch (ov.kind) {
            case seq::Override::Kind::List: {
                oj["kind"] = "list";
                Json entries = Json::array();
                for (const auto& [idx, val] : ov.entries) entries.push_back(Json::array({idx, val}));
                oj["entries"] = std::move(entries);
                break;
            }
            case seq::Override::Kind::Squares:
                oj["kind"] = "squares";
                oj["base"] = ov.base;
                break;
            case seq::Override::Kind::Residue:
                oj["kind"] = "residue";
                oj["modulus"] = ov.modulus;
                oj["residue"] = ov.residue;
                oj["constant"] = ov.branch.term.constant;
                oj["exponent_num"] = ov.branch.term.exponent.numerator();
                oj["exponent_den"] = ov.branch.term.exponent.denominator();
                oj["sign"] = ov.branch.sign;
                break;
        }
        out["override"] = std::move(oj);
    }
    if (r.recursive) out["recursive"] = Json{{"seed", r.seed}};
    return out;
}

inline SpecDoc parse_spec_doc(const Json& j) {
    if (!j.contains("a") || !j.contains("b"))
        throw ConfigError("operator document needs keys 'a' and 'b'");
    SpecDoc doc;
    doc.a = parse_seq_rule(j.at("a"), 'a');
    doc.b = parse_seq_rule(j.at("b"), 'b');
    doc.source = Json{{"a", seq_rule_json(doc.a)}, {"b", seq_rule_json(doc.b)}};
    return doc;
}

inline std::shared_ptr<const seq::CoefficientSpec> realize(const SpecDoc& doc) {
    try {
        return std::make_shared<const seq::CoefficientSpec>(doc.a, doc.b);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid operator document: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// built-in coefficient families
// ---------------------------------------------------------------------------

using ParamMap = std::map<std::string, std::string>;

namespace detail {

inline Rational param_rational(const ParamMap& p, const std::string& key, Rational def) {
    auto it = p.find(key);
    if (it == p.end()) return def;
    try {
        return parse_rational(it->second);
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + key + "' must be a rational number, got '" + it->second + "'");
    }
}

inline long param_long(const ParamMap& p, const std::string& key, long def) {
    auto it = p.find(key);
    if (it == p.end()) return def;
    try {
        return std::stol(it->second);
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + key + "' must be an integer");
    }
}

inline double param_double(const ParamMap& p, const std::string& key, double def) {
    auto it = p.find(key);
    if (it == p.end()) return def;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + key + "' must be a number");
    }
}

inline seq::SeqRule one_branch(double c, Rational e, int sign = 1) {
    seq::SeqRule r;
    r.modulus = 1;
    r.branches = {seq::Branch{seq::PowerTerm{c, e}, sign}};
    return r;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
    return {"free", "ex-B1", "ex-B2", "ex-C1", "ex-C2", "ex-D", "ex-B-comp", "ex-C-comp"};
}

inline std::string preset_doc(const std::string& name) {
    if (name == "free") return "a_n = 1, b_n = 0 (free operator; spectrum [-2, 2])";
    if (name == "ex-B1") return "a_n = n^alpha, b_n = n^(alpha+1)  [alpha > 0]";
    if (name == "ex-B2") return "a_n = n^alpha (even n) / n^-alpha (odd n), b_n = n^(alpha-1)  [alpha > 1]";
    if (name == "ex-C1") return "a_n = n^alpha, b_n = n^(alpha+1)  [alpha > 0]";
    if (name == "ex-C2") return "a_n = n^(1/alpha), b_n = 1  [alpha >= 1]";
    if (name == "ex-D") return "a_n = a_(n-1) if q | n else n^(q+1) a_(n-1); b_n = n^q a_(n-1); a_1 = b_1 = 1  [q >= 2]";
    if (name == "ex-B-comp") return "a_n = n^alpha, b_n = n^beta (even n) / n^gamma (odd n)  [alpha,beta,gamma > 1]";
    if (name == "ex-C-comp") return "a_n = n^alpha, b_n = base^n on perfect squares, n^beta otherwise  [alpha,beta > 1, 0 < base < 1]";
    throw ConfigError("unknown preset '" + name + "'");
}

inline SpecDoc make_preset(const std::string& name, const ParamMap& params) {
    using detail::one_branch;
    SpecDoc doc;
    if (name == "free") {
        doc.a = one_branch(1.0, Rational{0});
        doc.b = seq::zero_rule();
    } else if (name == "ex-B1" || name == "ex-C1") {
        const Rational alpha = detail::param_rational(params, "alpha", name == "ex-B1" ? Rational{2} : Rational{3});
        if (!(alpha > Rational{0})) throw ConfigError(name + " needs alpha > 0");
        doc.a = one_branch(1.0, alpha);
        doc.b = one_branch(1.0, alpha + Rational{1});
    } else if (name == "ex-B2") {
        const Rational alpha = detail::param_rational(params, "alpha", Rational{3});
        if (!(alpha > Rational{1})) throw ConfigError("ex-B2 needs alpha > 1");
        seq::SeqRule a;
        a.modulus = 2;
        a.branches = {seq::Branch{seq::PowerTerm{1.0, alpha}, 1},
                      seq::Branch{seq::PowerTerm{1.0, -alpha}, 1}};
        doc.a = std::move(a);
        doc.b = one_branch(1.0, alpha - Rational{1});
    } else if (name == "ex-C2") {
        const Rational alpha = detail::param_rational(params, "alpha", Rational{4});
        if (!(alpha >= Rational{1})) throw ConfigError("ex-C2 needs alpha >= 1");
        doc.a = one_branch(1.0, Rational{1} / alpha);
        doc.b = one_branch(1.0, Rational{0});
    } else if (name == "ex-D") {
        const long q = detail::param_long(params, "q", 2);
        if (q < 2) throw ConfigError("ex-D needs q >= 2");
        seq::SeqRule a;
        a.modulus = q;
        a.recursive = true;
        a.seed = 1.0;
        a.branches.assign(static_cast<std::size_t>(q), seq::Branch{seq::PowerTerm{1.0, Rational{q + 1}}, 1});
        a.branches[0] = seq::Branch{seq::PowerTerm{1.0, Rational{0}}, 1};
        seq::SeqRule b;
        b.modulus = 1;
        b.recursive = true;
        b.seed = 1.0;
        b.branches = {seq::Branch{seq::PowerTerm{1.0, Rational{q}}, 1}};
        doc.a = std::move(a);
        doc.b = std::move(b);
    } else if (name == "ex-B-comp") {
        const Rational alpha = detail::param_rational(params, "alpha", Rational{3});
        const Rational beta = detail::param_rational(params, "beta", Rational{4});
        const Rational gamma = detail::param_rational(params, "gamma", Rational{5});
        if (!(alpha > Rational{1} && beta > Rational{1} && gamma > Rational{1}))
            throw ConfigError("ex-B-comp needs alpha, beta, gamma > 1");
        doc.a = one_branch(1.0, alpha);
        seq::SeqRule b;
        b.modulus = 2;
        b.branches = {seq::Branch{seq::PowerTerm{1.0, beta}, 1}, seq::Branch{seq::PowerTerm{1.0, gamma}, 1}};
        doc.b = std::move(b);
    } else if (name == "ex-C-comp") {
        const Rational alpha = detail::param_rational(params, "alpha", Rational{2});
        const Rational beta = detail::param_rational(params, "beta", Rational{3});
        const double base = detail::param_double(params, "b", 0.5);
        if (!(alpha > Rational{1} && beta > Rational{1})) throw ConfigError("ex-C-comp needs alpha, beta > 1");
        if (!(base > 0.0 && base < 1.0)) throw ConfigError("ex-C-comp needs 0 < b < 1");
        doc.a = one_branch(1.0, alpha);
        doc.b = one_branch(1.0, beta);
        seq::Override ov;
        ov.kind = seq::Override::Kind::Squares;
        ov.base = base;
        doc.b.override_rule = std::move(ov);
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    doc.source = Json{{"preset", name}, {"a", seq_rule_json(doc.a)}, {"b", seq_rule_json(doc.b)}};
    return doc;
}

// ---------------------------------------------------------------------------
// analysis configuration
// ---------------------------------------------------------------------------

struct LambdaGrid {
    double re_min = -5.0, re_max = 5.0;
    long re_steps = 11;
    double im_min = 0.5, im_max = 3.0;
    long im_steps = 6;

    std::vector<std::complex<double>> points() const {
        std::vector<std::complex<double>> out;
        for (long i = 0; i < re_steps; ++i) {
            const double re = re_steps == 1 ? re_min
                                            : re_min + (re_max - re_min) * static_cast<double>(i) /
                                                           static_cast<double>(re_steps - 1);
            for (long j = 0; j < im_steps; ++j) {
                const double im = im_steps == 1 ? im_min
                                                : im_min + (im_max - im_min) * static_cast<double>(j) /
                                                               static_cast<double>(im_steps - 1);
                out.emplace_back(re, im);
            }
        }
        return out;
    }
};

struct AnalysisConfig {
    SpecDoc doc;
    std::shared_ptr<const seq::CoefficientSpec> spec;
    int m_max = 6;
    conditions::NumericRange numeric_range{10, 2000, 10};
    std::vector<long> truncations{25, 50, 100};
    double window_lo = -10.0, window_hi = 10.0;
    double eig_tol = 1e-12;
    double cluster_tol = 1e-3;
    double cf_tail_tol = 1e-10;
    long cf_N_max = 200;
    LambdaGrid grid;
    std::string out_dir = ".";
    std::string format = "both";  // json | csv | both
    unsigned long seed = 20240101;
    int threads = 0;

    void validate() const {
        if (m_max < 1 || m_max > multiindex::kMaxOrder)
            throw ConfigError("m_max must be in [1, " + std::to_string(multiindex::kMaxOrder) + "]");
        if (!(eig_tol > 0.0) || !(cluster_tol > 0.0) || !(cf_tail_tol > 0.0))
            throw ConfigError("all tolerances must be positive");
        if (truncations.empty()) throw ConfigError("truncations list must be nonempty");
        for (std::size_t i = 1; i < truncations.size(); ++i)
            if (truncations[i] <= truncations[i - 1]) throw ConfigError("truncations must be increasing");
        if (truncations.front() < 1) throw ConfigError("truncations must be >= 1");
        if (!(window_lo < window_hi)) throw ConfigError("window must satisfy lo < hi");
        if (cf_N_max < 2) throw ConfigError("cfrac n_max must be >= 2");
        if (format != "json" && format != "csv" && format != "both")
            throw ConfigError("format must be json, csv or both");
    }
};

inline AnalysisConfig parse_config(const Json& j) {
    AnalysisConfig c;
    if (!j.contains("operator")) throw ConfigError("config needs an 'operator' document");
    c.doc = parse_spec_doc(j.at("operator"));
    c.spec = realize(c.doc);
    c.m_max = j.value("m_max", 6);
    if (j.contains("numeric_range")) {
        const Json& r = j.at("numeric_range");
        c.numeric_range.start = r.value("start", 10L);
        c.numeric_range.end = r.value("end", 2000L);
        c.numeric_range.stride = r.value("stride", 10L);
    }
    if (j.contains("truncations")) c.truncations = j.at("truncations").get<std::vector<long>>();
    if (j.contains("window")) {
        const Json& w = j.at("window");
        if (!w.is_array() || w.size() != 2) throw ConfigError("window must be [lo, hi]");
        c.window_lo = w.at(0).get<double>();
        c.window_hi = w.at(1).get<double>();
    }
    if (j.contains("tolerances")) {
        const Json& t = j.at("tolerances");
        c.eig_tol = t.value("eig_tol", 1e-12);
        c.cluster_tol = t.value("cluster_tol", 1e-3);
        c.cf_tail_tol = t.value("cf_tail_tol", 1e-10);
    }
    if (j.contains("cfrac")) {
        const Json& f = j.at("cfrac");
        c.cf_N_max = f.value("n_max", 200L);
        if (f.contains("grid")) {
            const Json& g = f.at("grid");
            c.grid.re_min = g.value("re_min", -5.0);
            c.grid.re_max = g.value("re_max", 5.0);
            c.grid.re_steps = g.value("re_steps", 11L);
            c.grid.im_min = g.value("im_min", 0.5);
            c.grid.im_max = g.value("im_max", 3.0);
            c.grid.im_steps = g.value("im_steps", 6L);
        }
    }
    if (j.contains("outputs")) {
        const Json& o = j.at("outputs");
        c.out_dir = o.value("dir", std::string("."));
        c.format = o.value("format", std::string("both"));
    }
    c.seed = j.value("seed", 20240101UL);
    c.threads = j.value("threads", 0);
    c.validate();
    return c;
}

}  // namespace jacobi::cli
