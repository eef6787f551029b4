#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jacobi/cfrac.hpp"
#include "jacobi/conditions.hpp"
#include "jacobi/orthopoly.hpp"
#include "jacobi/spectra.hpp"

namespace jacobi::report {

using Json = nlohmann::json;

/// Full-precision, locale-independent number formatting.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Writes the whole file in one shot: content lands under a temporary name
/// first and is renamed into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp.string());
        f << content;
        if (!f.good()) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// criteria report
// ---------------------------------------------------------------------------

inline Json verdict_json(const conditions::Verdict& v) {
    Json j;
    j["criterion"] = v.criterion;
    if (v.m) j["m"] = *v.m;
    j["name"] = v.display_name();
    j["outcome"] = conditions::to_string(v.outcome);
    j["mode"] = conditions::to_string(v.mode);
    j["evidence"] = v.evidence;
    return j;
}

inline Json criteria_json(const conditions::BatteryResult& battery, const Json& operator_doc) {
    Json j;
    j["operator"] = operator_doc;
    j["conclusion"] = battery.conclusion();
    j["lambda_equals_sigma"] = battery.lambda_equals_sigma;
    j["via"] = battery.via;
    Json arr = Json::array();
    for (const auto& v : battery.verdicts) arr.push_back(verdict_json(v));
    j["verdicts"] = std::move(arr);
    return j;
}

inline std::string criteria_table(const conditions::BatteryResult& battery) {
    std::ostringstream os;
    os << "criterion      outcome        mode      note\n";
    os << "-------------- -------------- --------- ----------------------------\n";
    for (const auto& v : battery.verdicts) {
        std::string note;
        if (v.evidence.contains("worst_exponent"))
            note = "exponent " + v.evidence["worst_exponent"].get<std::string>();
        else if (v.evidence.contains("tie_constant"))
            note = "limit constant " + num(v.evidence["tie_constant"].get<double>());
        else if (v.evidence.contains("note"))
            note = v.evidence["note"].get<std::string>();
        os << v.display_name();
        for (std::size_t i = v.display_name().size(); i < 15; ++i) os << ' ';
        const std::string oc = conditions::to_string(v.outcome);
        os << oc;
        for (std::size_t i = oc.size(); i < 15; ++i) os << ' ';
        const std::string md = conditions::to_string(v.mode);
        os << md;
        for (std::size_t i = md.size(); i < 10; ++i) os << ' ';
        os << note << "\n";
    }
    os << "\nconclusion: " << battery.conclusion();
    if (battery.lambda_equals_sigma) os << " (truncation limit points fill the spectrum)";
    os << "\n";
    if (!battery.via.empty()) {
        os << "via:";
        for (const auto& s : battery.via) os << ' ' << s;
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// spectrum / limit-point reports
// ---------------------------------------------------------------------------

/// CSV rows (N, index, lambda, delta_N, a_N_delta_N, log10_a_N_delta_N) for
/// every in-window eigenvalue of every requested truncation.
inline std::string spectrum_csv(const seq::CoefficientSpec& spec, const std::vector<long>& N_list,
                                double lo, double hi, double eig_tol) {
    std::ostringstream os;
    os << "N,index,lambda,delta_N,a_N_delta_N,log10_a_N_delta_N\n";
    for (long N : N_list) {
        const spectra::Truncation t = spectra::truncate(spec, N);
        const auto evs = spectra::eigenvalues_in(t, lo, hi, eig_tol);
        const double log10_aN = spec.log_a(N) / std::log(10.0);
        long idx = 1;
        for (double ev : evs) {
            const spectra::LastCoord lc = spectra::last_coord_magnitude(t, ev);
            const double lg = log10_aN + lc.log10_abs;
            os << N << ',' << idx++ << ',' << num(ev) << ',' << num(lc.value) << ','
               << num(lc.sign * std::pow(10.0, lg)) << ',' << num(lg) << "\n";
        }
    }
    return os.str();
}

inline Json spectrum_json(const seq::CoefficientSpec& spec, const std::vector<long>& N_list, double lo,
                          double hi, double eig_tol) {
    Json out;
    out["window"] = Json::array({lo, hi});
    Json per_n = Json::array();
    for (long N : N_list) {
        const spectra::Truncation t = spectra::truncate(spec, N);
        const auto evs = spectra::eigenvalues_in(t, lo, hi, eig_tol);
        Json row;
        row["N"] = N;
        row["interlaces_next"] = spectra::interlacing_check(spec, N);
        row["eigenvalues"] = evs;
        per_n.push_back(std::move(row));
    }
    out["truncations"] = std::move(per_n);
    return out;
}

inline std::string limits_csv(const spectra::LimitPointReport& rep) {
    std::ostringstream os;
    os << "candidate,location,spread,N,lambda,a_N_delta_N,log10_a_N_delta_N\n";
    long ci = 0;
    for (const auto& c : rep.candidates) {
        for (std::size_t i = 0; i < c.support.size(); ++i) {
            os << ci << ',' << num(c.location) << ',' << num(c.spread) << ',' << c.support[i] << ','
               << num(c.lambda_chain[i]) << ',' << num(c.gencond_value[i]) << ','
               << num(c.gencond_log10[i]) << "\n";
        }
        ++ci;
    }
    return os.str();
}

inline Json limits_json(const spectra::LimitPointReport& rep) {
    Json out;
    out["window"] = Json::array({rep.lo, rep.hi});
    out["cluster_tol"] = rep.cluster_tol;
    Json raw = Json::array();
    for (const auto& [N, evs] : rep.eigenvalues_by_N) raw.push_back(Json{{"N", N}, {"eigenvalues", evs}});
    out["raw"] = std::move(raw);
    Json cands = Json::array();
    for (const auto& c : rep.candidates) {
        cands.push_back(Json{{"location", c.location},
                             {"spread", c.spread},
                             {"support", c.support},
                             {"lambda_chain", c.lambda_chain},
                             {"gencond_value", c.gencond_value},
                             {"gencond_log10", c.gencond_log10}});
    }
    out["candidates"] = std::move(cands);
    return out;
}

// ---------------------------------------------------------------------------
// continued-fraction reports
// ---------------------------------------------------------------------------

inline std::string cfrac_csv(const std::vector<cfrac::CFEvaluation>& evals) {
    std::ostringstream os;
    os << "re_lambda,im_lambda,N,re_approx,im_approx,deviation\n";
    for (const auto& ev : evals) {
        for (std::size_t i = 0; i < ev.approximants.size(); ++i) {
            const double dev = i + 1 < ev.approximants.size()
                                   ? std::abs(ev.approximants[i + 1] - ev.approximants[i])
                                   : 0.0;
            os << num(ev.lambda.real()) << ',' << num(ev.lambda.imag()) << ',' << (i + 1) << ','
               << num(ev.approximants[i].real()) << ',' << num(ev.approximants[i].imag()) << ','
               << num(dev) << "\n";
        }
    }
    return os.str();
}

inline Json cfrac_json(const std::vector<cfrac::CFEvaluation>& evals) {
    Json arr = Json::array();
    for (const auto& ev : evals) {
        Json j;
        j["lambda"] = Json::array({ev.lambda.real(), ev.lambda.imag()});
        j["converged"] = ev.converged;
        j["tail_dev"] = ev.tail_dev;
        j["pole_suspect"] = ev.pole_suspect;
        if (ev.limit_estimate)
            j["limit"] = Json::array({ev.limit_estimate->real(), ev.limit_estimate->imag()});
        if (ev.rate) j["rate"] = *ev.rate;
        double worst_match = 0.0;
        for (double m : ev.resolvent_match)
            if (std::isfinite(m)) worst_match = std::max(worst_match, m);
        j["max_resolvent_deviation"] = worst_match;
        arr.push_back(std::move(j));
    }
    return Json{{"scan", std::move(arr)}};
}

// ---------------------------------------------------------------------------
// orthogonal-polynomial sums
// ---------------------------------------------------------------------------

inline std::string sumsq_csv(const seq::CoefficientSpec& spec, long n_max) {
    const orthopoly::SumSq s = orthopoly::sumsq_vi(spec, n_max);
    std::ostringstream os;
    os << "n,v_abs2,partial_sum,log10_partial_sum\n";
    for (std::size_t i = 0; i < s.partial.size(); ++i)
        os << (i + 1) << ',' << num(s.value_sq[i]) << ',' << num(s.partial[i]) << ','
           << num(s.log10_partial[i]) << "\n";
    return os.str();
}

}  // namespace jacobi::report
