#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "detkit/errors.hpp"
#include "detkit/evaluate.hpp"
#include "detkit/fusion.hpp"
#include "detkit/model.hpp"
#include "detkit/policy.hpp"
#include "detkit/rational.hpp"

namespace detkit::io {

using Json = nlohmann::ordered_json;

inline Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error(path + ": cannot open file");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        // nlohmann's message already carries line/column coordinates.
        throw input_error(path + ": " + e.what());
    }
}

inline void save_json(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw input_error(path + ": cannot open file for writing");
    out << j.dump(2) << '\n';
}

inline const Json& require(const Json& j, const char* key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key)) throw input_error(ctx + ": missing key \"" + key + "\"");
    return j.at(key);
}

// Exact values may be written as "a/b" / decimal strings or as JSON numbers;
// non-integer JSON numbers are read back through their shortest decimal
// round-trip so a literal like 0.2 means exactly 1/5.
inline Rational rational_from_json(const Json& j, const std::string& ctx) {
    try {
        if (j.is_string()) return parse_rational(j.get<std::string>());
        if (j.is_number_integer()) return Rational(j.get<long long>());
        if (j.is_number_unsigned()) return Rational(j.get<unsigned long long>());
        if (j.is_number_float()) return parse_rational(j.dump());
    } catch (const input_error& e) {
        throw input_error(ctx + ": " + e.what());
    }
    throw input_error(ctx + ": expected a number or a rational string");
}

inline double double_from_json(const Json& j, const std::string& ctx) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
    throw input_error(ctx + ": expected a number");
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

// A loaded model: exactly one of the finite / Gaussian branches is active.
struct ModelFile {
    bool finite = true;
    FiniteModel<Rational> fin;
    GaussianModel gauss;

    void set_prior(const Rational& p1) {
        if (p1 <= 0 || p1 >= 1) throw input_error("prior p1 must lie strictly between 0 and 1");
        fin.prior = {p1, Rational(1) - p1};
        gauss.prior = {to_double(p1), to_double(Rational(1) - p1)};
    }
};

inline ModelFile model_from_json(const Json& j, const std::string& ctx) {
    ModelFile mf;
    Rational p1(1, 2);
    if (j.contains("prior")) p1 = rational_from_json(require(j.at("prior"), "p1", ctx + ".prior"), ctx + ".prior.p1");

    if (j.contains("finite")) {
        const Json& f = j.at("finite");
        mf.finite = true;
        for (const auto& v : require(f, "alphabet", ctx + ".finite"))
            mf.fin.alphabet.push_back(v.get<std::int64_t>());
        for (const auto& v : require(f, "pmf1", ctx + ".finite"))
            mf.fin.pmf1.push_back(rational_from_json(v, ctx + ".finite.pmf1"));
        for (const auto& v : require(f, "pmf2", ctx + ".finite"))
            mf.fin.pmf2.push_back(rational_from_json(v, ctx + ".finite.pmf2"));
        mf.fin.prior = {p1, Rational(1) - p1};
        const ValidationReport rep = validate_model(mf.fin);
        if (!rep.ok) throw input_error(ctx + ": " + rep.violations.front());
    } else if (j.contains("gaussian")) {
        const Json& g = j.at("gaussian");
        mf.finite = false;
        mf.gauss.mean1 = double_from_json(require(g, "mean1", ctx + ".gaussian"), ctx + ".gaussian.mean1");
        mf.gauss.mean2 = double_from_json(require(g, "mean2", ctx + ".gaussian"), ctx + ".gaussian.mean2");
        mf.gauss.sigma = double_from_json(require(g, "sigma", ctx + ".gaussian"), ctx + ".gaussian.sigma");
        mf.gauss.prior = {to_double(p1), to_double(Rational(1) - p1)};
        const ValidationReport rep = validate_model(mf.gauss);
        if (!rep.ok) throw input_error(ctx + ": " + rep.violations.front());
    } else {
        throw input_error(ctx + ": need a \"finite\" or \"gaussian\" section");
    }
    return mf;
}

inline ModelFile load_model(const std::string& path) { return model_from_json(load_json(path), path); }

inline Json model_to_json(const FiniteModel<Rational>& m) {
    Json j;
    j["prior"] = {{"p1", to_string(m.prior.p1)}, {"p2", to_string(m.prior.p2)}};
    Json f;
    f["alphabet"] = m.alphabet;
    Json p1 = Json::array(), p2 = Json::array();
    for (const auto& v : m.pmf1) p1.push_back(to_string(v));
    for (const auto& v : m.pmf2) p2.push_back(to_string(v));
    f["pmf1"] = p1;
    f["pmf2"] = p2;
    j["finite"] = f;
    return j;
}

inline Json model_to_json(const GaussianModel& m) {
    Json j;
    j["prior"] = {{"p1", format_double(m.prior.p1)}, {"p2", format_double(m.prior.p2)}};
    j["gaussian"] = {{"mean1", m.mean1}, {"mean2", m.mean2}, {"sigma", m.sigma}};
    return j;
}

// ---------------------------------------------------------------------------
// Policies, teams, mixtures
// ---------------------------------------------------------------------------

// A loaded sensor policy: threshold form or explicit kernel form.
struct PolicyFile {
    std::optional<ThresholdPolicy<Rational>> threshold;
    std::optional<SensorKernel<Rational>> kernel;
};

inline PolicyFile policy_from_json(const Json& j, const std::string& ctx) {
    PolicyFile pf;
    if (j.contains("threshold")) {
        const Json& t = j.at("threshold");
        ThresholdPolicy<Rational> tp;
        for (const auto& v : require(t, "thresholds", ctx + ".threshold"))
            tp.thresholds.push_back(rational_from_json(v, ctx + ".threshold.thresholds"));
        for (const auto& v : require(t, "labels", ctx + ".threshold")) tp.labels.push_back(v.get<int>());
        if (tp.labels.size() != tp.thresholds.size() + 1)
            throw input_error(ctx + ": need exactly one more label than thresholds");
        pf.threshold = std::move(tp);
    } else if (j.contains("kernel")) {
        SensorKernel<Rational> k;
        for (const auto& row : j.at("kernel")) {
            std::vector<Rational> r;
            for (const auto& v : row) r.push_back(rational_from_json(v, ctx + ".kernel"));
            k.rows.push_back(std::move(r));
        }
        if (k.rows.empty()) throw input_error(ctx + ": kernel must have at least one row");
        pf.kernel = std::move(k);
    } else {
        throw input_error(ctx + ": need a \"threshold\" or \"kernel\" section");
    }
    return pf;
}

inline std::vector<PolicyFile> team_from_json(const Json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty()) throw input_error(ctx + ": team file must be a non-empty list of policies");
    std::vector<PolicyFile> team;
    for (std::size_t i = 0; i < j.size(); ++i)
        team.push_back(policy_from_json(j.at(i), ctx + "[" + std::to_string(i) + "]"));
    return team;
}

inline std::vector<PolicyFile> load_team(const std::string& path) { return team_from_json(load_json(path), path); }

// Single-policy file (design output, `--policy` argument): either a policy
// object or a one-element team list.
inline PolicyFile load_policy(const std::string& path) {
    const Json j = load_json(path);
    if (j.is_array()) {
        const auto team = team_from_json(j, path);
        if (team.size() != 1) throw input_error(path + ": expected exactly one policy");
        return team.front();
    }
    return policy_from_json(j, path);
}

struct MixtureFile {
    struct Atom {
        Rational weight;
        std::vector<PolicyFile> team;
    };
    std::vector<Atom> atoms;
};

inline MixtureFile load_mixture(const std::string& path) {
    const Json j = load_json(path);
    if (!j.is_array() || j.empty()) throw input_error(path + ": mixture file must be a non-empty list");
    MixtureFile mix;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string ctx = path + "[" + std::to_string(i) + "]";
        MixtureFile::Atom a;
        a.weight = rational_from_json(require(j.at(i), "weight", ctx), ctx + ".weight");
        a.team = team_from_json(require(j.at(i), "team", ctx), ctx + ".team");
        mix.atoms.push_back(std::move(a));
    }
    return mix;
}

// Smallest action-alphabet size that accommodates every policy in the team.
inline std::size_t team_u_size(const std::vector<PolicyFile>& team) {
    std::size_t u = 0;
    for (const auto& pf : team) {
        if (pf.threshold)
            for (int l : pf.threshold->labels) u = std::max(u, static_cast<std::size_t>(l));
        if (pf.kernel) u = std::max(u, pf.kernel->u_size());
    }
    if (u == 0) throw input_error("empty team");
    return u;
}

inline SensorKernel<Rational> to_kernel(const PolicyFile& pf, const FiniteModel<Rational>& m, std::size_t u_size) {
    if (pf.threshold) return compile_threshold(*pf.threshold, m, u_size);
    SensorKernel<Rational> k = *pf.kernel;
    if (k.u_size() < u_size)
        for (auto& row : k.rows) row.resize(u_size, Rational(0));
    k.validate(m.size());
    return k;
}

inline TeamPolicy<Rational> to_team(const std::vector<PolicyFile>& team, const FiniteModel<Rational>& m) {
    const std::size_t u = team_u_size(team);
    TeamPolicy<Rational> tp;
    for (const auto& pf : team) tp.kernels.push_back(to_kernel(pf, m, u));
    return tp;
}

inline ThresholdPolicy<double> to_gaussian_policy(const PolicyFile& pf, const std::string& ctx) {
    if (!pf.threshold) throw input_error(ctx + ": Gaussian models take threshold policies only");
    ThresholdPolicy<double> tp;
    for (const auto& t : pf.threshold->thresholds) tp.thresholds.push_back(to_double(t));
    tp.labels = pf.threshold->labels;
    return tp;
}

inline GaussianTeam to_gaussian_team(const std::vector<PolicyFile>& team, const std::string& ctx) {
    GaussianTeam g;
    for (std::size_t i = 0; i < team.size(); ++i)
        g.push_back(to_gaussian_policy(team[i], ctx + "[" + std::to_string(i) + "]"));
    return g;
}

inline TeamMixture<Rational> to_mixture(const MixtureFile& mix, const FiniteModel<Rational>& m) {
    std::size_t u = 1;
    for (const auto& a : mix.atoms) u = std::max(u, team_u_size(a.team));
    TeamMixture<Rational> out;
    for (const auto& a : mix.atoms) {
        TeamPolicy<Rational> tp;
        for (const auto& pf : a.team) tp.kernels.push_back(to_kernel(pf, m, u));
        out.atoms.push_back({a.weight, std::move(tp)});
    }
    out.validate();
    return out;
}

inline Json policy_to_json(const ThresholdPolicy<Rational>& tp) {
    Json t;
    Json th = Json::array();
    for (const auto& v : tp.thresholds) th.push_back(to_string(v));
    t["thresholds"] = th;
    t["labels"] = tp.labels;
    return Json{{"threshold", t}};
}

inline Json policy_to_json(const ThresholdPolicy<double>& tp) {
    Json t;
    Json th = Json::array();
    for (const auto& v : tp.thresholds) th.push_back(v);
    t["thresholds"] = th;
    t["labels"] = tp.labels;
    return Json{{"threshold", t}};
}

inline Json policy_to_json(const SensorKernel<Rational>& k) {
    Json rows = Json::array();
    for (const auto& row : k.rows) {
        Json r = Json::array();
        for (const auto& v : row) r.push_back(to_string(v));
        rows.push_back(r);
    }
    return Json{{"kernel", rows}};
}

template <class Policy>
Json team_to_json(const std::vector<Policy>& team) {
    Json j = Json::array();
    for (const auto& p : team) j.push_back(policy_to_json(p));
    return j;
}

// ---------------------------------------------------------------------------
// Fusion tables
// ---------------------------------------------------------------------------

inline Json fusion_to_json(const FusionTable& t) {
    Json decide = Json::array();
    for (Hypothesis h : t.decide) decide.push_back(h == Hypothesis::H1 ? 1 : 2);
    return Json{{"n", t.n}, {"u_size", t.u_size}, {"decide", decide}};
}

inline FusionTable fusion_from_json(const Json& j, const std::string& ctx) {
    FusionTable t;
    t.n = require(j, "n", ctx).get<std::size_t>();
    t.u_size = require(j, "u_size", ctx).get<std::size_t>();
    for (const auto& v : require(j, "decide", ctx)) {
        const int d = v.get<int>();
        if (d != 1 && d != 2) throw input_error(ctx + ": decide entries must be 1 or 2");
        t.decide.push_back(d == 1 ? Hypothesis::H1 : Hypothesis::H2);
    }
    const std::uint64_t want = checked_tuple_count(t.u_size, t.n, kFusionTableCap, ctx.c_str());
    if (t.decide.size() != want) throw input_error(ctx + ": decide length must be u_size^n");
    return t;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

// Exact reports carry both the rational value and its 15-significant-digit
// decimal rendering; sampled reports are decimal-only plus sampling fields.
inline Json report_to_json(const RiskReport<Rational>& r) {
    Json j;
    j["n"] = r.n;
    j["exact"] = true;
    j["risk"] = to_string(r.risk);
    j["risk_decimal"] = format_double(to_double(r.risk));
    j["err1"] = to_string(r.err_h1);
    j["err1_decimal"] = format_double(to_double(r.err_h1));
    j["err2"] = to_string(r.err_h2);
    j["err2_decimal"] = format_double(to_double(r.err_h2));
    j["exponent"] = format_double(r.exponent);
    return j;
}

inline Json report_to_json(const RiskReport<double>& r) {
    Json j;
    j["n"] = r.n;
    j["exact"] = r.exact;
    j["risk"] = format_double(r.risk);
    j["err1"] = format_double(r.err_h1);
    j["err2"] = format_double(r.err_h2);
    j["exponent"] = format_double(r.exponent);
    if (!r.exact) {
        j["samples"] = r.samples;
        j["stderr"] = r.std_error ? Json(format_double(*r.std_error)) : Json();
    }
    return j;
}

constexpr const char* kCsvHeader = "N,risk,err1,err2,exponent,stderr";

template <class T>
std::string report_to_csv_row(const RiskReport<T>& r) {
    std::ostringstream os;
    os << r.n << ',' << format_double(to_double(r.risk)) << ',' << format_double(to_double(r.err_h1)) << ','
       << format_double(to_double(r.err_h2)) << ',' << format_double(r.exponent) << ',';
    if (!r.exact && r.std_error) os << format_double(*r.std_error);
    return os.str();
}

inline Json sweep_to_json(const SweepResult& s) {
    Json rows = Json::array();
    for (const auto& row : s.rows) {
        Json j;
        j["n"] = row.n;
        j["mode"] = row.exact ? "exact" : "mc";
        j["risk"] = format_double(row.risk);
        j["err1"] = format_double(row.err_h1);
        j["err2"] = format_double(row.err_h2);
        j["exponent"] = format_double(row.exponent);
        j["stderr"] = row.exact ? Json() : Json(format_double(row.std_error));
        if (!row.risk_exact.empty()) j["risk_rational"] = row.risk_exact;
        j["reference"] = format_double(row.reference);
        j["gap"] = format_double(row.gap);
        rows.push_back(j);
    }
    return Json{{"reference", format_double(s.reference)}, {"rows", rows}};
}

inline std::string sweep_to_csv(const SweepResult& s) {
    std::ostringstream os;
    os << kCsvHeader << ",mode,reference,gap\n";
    for (const auto& row : s.rows) {
        os << row.n << ',' << format_double(row.risk) << ',' << format_double(row.err_h1) << ','
           << format_double(row.err_h2) << ',' << format_double(row.exponent) << ',';
        if (!row.exact) os << format_double(row.std_error);
        os << ',' << (row.exact ? "exact" : "mc") << ',' << format_double(row.reference) << ','
           << format_double(row.gap) << '\n';
    }
    return os.str();
}

}  // namespace detkit::io
