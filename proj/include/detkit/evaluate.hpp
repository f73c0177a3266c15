#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "detkit/errors.hpp"
#include "detkit/fusion.hpp"
#include "detkit/model.hpp"
#include "detkit/policy.hpp"
#include "detkit/rng.hpp"

namespace detkit {

constexpr std::uint64_t kExactRiskCap = std::uint64_t{1} << 24;

// Bayes risk of one team (or mixture) with its conditional error split.
// Exact mode keeps the decomposition risk = p1*err_h1 + p2*err_h2 as an
// identity; Monte Carlo mode reports frequencies plus a standard error.
template <class T>
struct RiskReport {
    T risk{};
    T err_h1{};  // P(decide H2 | H1)
    T err_h2{};  // P(decide H1 | H2)
    std::size_t n = 0;
    double exponent = 0.0;  // log(risk)/n, -inf when risk == 0
    bool exact = true;
    std::uint64_t samples = 0;             // Monte Carlo only
    std::optional<double> std_error;       // Monte Carlo only: sqrt(p(1-p)/n)
};

template <class T>
double error_exponent_empirical(const T& risk, std::size_t n) {
    if (n == 0) throw input_error("team size must be >= 1");
    if (risk == T(0)) return -std::numeric_limits<double>::infinity();
    return std::log(to_double(risk)) / static_cast<double>(n);
}

template <class T>
double error_exponent_empirical(const RiskReport<T>& report) {
    return error_exponent_empirical(report.risk, report.n);
}

// ---------------------------------------------------------------------------
// Exact evaluation
// ---------------------------------------------------------------------------

namespace detail {

// Sums the two conditional error masses over a contiguous rank range.
// The reduction is plain addition of exact values, so the worker split never
// changes the result; ranges exist to let workers run independently.
template <class T>
void accumulate_errors(const std::vector<LawPair<T>>& laws, const Prior<T>& prior, const FusionTable* table,
                       std::uint64_t lo, std::uint64_t hi, T& err1, T& err2) {
    JointEnumerator<T> e(laws);
    e.seek(lo);
    for (std::uint64_t r = lo; r < hi; ++r) {
        const bool h1 = table ? (table->decide[r] == Hypothesis::H1)
                              : (prior.p1 * e.mass1() >= prior.p2 * e.mass2());
        if (h1)
            err2 += e.mass2();
        else
            err1 += e.mass1();
        e.next();
    }
}

}  // namespace detail

// Exact Bayes risk by enumeration of all |U|^N action tuples: the joint
// conditional masses are per-sensor products, the fusion decision is MAP
// (default) or a supplied table, and the UCA loss charges each tuple's mass
// to the hypothesis it betrays.
template <class T>
RiskReport<T> exact_risk(const std::vector<LawPair<T>>& laws, const Prior<T>& prior,
                         const FusionTable* table = nullptr, unsigned workers = 1) {
    if (laws.empty()) throw input_error("empty team");
    const std::size_t usz = laws[0].size();
    for (const auto& lp : laws)
        if (lp.size() != usz || lp.g2.size() != lp.g1.size())
            throw input_error("sensors must share one action alphabet");
    const std::uint64_t total = checked_tuple_count(usz, laws.size(), kExactRiskCap, "exact_risk");
    if (table && (table->n != laws.size() || table->u_size != usz))
        throw input_error("fusion table shape does not match team");

    T err1(0), err2(0);
    if (workers <= 1 || total < 2048) {
        detail::accumulate_errors(laws, prior, table, 0, total, err1, err2);
    } else {
        const unsigned w = std::min<std::uint64_t>(workers, total);
        std::vector<T> p1(w, T(0)), p2(w, T(0));
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < w; ++k) {
            const std::uint64_t lo = total * k / w, hi = total * (k + 1) / w;
            pool.emplace_back([&, k, lo, hi] {
                detail::accumulate_errors(laws, prior, table, lo, hi, p1[k], p2[k]);
            });
        }
        for (auto& t : pool) t.join();
        for (unsigned k = 0; k < w; ++k) {  // worker-ordered reduction
            err1 += p1[k];
            err2 += p2[k];
        }
    }

    RiskReport<T> rep;
    rep.err_h1 = err1;
    rep.err_h2 = err2;
    rep.risk = prior.p1 * err1 + prior.p2 * err2;
    rep.n = laws.size();
    rep.exponent = error_exponent_empirical(rep.risk, rep.n);
    return rep;
}

template <class T>
RiskReport<T> exact_risk(const TeamPolicy<T>& team, const FiniteModel<T>& m,
                         const FusionTable* table = nullptr, unsigned workers = 1) {
    return exact_risk(team_output_laws(team, m), m.prior, table, workers);
}

// Mixture risk under either fusion-information regime.  KnownRandomization:
// the fusion center adapts to each realized team, so the risk is the weighted
// sum of per-atom MAP risks.  Bayesian: one MAP rule against the averaged
// joint action law, charged against that averaged law.
template <class T>
RiskReport<T> mixture_risk(const MixtureLaws<T>& mix, const Prior<T>& prior, FusionInfo info) {
    if (mix.atoms.empty()) throw input_error("empty mixture");
    RiskReport<T> rep;
    rep.n = mix.n();

    if (info == FusionInfo::KnownRandomization) {
        for (const auto& atom : mix.atoms) {
            RiskReport<T> part = exact_risk(atom.laws, prior);
            rep.err_h1 += atom.weight * part.err_h1;
            rep.err_h2 += atom.weight * part.err_h2;
        }
    } else {
        const std::size_t usz = mix.atoms[0].laws.at(0).size();
        const std::uint64_t total = checked_tuple_count(usz, rep.n, kExactRiskCap, "mixture_risk");
        std::vector<std::size_t> u(rep.n, 0);
        for (std::uint64_t r = 0; r < total; ++r) {
            auto [m1, m2] = mixture_tuple_masses(mix, u);
            if (prior.p1 * m1 >= prior.p2 * m2)
                rep.err_h2 += m2;
            else
                rep.err_h1 += m1;
            for (std::size_t p = rep.n; p > 0; --p) {
                if (++u[p - 1] < usz) break;
                u[p - 1] = 0;
            }
        }
    }
    rep.risk = prior.p1 * rep.err_h1 + prior.p2 * rep.err_h2;
    rep.exponent = error_exponent_empirical(rep.risk, rep.n);
    return rep;
}

template <class T>
RiskReport<T> mixture_risk(const TeamMixture<T>& mix, const FiniteModel<T>& m, FusionInfo info) {
    mix.validate();
    return mixture_risk(mixture_laws(mix, m), m.prior, info);
}

// ---------------------------------------------------------------------------
// Monte Carlo evaluation
// ---------------------------------------------------------------------------

namespace detail {

// Per-sensor sampling tables in double precision, plus the exact laws the
// decision rule uses.  Kernel randomness costs one extra uniform per sensor
// only when the kernel is genuinely stochastic.
template <class T>
struct SensorSampler {
    std::vector<double> cdf1, cdf2;          // observation CDF per hypothesis
    std::vector<std::size_t> symbol_index;   // positive-mass symbols, CDF order
    bool deterministic = true;
    std::vector<std::size_t> direct;         // y index -> action (deterministic)
    std::vector<std::vector<double>> row_cdf;  // y index -> action CDF (stochastic)

    std::size_t observe(Hypothesis h, RngStream& rng) const {
        const auto& cdf = (h == Hypothesis::H1) ? cdf1 : cdf2;
        const double v = rng.uniform();
        for (std::size_t i = 0; i < cdf.size(); ++i)
            if (v < cdf[i]) return symbol_index[i];
        return symbol_index.back();
    }

    std::size_t act(std::size_t y, RngStream& rng) const {
        if (deterministic) return direct[y];
        const auto& cdf = row_cdf[y];
        const double v = rng.uniform();
        for (std::size_t u = 0; u < cdf.size(); ++u)
            if (v < cdf[u]) return u;
        return cdf.size() - 1;
    }
};

template <class T>
SensorSampler<T> make_sensor_sampler(const SensorKernel<T>& k, const FiniteModel<T>& m) {
    SensorSampler<T> s;
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t y = 0; y < m.size(); ++y) {
        if (m.pmf1[y] == T(0) && m.pmf2[y] == T(0)) continue;
        c1 += to_double(m.pmf1[y]);
        c2 += to_double(m.pmf2[y]);
        s.symbol_index.push_back(y);
    }
    // Rebuild cumulative arrays restricted to realizable symbols.
    s.cdf1.clear();
    s.cdf2.clear();
    c1 = c2 = 0.0;
    for (std::size_t y : s.symbol_index) {
        c1 += to_double(m.pmf1[y]);
        c2 += to_double(m.pmf2[y]);
        s.cdf1.push_back(c1);
        s.cdf2.push_back(c2);
    }
    s.deterministic = k.deterministic();
    if (s.deterministic) {
        s.direct.assign(m.size(), 0);
        for (std::size_t y = 0; y < m.size(); ++y)
            for (std::size_t u = 0; u < k.u_size(); ++u)
                if (k.rows[y][u] == T(1)) s.direct[y] = u;
    } else {
        s.row_cdf.assign(m.size(), {});
        for (std::size_t y = 0; y < m.size(); ++y) {
            double c = 0.0;
            for (std::size_t u = 0; u < k.u_size(); ++u) {
                c += to_double(k.rows[y][u]);
                s.row_cdf[y].push_back(c);
            }
        }
    }
    return s;
}

struct McCounts {
    std::uint64_t n_h1 = 0, n_h2 = 0;
    std::uint64_t err_h1 = 0, err_h2 = 0;
};

// Runs `count` samples on one stream.  The draw order per sample is fixed
// (hypothesis, then sensor observations/actions in sensor order), so the
// counts depend only on (seed, stream, count).
template <class Sample>
McCounts run_worker(std::uint64_t seed, std::uint64_t stream, std::uint64_t count, double p1,
                    const Sample& sample_and_decide) {
    RngStream rng(seed, stream);
    McCounts c;
    for (std::uint64_t i = 0; i < count; ++i) {
        const Hypothesis h = rng.uniform() < p1 ? Hypothesis::H1 : Hypothesis::H2;
        const Hypothesis d = sample_and_decide(h, rng);
        if (h == Hypothesis::H1) {
            ++c.n_h1;
            if (d != h) ++c.err_h1;
        } else {
            ++c.n_h2;
            if (d != h) ++c.err_h2;
        }
    }
    return c;
}

template <class Sample>
RiskReport<double> mc_run(std::uint64_t n_samples, std::uint64_t seed, unsigned workers, double p1,
                          std::size_t team_size, const Sample& sample_and_decide) {
    if (n_samples == 0) throw input_error("n_samples must be >= 1");
    const unsigned w = std::max(1u, workers);
    std::vector<McCounts> parts(w);
    if (w == 1) {
        parts[0] = run_worker(seed, 0, n_samples, p1, sample_and_decide);
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < w; ++k) {
            const std::uint64_t count = n_samples / w + (k < n_samples % w ? 1 : 0);
            pool.emplace_back([&, k, count] { parts[k] = run_worker(seed, k, count, p1, sample_and_decide); });
        }
        for (auto& t : pool) t.join();
    }
    McCounts total;  // integer reduction: order-independent, bit-stable
    for (const auto& c : parts) {
        total.n_h1 += c.n_h1;
        total.n_h2 += c.n_h2;
        total.err_h1 += c.err_h1;
        total.err_h2 += c.err_h2;
    }

    RiskReport<double> rep;
    rep.exact = false;
    rep.samples = n_samples;
    rep.n = team_size;
    const double errs = static_cast<double>(total.err_h1 + total.err_h2);
    rep.risk = errs / static_cast<double>(n_samples);
    rep.err_h1 = total.n_h1 ? static_cast<double>(total.err_h1) / static_cast<double>(total.n_h1) : 0.0;
    rep.err_h2 = total.n_h2 ? static_cast<double>(total.err_h2) / static_cast<double>(total.n_h2) : 0.0;
    rep.std_error = std::sqrt(rep.risk * (1.0 - rep.risk) / static_cast<double>(n_samples));
    rep.exponent = error_exponent_empirical(rep.risk, rep.n);
    return rep;
}

// MAP decision in double arithmetic, used when the table cap is exceeded.
inline Hypothesis decide_double(const std::vector<LawPair<double>>& laws, const std::vector<std::size_t>& u,
                                double p1, double p2) {
    double m1 = p1, m2 = p2;
    for (std::size_t i = 0; i < laws.size(); ++i) {
        m1 *= laws[i].g1[u[i]];
        m2 *= laws[i].g2[u[i]];
    }
    return m1 >= m2 ? Hypothesis::H1 : Hypothesis::H2;
}

}  // namespace detail

// Monte Carlo risk of a finite-model team: unbiased estimate of the same
// quantity exact_risk enumerates.  Deterministic for fixed (seed, workers).
// The fusion rule is MAP unless a table is supplied.
template <class T>
RiskReport<double> mc_risk(const TeamPolicy<T>& team, const FiniteModel<T>& m, std::uint64_t n_samples,
                           std::uint64_t seed, unsigned workers = 1, const FusionTable* table = nullptr) {
    std::vector<detail::SensorSampler<T>> samplers;
    samplers.reserve(team.n());
    for (const auto& k : team.kernels) samplers.push_back(detail::make_sensor_sampler(k, m));

    const auto laws = team_output_laws(team, m);
    std::optional<FusionTable> map_table;
    if (!table) {
        std::uint64_t sz = 1;
        bool fits = true;
        for (std::size_t i = 0; i < laws.size() && fits; ++i) {
            sz *= laws[0].size();
            fits = sz <= kFusionTableCap;
        }
        if (fits) {
            map_table = exhaustive_best_fusion(laws, m.prior);
            table = &*map_table;
        }
    }
    const auto dlaws = to_double_laws(laws);
    const double p1 = to_double(m.prior.p1), p2 = to_double(m.prior.p2);

    auto sample_and_decide = [&](Hypothesis h, RngStream& rng) {
        std::vector<std::size_t> u(samplers.size());
        for (std::size_t i = 0; i < samplers.size(); ++i) {
            const std::size_t y = samplers[i].observe(h, rng);
            u[i] = samplers[i].act(y, rng);
        }
        return table ? (*table)(u) : detail::decide_double(dlaws, u, p1, p2);
    };
    return detail::mc_run(n_samples, seed, workers, p1, team.n(), sample_and_decide);
}

// Monte Carlo risk of a finite-model mixture.  Each sample draws a team atom;
// KnownRandomization decides with that atom's own MAP table, Bayesian decides
// with one table built on the mixture-averaged joint law.
template <class T>
RiskReport<double> mc_risk(const TeamMixture<T>& mix, const FiniteModel<T>& m, FusionInfo info,
                           std::uint64_t n_samples, std::uint64_t seed, unsigned workers = 1) {
    mix.validate();
    const std::size_t n = mix.atoms.front().team.n();

    std::vector<std::vector<detail::SensorSampler<T>>> samplers(mix.atoms.size());
    std::vector<FusionTable> tables(mix.atoms.size());
    std::vector<double> weight_cdf;
    double wc = 0.0;
    const MixtureLaws<T> mlaws = mixture_laws(mix, m);
    std::optional<FusionTable> bayes_table;
    if (info == FusionInfo::Bayesian) bayes_table = exhaustive_best_fusion(mlaws, m.prior);
    for (std::size_t a = 0; a < mix.atoms.size(); ++a) {
        for (const auto& k : mix.atoms[a].team.kernels)
            samplers[a].push_back(detail::make_sensor_sampler(k, m));
        if (info == FusionInfo::KnownRandomization)
            tables[a] = exhaustive_best_fusion(mlaws.atoms[a].laws, m.prior);
        wc += to_double(mix.atoms[a].weight);
        weight_cdf.push_back(wc);
    }
    const double p1 = to_double(m.prior.p1);

    auto sample_and_decide = [&](Hypothesis h, RngStream& rng) {
        const double v = rng.uniform();
        std::size_t a = 0;
        while (a + 1 < weight_cdf.size() && v >= weight_cdf[a]) ++a;
        std::vector<std::size_t> u(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t y = samplers[a][i].observe(h, rng);
            u[i] = samplers[a][i].act(y, rng);
        }
        return info == FusionInfo::KnownRandomization ? tables[a](u) : (*bayes_table)(u);
    };
    return detail::mc_run(n_samples, seed, workers, p1, n, sample_and_decide);
}

// Monte Carlo risk of a Gaussian-model team of threshold policies.
inline RiskReport<double> mc_risk(const GaussianTeam& team, const GaussianModel& m, std::size_t u_size,
                                  std::uint64_t n_samples, std::uint64_t seed, unsigned workers = 1) {
    if (team.empty()) throw input_error("empty team");
    const auto laws = team_output_laws(team, m, u_size);
    const double p1 = m.prior.p1, p2 = m.prior.p2;

    auto sample_and_decide = [&](Hypothesis h, RngStream& rng) {
        std::vector<std::size_t> u(team.size());
        for (std::size_t i = 0; i < team.size(); ++i) {
            const double y = sample_observation(m, h, rng);
            const double l = likelihood_ratio(m, y);
            const std::size_t bin = team[i].bin_of(Extended<double>::finite(l));
            u[i] = static_cast<std::size_t>(team[i].labels[bin]) - 1;
        }
        return detail::decide_double(laws, u, p1, p2);
    };
    return detail::mc_run(n_samples, seed, workers, p1, team.size(), sample_and_decide);
}

// ---------------------------------------------------------------------------
// Sweeps over N
// ---------------------------------------------------------------------------

// One row per team size: exact when the joint outcome count fits in the cap,
// Monte Carlo (flagged) beyond it.  gap = exponent - reference_exponent.
struct SweepRow {
    std::size_t n = 0;
    bool exact = true;
    double risk = 0.0, err_h1 = 0.0, err_h2 = 0.0;
    double exponent = 0.0;
    double std_error = 0.0;  // 0 for exact rows
    std::string risk_exact, err_h1_exact, err_h2_exact;  // "a/b" strings, exact rows only
    double reference = 0.0;
    double gap = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double reference = 0.0;
};

struct SweepOptions {
    std::uint64_t cap = kExactRiskCap;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

// Sweeps the replicated-team risk over the given sizes.  `teams` yields the
// kernels for each N (usually N copies of one policy's kernel).
template <class T, class TeamAt>
SweepResult sweep_n(const FiniteModel<T>& m, const std::vector<std::size_t>& sizes, double reference_exponent,
                    const TeamAt& team_at, const SweepOptions& opt = {}) {
    SweepResult out;
    out.reference = reference_exponent;
    std::size_t prev = 0;
    for (std::size_t n : sizes) {
        if (n == 0 || n <= prev) throw input_error("sweep sizes must be strictly increasing and >= 1");
        prev = n;
        const TeamPolicy<T> team = team_at(n);
        if (team.n() != n) throw input_error("policy spec returned a team of the wrong size");

        SweepRow row;
        row.n = n;
        row.reference = reference_exponent;
        bool fits = true;
        std::uint64_t sz = 1;
        const std::size_t usz = team.kernels.front().u_size();
        for (std::size_t i = 0; i < n && fits; ++i) {
            sz *= usz;
            fits = sz <= opt.cap;
        }
        if (fits) {
            const RiskReport<T> rep = exact_risk(team, m, nullptr, opt.workers);
            row.risk = to_double(rep.risk);
            row.err_h1 = to_double(rep.err_h1);
            row.err_h2 = to_double(rep.err_h2);
            row.exponent = rep.exponent;
            if constexpr (!std::is_same_v<T, double>) {
                row.risk_exact = to_string(rep.risk);
                row.err_h1_exact = to_string(rep.err_h1);
                row.err_h2_exact = to_string(rep.err_h2);
            }
        } else {
            row.exact = false;
            const RiskReport<double> rep = mc_risk(team, m, opt.samples, opt.seed, opt.workers);
            row.risk = rep.risk;
            row.err_h1 = rep.err_h1;
            row.err_h2 = rep.err_h2;
            row.exponent = rep.exponent;
            row.std_error = rep.std_error.value_or(0.0);
        }
        row.gap = row.exponent - reference_exponent;
        out.rows.push_back(std::move(row));
    }
    return out;
}

// Convenience: all sensors replicate one threshold policy.
template <class T>
SweepResult sweep_replicated(const FiniteModel<T>& m, const ThresholdPolicy<T>& tp, std::size_t u_size,
                             const std::vector<std::size_t>& sizes, double reference_exponent,
                             const SweepOptions& opt = {}) {
    const SensorKernel<T> kernel = compile_threshold(tp, m, u_size);
    return sweep_n(
        m, sizes, reference_exponent,
        [&](std::size_t n) {
            TeamPolicy<T> team;
            team.kernels.assign(n, kernel);
            return team;
        },
        opt);
}

// Gaussian counterpart: quantized output laws are finite, so the exact path
// enumerates action tuples just like the finite-model sweep; above the cap it
// falls back to sampling observations.
inline SweepResult sweep_replicated(const GaussianModel& m, const ThresholdPolicy<double>& tp,
                                    std::size_t u_size, const std::vector<std::size_t>& sizes,
                                    double reference_exponent, const SweepOptions& opt = {}) {
    const LawPair<double> law = output_law_pair(tp, m, u_size);
    SweepResult out;
    out.reference = reference_exponent;
    std::size_t prev = 0;
    for (std::size_t n : sizes) {
        if (n == 0 || n <= prev) throw input_error("sweep sizes must be strictly increasing and >= 1");
        prev = n;
        SweepRow row;
        row.n = n;
        row.reference = reference_exponent;
        bool fits = true;
        std::uint64_t sz = 1;
        for (std::size_t i = 0; i < n && fits; ++i) {
            sz *= u_size;
            fits = sz <= opt.cap;
        }
        if (fits) {
            const RiskReport<double> rep = exact_risk(std::vector<LawPair<double>>(n, law), m.prior);
            row.risk = rep.risk;
            row.err_h1 = rep.err_h1;
            row.err_h2 = rep.err_h2;
            row.exponent = rep.exponent;
        } else {
            row.exact = false;
            const RiskReport<double> rep =
                mc_risk(GaussianTeam(n, tp), m, u_size, opt.samples, opt.seed, opt.workers);
            row.risk = rep.risk;
            row.err_h1 = rep.err_h1;
            row.err_h2 = rep.err_h2;
            row.exponent = rep.exponent;
            row.std_error = rep.std_error.value_or(0.0);
        }
        row.gap = row.exponent - reference_exponent;
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace detkit
