#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "detkit/errors.hpp"
#include "detkit/model.hpp"
#include "detkit/rng.hpp"

namespace detkit {

// Conditional output laws of one sensor: g1[u] = P(u | H1), g2[u] = P(u | H2)
// over a common finite action alphabet (0-based internally, 1-based in files
// and display).  Everything downstream of the sensors -- fusion, risk,
// exponents -- consumes only these pairs.
template <class T>
struct LawPair {
    std::vector<T> g1;
    std::vector<T> g2;

    std::size_t size() const { return g1.size(); }
    const std::vector<T>& operator()(Hypothesis h) const { return h == Hypothesis::H1 ? g1 : g2; }

    friend bool operator==(const LawPair& a, const LawPair& b) { return a.g1 == b.g1 && a.g2 == b.g2; }
};

// ---------------------------------------------------------------------------
// Threshold policies
// ---------------------------------------------------------------------------

// A monotone quantizer of the likelihood-ratio axis: bins are consecutive
// right-closed intervals (0 <= l <= t_1], (t_1, t_2], ..., (t_{m-1}, +inf],
// bin d emitting labels[d].  Thresholds are finite, positive and strictly
// increasing; labels are distinct 1-based actions.
template <class T>
struct ThresholdPolicy {
    std::vector<T> thresholds;  // size m-1
    std::vector<int> labels;    // size m

    std::size_t bins() const { return labels.size(); }

    void validate(std::size_t u_size) const {
        if (labels.empty()) throw input_error("threshold policy needs at least one bin");
        if (labels.size() != thresholds.size() + 1)
            throw input_error("threshold policy needs exactly one more label than thresholds");
        if (labels.size() > u_size) throw input_error("threshold policy has more bins than actions");
        for (std::size_t i = 0; i + 1 < thresholds.size(); ++i)
            if (!(thresholds[i] < thresholds[i + 1]))
                throw input_error("thresholds must be strictly increasing");
        for (const T& t : thresholds)
            if (!(t > T(0))) throw input_error("thresholds must be strictly positive");
        auto sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw input_error("bin labels must be distinct");
        for (int u : sorted)
            if (u < 1 || static_cast<std::size_t>(u) > u_size)
                throw input_error("bin label outside action alphabet");
    }

    // 0-based bin index of an extended LR value; bins are right-closed, so a
    // value equal to t_d falls in bin d, and +infinity falls in the last bin.
    std::size_t bin_of(const Extended<T>& l) const {
        if (l.infinite) return thresholds.size();
        for (std::size_t d = 0; d < thresholds.size(); ++d)
            if (l.value <= thresholds[d]) return d;
        return thresholds.size();
    }

    friend bool operator==(const ThresholdPolicy& a, const ThresholdPolicy& b) {
        return a.thresholds == b.thresholds && a.labels == b.labels;
    }
};

// ---------------------------------------------------------------------------
// Sensor kernels and teams (finite models)
// ---------------------------------------------------------------------------

// A (possibly randomized) quantizer of a finite observation alphabet:
// rows[y][u] = P(emit action u | observe symbol index y).
template <class T>
struct SensorKernel {
    std::vector<std::vector<T>> rows;

    std::size_t u_size() const { return rows.empty() ? 0 : rows[0].size(); }

    void validate(std::size_t alphabet_size) const {
        if (rows.size() != alphabet_size) throw input_error("kernel row count does not match alphabet");
        if (rows.empty() || rows[0].empty()) throw input_error("kernel needs at least one row and one action");
        for (const auto& row : rows) {
            if (row.size() != rows[0].size()) throw input_error("kernel rows must have equal length");
            for (const T& p : row)
                if (p < T(0)) throw input_error("kernel entries must be nonnegative");
            if (!sums_to_one(row)) throw input_error("kernel rows must sum to 1");
        }
    }

    bool deterministic() const {
        for (const auto& row : rows)
            for (const T& p : row)
                if (p != T(0) && p != T(1)) return false;
        return true;
    }

    friend bool operator==(const SensorKernel& a, const SensorKernel& b) { return a.rows == b.rows; }
    friend bool operator<(const SensorKernel& a, const SensorKernel& b) { return a.rows < b.rows; }
};

template <class T>
struct TeamPolicy {
    std::vector<SensorKernel<T>> kernels;  // one per sensor, index = sensor

    std::size_t n() const { return kernels.size(); }

    friend bool operator==(const TeamPolicy& a, const TeamPolicy& b) { return a.kernels == b.kernels; }
    friend bool operator<(const TeamPolicy& a, const TeamPolicy& b) { return a.kernels < b.kernels; }
};

// Finite-support distribution over team policies.  The flags are advisory
// (set by the factories below); is_exchangeable rechecks the ground truth.
template <class T>
struct TeamMixture {
    struct Atom {
        T weight;
        TeamPolicy<T> team;
    };
    std::vector<Atom> atoms;
    bool exchangeable = false;
    bool symmetric_independent = false;

    void validate() const {
        if (atoms.empty()) throw input_error("mixture needs at least one atom");
        T s(0);
        const std::size_t n = atoms.front().team.n();
        for (const auto& a : atoms) {
            if (!(a.weight > T(0))) throw input_error("mixture weights must be strictly positive");
            if (a.team.n() != n) throw input_error("mixture atoms must share the team size");
            s += a.weight;
        }
        if constexpr (std::is_same_v<T, double>) {
            if (std::abs(s - 1.0) > 1e-12) throw input_error("mixture weights must sum to 1");
        } else {
            if (s != T(1)) throw input_error("mixture weights must sum to 1");
        }
    }
};

// ---------------------------------------------------------------------------
// Compilation and output laws
// ---------------------------------------------------------------------------

// Realizes a threshold policy as a deterministic kernel on a finite model:
// each realizable symbol goes to the bin containing its likelihood ratio.
// Unrealizable symbols (zero mass under both hypotheses) are routed to the
// policy's first bin; no trajectory ever reaches them.
template <class T>
SensorKernel<T> compile_threshold(const ThresholdPolicy<T>& tp, const FiniteModel<T>& m, std::size_t u_size) {
    tp.validate(u_size);
    SensorKernel<T> k;
    k.rows.assign(m.size(), std::vector<T>(u_size, T(0)));
    for (std::size_t y = 0; y < m.size(); ++y) {
        std::size_t bin = 0;
        if (!(m.pmf1[y] == T(0) && m.pmf2[y] == T(0))) bin = tp.bin_of(likelihood_ratio_at(m, y));
        k.rows[y][static_cast<std::size_t>(tp.labels[bin]) - 1] = T(1);
    }
    return k;
}

// g(h, u) = sum_y P(y | h) rows[y][u].
template <class T>
std::vector<T> output_law(const SensorKernel<T>& k, const FiniteModel<T>& m, Hypothesis h) {
    k.validate(m.size());
    std::vector<T> g(k.u_size(), T(0));
    const std::vector<T>& pmf = m.pmf(h);
    for (std::size_t y = 0; y < m.size(); ++y)
        for (std::size_t u = 0; u < g.size(); ++u) g[u] += pmf[y] * k.rows[y][u];
    return g;
}

template <class T>
LawPair<T> output_law_pair(const SensorKernel<T>& k, const FiniteModel<T>& m) {
    return {output_law(k, m, Hypothesis::H1), output_law(k, m, Hypothesis::H2)};
}

template <class T>
std::vector<LawPair<T>> team_output_laws(const TeamPolicy<T>& team, const FiniteModel<T>& m) {
    std::vector<LawPair<T>> laws;
    laws.reserve(team.n());
    for (const auto& k : team.kernels) laws.push_back(output_law_pair(k, m));
    return laws;
}

// Gaussian models: a threshold policy on the LR axis pulls back to intervals
// of the observation axis (the LR is monotone in y), and bin masses are
// normal-CDF differences.  Returns double laws; u_size fixes the action count
// (labels may use a strict subset).
inline LawPair<double> output_law_pair(const ThresholdPolicy<double>& tp, const GaussianModel& m,
                                       std::size_t u_size) {
    tp.validate(u_size);
    LawPair<double> law{std::vector<double>(u_size, 0.0), std::vector<double>(u_size, 0.0)};
    const double d = m.mean2 - m.mean1;
    if (d == 0.0) {
        // L is identically 1: all mass lands in the bin containing l = 1.
        const std::size_t bin = tp.bin_of(Extended<double>::finite(1.0));
        law.g1[tp.labels[bin] - 1] = 1.0;
        law.g2[tp.labels[bin] - 1] = 1.0;
        return law;
    }
    // y value with L(y) = t.
    auto y_at = [&](double t) { return (2.0 * m.sigma * m.sigma * std::log(t) / d + m.mean1 + m.mean2) / 2.0; };
    const std::size_t nbins = tp.bins();
    for (std::size_t b = 0; b < nbins; ++b) {
        // LR bin (t_{b-1}, t_b]; in y-space an interval whose orientation
        // follows the sign of mean2 - mean1.
        double lo, hi;  // y-interval of the bin
        const double inf = std::numeric_limits<double>::infinity();
        if (d > 0.0) {
            lo = (b == 0) ? -inf : y_at(tp.thresholds[b - 1]);
            hi = (b + 1 == nbins) ? inf : y_at(tp.thresholds[b]);
        } else {
            lo = (b + 1 == nbins) ? -inf : y_at(tp.thresholds[b]);
            hi = (b == 0) ? inf : y_at(tp.thresholds[b - 1]);
        }
        const std::size_t u = static_cast<std::size_t>(tp.labels[b]) - 1;
        law.g1[u] = normal_cdf((hi - m.mean1) / m.sigma) - normal_cdf((lo - m.mean1) / m.sigma);
        law.g2[u] = normal_cdf((hi - m.mean2) / m.sigma) - normal_cdf((lo - m.mean2) / m.sigma);
    }
    return law;
}

template <class T>
LawPair<double> to_double_laws(const LawPair<T>& law) {
    LawPair<double> out;
    out.g1.reserve(law.size());
    out.g2.reserve(law.size());
    for (const T& v : law.g1) out.g1.push_back(to_double(v));
    for (const T& v : law.g2) out.g2.push_back(to_double(v));
    return out;
}

template <class T>
std::vector<LawPair<double>> to_double_laws(const std::vector<LawPair<T>>& laws) {
    std::vector<LawPair<double>> out;
    out.reserve(laws.size());
    for (const auto& lp : laws) out.push_back(to_double_laws(lp));
    return out;
}

// A Gaussian team is a list of threshold policies, one per sensor.
using GaussianTeam = std::vector<ThresholdPolicy<double>>;

inline std::vector<LawPair<double>> team_output_laws(const GaussianTeam& team, const GaussianModel& m,
                                                     std::size_t u_size) {
    std::vector<LawPair<double>> laws;
    laws.reserve(team.size());
    for (const auto& tp : team) laws.push_back(output_law_pair(tp, m, u_size));
    return laws;
}

// ---------------------------------------------------------------------------
// Permutation and symmetrization
// ---------------------------------------------------------------------------

template <class T>
void check_permutation(const std::vector<std::size_t>& sigma, std::size_t n, const TeamPolicy<T>&) {
    if (sigma.size() != n) throw input_error("permutation length does not match team size");
    std::vector<bool> seen(n, false);
    for (std::size_t s : sigma) {
        if (s >= n || seen[s]) throw input_error("not a permutation");
        seen[s] = true;
    }
}

// result.kernels[i] = team.kernels[sigma[i]].
template <class T>
TeamPolicy<T> permute_team(const TeamPolicy<T>& team, const std::vector<std::size_t>& sigma) {
    check_permutation(sigma, team.n(), team);
    TeamPolicy<T> out;
    out.kernels.reserve(team.n());
    for (std::size_t s : sigma) out.kernels.push_back(team.kernels[s]);
    return out;
}

template <class T>
TeamMixture<T> permute_mixture(const TeamMixture<T>& mix, const std::vector<std::size_t>& sigma) {
    TeamMixture<T> out = mix;
    for (auto& atom : out.atoms) atom.team = permute_team(atom.team, sigma);
    return out;
}

// Canonical weighted-multiset form: atoms merged by team equality, sorted.
template <class T>
std::map<TeamPolicy<T>, T> mixture_as_map(const TeamMixture<T>& mix) {
    std::map<TeamPolicy<T>, T> map;
    for (const auto& atom : mix.atoms) map[atom.team] += atom.weight;
    return map;
}

constexpr std::size_t kSymmetrizeMaxN = 8;  // 8! = 40320 permutations

// Uniform average of the mixture over all team-index permutations; duplicate
// permuted atoms are merged.  The result is exchangeable by construction.
template <class T>
TeamMixture<T> symmetrize(const TeamMixture<T>& mix) {
    mix.validate();
    const std::size_t n = mix.atoms.front().team.n();
    if (n > kSymmetrizeMaxN)
        throw resource_cap_error("symmetrize: refusing to enumerate permutations for more than 8 sensors");
    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    T fact(1);
    for (std::size_t k = 2; k <= n; ++k) fact *= T(static_cast<int>(k));

    std::map<TeamPolicy<T>, T> merged;
    do {
        for (const auto& atom : mix.atoms) merged[permute_team(atom.team, sigma)] += atom.weight / fact;
    } while (std::next_permutation(sigma.begin(), sigma.end()));

    TeamMixture<T> out;
    for (auto& [team, weight] : merged) out.atoms.push_back({weight, team});
    out.exchangeable = true;
    out.symmetric_independent = mix.symmetric_independent && mix.atoms.size() == 1;
    return out;
}

// Invariance of the mixture law under every permutation of the sensor index.
// Up to 8 sensors the full symmetric group is checked; beyond that the check
// degrades to a declared-size random spot check (it can certify failure but
// only report "no counterexample found" for success).
struct ExchangeabilityReport {
    bool exchangeable = false;
    bool exhaustive = true;               // full S_N was enumerated
    std::uint64_t permutations_checked = 0;

    explicit operator bool() const { return exchangeable; }
};

template <class T>
ExchangeabilityReport is_exchangeable(const TeamMixture<T>& mix, std::uint64_t spot_checks = 64) {
    mix.validate();
    const std::size_t n = mix.atoms.front().team.n();
    const auto reference = mixture_as_map(mix);
    ExchangeabilityReport rep;
    rep.exchangeable = true;

    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    if (n <= kSymmetrizeMaxN) {
        do {
            ++rep.permutations_checked;
            if (mixture_as_map(permute_mixture(mix, sigma)) != reference) {
                rep.exchangeable = false;
                return rep;
            }
        } while (std::next_permutation(sigma.begin(), sigma.end()));
        return rep;
    }

    // Spot check: deterministic pseudo-random permutations (Fisher-Yates).
    rep.exhaustive = false;
    RngStream rng(0xD017C0DEull, n);
    for (std::uint64_t c = 0; c < spot_checks; ++c) {
        for (std::size_t i = n; i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
            std::swap(sigma[i - 1], sigma[j < i ? j : i - 1]);
        }
        ++rep.permutations_checked;
        if (mixture_as_map(permute_mixture(mix, sigma)) != reference) {
            rep.exchangeable = false;
            return rep;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Mixture factories
// ---------------------------------------------------------------------------

template <class T>
TeamMixture<T> point_mass(TeamPolicy<T> team) {
    TeamMixture<T> mix;
    bool all_equal = true;
    for (const auto& k : team.kernels) all_equal = all_equal && (k == team.kernels.front());
    mix.exchangeable = all_equal;
    mix.symmetric_independent = all_equal;
    mix.atoms.push_back({T(1), std::move(team)});
    return mix;
}

// Independent identical per-sensor randomization: every sensor draws its
// kernel from `marginal` independently.  Support has |marginal|^n atoms.
template <class T>
TeamMixture<T> product_mixture(const std::vector<std::pair<T, SensorKernel<T>>>& marginal, std::size_t n) {
    if (marginal.empty() || n == 0) throw input_error("product mixture needs a marginal and n >= 1");
    TeamMixture<T> mix;
    std::vector<std::size_t> pick(n, 0);
    while (true) {
        typename TeamMixture<T>::Atom atom;
        atom.weight = T(1);
        for (std::size_t i = 0; i < n; ++i) {
            atom.weight *= marginal[pick[i]].first;
            atom.team.kernels.push_back(marginal[pick[i]].second);
        }
        if (atom.weight > T(0)) mix.atoms.push_back(std::move(atom));
        std::size_t i = 0;
        for (; i < n; ++i) {
            if (++pick[i] < marginal.size()) break;
            pick[i] = 0;
        }
        if (i == n) break;
    }
    mix.exchangeable = true;
    mix.symmetric_independent = true;
    return mix;
}

// ---------------------------------------------------------------------------
// Enumeration of threshold policies
// ---------------------------------------------------------------------------

template <class T>
struct EnumeratedPolicies {
    std::vector<ThresholdPolicy<T>> policies;  // canonical labels 1..m
    // Count including distinct labelings (ordered selections of m labels out
    // of |U|): sum over m of C(atoms-1, m-1) * |U|!/(|U|-m)!.
    std::uint64_t labeled_count = 0;
};

// Advances c to the next r-combination of {0..n-1} in lexicographic order.
inline bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
    const std::size_t r = c.size();
    std::size_t i = r;
    while (i > 0) {
        --i;
        if (c[i] != i + n - r) {
            ++c[i];
            for (std::size_t j = i + 1; j < r; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// All monotone quantizers of a finite model's LR atoms into at most u_size
// right-closed bins, one representative per bin partition (labels canonical,
// increasing).  Cut points between finite atoms are exact midpoints; the cut
// before a +infinity atom sits one unit above the largest finite atom.
template <class T>
EnumeratedPolicies<T> enumerate_threshold_policies(const FiniteModel<T>& m, std::size_t u_size) {
    if (u_size == 0) throw input_error("need at least one action");
    const LrLaw<T> law = induced_lr_law(m);
    const std::size_t k = law.atoms.size();
    if (k == 0) throw input_error("model has no realizable symbols");

    // Cut value strictly between consecutive atoms i and i+1.
    auto cut_after = [&](std::size_t i) -> T {
        if (law.atoms[i + 1].infinite) return law.atoms[i].value + T(1);
        return (law.atoms[i].value + law.atoms[i + 1].value) / T(2);
    };

    EnumeratedPolicies<T> out;
    const std::size_t max_bins = std::min(k, u_size);
    for (std::size_t bins = 1; bins <= max_bins; ++bins) {
        // perm(u_size, bins) labelings share each canonical representative.
        std::uint64_t labelings = 1;
        for (std::size_t j = 0; j < bins; ++j) labelings *= static_cast<std::uint64_t>(u_size - j);

        // Choose bins-1 cut positions out of the k-1 gaps, lexicographically.
        std::vector<std::size_t> cuts(bins - 1);
        std::iota(cuts.begin(), cuts.end(), std::size_t{0});
        do {
            ThresholdPolicy<T> tp;
            for (std::size_t c : cuts) tp.thresholds.push_back(cut_after(c));
            for (std::size_t b = 1; b <= bins; ++b) tp.labels.push_back(static_cast<int>(b));
            out.policies.push_back(std::move(tp));
            out.labeled_count += labelings;
        } while (next_combination(cuts, k - 1));
    }
    return out;
}

}  // namespace detkit
