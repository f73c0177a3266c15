#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "detkit/errors.hpp"
#include "detkit/policy.hpp"

namespace detkit {

// What the fusion center knows about a randomized team beyond the actions:
// KnownRandomization = the realized kernels (it can undo the randomization);
// Bayesian = only the mixture, so joint action laws are averaged over it.
enum class FusionInfo { KnownRandomization, Bayesian };

inline int uca_cost(Hypothesis truth, Hypothesis decision) { return truth == decision ? 0 : 1; }

// The MAP fusion rule in log-statistic form: decide H1 iff the per-sensor
// averaged log-likelihood statistic is >= threshold.  Exact evaluation never
// materializes the logs; this struct exists for display and float-mode work.
struct MapRule {
    double threshold = 0.0;  // (1/N) log(p2/p1)
};

template <class T>
MapRule make_map_rule(const Prior<T>& prior, std::size_t n) {
    return MapRule{(std::log(to_double(prior.p2)) - std::log(to_double(prior.p1))) / static_cast<double>(n)};
}

// Per-atom team mixture reduced to output laws: weight + per-sensor law pairs.
template <class T>
struct MixtureLaws {
    struct Atom {
        T weight;
        std::vector<LawPair<T>> laws;
    };
    std::vector<Atom> atoms;

    std::size_t n() const { return atoms.empty() ? 0 : atoms.front().laws.size(); }
};

template <class T>
MixtureLaws<T> mixture_laws(const TeamMixture<T>& mix, const FiniteModel<T>& m) {
    MixtureLaws<T> out;
    out.atoms.reserve(mix.atoms.size());
    for (const auto& atom : mix.atoms) out.atoms.push_back({atom.weight, team_output_laws(atom.team, m)});
    return out;
}

// ---------------------------------------------------------------------------
// Joint masses
// ---------------------------------------------------------------------------

// (P(u | H1), P(u | H2)) for one action tuple; conditional independence
// across sensors makes these plain products of per-sensor law values.
template <class T>
std::pair<T, T> tuple_masses(const std::vector<LawPair<T>>& laws, const std::vector<std::size_t>& u) {
    if (u.size() != laws.size()) throw input_error("tuple length does not match team size");
    T m1(1), m2(1);
    for (std::size_t i = 0; i < laws.size(); ++i) {
        if (u[i] >= laws[i].size()) throw input_error("action index out of range");
        m1 *= laws[i].g1[u[i]];
        m2 *= laws[i].g2[u[i]];
    }
    return {m1, m2};
}

// Mixture-averaged joint masses: sum of weighted per-atom products.
template <class T>
std::pair<T, T> mixture_tuple_masses(const MixtureLaws<T>& mix, const std::vector<std::size_t>& u) {
    T m1(0), m2(0);
    for (const auto& atom : mix.atoms) {
        auto [a1, a2] = tuple_masses(atom.laws, u);
        m1 += atom.weight * a1;
        m2 += atom.weight * a2;
    }
    return {m1, m2};
}

// ---------------------------------------------------------------------------
// Fusion statistics
// ---------------------------------------------------------------------------

// Averaged log-likelihood statistic of a realized team:
//   (1/N) sum_i log( g_i(H1, u_i) / g_i(H2, u_i) ),
// extended-real valued.  A sensor whose action has zero mass under exactly
// one hypothesis forces the statistic to +/-infinity; an action with zero
// mass under both has no conditional law and is rejected, as is a tuple whose
// joint mass vanishes under both hypotheses (offsetting infinities).
template <class T>
double delta_n(const std::vector<LawPair<T>>& laws, const std::vector<std::size_t>& u) {
    if (u.size() != laws.size()) throw input_error("tuple length does not match team size");
    double sum = 0.0;
    int sign_inf = 0;  // +1 seen +inf, -1 seen -inf
    for (std::size_t i = 0; i < laws.size(); ++i) {
        const T& a = laws[i].g1[u[i]];
        const T& b = laws[i].g2[u[i]];
        const bool za = (a == T(0)), zb = (b == T(0));
        if (za && zb)
            throw unreachable_tuple_error("action has zero mass under both hypotheses at sensor " +
                                          std::to_string(i + 1));
        if (za || zb) {
            const int s = za ? -1 : +1;
            if (sign_inf == -s)
                throw unreachable_tuple_error("tuple has zero joint mass under both hypotheses");
            sign_inf = s;
            continue;
        }
        sum += std::log(to_double(a)) - std::log(to_double(b));
    }
    if (sign_inf != 0) return sign_inf * std::numeric_limits<double>::infinity();
    return sum / static_cast<double>(laws.size());
}

template <class T>
double delta_n(const TeamPolicy<T>& team, const FiniteModel<T>& m, const std::vector<std::size_t>& u) {
    return delta_n(team_output_laws(team, m), u);
}

// Bayesian-information statistic log( Pbar(u|H1) / Pbar(u|H2) ) under the
// mixture-averaged joint law.  Deliberately not divided by N; for a point
// mass the joint law factorizes and the value equals N * delta_n.
template <class T>
double bayes_log_ratio(const MixtureLaws<T>& mix, const std::vector<std::size_t>& u) {
    auto [m1, m2] = mixture_tuple_masses(mix, u);
    const bool z1 = (m1 == T(0)), z2 = (m2 == T(0));
    if (z1 && z2) throw unreachable_tuple_error("tuple has zero averaged mass under both hypotheses");
    if (z1) return -std::numeric_limits<double>::infinity();
    if (z2) return std::numeric_limits<double>::infinity();
    return std::log(to_double(m1)) - std::log(to_double(m2));
}

template <class T>
double bayes_log_ratio(const TeamMixture<T>& mix, const FiniteModel<T>& m, const std::vector<std::size_t>& u) {
    return bayes_log_ratio(mixture_laws(mix, m), u);
}

// ---------------------------------------------------------------------------
// MAP decisions
// ---------------------------------------------------------------------------

// Decide H1 iff delta_n(u) >= (1/N) log(p2/p1), evaluated log-free as
//   p1 * prod_i g_i(H1, u_i)  >=  p2 * prod_i g_i(H2, u_i)
// (algebraically equivalent, exact in rational mode, ties to H1).
template <class T>
Hypothesis map_decide(const std::vector<LawPair<T>>& laws, const std::vector<std::size_t>& u,
                      const Prior<T>& prior) {
    auto [m1, m2] = tuple_masses(laws, u);
    return prior.p1 * m1 >= prior.p2 * m2 ? Hypothesis::H1 : Hypothesis::H2;
}

template <class T>
Hypothesis map_decide(const TeamPolicy<T>& team, const FiniteModel<T>& m, const std::vector<std::size_t>& u) {
    return map_decide(team_output_laws(team, m), u, m.prior);
}

// Bayesian regime: the same posterior comparison against averaged masses.
template <class T>
Hypothesis bayes_map_decide(const MixtureLaws<T>& mix, const std::vector<std::size_t>& u,
                            const Prior<T>& prior) {
    auto [m1, m2] = mixture_tuple_masses(mix, u);
    return prior.p1 * m1 >= prior.p2 * m2 ? Hypothesis::H1 : Hypothesis::H2;
}

// ---------------------------------------------------------------------------
// Fusion tables
// ---------------------------------------------------------------------------

constexpr std::uint64_t kFusionTableCap = std::uint64_t{1} << 20;

// Materialized fusion rule: decision per action tuple, indexed by tuple rank
// in base |U| with sensor 0 as the most significant digit.
struct FusionTable {
    std::size_t n = 0;
    std::size_t u_size = 0;
    std::vector<Hypothesis> decide;

    std::uint64_t size() const { return decide.size(); }

    std::uint64_t rank(const std::vector<std::size_t>& u) const {
        if (u.size() != n) throw input_error("tuple length does not match table");
        std::uint64_t r = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (u[i] >= u_size) throw input_error("action index out of range");
            r = r * u_size + u[i];
        }
        return r;
    }

    Hypothesis operator()(const std::vector<std::size_t>& u) const { return decide[rank(u)]; }
};

inline std::uint64_t checked_tuple_count(std::size_t u_size, std::size_t n, std::uint64_t cap,
                                         const char* op_name) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > cap / u_size)
            throw resource_cap_error(std::string(op_name) + ": |U|^N exceeds cap of " + std::to_string(cap) +
                                     " joint outcomes");
        total *= u_size;
    }
    if (total > cap)
        throw resource_cap_error(std::string(op_name) + ": |U|^N exceeds cap of " + std::to_string(cap) +
                                 " joint outcomes");
    return total;
}

// Odometer over action tuples in rank order that maintains the two joint
// masses incrementally via prefix products; an increment at digit p costs
// O(N - p) multiplies, amortizing to O(1) per tuple.
template <class T>
class JointEnumerator {
  public:
    explicit JointEnumerator(const std::vector<LawPair<T>>& laws) : laws_(&laws) {
        const std::size_t n = laws.size();
        u_.assign(n, 0);
        prefix1_.assign(n + 1, T(1));
        prefix2_.assign(n + 1, T(1));
        recompute_from(0);
    }

    // Positions the enumerator at the tuple with the given rank.
    void seek(std::uint64_t rank) {
        const std::size_t n = u_.size();
        const std::size_t usz = (*laws_)[0].size();
        for (std::size_t i = n; i > 0; --i) {
            u_[i - 1] = static_cast<std::size_t>(rank % usz);
            rank /= usz;
        }
        recompute_from(0);
    }

    const std::vector<std::size_t>& tuple() const { return u_; }
    const T& mass1() const { return prefix1_.back(); }
    const T& mass2() const { return prefix2_.back(); }

    // Advances to the next tuple; false once the space is exhausted.
    bool next() {
        const std::size_t n = u_.size();
        std::size_t p = n;
        while (p > 0) {
            --p;
            if (++u_[p] < (*laws_)[p].size()) {
                recompute_from(p);
                return true;
            }
            u_[p] = 0;
        }
        recompute_from(0);
        return false;
    }

  private:
    void recompute_from(std::size_t p) {
        for (std::size_t i = p; i < u_.size(); ++i) {
            prefix1_[i + 1] = prefix1_[i] * (*laws_)[i].g1[u_[i]];
            prefix2_[i + 1] = prefix2_[i] * (*laws_)[i].g2[u_[i]];
        }
    }

    const std::vector<LawPair<T>>* laws_;
    std::vector<std::size_t> u_;
    std::vector<T> prefix1_, prefix2_;  // prefix*[i] = mass of digits < i
};

// Bayes-optimal fusion over all decision tables: per tuple, pick the
// hypothesis with the larger posterior mass (ties to H1).  This materializes
// the MAP rule; it exists as an independent oracle for that equivalence.
template <class T>
FusionTable exhaustive_best_fusion(const std::vector<LawPair<T>>& laws, const Prior<T>& prior) {
    if (laws.empty()) throw input_error("empty team");
    const std::size_t usz = laws[0].size();
    for (const auto& lp : laws)
        if (lp.size() != usz) throw input_error("sensors must share one action alphabet");
    const std::uint64_t total = checked_tuple_count(usz, laws.size(), kFusionTableCap, "exhaustive_best_fusion");

    FusionTable table;
    table.n = laws.size();
    table.u_size = usz;
    table.decide.reserve(total);
    JointEnumerator<T> e(laws);
    do {
        table.decide.push_back(prior.p1 * e.mass1() >= prior.p2 * e.mass2() ? Hypothesis::H1
                                                                            : Hypothesis::H2);
    } while (e.next());
    return table;
}

template <class T>
FusionTable exhaustive_best_fusion(const TeamPolicy<T>& team, const FiniteModel<T>& m) {
    return exhaustive_best_fusion(team_output_laws(team, m), m.prior);
}

// Bayesian-regime analog over the mixture-averaged joint law.
template <class T>
FusionTable exhaustive_best_fusion(const MixtureLaws<T>& mix, const Prior<T>& prior) {
    if (mix.atoms.empty()) throw input_error("empty mixture");
    const std::size_t usz = mix.atoms[0].laws.at(0).size();
    const std::uint64_t total = checked_tuple_count(usz, mix.n(), kFusionTableCap, "exhaustive_best_fusion");

    FusionTable table;
    table.n = mix.n();
    table.u_size = usz;
    table.decide.reserve(total);
    std::vector<std::size_t> u(table.n, 0);
    for (std::uint64_t r = 0; r < total; ++r) {
        table.decide.push_back(bayes_map_decide(mix, u, prior));
        for (std::size_t p = table.n; p > 0; --p) {
            if (++u[p - 1] < usz) break;
            u[p - 1] = 0;
        }
    }
    return table;
}

}  // namespace detkit
