#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "detkit/errors.hpp"
#include "detkit/evaluate.hpp"
#include "detkit/exponent.hpp"
#include "detkit/fusion.hpp"
#include "detkit/model.hpp"
#include "detkit/policy.hpp"

namespace detkit {

constexpr std::uint64_t kDesignBudget = std::uint64_t{1} << 24;  // candidates x outcomes

// Outcome of a team-design search.  The objective value in `report` is the
// exact risk of the returned team under MAP fusion, reproducible through the
// evaluator; exponent-driven searches return their own result types.
template <class T>
struct DesignResult {
    std::vector<SensorKernel<T>> kernels;        // winning team
    std::vector<ThresholdPolicy<T>> thresholds;  // per-sensor threshold form, when the search used one
    RiskReport<T> report;
    std::uint64_t candidates = 0;
    std::string method;
    bool person_by_person = false;  // a fixpoint of unilateral deviations, not a global claim
    bool converged = true;
    std::vector<T> risk_trace;  // accepted risks, coordinate descent only
};

namespace detail {

// Deduplicated per-candidate law pairs + a multiset-keyed risk cache.  Team
// risk under MAP fusion is invariant under permuting sensors (and the risk of
// a law pair is all that a kernel contributes), so one evaluation covers
// every ordering of the same candidate multiset.  Enumeration still visits
// each ordered team so candidate counts and lexicographic tie-breaks match
// the documented search space.
template <class T>
struct RiskSearch {
    std::vector<LawPair<T>> uniq;
    std::vector<std::size_t> law_of;  // candidate index -> uniq index
    Prior<T> prior;
    std::map<std::vector<std::size_t>, T> cache;

    RiskSearch(const std::vector<LawPair<T>>& candidate_laws, const Prior<T>& p) : prior(p) {
        for (const auto& law : candidate_laws) {
            std::size_t j = 0;
            for (; j < uniq.size(); ++j)
                if (uniq[j] == law) break;
            if (j == uniq.size()) uniq.push_back(law);
            law_of.push_back(j);
        }
    }

    // Exact team risk for candidate indices `team` (any order).
    const T& risk(const std::vector<std::size_t>& team) {
        std::vector<std::size_t> key;
        key.reserve(team.size());
        for (std::size_t c : team) key.push_back(law_of[c]);
        std::sort(key.begin(), key.end());
        auto it = cache.find(key);
        if (it == cache.end()) {
            std::vector<LawPair<T>> laws;
            laws.reserve(key.size());
            for (std::size_t j : key) laws.push_back(uniq[j]);
            it = cache.emplace(std::move(key), exact_risk(laws, prior).risk).first;
        }
        return it->second;
    }
};

// Odometer over ordered candidate assignments; visits teams in lexicographic
// order so "first strict improvement" implements the documented tie-break.
template <class T, class OnTeam>
std::uint64_t for_each_team(std::size_t n_candidates, std::size_t n, const OnTeam& on_team) {
    std::vector<std::size_t> pick(n, 0);
    std::uint64_t visited = 0;
    while (true) {
        on_team(const_cast<const std::vector<std::size_t>&>(pick));
        ++visited;
        std::size_t p = n;
        while (p > 0) {
            if (++pick[p - 1] < n_candidates) break;
            pick[--p] = 0;
        }
        if (p == 0) return visited;
    }
}

inline std::uint64_t checked_pow(std::uint64_t base, std::size_t e, std::uint64_t cap, const char* op) {
    std::uint64_t v = 1;
    for (std::size_t i = 0; i < e; ++i) {
        if (base != 0 && v > cap / base)
            throw resource_cap_error(std::string(op) + ": search would need more than " + std::to_string(cap) +
                                     " work units");
        v *= base;
    }
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exhaustive searches
// ---------------------------------------------------------------------------

// Exact minimum of the MAP-fused Bayes risk over all N-tuples of canonical
// threshold policies.  Ties break to the lexicographically first tuple in
// enumeration order.
template <class T>
DesignResult<T> best_team_exhaustive(const FiniteModel<T>& m, std::size_t n, std::size_t u_size) {
    if (n == 0) throw input_error("team size must be >= 1");
    const EnumeratedPolicies<T> pol = enumerate_threshold_policies(m, u_size);
    const std::uint64_t teams =
        detail::checked_pow(pol.policies.size(), n, kDesignBudget, "best_team_exhaustive");
    detail::checked_pow(u_size, n, kDesignBudget / std::max<std::uint64_t>(teams, 1), "best_team_exhaustive");

    std::vector<SensorKernel<T>> kernels;
    std::vector<LawPair<T>> laws;
    for (const auto& tp : pol.policies) {
        kernels.push_back(compile_threshold(tp, m, u_size));
        laws.push_back(output_law_pair(kernels.back(), m));
    }

    detail::RiskSearch<T> search(laws, m.prior);
    std::vector<std::size_t> best;
    T best_risk(0);
    bool first = true;
    DesignResult<T> out;
    out.candidates = detail::for_each_team<T>(pol.policies.size(), n, [&](const std::vector<std::size_t>& pick) {
        const T& r = search.risk(pick);
        if (first || r < best_risk) {
            first = false;
            best_risk = r;
            best = pick;
        }
    });

    std::vector<LawPair<T>> best_laws;
    for (std::size_t c : best) {
        out.kernels.push_back(kernels[c]);
        out.thresholds.push_back(pol.policies[c]);
        best_laws.push_back(laws[c]);
    }
    out.report = exact_risk(best_laws, m.prior);
    out.method = "threshold-exhaustive";
    return out;
}

// Brute-force oracle over ALL deterministic symbol-to-action maps (not just
// monotone ones); exists to certify that the threshold restriction is
// lossless.  Candidate maps are enumerated as base-|U| digit strings over the
// alphabet in display order.
template <class T>
DesignResult<T> best_team_all_maps_oracle(const FiniteModel<T>& m, std::size_t n, std::size_t u_size) {
    if (n == 0) throw input_error("team size must be >= 1");
    const std::uint64_t n_maps =
        detail::checked_pow(u_size, m.size(), kDesignBudget, "best_team_all_maps_oracle");
    detail::checked_pow(n_maps, n, kDesignBudget, "best_team_all_maps_oracle");

    std::vector<SensorKernel<T>> kernels;
    std::vector<LawPair<T>> laws;
    for (std::uint64_t code = 0; code < n_maps; ++code) {
        SensorKernel<T> k;
        k.rows.assign(m.size(), std::vector<T>(u_size, T(0)));
        std::uint64_t c = code;
        for (std::size_t y = 0; y < m.size(); ++y) {
            k.rows[y][c % u_size] = T(1);
            c /= u_size;
        }
        kernels.push_back(std::move(k));
        laws.push_back(output_law_pair(kernels.back(), m));
    }

    detail::RiskSearch<T> search(laws, m.prior);
    std::vector<std::size_t> best;
    T best_risk(0);
    bool first = true;
    DesignResult<T> out;
    out.candidates = detail::for_each_team<T>(kernels.size(), n, [&](const std::vector<std::size_t>& pick) {
        const T& r = search.risk(pick);
        if (first || r < best_risk) {
            first = false;
            best_risk = r;
            best = pick;
        }
    });

    std::vector<LawPair<T>> best_laws;
    for (std::size_t c : best) {
        out.kernels.push_back(kernels[c]);
        best_laws.push_back(laws[c]);
    }
    out.report = exact_risk(best_laws, m.prior);
    out.method = "all-maps-oracle";
    return out;
}

// ---------------------------------------------------------------------------
// Person-by-person best response
// ---------------------------------------------------------------------------

// Optimal unilateral deviation of sensor i with everyone else (and the MAP
// fusion rule of the current team) held fixed.  Per action u, the deviation
// cost is affine in the likelihood ratio l:
//     G1[u] + G2[u] * l * (p2/p1),
// where Gj[u] is the expected cost conditioned on {H = Hj, sensor i plays u};
// minimizing pointwise over each LR atom traces the lower envelope of those
// lines, which is a monotone partition, i.e. a threshold policy.
template <class T>
ThresholdPolicy<T> best_response(std::size_t i, const TeamPolicy<T>& team, const FiniteModel<T>& m,
                                 std::size_t u_size) {
    if (i >= team.n()) throw input_error("sensor index out of range");
    const auto laws = team_output_laws(team, m);
    const FusionTable table = exhaustive_best_fusion(laws, m.prior);

    // Deviation-cost coefficients by enumeration of the other sensors.
    std::vector<T> G1(u_size, T(0)), G2(u_size, T(0));
    std::vector<std::uint64_t> place(team.n());
    {
        std::uint64_t p = 1;
        for (std::size_t k = team.n(); k > 0; --k) {
            place[k - 1] = p;
            p *= u_size;
        }
    }
    std::vector<LawPair<T>> others;
    for (std::size_t k = 0; k < team.n(); ++k)
        if (k != i) others.push_back(laws[k]);

    auto fold = [&](const std::vector<std::size_t>& o_tuple, const T& mass1, const T& mass2) {
        std::uint64_t base = 0;
        std::size_t oi = 0;
        for (std::size_t k = 0; k < team.n(); ++k)
            if (k != i) base += o_tuple[oi++] * place[k];
        for (std::size_t u = 0; u < u_size; ++u) {
            const Hypothesis d = table.decide[base + u * place[i]];
            if (d == Hypothesis::H2) G1[u] += mass1;  // cost under H1
            if (d == Hypothesis::H1) G2[u] += mass2;  // cost under H2
        }
    };
    if (others.empty()) {
        fold({}, T(1), T(1));
    } else {
        JointEnumerator<T> e(others);
        do {
            fold(e.tuple(), e.mass1(), e.mass2());
        } while (e.next());
    }

    // Envelope evaluated at the model's LR atoms, in exact arithmetic.
    // At a finite atom l the objective (scaled by p1 > 0) is
    // p1*G1[u] + p2*l*G2[u]; the +infinity atom is the slope-then-intercept
    // lexicographic limit.  Ties pick the smallest action, which keeps each
    // line's winning set contiguous.
    const LrLaw<T> lr = induced_lr_law(m);
    std::vector<std::size_t> choice(lr.atoms.size());
    for (std::size_t a = 0; a < lr.atoms.size(); ++a) {
        std::size_t arg = 0;
        if (lr.atoms[a].infinite) {
            for (std::size_t u = 1; u < u_size; ++u)
                if (G2[u] < G2[arg] || (G2[u] == G2[arg] && G1[u] < G1[arg])) arg = u;
        } else {
            const T& l = lr.atoms[a].value;
            T best_v = m.prior.p1 * G1[0] + m.prior.p2 * l * G2[0];
            for (std::size_t u = 1; u < u_size; ++u) {
                T v = m.prior.p1 * G1[u] + m.prior.p2 * l * G2[u];
                if (v < best_v) {
                    best_v = std::move(v);
                    arg = u;
                }
            }
        }
        choice[a] = arg;
    }

    // Merge equal-choice runs into bins; cut between runs at exact midpoints
    // (one unit past the largest finite atom when the next atom is infinite).
    ThresholdPolicy<T> tp;
    for (std::size_t a = 0; a < lr.atoms.size(); ++a) {
        if (a > 0 && choice[a] == choice[a - 1]) continue;
        if (a > 0) {
            if (lr.atoms[a].infinite)
                tp.thresholds.push_back(lr.atoms[a - 1].value + T(1));
            else
                tp.thresholds.push_back((lr.atoms[a - 1].value + lr.atoms[a].value) / T(2));
        }
        tp.labels.push_back(static_cast<int>(choice[a]) + 1);
    }
    tp.validate(u_size);
    return tp;
}

// Cycles best_response over the sensors, accepting strict improvements, until
// a full round changes nothing or max_rounds is hit.  The result is a
// person-by-person fixpoint, and such points need not be global optima (two
// identical sensors can be mutually best responses while a mixed team does
// strictly better), so the flag travels with the result.
template <class T>
DesignResult<T> coordinate_descent(const TeamPolicy<T>& initial, const FiniteModel<T>& m, std::size_t u_size,
                                   std::size_t max_rounds = 32) {
    DesignResult<T> out;
    out.method = "coordinate-descent";
    out.person_by_person = true;

    TeamPolicy<T> team = initial;
    T cur = exact_risk(team, m).risk;
    out.risk_trace.push_back(cur);
    out.converged = false;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        bool improved = false;
        for (std::size_t i = 0; i < team.n(); ++i) {
            const ThresholdPolicy<T> tp = best_response(i, team, m, u_size);
            TeamPolicy<T> candidate = team;
            candidate.kernels[i] = compile_threshold(tp, m, u_size);
            ++out.candidates;
            const T r = exact_risk(candidate, m).risk;
            if (r < cur) {
                team = std::move(candidate);
                cur = r;
                out.risk_trace.push_back(cur);
                improved = true;
            }
        }
        if (!improved) {
            out.converged = true;
            break;
        }
    }
    out.kernels = team.kernels;
    out.report = exact_risk(team, m);
    return out;
}

// ---------------------------------------------------------------------------
// Grouped (two-group / replicated) exact evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::vector<unsigned>> compositions(unsigned total, std::size_t parts) {
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> cur(parts, 0);
    const auto rec = [&](auto&& self, std::size_t pos, unsigned left) -> void {
        if (pos + 1 == parts) {
            cur[pos] = left;
            out.push_back(cur);
            return;
        }
        for (unsigned c = 0; c <= left; ++c) {
            cur[pos] = c;
            self(self, pos + 1, left - c);
        }
    };
    if (parts > 0) rec(rec, 0, total);
    return out;
}

template <class T>
T multinomial(const std::vector<unsigned>& c) {
    BigInt v = 1;
    unsigned used = 0;
    for (unsigned ci : c)
        for (unsigned j = 1; j <= ci; ++j) v = v * BigInt(++used) / BigInt(j);
    if constexpr (std::is_same_v<T, double>)
        return v.template convert_to<double>();
    else
        return T(v);
}

// Per-group sufficient statistics: action counts with multinomial weights.
template <class T>
struct GroupTerms {
    std::vector<T> weight, mass1, mass2;
};

template <class T>
GroupTerms<T> group_terms(const LawPair<T>& law, unsigned k) {
    GroupTerms<T> g;
    const std::size_t usz = law.size();
    std::vector<std::vector<T>> pow1(usz), pow2(usz);
    for (std::size_t u = 0; u < usz; ++u) {
        pow1[u].assign(k + 1, T(1));
        pow2[u].assign(k + 1, T(1));
        for (unsigned e = 1; e <= k; ++e) {
            pow1[u][e] = pow1[u][e - 1] * law.g1[u];
            pow2[u][e] = pow2[u][e - 1] * law.g2[u];
        }
    }
    for (const auto& c : compositions(k, usz)) {
        T m1(1), m2(1);
        for (std::size_t u = 0; u < usz; ++u) {
            m1 *= pow1[u][c[u]];
            m2 *= pow2[u][c[u]];
        }
        g.weight.push_back(multinomial<T>(c));
        g.mass1.push_back(std::move(m1));
        g.mass2.push_back(std::move(m2));
    }
    return g;
}

}  // namespace detail

// Exact MAP risk of the team "k_a sensors with law_a, k_b sensors with
// law_b".  Identical sensors make per-group action counts sufficient, so the
// sum runs over count pairs with multinomial weights instead of |U|^N tuples;
// values agree exactly with exact_risk on the expanded team.
template <class T>
RiskReport<T> grouped_exact_risk(const LawPair<T>& law_a, unsigned k_a, const LawPair<T>& law_b, unsigned k_b,
                                 const Prior<T>& prior) {
    if (k_a + k_b == 0) throw input_error("team size must be >= 1");
    if (law_b.size() != law_a.size() && k_b > 0) throw input_error("groups must share one action alphabet");
    const detail::GroupTerms<T> A = detail::group_terms(law_a, k_a);
    const detail::GroupTerms<T> B = detail::group_terms(k_b > 0 ? law_b : law_a, k_b);

    RiskReport<T> rep;
    rep.n = k_a + k_b;
    for (std::size_t ia = 0; ia < A.weight.size(); ++ia)
        for (std::size_t ib = 0; ib < B.weight.size(); ++ib) {
            const T w = A.weight[ia] * B.weight[ib];
            const T m1 = A.mass1[ia] * B.mass1[ib];
            const T m2 = A.mass2[ia] * B.mass2[ib];
            if (prior.p1 * m1 >= prior.p2 * m2)
                rep.err_h2 += w * m2;
            else
                rep.err_h1 += w * m1;
        }
    rep.risk = prior.p1 * rep.err_h1 + prior.p2 * rep.err_h2;
    rep.exponent = error_exponent_empirical(rep.risk, rep.n);
    return rep;
}

// Best split design "k sensors use policy a, N-k use policy b" over all
// canonical threshold-policy pairs and splits k in [k_min, k_max].  The
// default range includes the symmetric endpoints; pass 1..N-1 to force both
// groups nonempty, and distinct_pair=true to additionally require a != b
// (i.e. a genuinely asymmetric design).  Ties break lexicographically over
// (a, b, k) enumeration order.
template <class T>
DesignResult<T> best_two_group(const FiniteModel<T>& m, std::size_t n, std::size_t u_size,
                               std::size_t k_min = 0, std::size_t k_max = SIZE_MAX,
                               bool distinct_pair = false) {
    if (n == 0 || n > 64) throw input_error("team size must be in [1, 64]");
    k_max = std::min(k_max, n);
    if (k_min > k_max) throw input_error("empty split range");
    const EnumeratedPolicies<T> pol = enumerate_threshold_policies(m, u_size);
    std::vector<LawPair<T>> laws;
    for (const auto& tp : pol.policies) laws.push_back(output_law_pair(compile_threshold(tp, m, u_size), m));

    // Cache by unordered design key: (a,b,k) and (b,a,n-k) are the same team.
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, T> cache;
    DesignResult<T> out;
    out.method = "two-group";
    std::size_t best_a = 0, best_b = 0, best_k = 0;
    T best_risk(0);
    bool first = true;
    for (std::size_t a = 0; a < laws.size(); ++a)
        for (std::size_t b = 0; b < laws.size(); ++b) {
            if (distinct_pair && a == b) continue;
            for (std::size_t k = k_min; k <= k_max; ++k) {
                ++out.candidates;
                auto key = std::make_tuple(a, b, k);
                auto alt = std::make_tuple(b, a, n - k);
                if (alt < key) key = alt;
                auto it = cache.find(key);
                if (it == cache.end())
                    it = cache
                             .emplace(key, grouped_exact_risk(laws[std::get<0>(key)],
                                                              static_cast<unsigned>(std::get<2>(key)),
                                                              laws[std::get<1>(key)],
                                                              static_cast<unsigned>(n - std::get<2>(key)),
                                                              m.prior)
                                               .risk)
                             .first;
                if (first || it->second < best_risk) {
                    first = false;
                    best_risk = it->second;
                    best_a = a;
                    best_b = b;
                    best_k = k;
                }
            }
        }
    if (first) throw input_error("no feasible two-group design in the requested range");

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t p = i < best_k ? best_a : best_b;
        out.thresholds.push_back(pol.policies[p]);
        out.kernels.push_back(compile_threshold(pol.policies[p], m, u_size));
    }
    out.report = grouped_exact_risk(laws[best_a], static_cast<unsigned>(best_k), laws[best_b],
                                    static_cast<unsigned>(n - best_k), m.prior);
    return out;
}

// ---------------------------------------------------------------------------
// Exponent-optimal symmetric designs
// ---------------------------------------------------------------------------

template <class T>
struct SymmetricExponentDesign {
    ThresholdPolicy<T> policy;
    ChernoffResult chernoff;
    std::uint64_t candidates = 0;
    bool perfect_separation = false;  // disjoint output supports: exponent -inf
    bool converged = true;
};

// Finite models: exact argmin of the Chernoff value over the canonical
// threshold-policy enumeration.  By the linearity of the averaged objective
// in mixture weights, this point mass is also optimal over all randomized
// symmetric designs built from these kernels.
template <class T>
SymmetricExponentDesign<T> best_symmetric_exponent(const FiniteModel<T>& m, std::size_t u_size) {
    const EnumeratedPolicies<T> pol = enumerate_threshold_policies(m, u_size);
    SymmetricExponentDesign<T> out;
    bool first = true;
    for (const auto& tp : pol.policies) {
        ++out.candidates;
        const auto law = to_double_laws(output_law_pair(compile_threshold(tp, m, u_size), m));
        bool overlap = false;
        for (std::size_t u = 0; u < law.size(); ++u) overlap = overlap || (law.g1[u] > 0 && law.g2[u] > 0);

        ChernoffResult r;
        bool perfect = false;
        if (overlap) {
            r = chernoff_exponent(law);
        } else {
            perfect = true;  // risk decays faster than any exponential
            r.s_star = 0.0;
            r.value = -std::numeric_limits<double>::infinity();
        }
        if (first || r.value < out.chernoff.value) {
            first = false;
            out.policy = tp;
            out.chernoff = r;
            out.perfect_separation = perfect;
        }
    }
    return out;
}

struct GaussianDesignOptions {
    std::size_t grid_points = 2001;  // per-threshold scan resolution
    double span_sigmas = 6.0;        // scan window: means +/- span*sigma
    double tol = 1e-7;               // y-axis refinement tolerance
    std::size_t max_passes = 16;     // coordinate passes for multi-threshold
};

// Gaussian models: the quantizer thresholds live on the observation axis
// (the LR is monotone in y, so this is the same search).  Single threshold:
// grid scan then golden refinement.  More bins: cyclic per-threshold scans
// until a pass stops moving, flagged non-converged at the pass budget.
inline SymmetricExponentDesign<double> best_symmetric_exponent(const GaussianModel& m, std::size_t u_size,
                                                               const GaussianDesignOptions& opt = {}) {
    if (u_size < 2) throw input_error("need at least two actions to quantize");
    if (m.mean1 == m.mean2) {
        // Uninformative: every quantizer has exponent 0.
        SymmetricExponentDesign<double> out;
        out.policy.thresholds.assign(u_size - 1, 0.0);
        for (std::size_t b = 0; b < u_size - 1; ++b) out.policy.thresholds[b] = 1.0 + static_cast<double>(b);
        for (std::size_t b = 0; b < u_size; ++b) out.policy.labels.push_back(static_cast<int>(b) + 1);
        out.chernoff.value = 0.0;
        out.candidates = 1;
        return out;
    }

    const double lo = std::min(m.mean1, m.mean2) - opt.span_sigmas * m.sigma;
    const double hi = std::max(m.mean1, m.mean2) + opt.span_sigmas * m.sigma;

    // Chernoff value of the quantizer with ascending y-cuts.
    std::uint64_t evals = 0;
    const auto value_of = [&](const std::vector<double>& ycuts) {
        ++evals;
        LawPair<double> law{std::vector<double>(u_size, 0.0), std::vector<double>(u_size, 0.0)};
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b <= ycuts.size(); ++b) {
            const double next = b < ycuts.size() ? ycuts[b] : std::numeric_limits<double>::infinity();
            law.g1[b] = normal_cdf((next - m.mean1) / m.sigma) - normal_cdf((prev - m.mean1) / m.sigma);
            law.g2[b] = normal_cdf((next - m.mean2) / m.sigma) - normal_cdf((prev - m.mean2) / m.sigma);
            prev = next;
        }
        bool overlap = false;
        for (std::size_t u = 0; u < u_size; ++u) overlap = overlap || (law.g1[u] > 0 && law.g2[u] > 0);
        if (!overlap) return -std::numeric_limits<double>::infinity();
        return chernoff_exponent(law).value;
    };

    const std::size_t cuts = u_size - 1;
    std::vector<double> y(cuts);
    for (std::size_t b = 0; b < cuts; ++b)
        y[b] = lo + (hi - lo) * static_cast<double>(b + 1) / static_cast<double>(cuts + 1);

    SymmetricExponentDesign<double> out;
    const auto refine_cut = [&](std::size_t b) {
        const double cell_lo = b == 0 ? lo : y[b - 1];
        const double cell_hi = b + 1 == cuts ? hi : y[b + 1];
        double best_y = y[b], best_v = value_of(y);
        for (std::size_t i = 0; i < opt.grid_points; ++i) {
            const double cand =
                cell_lo + (cell_hi - cell_lo) * static_cast<double>(i) / static_cast<double>(opt.grid_points - 1);
            std::vector<double> trial = y;
            trial[b] = cand;
            const double v = value_of(trial);
            if (v < best_v) {
                best_v = v;
                best_y = cand;
            }
        }
        const double step = (cell_hi - cell_lo) / static_cast<double>(opt.grid_points - 1);
        auto [yr, vr] = detail::golden_min(
            [&](double c) {
                std::vector<double> trial = y;
                trial[b] = c;
                return value_of(trial);
            },
            std::max(cell_lo, best_y - step), std::min(cell_hi, best_y + step), opt.tol);
        if (vr < best_v) {
            best_v = vr;
            best_y = yr;
        }
        const bool moved = std::abs(best_y - y[b]) > opt.tol;
        y[b] = best_y;
        return moved;
    };

    if (cuts == 1) {
        refine_cut(0);
        out.converged = true;
    } else {
        out.converged = false;
        for (std::size_t pass = 0; pass < opt.max_passes; ++pass) {
            bool moved = false;
            for (std::size_t b = 0; b < cuts; ++b) moved = refine_cut(b) || moved;
            if (!moved) {
                out.converged = true;
                break;
            }
        }
    }

    // Report the policy on the LR axis (ascending thresholds), labels in
    // y-order of the bins.
    const bool increasing = m.mean2 > m.mean1;
    for (std::size_t b = 0; b < cuts; ++b) {
        const double cut_y = increasing ? y[b] : y[cuts - 1 - b];
        out.policy.thresholds.push_back(likelihood_ratio(m, cut_y));
    }
    for (std::size_t b = 0; b < u_size; ++b) {
        const std::size_t ybin = increasing ? b : u_size - 1 - b;
        out.policy.labels.push_back(static_cast<int>(ybin) + 1);
    }
    const double v = value_of(y);
    out.chernoff.value = v;
    out.perfect_separation = !std::isfinite(v);
    if (std::isfinite(v)) {
        LawPair<double> law = output_law_pair(out.policy, m, u_size);
        out.chernoff = chernoff_exponent(law);
    }
    out.candidates = evals;
    return out;
}

}  // namespace detkit
