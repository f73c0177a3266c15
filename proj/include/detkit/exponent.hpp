#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "detkit/errors.hpp"
#include "detkit/model.hpp"
#include "detkit/policy.hpp"

namespace detkit {

// Minimized s-tilted log-sum of a law pair.
struct ChernoffResult {
    double s_star = 0.0;
    double value = 0.0;                             // <= 0
    std::vector<std::pair<double, double>> trace;   // optional (s, value) grid
};

// Finite-N exponent lower bound with its 1/sqrt(N) correction term.
struct BoundReport {
    double lower_bound = 0.0;  // main_term - kappa at s_at_bound
    double kappa = 0.0;        // >= 0, shrinks like 1/sqrt(N)
    double s_at_bound = 0.0;
    bool void_flag = false;    // some sensor law has one-sided support
};

// ---------------------------------------------------------------------------
// Chernoff objective
// ---------------------------------------------------------------------------

// f(s) = log sum_u g1(u)^(1-s) g2(u)^s over the common support of g1 and g2
// (a term vanishes whenever either mass is zero, at every s including the
// endpoints).  This makes f continuous and convex on [0,1], with
// f(0) = log g1(common support) and f(1) = log g2(common support); the
// endpoint value is 0 exactly when the corresponding support inclusion holds.
// Disjoint supports give -infinity (perfect separation).
inline double chernoff_objective(const LawPair<double>& law, double s) {
    if (s < 0.0 || s > 1.0) throw input_error("s must lie in [0,1]");
    bool any1 = false, any2 = false;
    double sum = 0.0;
    for (std::size_t u = 0; u < law.size(); ++u) {
        const double a = law.g1[u], b = law.g2[u];
        any1 = any1 || a > 0.0;
        any2 = any2 || b > 0.0;
        if (a > 0.0 && b > 0.0) sum += std::exp((1.0 - s) * std::log(a) + s * std::log(b));
    }
    if (!any1 && !any2) throw input_error("degenerate law pair: no mass under either hypothesis");
    return std::log(sum);  // log(0) = -inf for disjoint supports
}

inline double chernoff_objective(const std::vector<double>& g1, const std::vector<double>& g2, double s) {
    if (g1.size() != g2.size()) throw input_error("law lengths differ");
    return chernoff_objective(LawPair<double>{g1, g2}, s);
}

template <class T>
double chernoff_objective(const LawPair<T>& law, double s) {
    return chernoff_objective(to_double_laws(law), s);
}

namespace detail {

// Golden-section minimization of a scalar convex function on [lo, hi],
// refined until the bracket is shorter than tol.
template <class F>
std::pair<double, double> golden_min(const F& f, double lo, double hi, double tol) {
    constexpr double invphi = 0.61803398874989484820;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    const double mid = (a + b) / 2.0;
    return {mid, f(mid)};
}

}  // namespace detail

// Minimizes the Chernoff objective over s in [0,1]: golden-section interior
// search refined to 1e-9 in s, with both endpoints evaluated explicitly (the
// minimum of a one-sided pair sits exactly at a boundary).
inline ChernoffResult chernoff_exponent(const LawPair<double>& law, bool with_trace = false) {
    const auto f = [&](double s) { return chernoff_objective(law, s); };
    if (!std::isfinite(f(0.5)))
        throw input_error("chernoff_exponent: objective is non-finite on the whole interval (disjoint supports)");

    auto [s_in, f_in] = detail::golden_min(f, 0.0, 1.0, 1e-9);
    ChernoffResult r;
    r.s_star = s_in;
    r.value = f_in;
    // Endpoints are evaluated explicitly: with one-sided supports the true
    // minimum sits exactly on a boundary and interior search only approaches
    // it.  Ties prefer the boundary so the reported s_star is exact there.
    const double f0 = f(0.0), f1 = f(1.0);
    if (f0 <= r.value) {
        r.s_star = 0.0;
        r.value = f0;
    }
    if (f1 <= r.value) {
        r.s_star = 1.0;
        r.value = f1;
    }
    if (with_trace) {
        r.trace.reserve(1001);
        for (int i = 0; i <= 1000; ++i) {
            const double s = static_cast<double>(i) / 1000.0;
            r.trace.emplace_back(s, f(s));
        }
    }
    return r;
}

template <class T>
ChernoffResult chernoff_exponent(const LawPair<T>& law, bool with_trace = false) {
    return chernoff_exponent(to_double_laws(law), with_trace);
}

// Exponent of one sensor kernel on a model: the objective applied to its
// output-law pair.
template <class T>
ChernoffResult chernoff_exponent(const SensorKernel<T>& kernel, const FiniteModel<T>& m,
                                 bool with_trace = false) {
    return chernoff_exponent(output_law_pair(kernel, m), with_trace);
}

template <class T>
ChernoffResult chernoff_exponent(const ThresholdPolicy<T>& tp, const FiniteModel<T>& m, std::size_t u_size,
                                 bool with_trace = false) {
    return chernoff_exponent(output_law_pair(compile_threshold(tp, m, u_size), m), with_trace);
}

inline ChernoffResult chernoff_exponent(const ThresholdPolicy<double>& tp, const GaussianModel& m,
                                        std::size_t u_size, bool with_trace = false) {
    return chernoff_exponent(output_law_pair(tp, m, u_size), with_trace);
}

// ---------------------------------------------------------------------------
// Mixtures of kernels
// ---------------------------------------------------------------------------

struct MixtureExponent {
    ChernoffResult mixed;        // min_s of the weighted-average objective
    std::size_t best_kernel = 0;  // index of the best point mass
    ChernoffResult best;          // its exponent: the optimum over all mixtures
};

// The averaged objective is linear in the mixture weights at every s, so the
// optimum over all mixtures of the given kernels is attained at a point mass
// on the best kernel; both the mixed value and that reduction are reported.
inline MixtureExponent mixture_exponent(const std::vector<std::pair<double, LawPair<double>>>& mix,
                                        bool with_trace = false) {
    if (mix.empty()) throw input_error("empty kernel mixture");
    double wsum = 0.0;
    for (const auto& [w, law] : mix) {
        if (w <= 0.0) throw input_error("mixture weights must be strictly positive");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw input_error("mixture weights must sum to 1");

    const auto favg = [&](double s) {
        double v = 0.0;
        for (const auto& [w, law] : mix) v += w * chernoff_objective(law, s);
        return v;
    };
    MixtureExponent out;
    auto [s_in, f_in] = detail::golden_min(favg, 0.0, 1.0, 1e-9);
    out.mixed.s_star = s_in;
    out.mixed.value = f_in;
    for (double s : {0.0, 1.0})
        if (favg(s) <= out.mixed.value) {
            out.mixed.s_star = s;
            out.mixed.value = favg(s);
        }
    if (with_trace)
        for (int i = 0; i <= 1000; ++i) {
            const double s = static_cast<double>(i) / 1000.0;
            out.mixed.trace.emplace_back(s, favg(s));
        }

    for (std::size_t k = 0; k < mix.size(); ++k) {
        ChernoffResult r = chernoff_exponent(mix[k].second);
        if (k == 0 || r.value < out.best.value) {
            out.best = r;
            out.best_kernel = k;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Characteristic diagnostic
// ---------------------------------------------------------------------------

// Prior-weighted power sum of the per-action likelihood ratio:
//   sum_j P(Hj) sum_u g_j(u) * (g1(u)/g2(u))^s.
// A large-deviations characteristic quantity reported for inspection only;
// nothing in this library equates it with the minimized Chernoff objective.
// Actions with g2(u) = 0 < g1(u) contribute +infinity for s > 0.
inline double characteristic_diagnostic(const LawPair<double>& law, double p1, double p2, double s) {
    if (s < 0.0 || s > 1.0) throw input_error("s must lie in [0,1]");
    double total = 0.0;
    for (int j = 0; j < 2; ++j) {
        const std::vector<double>& gj = (j == 0) ? law.g1 : law.g2;
        const double pj = (j == 0) ? p1 : p2;
        double e = 0.0;
        for (std::size_t u = 0; u < law.size(); ++u) {
            if (gj[u] <= 0.0) continue;  // outside the conditioning support
            const double a = law.g1[u], b = law.g2[u];
            double ratio_pow;
            if (b == 0.0)
                ratio_pow = s > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
            else if (a == 0.0)
                ratio_pow = s > 0.0 ? 0.0 : 1.0;
            else
                ratio_pow = std::exp(s * (std::log(a) - std::log(b)));
            e += gj[u] * ratio_pow;
        }
        total += pj * e;
    }
    return total;
}

template <class T>
double characteristic_diagnostic(const SensorKernel<T>& kernel, const FiniteModel<T>& m, double s) {
    return characteristic_diagnostic(to_double_laws(output_law_pair(kernel, m)), to_double(m.prior.p1),
                                     to_double(m.prior.p2), s);
}

// ---------------------------------------------------------------------------
// Finite-N lower bound
// ---------------------------------------------------------------------------

constexpr double kBoundStep = 1e-4;  // central-difference step, clips s to [h, 1-h]

// Second derivative of the tilted log-MGF by central differences.
inline double log_mgf_second_derivative(const LawPair<double>& law, double s) {
    const double h = kBoundStep;
    const double f0 = chernoff_objective(law, s - h);
    const double f1 = chernoff_objective(law, s);
    const double f2 = chernoff_objective(law, s + h);
    return (f0 - 2.0 * f1 + f2) / (h * h);
}

// Finite-N lower bound on the MAP-fused team's empirical error exponent:
//   min over s in [h, 1-h] of (1/N) sum_i f_i(s) - (1/N) sqrt(sum_i f_i''(s))
// where f_i is sensor i's tilted log-MGF (the Chernoff objective of its law
// pair) and f_i'' is taken by central differences with step h = 1e-4.  The
// guarantee needs every per-sensor action law to have two-sided support; a
// one-sided law puts an infinite-variance atom in the log-likelihood and the
// report is flagged void (computed from the common-support objective anyway,
// for inspection).
inline BoundReport exponent_lower_bound(const std::vector<LawPair<double>>& laws) {
    if (laws.empty()) throw input_error("empty team");
    const double N = static_cast<double>(laws.size());

    BoundReport rep;
    for (const auto& law : laws)
        for (std::size_t u = 0; u < law.size(); ++u)
            if ((law.g1[u] > 0.0) != (law.g2[u] > 0.0)) rep.void_flag = true;

    const double h = kBoundStep;
    const auto bracket = [&](double s) {
        double main = 0.0, curv = 0.0;
        for (const auto& law : laws) {
            main += chernoff_objective(law, s);
            curv += std::max(0.0, log_mgf_second_derivative(law, s));
        }
        return std::pair<double, double>{main / N, std::sqrt(curv) / N};
    };
    const auto objective = [&](double s) {
        auto [main, kappa] = bracket(s);
        return main - kappa;
    };

    // Dense grid argmin (the bracket need not be convex), then a local
    // golden-section polish around the best cell.
    const int grid = 4000;
    double best_s = h, best_v = objective(h);
    for (int i = 1; i <= grid; ++i) {
        const double s = h + (1.0 - 2.0 * h) * static_cast<double>(i) / grid;
        const double v = objective(s);
        if (v < best_v) {
            best_v = v;
            best_s = s;
        }
    }
    const double cell = (1.0 - 2.0 * h) / grid;
    auto [s_ref, v_ref] = detail::golden_min(objective, std::max(h, best_s - cell),
                                             std::min(1.0 - h, best_s + cell), 1e-10);
    if (v_ref < best_v) {
        best_s = s_ref;
        best_v = v_ref;
    }

    auto [main, kappa] = bracket(best_s);
    rep.s_at_bound = best_s;
    rep.kappa = kappa;
    rep.lower_bound = main - kappa;
    return rep;
}

template <class T>
BoundReport exponent_lower_bound(const TeamPolicy<T>& team, const FiniteModel<T>& m) {
    for (const auto& k : team.kernels)
        if (!k.deterministic()) throw input_error("exponent_lower_bound requires a deterministic team");
    return exponent_lower_bound(to_double_laws(team_output_laws(team, m)));
}

}  // namespace detkit
