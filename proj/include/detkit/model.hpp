#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "detkit/errors.hpp"
#include "detkit/rational.hpp"
#include "detkit/rng.hpp"

namespace detkit {

// Binary hypothesis set.  H1 is the "signal absent" side: the fusion tie rule
// and all cost bookkeeping treat index 0 as H1.
enum class Hypothesis : int { H1 = 0, H2 = 1 };

inline Hypothesis other(Hypothesis h) { return h == Hypothesis::H1 ? Hypothesis::H2 : Hypothesis::H1; }

template <class T>
struct Prior {
    T p1{};  // P(H1), required > 0
    T p2{};  // P(H2), required > 0, p1 + p2 == 1

    const T& operator()(Hypothesis h) const { return h == Hypothesis::H1 ? p1 : p2; }
};

// Extended nonnegative real: the value set of a likelihood ratio.  +infinity
// is a first-class value (observations impossible under H1 but not H2).
template <class T>
struct Extended {
    T value{};
    bool infinite = false;

    static Extended inf() { return Extended{T{}, true}; }
    static Extended finite(T v) { return Extended{std::move(v), false}; }

    friend bool operator==(const Extended& a, const Extended& b) {
        if (a.infinite || b.infinite) return a.infinite == b.infinite;
        return a.value == b.value;
    }
    friend bool operator!=(const Extended& a, const Extended& b) { return !(a == b); }
    friend bool operator<(const Extended& a, const Extended& b) {
        if (a.infinite) return false;
        if (b.infinite) return true;
        return a.value < b.value;
    }
    friend bool operator<=(const Extended& a, const Extended& b) { return a < b || a == b; }
};

inline double to_double(const Extended<Rational>& x) {
    return x.infinite ? std::numeric_limits<double>::infinity() : to_double(x.value);
}
inline double to_double(const Extended<double>& x) {
    return x.infinite ? std::numeric_limits<double>::infinity() : x.value;
}

// Finite-alphabet observation model: one channel pmf per hypothesis over a
// common symbol alphabet, plus the prior.  T is Rational for exact work or
// double for float work.
template <class T>
struct FiniteModel {
    std::vector<std::int64_t> alphabet;  // distinct symbol names, display order
    std::vector<T> pmf1;                 // P(y | H1), aligned with alphabet
    std::vector<T> pmf2;                 // P(y | H2)
    Prior<T> prior;

    std::size_t size() const { return alphabet.size(); }

    std::size_t index_of(std::int64_t symbol) const {
        for (std::size_t i = 0; i < alphabet.size(); ++i)
            if (alphabet[i] == symbol) return i;
        throw input_error("symbol not in alphabet: " + std::to_string(symbol));
    }

    const std::vector<T>& pmf(Hypothesis h) const { return h == Hypothesis::H1 ? pmf1 : pmf2; }
};

// Gaussian mean-shift model: y ~ Normal(mean_h, sigma^2).  Always float.
struct GaussianModel {
    double mean1 = 0.0;
    double mean2 = 1.0;
    double sigma = 1.0;
    Prior<double> prior{0.5, 0.5};

    double mean(Hypothesis h) const { return h == Hypothesis::H1 ? mean1 : mean2; }
};

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// ---------------------------------------------------------------------------
// Likelihood ratios
// ---------------------------------------------------------------------------

// L(y) = P(y|H2) / P(y|H1) as an extended real.  p/0 with p > 0 is +infinity;
// 0/0 has no value (the symbol is unrealizable) and is rejected.
template <class T>
Extended<T> likelihood_ratio_at(const FiniteModel<T>& m, std::size_t idx) {
    if (idx >= m.size()) throw input_error("symbol index out of range");
    const T& a = m.pmf1[idx];
    const T& b = m.pmf2[idx];
    if (a == T(0)) {
        if (b == T(0))
            throw unreachable_tuple_error("likelihood ratio undefined: symbol has zero mass under both hypotheses");
        return Extended<T>::inf();
    }
    return Extended<T>::finite(b / a);
}

template <class T>
Extended<T> likelihood_ratio(const FiniteModel<T>& m, std::int64_t symbol) {
    return likelihood_ratio_at(m, m.index_of(symbol));
}

// Gaussian LR in closed form: exp((m2-m1)(2y-m1-m2) / (2 sigma^2)).
inline double likelihood_ratio(const GaussianModel& m, double y) {
    const double d = m.mean2 - m.mean1;
    return std::exp(d * (2.0 * y - m.mean1 - m.mean2) / (2.0 * m.sigma * m.sigma));
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

// validate_model never throws on a well-formed call: structural problems are
// listed in `violations` and finiteness of the log-LR second moments is
// reported per hypothesis.  An infinite log-moment does not invalidate
// finite-team evaluation; it only voids exponent lower-bound guarantees.
struct ValidationReport {
    bool ok = true;                       // structure: pmfs, prior, alphabet
    std::vector<std::string> violations;  // human-readable structural issues
    bool log_moment_finite_h1 = true;     // E[(log L)^2 | H1] < inf
    bool log_moment_finite_h2 = true;     // E[(log L)^2 | H2] < inf
    double log_moment_h1 = 0.0;           // the moment (inf when violated)
    double log_moment_h2 = 0.0;
    std::vector<std::int64_t> one_sided_symbols;  // symbols with mass under exactly one hypothesis
};

template <class T>
bool sums_to_one(const std::vector<T>& pmf) {
    T s(0);
    for (const T& p : pmf) s += p;
    if constexpr (std::is_same_v<T, double>)
        return std::abs(s - 1.0) <= 1e-12;
    else
        return s == T(1);
}

template <class T>
void validate_prior(const Prior<T>& prior, ValidationReport& r) {
    if (!(prior.p1 > T(0)) || !(prior.p2 > T(0))) {
        r.ok = false;
        r.violations.push_back("prior masses must be strictly positive");
    }
    if constexpr (std::is_same_v<T, double>) {
        if (std::abs(prior.p1 + prior.p2 - 1.0) > 1e-12) {
            r.ok = false;
            r.violations.push_back("prior masses must sum to 1");
        }
    } else {
        if (prior.p1 + prior.p2 != T(1)) {
            r.ok = false;
            r.violations.push_back("prior masses must sum to 1");
        }
    }
}

template <class T>
ValidationReport validate_model(const FiniteModel<T>& m) {
    ValidationReport r;
    if (m.alphabet.empty()) {
        r.ok = false;
        r.violations.push_back("empty alphabet");
    }
    if (m.pmf1.size() != m.alphabet.size() || m.pmf2.size() != m.alphabet.size()) {
        r.ok = false;
        r.violations.push_back("pmf length does not match alphabet length");
        return r;
    }
    {
        auto sorted = m.alphabet;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            r.ok = false;
            r.violations.push_back("alphabet symbols must be distinct");
        }
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.pmf1[i] < T(0) || m.pmf2[i] < T(0)) {
            r.ok = false;
            r.violations.push_back("negative pmf entry at symbol " + std::to_string(m.alphabet[i]));
        }
    }
    if (!sums_to_one(m.pmf1)) {
        r.ok = false;
        r.violations.push_back("pmf under H1 does not sum to 1");
    }
    if (!sums_to_one(m.pmf2)) {
        r.ok = false;
        r.violations.push_back("pmf under H2 does not sum to 1");
    }
    validate_prior(m.prior, r);
    if (!r.ok) return r;

    // Log-LR second moments.  A symbol with mass under exactly one hypothesis
    // puts an infinite log-LR where that hypothesis has positive mass.
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const bool z1 = (m.pmf1[i] == T(0)), z2 = (m.pmf2[i] == T(0));
        if (z1 && z2) continue;  // unrealizable symbol, contributes nothing
        if (z1 != z2) {
            r.one_sided_symbols.push_back(m.alphabet[i]);
            if (!z1) r.log_moment_finite_h1 = false;  // log L = -inf with H1 mass
            if (!z2) r.log_moment_finite_h2 = false;  // log L = +inf with H2 mass
            continue;
        }
        const double ll = std::log(to_double(m.pmf2[i])) - std::log(to_double(m.pmf1[i]));
        m1 += to_double(m.pmf1[i]) * ll * ll;
        m2 += to_double(m.pmf2[i]) * ll * ll;
    }
    r.log_moment_h1 = r.log_moment_finite_h1 ? m1 : std::numeric_limits<double>::infinity();
    r.log_moment_h2 = r.log_moment_finite_h2 ? m2 : std::numeric_limits<double>::infinity();
    return r;
}

// Gaussian case in closed form: log L(y) = a y + b with a = (m2-m1)/sigma^2,
// b = -a (m1+m2)/2, so E[(log L)^2 | Hj] = a^2 sigma^2 + (a mean_j + b)^2.
inline ValidationReport validate_model(const GaussianModel& m) {
    ValidationReport r;
    if (!(m.sigma > 0.0)) {
        r.ok = false;
        r.violations.push_back("sigma must be strictly positive");
    }
    validate_prior(m.prior, r);
    if (!r.ok) return r;
    const double a = (m.mean2 - m.mean1) / (m.sigma * m.sigma);
    const double b = -a * (m.mean1 + m.mean2) / 2.0;
    const double s2 = a * a * m.sigma * m.sigma;
    r.log_moment_h1 = s2 + (a * m.mean1 + b) * (a * m.mean1 + b);
    r.log_moment_h2 = s2 + (a * m.mean2 + b) * (a * m.mean2 + b);
    return r;
}

// ---------------------------------------------------------------------------
// Induced likelihood-ratio law
// ---------------------------------------------------------------------------

// The pushforward of each hypothesis's channel law through L.  Atoms are the
// distinct LR values of realizable symbols, sorted ascending with +infinity
// last; a zero mass is kept when the atom is realizable only under the other
// hypothesis.
template <class T>
struct LrLaw {
    std::vector<Extended<T>> atoms;
    std::vector<T> mass_h1;
    std::vector<T> mass_h2;

    const std::vector<T>& mass(Hypothesis h) const { return h == Hypothesis::H1 ? mass_h1 : mass_h2; }
};

template <class T>
LrLaw<T> induced_lr_law(const FiniteModel<T>& m) {
    // Collect (lr, mass1, mass2) per realizable symbol, then merge equal atoms.
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!(m.pmf1[i] == T(0) && m.pmf2[i] == T(0))) idx.push_back(i);

    std::vector<Extended<T>> lr(m.size());
    for (std::size_t i : idx) lr[i] = likelihood_ratio_at(m, i);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return lr[a] < lr[b]; });

    LrLaw<T> law;
    for (std::size_t i : idx) {
        if (!law.atoms.empty() && law.atoms.back() == lr[i]) {
            law.mass_h1.back() += m.pmf1[i];
            law.mass_h2.back() += m.pmf2[i];
        } else {
            law.atoms.push_back(lr[i]);
            law.mass_h1.push_back(m.pmf1[i]);
            law.mass_h2.push_back(m.pmf2[i]);
        }
    }
    return law;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

// Draws one observation under hypothesis h.  Finite models invert the CDF in
// alphabet order against a single uniform; ties and rounding are resolved
// identically on every platform, so a (seed, stream) pair fixes the draw.
template <class T>
std::int64_t sample_observation(const FiniteModel<T>& m, Hypothesis h, RngStream& rng) {
    const std::vector<T>& pmf = m.pmf(h);
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t last_positive = 0;
    bool any = false;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double p = to_double(pmf[i]);
        if (p <= 0.0) continue;
        last_positive = i;
        any = true;
        cum += p;
        if (u < cum) return m.alphabet[i];
    }
    if (!any) throw input_error("cannot sample: pmf has no positive mass");
    return m.alphabet[last_positive];  // u landed in the rounding tail
}

inline double sample_observation(const GaussianModel& m, Hypothesis h, RngStream& rng) {
    return m.mean(h) + m.sigma * rng.normal();
}

}  // namespace detkit
