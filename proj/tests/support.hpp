#pragma once

// Shared fixtures for the test suites: the canonical three-symbol instance,
// the perfectly separable two-symbol instance, and deterministic random
// generators for rational models, kernels, and mixtures.

#include <cstdint>
#include <random>
#include <vector>

#include <detkit/detkit.hpp>

namespace testkit {

using namespace detkit;

// Three-symbol instance: f(.|H1) = (4/5, 1/5, 0), f(.|H2) uniform, equal
// priors.  LR atoms 5/12, 5/3, +inf; two-bin policies A (cut 25/24) and
// B (cut 8/3).
inline FiniteModel<Rational> ex1_model() {
    FiniteModel<Rational> m;
    m.alphabet = {1, 2, 3};
    m.pmf1 = {Rational(4, 5), Rational(1, 5), Rational(0)};
    m.pmf2 = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
    m.prior = {Rational(1, 2), Rational(1, 2)};
    return m;
}

inline ThresholdPolicy<Rational> policy_a() { return {{Rational(25, 24)}, {1, 2}}; }
inline ThresholdPolicy<Rational> policy_b() { return {{Rational(8, 3)}, {1, 2}}; }

// Perfectly separable two-symbol instance hosting the C/D pair.
inline FiniteModel<Rational> sep_model() {
    FiniteModel<Rational> m;
    m.alphabet = {1, 2};
    m.pmf1 = {Rational(1), Rational(0)};
    m.pmf2 = {Rational(0), Rational(1)};
    m.prior = {Rational(1, 2), Rational(1, 2)};
    return m;
}

inline SensorKernel<Rational> kernel_c() {
    return SensorKernel<Rational>{{{Rational(1), Rational(0)}, {Rational(0), Rational(1)}}};
}
inline SensorKernel<Rational> kernel_d() {
    return SensorKernel<Rational>{
        {{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}}};
}

// Deterministic pseudo-random draws (plain modulo; bias is irrelevant here).
struct Rand {
    std::mt19937_64 eng;
    explicit Rand(std::uint64_t seed) : eng(seed) {}
    std::uint64_t below(std::uint64_t n) { return eng() % n; }
};

// Random pmf over `size` symbols: an integer composition of a denominator
// <= 12, so every mass is a small exact rational.  Guaranteed to sum to 1;
// zero masses allowed (and exercised) unless forbid_zero is set.
inline std::vector<Rational> random_pmf(Rand& rng, std::size_t size, bool forbid_zero = false) {
    // Keep denom >= size so every symbol can get a strictly positive share.
    const unsigned base = std::max<unsigned>(3, static_cast<unsigned>(size));
    const unsigned denom = base + static_cast<unsigned>(rng.below(10));
    std::vector<unsigned> parts(size, forbid_zero ? 1u : 0u);
    unsigned left = denom - (forbid_zero ? static_cast<unsigned>(size) : 0u);
    for (unsigned i = 0; i < left; ++i) ++parts[rng.below(size)];
    std::vector<Rational> pmf;
    for (unsigned p : parts) pmf.emplace_back(p, denom);
    return pmf;
}

inline FiniteModel<Rational> random_model(Rand& rng, std::size_t max_symbols = 4, bool forbid_zero = false) {
    FiniteModel<Rational> m;
    const std::size_t ny = 2 + rng.below(max_symbols - 1);
    for (std::size_t y = 0; y < ny; ++y) m.alphabet.push_back(static_cast<std::int64_t>(y + 1));
    m.pmf1 = random_pmf(rng, ny, forbid_zero);
    m.pmf2 = random_pmf(rng, ny, forbid_zero);
    const unsigned a = 1 + static_cast<unsigned>(rng.below(9));
    const unsigned b = 1 + static_cast<unsigned>(rng.below(9));
    m.prior = {Rational(a, a + b), Rational(b, a + b)};
    return m;
}

// Random rational kernel: each symbol row is a random pmf over the actions;
// about half the rows come out deterministic.
inline SensorKernel<Rational> random_kernel(Rand& rng, std::size_t n_symbols, std::size_t u_size) {
    SensorKernel<Rational> k;
    for (std::size_t y = 0; y < n_symbols; ++y) {
        if (rng.below(2) == 0) {
            std::vector<Rational> row(u_size, Rational(0));
            row[rng.below(u_size)] = Rational(1);
            k.rows.push_back(std::move(row));
        } else {
            k.rows.push_back(random_pmf(rng, u_size));
        }
    }
    return k;
}

inline TeamPolicy<Rational> random_team(Rand& rng, const FiniteModel<Rational>& m, std::size_t n,
                                        std::size_t u_size) {
    TeamPolicy<Rational> team;
    for (std::size_t i = 0; i < n; ++i) team.kernels.push_back(random_kernel(rng, m.size(), u_size));
    return team;
}

// Random mixture of up to 3 random teams with exact weights k/denom.
inline TeamMixture<Rational> random_mixture(Rand& rng, const FiniteModel<Rational>& m, std::size_t n,
                                            std::size_t u_size) {
    const std::size_t n_atoms = 1 + rng.below(3);
    std::vector<unsigned> parts(n_atoms, 1);
    const unsigned denom = static_cast<unsigned>(n_atoms) + static_cast<unsigned>(rng.below(6));
    for (unsigned i = static_cast<unsigned>(n_atoms); i < denom; ++i) ++parts[rng.below(n_atoms)];
    TeamMixture<Rational> mix;
    for (std::size_t a = 0; a < n_atoms; ++a)
        mix.atoms.push_back({Rational(parts[a], denom), random_team(rng, m, n, u_size)});
    return mix;
}

// Random full-support double law pair for exponent property tests.
inline LawPair<double> random_full_support_laws(Rand& rng, std::size_t u_size) {
    const auto p1 = random_pmf(rng, u_size, true);
    const auto p2 = random_pmf(rng, u_size, true);
    LawPair<double> law;
    for (std::size_t u = 0; u < u_size; ++u) {
        law.g1.push_back(to_double(p1[u]));
        law.g2.push_back(to_double(p2[u]));
    }
    return law;
}

}  // namespace testkit
