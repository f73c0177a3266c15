#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace detkit;
using testkit::ex1_model;
using testkit::policy_a;
using testkit::policy_b;

namespace {

TeamPolicy<Rational> team_of(const FiniteModel<Rational>& m,
                             const std::vector<ThresholdPolicy<Rational>>& tps) {
    TeamPolicy<Rational> team;
    for (const auto& tp : tps) team.kernels.push_back(compile_threshold(tp, m, 2));
    return team;
}

}  // namespace

TEST(Evaluate, ExampleGoldenRisks) {
    const auto m = ex1_model();
    const auto ab = exact_risk(team_of(m, {policy_a(), policy_b()}), m);
    EXPECT_EQ(ab.risk, Rational(19, 90));
    EXPECT_EQ(ab.err_h1, Rational(1, 5));
    EXPECT_EQ(ab.err_h2, Rational(2, 9));
    EXPECT_EQ(ab.n, 2u);
    EXPECT_TRUE(ab.exact);

    EXPECT_EQ(exact_risk(team_of(m, {policy_a(), policy_a()}), m).risk, Rational(53, 225));
    EXPECT_EQ(exact_risk(team_of(m, {policy_b(), policy_b()}), m).risk, Rational(2, 9));
}

TEST(Evaluate, RiskDecomposesAgainstIndependentTupleSum) {
    testkit::Rand rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = testkit::random_model(rng);
        const auto team = testkit::random_team(rng, m, 2, 2);
        const auto laws = team_output_laws(team, m);
        const auto rep = exact_risk(laws, m.prior);

        // Recompute from scratch: per-tuple masses and MAP decisions.
        Rational err1(0), err2(0);
        JointEnumerator<Rational> e(laws);
        do {
            const Hypothesis d = map_decide(laws, e.tuple(), m.prior);
            if (d == Hypothesis::H2) err1 += e.mass1();
            if (d == Hypothesis::H1) err2 += e.mass2();
        } while (e.next());
        EXPECT_EQ(rep.err_h1, err1);
        EXPECT_EQ(rep.err_h2, err2);
        EXPECT_EQ(rep.risk, m.prior.p1 * err1 + m.prior.p2 * err2);
    }
}

TEST(Evaluate, WorkerSplitIsExactlyEquivalent) {
    const auto m = ex1_model();
    const auto team = team_of(m, {policy_a(), policy_b(), policy_b()});
    const auto one = exact_risk(team, m, nullptr, 1);
    const auto four = exact_risk(team, m, nullptr, 4);
    EXPECT_EQ(one.risk, four.risk);
    EXPECT_EQ(one.err_h1, four.err_h1);
    EXPECT_EQ(one.err_h2, four.err_h2);
}

TEST(Evaluate, EnumerationCapRefuses) {
    const auto m = ex1_model();
    TeamPolicy<Rational> big;
    big.kernels.assign(25, compile_threshold(policy_b(), m, 2));
    EXPECT_THROW(exact_risk(big, m), resource_cap_error);
}

TEST(Evaluate, MixtureGoldenValues) {
    const auto m = ex1_model();
    const auto kA = compile_threshold(policy_a(), m, 2);
    const auto kB = compile_threshold(policy_b(), m, 2);
    TeamMixture<Rational> sym;
    sym.atoms = {{Rational(1, 4), {{kA, kA}}},
                 {Rational(1, 4), {{kA, kB}}},
                 {Rational(1, 4), {{kB, kA}}},
                 {Rational(1, 4), {{kB, kB}}}};
    EXPECT_EQ(mixture_risk(sym, m, FusionInfo::KnownRandomization).risk, Rational(11, 50));

    TeamMixture<Rational> exch;
    exch.atoms = {{Rational(1, 2), {{kA, kB}}}, {Rational(1, 2), {{kB, kA}}}};
    EXPECT_EQ(mixture_risk(exch, m, FusionInfo::KnownRandomization).risk, Rational(19, 90));
}

TEST(Evaluate, SeparableMixtureShowsInformationGap) {
    const auto sep = testkit::sep_model();
    TeamMixture<Rational> cd;
    cd.atoms = {{Rational(1, 2), {{testkit::kernel_c(), testkit::kernel_d()}}},
                {Rational(1, 2), {{testkit::kernel_d(), testkit::kernel_c()}}}};
    const auto kr = mixture_risk(cd, sep, FusionInfo::KnownRandomization);
    const auto bayes = mixture_risk(cd, sep, FusionInfo::Bayesian);
    EXPECT_EQ(kr.risk, Rational(0));
    EXPECT_TRUE(std::isinf(kr.exponent));
    EXPECT_EQ(bayes.risk, Rational(1, 4));
}

TEST(Evaluate, KnownRandomizationNeverWorseThanBayesian) {
    testkit::Rand rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = testkit::random_model(rng);
        const auto mix = testkit::random_mixture(rng, m, 2, 2);
        const auto kr = mixture_risk(mix, m, FusionInfo::KnownRandomization);
        const auto bayes = mixture_risk(mix, m, FusionInfo::Bayesian);
        EXPECT_LE(kr.risk, bayes.risk);
    }
}

TEST(Evaluate, PermutationAndSymmetrizationPreserveRisk) {
    testkit::Rand rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = testkit::random_model(rng);
        const std::size_t n = 2 + rng.below(2);
        const auto mix = testkit::random_mixture(rng, m, n, 2);
        const auto base = mixture_risk(mix, m, FusionInfo::KnownRandomization).risk;

        std::vector<std::size_t> sigma(n);
        for (std::size_t i = 0; i < n; ++i) sigma[i] = i;
        for (std::size_t i = n; i > 1; --i) std::swap(sigma[i - 1], sigma[rng.below(i)]);
        EXPECT_EQ(mixture_risk(permute_mixture(mix, sigma), m, FusionInfo::KnownRandomization).risk, base);
        EXPECT_EQ(mixture_risk(symmetrize(mix), m, FusionInfo::KnownRandomization).risk, base);
    }
}

TEST(Evaluate, ErrorExponentEmpirical) {
    EXPECT_DOUBLE_EQ(error_exponent_empirical(Rational(1), 5), 0.0);
    EXPECT_TRUE(std::isinf(error_exponent_empirical(Rational(0), 3)));
    EXPECT_LT(error_exponent_empirical(Rational(0), 3), 0.0);
    EXPECT_NEAR(error_exponent_empirical(Rational(19, 90), 2), std::log(19.0 / 90.0) / 2.0, 1e-15);
}

TEST(Evaluate, MonteCarloReproducibleAndCalibrated) {
    const auto m = ex1_model();
    const auto team = team_of(m, {policy_a(), policy_b()});
    const auto r1 = mc_risk(team, m, 100000, 5);
    const auto r2 = mc_risk(team, m, 100000, 5);
    EXPECT_EQ(r1.risk, r2.risk);  // byte-identical, not merely close
    EXPECT_EQ(r1.err_h1, r2.err_h1);
    EXPECT_FALSE(r1.exact);
    EXPECT_EQ(r1.samples, 100000u);
    ASSERT_TRUE(r1.std_error.has_value());
    EXPECT_NEAR(r1.risk, 19.0 / 90.0, 4.0 * *r1.std_error);

    const auto r3 = mc_risk(team, m, 100000, 6);
    EXPECT_NE(r1.risk, r3.risk);  // a different seed gives a different draw

    const auto w2a = mc_risk(team, m, 100000, 5, 2);
    const auto w2b = mc_risk(team, m, 100000, 5, 2);
    EXPECT_EQ(w2a.risk, w2b.risk);  // reproducible at any fixed worker count
}

TEST(Evaluate, MonteCarloMixtures) {
    const auto m = ex1_model();
    const auto kA = compile_threshold(policy_a(), m, 2);
    const auto kB = compile_threshold(policy_b(), m, 2);
    TeamMixture<Rational> exch;
    exch.atoms = {{Rational(1, 2), {{kA, kB}}}, {Rational(1, 2), {{kB, kA}}}};
    const auto kr = mc_risk(exch, m, FusionInfo::KnownRandomization, 200000, 3);
    EXPECT_NEAR(kr.risk, 19.0 / 90.0, 4.0 * *kr.std_error);
    const auto bayes = mc_risk(exch, m, FusionInfo::Bayesian, 200000, 3);
    EXPECT_NEAR(bayes.risk, to_double(mixture_risk(exch, m, FusionInfo::Bayesian).risk),
                4.0 * *bayes.std_error);
}

TEST(Evaluate, GaussianMonteCarloAgainstClosedForm) {
    const GaussianModel g{0.0, 1.0, 1.0, {0.5, 0.5}};
    const ThresholdPolicy<double> cut{{1.0}, {1, 2}};
    const auto exact = exact_risk(std::vector<LawPair<double>>{output_law_pair(cut, g, 2)}, g.prior);
    EXPECT_NEAR(exact.risk, normal_cdf(-0.5), 1e-12);
    const auto mc = mc_risk(GaussianTeam{cut}, g, 2, 200000, 17);
    EXPECT_NEAR(mc.risk, exact.risk, 4.0 * *mc.std_error);
    EXPECT_EQ(mc.risk, mc_risk(GaussianTeam{cut}, g, 2, 200000, 17).risk);
}

TEST(Evaluate, SweepExactRowsAndGaps) {
    const auto m = ex1_model();
    const double ref = std::log(2.0 / 3.0);
    const auto s = sweep_replicated(m, policy_b(), 2, {1, 2, 3}, ref);
    ASSERT_EQ(s.rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_TRUE(s.rows[i].exact);
        EXPECT_EQ(s.rows[i].n, i + 1);
        // all-B risk is (2/3)^N / 2, so the gap to log(2/3) is log(1/2)/N.
        EXPECT_NEAR(s.rows[i].exponent, ref + std::log(0.5) / (i + 1.0), 1e-12);
        EXPECT_NEAR(s.rows[i].gap, std::log(0.5) / (i + 1.0), 1e-12);
    }
    EXPECT_EQ(s.rows[1].risk_exact, "2/9");
}

TEST(Evaluate, SweepFallsBackToMonteCarloAboveCap) {
    const auto m = ex1_model();
    SweepOptions opt;
    opt.cap = 4;
    opt.samples = 50000;
    opt.seed = 2;
    const auto s = sweep_replicated(m, policy_b(), 2, {2, 3}, std::log(2.0 / 3.0), opt);
    EXPECT_TRUE(s.rows[0].exact);
    EXPECT_FALSE(s.rows[1].exact);
    EXPECT_GT(s.rows[1].std_error, 0.0);
    EXPECT_NEAR(s.rows[1].risk, 4.0 / 27.0, 4.0 * s.rows[1].std_error);
}

TEST(Evaluate, SweepRejectsNonIncreasingSizes) {
    const auto m = ex1_model();
    EXPECT_THROW(sweep_replicated(m, policy_b(), 2, {2, 2}, 0.0), input_error);
    EXPECT_THROW(sweep_replicated(m, policy_b(), 2, {4, 2}, 0.0), input_error);
}

TEST(Evaluate, GaussianSweep) {
    const GaussianModel g{0.0, 1.0, 1.0, {0.5, 0.5}};
    const ThresholdPolicy<double> cut{{1.0}, {1, 2}};
    const double ref = chernoff_exponent(output_law_pair(cut, g, 2)).value;
    const auto s = sweep_replicated(g, cut, 2, {1, 2, 4}, ref);
    ASSERT_EQ(s.rows.size(), 3u);
    EXPECT_NEAR(s.rows[0].risk, normal_cdf(-0.5), 1e-12);
    for (const auto& row : s.rows) EXPECT_TRUE(row.exact);
    // Risk falls with N while the per-sensor rate climbs toward the Chernoff
    // reference from below, so the gap magnitude shrinks.
    EXPECT_LT(s.rows[2].risk, s.rows[0].risk);
    EXPECT_GT(s.rows[2].exponent, s.rows[0].exponent);
    EXPECT_LT(std::abs(s.rows[2].gap), std::abs(s.rows[0].gap));
}
