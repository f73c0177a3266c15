#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace detkit;
using testkit::ex1_model;
using testkit::policy_a;
using testkit::policy_b;

namespace {

std::vector<LawPair<Rational>> ab_laws() {
    const auto m = ex1_model();
    return {output_law_pair(compile_threshold(policy_a(), m, 2), m),
            output_law_pair(compile_threshold(policy_b(), m, 2), m)};
}

}  // namespace

TEST(Fusion, MapRuleThreshold) {
    EXPECT_DOUBLE_EQ(make_map_rule(Prior<double>{0.5, 0.5}, 2).threshold, 0.0);
    EXPECT_NEAR(make_map_rule(Prior<double>{0.25, 0.75}, 3).threshold, std::log(3.0) / 3.0, 1e-15);
}

TEST(Fusion, DeltaStatisticOnExampleTuples) {
    const auto laws = ab_laws();
    EXPECT_NEAR(delta_n(laws, {0, 0}), 0.5 * std::log(18.0 / 5.0), 1e-14);
    EXPECT_NEAR(delta_n(laws, {1, 0}), 0.5 * std::log(9.0 / 20.0), 1e-14);
    // Tuples where sensor 2's action 2 has zero H1 mass: the statistic is -inf.
    EXPECT_TRUE(std::isinf(delta_n(laws, {0, 1})));
    EXPECT_LT(delta_n(laws, {0, 1}), 0.0);
}

TEST(Fusion, DeltaStatisticUnreachableTuple) {
    LawPair<Rational> degenerate{{Rational(1), Rational(0)}, {Rational(1), Rational(0)}};
    EXPECT_THROW(delta_n(std::vector<LawPair<Rational>>{degenerate}, {1}), unreachable_tuple_error);
}

TEST(Fusion, MapDecisionsOnExampleTuples) {
    const auto laws = ab_laws();
    const Prior<Rational> prior{Rational(1, 2), Rational(1, 2)};
    EXPECT_EQ(map_decide(laws, {0, 0}, prior), Hypothesis::H1);
    EXPECT_EQ(map_decide(laws, {0, 1}, prior), Hypothesis::H2);
    EXPECT_EQ(map_decide(laws, {1, 0}, prior), Hypothesis::H2);
    EXPECT_EQ(map_decide(laws, {1, 1}, prior), Hypothesis::H2);
}

TEST(Fusion, TieBreaksToH1) {
    LawPair<Rational> flat{{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}};
    const Prior<Rational> prior{Rational(1, 2), Rational(1, 2)};
    EXPECT_EQ(map_decide(std::vector<LawPair<Rational>>{flat}, {0}, prior), Hypothesis::H1);
    EXPECT_EQ(map_decide(std::vector<LawPair<Rational>>{flat}, {1}, prior), Hypothesis::H1);
}

TEST(Fusion, TableRankOrderSensorZeroMostSignificant) {
    FusionTable t;
    t.n = 2;
    t.u_size = 3;
    EXPECT_EQ(t.rank({0, 1}), 1u);
    EXPECT_EQ(t.rank({1, 0}), 3u);
    EXPECT_EQ(t.rank({2, 2}), 8u);
}

TEST(Fusion, ExhaustiveTableMatchesMapRule) {
    const auto laws = ab_laws();
    const Prior<Rational> prior{Rational(1, 2), Rational(1, 2)};
    const FusionTable table = exhaustive_best_fusion(laws, prior);
    ASSERT_EQ(table.size(), 4u);
    std::vector<std::size_t> u(2);
    for (u[0] = 0; u[0] < 2; ++u[0])
        for (u[1] = 0; u[1] < 2; ++u[1]) EXPECT_EQ(table(u), map_decide(laws, u, prior));
}

TEST(Fusion, MapBeatsEveryOtherFusionTable) {
    // Independent optimality oracle at |U|^N = 4: enumerate all 16 decision
    // tables and confirm none beats the MAP table, on random instances.
    testkit::Rand rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const auto m = testkit::random_model(rng);
        const auto team = testkit::random_team(rng, m, 2, 2);
        const auto laws = team_output_laws(team, m);
        const Rational map_risk = exact_risk(laws, m.prior).risk;

        Rational best(1);
        for (int code = 0; code < 16; ++code) {
            FusionTable t;
            t.n = 2;
            t.u_size = 2;
            for (int r = 0; r < 4; ++r)
                t.decide.push_back((code >> r) & 1 ? Hypothesis::H2 : Hypothesis::H1);
            const Rational risk = exact_risk(laws, m.prior, &t).risk;
            if (risk < best) best = risk;
        }
        EXPECT_EQ(map_risk, best);
    }
}

TEST(Fusion, BayesLogRatioOnExchangeableMixture) {
    const auto m = ex1_model();
    const auto kA = compile_threshold(policy_a(), m, 2);
    const auto kB = compile_threshold(policy_b(), m, 2);
    TeamMixture<Rational> exch;
    exch.atoms = {{Rational(1, 2), TeamPolicy<Rational>{{kA, kB}}},
                  {Rational(1, 2), TeamPolicy<Rational>{{kB, kA}}}};
    const auto mixed = mixture_laws(exch, m);
    // Mixture-averaged masses at (1,1): 4/5 under H1, 2/9 under H2.
    EXPECT_NEAR(bayes_log_ratio(mixed, {0, 0}), std::log(18.0 / 5.0), 1e-14);
    EXPECT_GT(bayes_log_ratio(mixed, {0, 0}), 0.0);
    EXPECT_EQ(bayes_map_decide(mixed, {0, 0}, m.prior), Hypothesis::H1);
    EXPECT_EQ(bayes_map_decide(mixed, {0, 1}, m.prior), Hypothesis::H2);
    EXPECT_EQ(bayes_map_decide(mixed, {1, 0}, m.prior), Hypothesis::H2);
}

TEST(Fusion, TupleCountCap) {
    // At the cap is allowed; one more sensor tips over.
    EXPECT_EQ(checked_tuple_count(2, 20, kFusionTableCap, "test"), kFusionTableCap);
    EXPECT_THROW(checked_tuple_count(2, 21, kFusionTableCap, "test"), resource_cap_error);
    EXPECT_THROW(checked_tuple_count(3, 42, kFusionTableCap, "test"), resource_cap_error);
}

TEST(Fusion, JointEnumeratorVisitsAllTuplesInRankOrder) {
    const auto laws = ab_laws();
    JointEnumerator<Rational> e(laws);
    std::size_t count = 0;
    Rational total1(0), total2(0);
    FusionTable ranker{2, 2, {}};
    do {
        const auto& u = e.tuple();
        EXPECT_EQ(ranker.rank(u), count);
        Rational m1(1), m2(1);
        for (std::size_t i = 0; i < 2; ++i) {
            m1 *= laws[i].g1[u[i]];
            m2 *= laws[i].g2[u[i]];
        }
        EXPECT_EQ(e.mass1(), m1);
        EXPECT_EQ(e.mass2(), m2);
        total1 += e.mass1();
        total2 += e.mass2();
        ++count;
    } while (e.next());
    EXPECT_EQ(count, 4u);
    EXPECT_EQ(total1, Rational(1));
    EXPECT_EQ(total2, Rational(1));

    JointEnumerator<Rational> s(laws);
    s.seek(2);
    EXPECT_EQ(s.tuple(), (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(s.mass1(), Rational(1, 5));
}

TEST(Fusion, UcaCost) {
    EXPECT_EQ(uca_cost(Hypothesis::H1, Hypothesis::H1), 0);
    EXPECT_EQ(uca_cost(Hypothesis::H1, Hypothesis::H2), 1);
    EXPECT_EQ(uca_cost(Hypothesis::H2, Hypothesis::H1), 1);
    EXPECT_EQ(uca_cost(Hypothesis::H2, Hypothesis::H2), 0);
}
