#include <gtest/gtest.h>

#include "support.hpp"

using namespace detkit;
using testkit::ex1_model;

TEST(Model, LikelihoodRatioAtoms) {
    const auto m = ex1_model();
    EXPECT_EQ(likelihood_ratio_at(m, 0), Extended<Rational>::finite(Rational(5, 12)));
    EXPECT_EQ(likelihood_ratio_at(m, 1), Extended<Rational>::finite(Rational(5, 3)));
    EXPECT_TRUE(likelihood_ratio_at(m, 2).infinite);
    EXPECT_EQ(likelihood_ratio(m, std::int64_t{2}), Extended<Rational>::finite(Rational(5, 3)));
}

TEST(Model, UnreachableSymbolThrows) {
    auto m = ex1_model();
    m.alphabet.push_back(4);
    m.pmf1.push_back(Rational(0));
    m.pmf2.push_back(Rational(0));
    EXPECT_TRUE(validate_model(m).ok);  // zero-zero symbols are allowed, just unreachable
    EXPECT_THROW(likelihood_ratio_at(m, 3), unreachable_tuple_error);
}

TEST(Model, InducedLrLawSortedWithMasses) {
    const auto lr = induced_lr_law(ex1_model());
    ASSERT_EQ(lr.atoms.size(), 3u);
    EXPECT_EQ(lr.atoms[0], Extended<Rational>::finite(Rational(5, 12)));
    EXPECT_EQ(lr.atoms[1], Extended<Rational>::finite(Rational(5, 3)));
    EXPECT_TRUE(lr.atoms[2].infinite);
    EXPECT_EQ(lr.mass_h1, (std::vector<Rational>{Rational(4, 5), Rational(1, 5), Rational(0)}));
    EXPECT_EQ(lr.mass_h2, (std::vector<Rational>{Rational(1, 3), Rational(1, 3), Rational(1, 3)}));
}

TEST(Model, InducedLrLawMergesEqualRatios) {
    FiniteModel<Rational> m;
    m.alphabet = {1, 2, 3};
    m.pmf1 = {Rational(1, 4), Rational(1, 4), Rational(1, 2)};
    m.pmf2 = {Rational(1, 4), Rational(1, 4), Rational(1, 2)};
    m.prior = {Rational(1, 2), Rational(1, 2)};
    const auto lr = induced_lr_law(m);
    ASSERT_EQ(lr.atoms.size(), 1u);
    EXPECT_EQ(lr.atoms[0], Extended<Rational>::finite(Rational(1)));
    EXPECT_EQ(lr.mass_h1[0], Rational(1));
    EXPECT_EQ(lr.mass_h2[0], Rational(1));
}

TEST(Model, ValidationCatchesBadPmfs) {
    auto m = ex1_model();
    m.pmf1[0] = Rational(9, 10);  // sum > 1
    EXPECT_FALSE(validate_model(m).ok);

    auto neg = ex1_model();
    neg.pmf2[0] = Rational(-1, 3);
    EXPECT_FALSE(validate_model(neg).ok);

    auto short_pmf = ex1_model();
    short_pmf.pmf1.pop_back();
    EXPECT_FALSE(validate_model(short_pmf).ok);
}

TEST(Model, ValidationLogMomentFlags) {
    // Under H1 the infinite-LR symbol has zero mass, so the H1 log-moment is
    // finite; under H2 it is realized and the moment diverges.
    const auto rep = validate_model(ex1_model());
    EXPECT_TRUE(rep.ok);
    EXPECT_TRUE(rep.log_moment_finite_h1);
    EXPECT_FALSE(rep.log_moment_finite_h2);
    EXPECT_FALSE(rep.one_sided_symbols.empty());
}

TEST(Model, GaussianValidation) {
    GaussianModel g{0.0, 1.0, 1.0, {0.5, 0.5}};
    const auto rep = validate_model(g);
    EXPECT_TRUE(rep.ok);
    EXPECT_TRUE(rep.log_moment_finite_h1);
    EXPECT_TRUE(rep.log_moment_finite_h2);
    // Closed form: E[(log L)^2 | Hj] = a^2 s^2 + (a m_j + b)^2 with
    // a = (m2-m1)/s^2, b = (m1^2-m2^2)/(2 s^2); here both equal 1.25.
    EXPECT_NEAR(rep.log_moment_h1, 1.25, 1e-12);
    EXPECT_NEAR(rep.log_moment_h2, 1.25, 1e-12);

    g.sigma = 0.0;
    EXPECT_FALSE(validate_model(g).ok);
}

TEST(Model, GaussianLikelihoodRatio) {
    const GaussianModel g{0.0, 1.0, 1.0, {0.5, 0.5}};
    EXPECT_NEAR(likelihood_ratio(g, 0.5), 1.0, 1e-15);
    // log L(y) = (m2-m1)(2y - m1 - m2)/(2 s^2) is linear in y.
    EXPECT_NEAR(std::log(likelihood_ratio(g, 2.0)), 1.5, 1e-12);
    EXPECT_NEAR(std::log(likelihood_ratio(g, -1.0)), -1.5, 1e-12);
}

TEST(Model, NormalCdf) {
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
    EXPECT_NEAR(normal_cdf(-1.0) + normal_cdf(1.0), 1.0, 1e-15);
}

TEST(Model, SampleObservationDeterministicAndCalibrated) {
    const auto m = ex1_model();
    RngStream a(42, 0), b(42, 0);
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(sample_observation(m, Hypothesis::H1, a), sample_observation(m, Hypothesis::H1, b));

    RngStream c(7, 0);
    int ones = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) ones += sample_observation(m, Hypothesis::H1, c) == 1;
    EXPECT_NEAR(ones / static_cast<double>(n), 0.8, 0.02);

    // Symbol 3 has zero mass under H1 and must never be drawn.
    RngStream d(9, 0);
    for (int i = 0; i < 2000; ++i) EXPECT_NE(sample_observation(m, Hypothesis::H1, d), 3);
}

TEST(Model, PriorAndHypothesisHelpers) {
    const Prior<Rational> p{Rational(1, 3), Rational(2, 3)};
    EXPECT_EQ(p(Hypothesis::H1), Rational(1, 3));
    EXPECT_EQ(p(Hypothesis::H2), Rational(2, 3));
    EXPECT_EQ(other(Hypothesis::H1), Hypothesis::H2);
    EXPECT_EQ(other(Hypothesis::H2), Hypothesis::H1);
}

TEST(Model, ExtendedOrdering) {
    using E = Extended<Rational>;
    EXPECT_LT(E::finite(Rational(5, 12)), E::finite(Rational(5, 3)));
    EXPECT_LT(E::finite(Rational(1000)), E::inf());
    EXPECT_LE(E::inf(), E::inf());
    EXPECT_FALSE(E::inf() < E::inf());
}
