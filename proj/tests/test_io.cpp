#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "support.hpp"

using namespace detkit;
namespace io = detkit::io;

namespace {

// Directory with the shipped JSON instances, provided by the build.
#ifndef DETKIT_DATA_DIR
#define DETKIT_DATA_DIR "data"
#endif
std::string data(const std::string& name) { return std::string(DETKIT_DATA_DIR) + "/" + name; }

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/detkit_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST(Io, ParseRational) {
    EXPECT_EQ(parse_rational("19/90"), Rational(19, 90));
    EXPECT_EQ(parse_rational("2/4"), Rational(1, 2));
    EXPECT_EQ(parse_rational("-3/4"), Rational(-3, 4));
    EXPECT_EQ(parse_rational("7"), Rational(7));
    EXPECT_EQ(parse_rational("0.2"), Rational(1, 5));
    EXPECT_EQ(parse_rational("1.0"), Rational(1));
    EXPECT_EQ(parse_rational("1e-2"), Rational(1, 100));
    EXPECT_EQ(parse_rational("2.5e1"), Rational(25));
    EXPECT_THROW(parse_rational("abc"), input_error);
    EXPECT_THROW(parse_rational("1/0"), input_error);
    EXPECT_THROW(parse_rational(""), input_error);
}

TEST(Io, FormatDouble) {
    EXPECT_EQ(format_double(0.25), "0.25");
    EXPECT_EQ(format_double(1.0 / 3.0), "0.333333333333333");
    EXPECT_EQ(format_double(-2.0), "-2");
    EXPECT_EQ(format_double(to_double(Rational(19, 90))), "0.211111111111111");
}

TEST(Io, LoadShippedModel) {
    const auto mf = io::load_model(data("ex1.json"));
    ASSERT_TRUE(mf.finite);
    EXPECT_EQ(mf.fin.alphabet, (std::vector<std::int64_t>{1, 2, 3}));
    EXPECT_EQ(mf.fin.pmf1[0], Rational(4, 5));
    EXPECT_EQ(mf.fin.pmf2[2], Rational(1, 3));
    EXPECT_EQ(mf.fin.prior.p1, Rational(1, 2));

    const auto g = io::load_model(data("gauss.json"));
    ASSERT_FALSE(g.finite);
    EXPECT_DOUBLE_EQ(g.gauss.mean2, 1.0);
    EXPECT_DOUBLE_EQ(g.gauss.sigma, 1.0);
}

TEST(Io, ModelRoundTrip) {
    const auto mf = io::load_model(data("ex1.json"));
    const auto mf2 = io::model_from_json(io::model_to_json(mf.fin), "roundtrip");
    EXPECT_EQ(mf2.fin.pmf1, mf.fin.pmf1);
    EXPECT_EQ(mf2.fin.pmf2, mf.fin.pmf2);
    EXPECT_EQ(mf2.fin.alphabet, mf.fin.alphabet);
    EXPECT_EQ(mf2.fin.prior.p1, mf.fin.prior.p1);
}

TEST(Io, PriorOverride) {
    auto mf = io::load_model(data("ex1.json"));
    mf.set_prior(Rational(3, 5));
    EXPECT_EQ(mf.fin.prior.p2, Rational(2, 5));
    EXPECT_THROW(mf.set_prior(Rational(1)), input_error);
    EXPECT_THROW(mf.set_prior(Rational(0)), input_error);
}

TEST(Io, NumericJsonValuesAreExact) {
    const auto j = io::Json::parse(R"({"prior":{"p1":0.2},
        "finite":{"alphabet":[1,2],"pmf1":[0.2,"4/5"],"pmf2":["1/2",0.5]}})");
    const auto mf = io::model_from_json(j, "inline");
    EXPECT_EQ(mf.fin.prior.p1, Rational(1, 5));  // 0.2 means exactly 1/5
    EXPECT_EQ(mf.fin.pmf1[0], Rational(1, 5));
    EXPECT_EQ(mf.fin.pmf2[1], Rational(1, 2));
}

TEST(Io, LoadTeamAndPolicies) {
    const auto team = io::load_team(data("team_ab.json"));
    ASSERT_EQ(team.size(), 2u);
    ASSERT_TRUE(team[0].threshold.has_value());
    EXPECT_EQ(team[0].threshold->thresholds, (std::vector<Rational>{Rational(25, 24)}));

    const auto pc = io::load_policy(data("policy_c.json"));
    ASSERT_TRUE(pc.kernel.has_value());
    EXPECT_EQ(pc.kernel->rows[0][0], Rational(1));

    const auto mf = io::load_model(data("ex1.json"));
    const auto tp = io::to_team(team, mf.fin);
    EXPECT_EQ(exact_risk(tp, mf.fin).risk, Rational(19, 90));
}

TEST(Io, LoadMixture) {
    const auto mixf = io::load_mixture(data("mixture_exchangeable.json"));
    ASSERT_EQ(mixf.atoms.size(), 2u);
    EXPECT_EQ(mixf.atoms[0].weight, Rational(1, 2));
    const auto mf = io::load_model(data("ex1.json"));
    const auto mix = io::to_mixture(mixf, mf.fin);
    EXPECT_EQ(mixture_risk(mix, mf.fin, FusionInfo::KnownRandomization).risk, Rational(19, 90));
}

TEST(Io, DiagnosticsCarryContext) {
    try {
        io::load_model(data("policy_a.json"));  // a policy file is not a model
        FAIL() << "expected input_error";
    } catch (const input_error& e) {
        EXPECT_NE(std::string(e.what()).find("policy_a.json"), std::string::npos);
    }

    TempFile bad("bad.json");
    std::ofstream(bad.path) << "{\n  \"prior\": }\n";
    try {
        io::load_json(bad.path);
        FAIL() << "expected input_error";
    } catch (const input_error& e) {
        EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
    }

    EXPECT_THROW(io::load_model("/nonexistent/nope.json"), input_error);
}

TEST(Io, FusionTableRoundTrip) {
    const auto mf = io::load_model(data("ex1.json"));
    const auto team = io::to_team(io::load_team(data("team_ab.json")), mf.fin);
    const auto table = exhaustive_best_fusion(team, mf.fin);
    const auto back = io::fusion_from_json(io::fusion_to_json(table), "roundtrip");
    EXPECT_EQ(back.n, table.n);
    EXPECT_EQ(back.u_size, table.u_size);
    EXPECT_EQ(back.decide, table.decide);

    auto j = io::fusion_to_json(table);
    j["decide"].erase(0);
    EXPECT_THROW(io::fusion_from_json(j, "short"), input_error);
}

TEST(Io, ReportSerialization) {
    const auto mf = io::load_model(data("ex1.json"));
    const auto team = io::to_team(io::load_team(data("team_ab.json")), mf.fin);
    const auto rep = exact_risk(team, mf.fin);
    const auto j = io::report_to_json(rep);
    EXPECT_EQ(j.at("risk"), "19/90");
    EXPECT_EQ(j.at("risk_decimal"), "0.211111111111111");
    EXPECT_EQ(j.at("err1"), "1/5");
    EXPECT_EQ(j.at("exact"), true);

    const std::string row = io::report_to_csv_row(rep);
    EXPECT_EQ(row.rfind("2,0.211111111111111,0.2,0.222222222222222,", 0), 0u);
    EXPECT_EQ(row.back(), ',');  // exact rows leave the stderr column empty
}

TEST(Io, SweepCsvLayout) {
    const auto mf = io::load_model(data("ex1.json"));
    const ThresholdPolicy<Rational> b{{Rational(8, 3)}, {1, 2}};
    const auto s = sweep_replicated(mf.fin, b, 2, {1, 2}, std::log(2.0 / 3.0));
    const std::string csv = io::sweep_to_csv(s);
    EXPECT_EQ(csv.rfind("N,risk,err1,err2,exponent,stderr,mode,reference,gap\n", 0), 0u);
    EXPECT_NE(csv.find("\n1,0.333333333333333,"), std::string::npos);
    EXPECT_NE(csv.find(",exact,"), std::string::npos);
}

TEST(Io, GaussianTeamConversion) {
    const auto team = io::load_team(data("gauss_team.json"));
    const auto g = io::to_gaussian_team(team, "gauss_team");
    ASSERT_EQ(g.size(), 1u);
    EXPECT_DOUBLE_EQ(g[0].thresholds[0], 1.0);

    const auto kernel_team = io::load_team(data("team_ab.json"));
    auto with_kernel = kernel_team;
    with_kernel.push_back(io::load_policy(data("policy_c.json")));
    EXPECT_THROW(io::to_gaussian_team(with_kernel, "mixed"), input_error);
}
