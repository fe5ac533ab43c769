#include <gtest/gtest.h>

#include "posetnn/serialization.hpp"

using namespace posetnn;

TEST(Json, PosetRoundTrip)
{
    for (const auto& p : enumerate_posets(4)) {
        const auto j = to_json(p);
        EXPECT_EQ(poset_from_json(Json::parse(j.dump())), p);
    }
    const auto lab = parse_poset("2; 0<1").with_labels({"lo", "hi"});
    const auto back = poset_from_json(to_json(lab));
    EXPECT_EQ(back.labels(), lab.labels());
    EXPECT_EQ(to_json(parse_poset("3; 0<1, 1<2")).dump(), R"({"covers":[[0,1],[1,2]],"labels":[],"n":3})");
}

TEST(Json, PolytopeAndPolynomial)
{
    const auto p = parse_poset("4; 0<2, 1<2, 1<3");
    const auto poly = order_polytope_vertices(p);
    EXPECT_EQ(polytope_from_json(Json::parse(to_json(poly).dump())).vertices, poly.vertices);
    const auto f = parse_tropical("1/2 + x^2*y + -3*z", {"x", "y", "z"});
    EXPECT_EQ(tropical_from_json(Json::parse(to_json(f).dump())), f);
    const auto g = tropical_from_json(Json::parse(R"({"nvars":1,"monomials":[{"exp":[1],"coef":2},{"exp":[0],"coef":"-inf"}]})"));
    EXPECT_EQ(g, parse_tropical("2*x", {"x"}));
}

TEST(Json, FilterRoundTrip)
{
    const auto f = filter_from_poset(parse_poset("4; 0<2, 1<2, 1<3"), {1, 0, 3, 2});
    const auto back = filter_from_json(Json::parse(to_json(f).dump()));
    EXPECT_EQ(back.terms, f.terms);
    EXPECT_EQ(back.provenance.kind, FilterProvenance::Kind::Poset);
    EXPECT_EQ(back.provenance.map, f.provenance.map);
    const auto r = random_filter(4, 5, 9);
    const auto rb = filter_from_json(Json::parse(to_json(r).dump()));
    EXPECT_EQ(rb.terms, r.terms);
    EXPECT_EQ(*rb.provenance.seed, 9u);
}

TEST(Json, NetworkShape)
{
    const auto net = poset_nn(parse_poset("4; 0<2, 1<2, 1<3"));
    const auto j = to_json(net);
    EXPECT_EQ(j["branches"].size(), 5u);
    EXPECT_EQ(j["chain"]["layers"].size(), 4u);
    EXPECT_EQ(j["chain"]["layers"][0]["thresholds"][0].get<double>(), 0.0);
    EXPECT_EQ(j["chain"]["layers"][0]["thresholds"][3].get<std::string>(), "-inf");
    EXPECT_EQ(threshold_to_json(Threshold{0.5}).get<double>(), 0.5);
}

TEST(Json, MalformedInputs)
{
    EXPECT_THROW(poset_from_json(Json::parse(R"({"n":2})")), FormatError);
    EXPECT_THROW(poset_from_json(Json::parse(R"({"n":2,"covers":[[0,1],[1,0]]})")), CycleError);
    EXPECT_THROW(tropical_from_json(Json::parse(R"({"nvars":1,"monomials":[{"exp":[1],"coef":"x"}]})")), Error);
    EXPECT_THROW(filter_from_json(Json::parse(R"({"m":"four"})")), FormatError);
}
