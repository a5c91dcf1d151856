#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include <sandpile/report.hpp>

#include "generators.hpp"

using namespace sandpile;

TEST(Json, PolynomialRoundTrip) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testgen::random_poly(rng, 1 + trial % 3);
    if (p.is_zero()) continue;
    EXPECT_EQ(poly_from_json(Json::parse(to_json(p).dump())), p);
  }
}

TEST(Json, CanonicalForm) {
  const auto j = to_json(parse_poly("-2*u1^-1 + 5 - 2*u1"));
  EXPECT_EQ(j.dump(), R"([{"exponent":[-1],"coeff":-2},{"exponent":[0],"coeff":5},{"exponent":[1],"coeff":-2}])");
}

TEST(Json, HugeCoefficientsAsStrings) {
  LaurentPoly p = parse_poly("3+u");
  for (int k = 0; k < 50; ++k) p = p * parse_poly("3+u");
  const auto j = to_json(p);
  EXPECT_TRUE(j.at(0).at("coeff").is_string());
  EXPECT_EQ(poly_from_json(j), p);
}

TEST(Json, ConfigRoundTrip) {
  const Config v{make_window(Window::box({{-1, 1}, {0, 1}})), {1, 2, 3, 4, 5, 6}};
  EXPECT_EQ(config_from_json(to_json(v)), v);
  Json bad = to_json(v);
  bad["heights"].erase(0);
  EXPECT_THROW(config_from_json(bad), std::invalid_argument);
}

TEST(Json, WindowArguments) {
  EXPECT_EQ(parse_window_arg("box:d=1:1..5"), Window::interval(1, 5));
  EXPECT_EQ(parse_window_arg("[[0,0],[1,0]]"), Window(2, {{0, 0}, {1, 0}}));
  EXPECT_THROW(parse_window_arg("[[0,0],[0,0]]"), std::invalid_argument);
  EXPECT_THROW(parse_window_arg("[[0,0],[1]]"), std::invalid_argument);
  EXPECT_THROW(parse_window_arg("[[0,0],"), std::invalid_argument);
  EXPECT_THROW(parse_window_arg("nowhere"), std::invalid_argument);
}

TEST(Csv, KernelRows) {
  const auto k = homoclinic(parse_poly("5-2u-2u^-1"));
  const auto csv = kernel_csv(k);
  EXPECT_EQ(csv.rfind("n1,value\n", 0), 0u);
  EXPECT_NE(csv.find("\n0,0.33333333333333"), std::string::npos);
  EXPECT_EQ(static_cast<int>(std::count(csv.begin(), csv.end(), '\n')), k.side() + 1);
}

TEST(Report, WorkedProductsPass) {
  const auto c = detail::products_check();
  EXPECT_TRUE(c.pass);
  ASSERT_EQ(c.detail.size(), 3u);
  EXPECT_EQ(c.detail[0]["classification"]["gamma"], 8);
  // the third factorisation does not give a valid product matrix
  EXPECT_TRUE(c.detail[0]["product_matrix_valid_n6"].get<bool>());
  EXPECT_TRUE(c.detail[1]["product_matrix_valid_n6"].get<bool>());
  EXPECT_FALSE(c.detail[2]["product_matrix_valid_n6"].get<bool>());
}

TEST(Report, BtwCheckIndependentOfSeed) {
  for (std::uint64_t seed : {1u, 2u, 99u}) EXPECT_TRUE(detail::btw_check(seed).pass);
}

TEST(Report, CoverCheckOnWorkedExample) {
  const auto r = cover_check(parse_poly("-u^-1+2"), parse_poly("2-u"), 12);
  EXPECT_TRUE(r.all_pass());
  ASSERT_NE(r.find("graph-entropy-W"), nullptr);
  EXPECT_NEAR(r.find("graph-entropy-W")->detail["entropy"].get<double>(), std::log(2.0), 1e-9);
  EXPECT_EQ(r.find("counting-R")->detail["rows"].size(), 13u);
}

TEST(Report, CoverCheckRejectsNonSandpileProducts) {
  EXPECT_THROW(cover_check(parse_poly("1+u"), parse_poly("2-u"), 4), std::invalid_argument);
  EXPECT_THROW(cover_check(parse_poly("3+u1+u2"), parse_poly("3-u1-u2"), 4), std::invalid_argument);
}
