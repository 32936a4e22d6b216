#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rsindy/error.hpp"
#include "rsindy/feature_library.hpp"
#include "rsindy/serialization.hpp"

using namespace rsindy;
using Eigen::VectorXd;

TEST_CASE("dimension counts each block") {
  DictionarySpec d;
  d.base_dim = 4;
  CHECK(dimension(d) == 5);
  d.interactions = true;
  CHECK(dimension(d) == 11);
  d.include_intercept = false;
  d.interactions = false;
  d.squares = d.sine = d.cosine = true;
  CHECK(dimension(d) == 16);
  d.base_dim = 1;
  d.interactions = true;  // no pairs for a single feature
  CHECK(dimension(d) == 4);
}

TEST_CASE("expert grid dimensions") {
  const auto grid = expert_grid(4);
  REQUIRE(grid.size() == 9);
  const std::vector<Eigen::Index> expected{5, 11, 9, 9, 9, 15, 19, 23, 13};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(dimension(grid[i]) == expected[i]);
    CHECK(grid[i].include_intercept);
  }
}

TEST_CASE("transform output order") {
  DictionarySpec d;
  d.base_dim = 3;
  d.interactions = d.squares = d.sine = d.cosine = true;
  VectorXd x(3);
  x << 1.0, 2.0, 3.0;
  const VectorXd t = transform(d, x);
  REQUIRE(t.size() == dimension(d));
  CHECK(t(0) == 1.0);
  CHECK(t(1) == 1.0);
  CHECK(t(3) == 3.0);
  // interactions (0,1), (0,2), (1,2)
  CHECK(t(4) == 2.0);
  CHECK(t(5) == 3.0);
  CHECK(t(6) == 6.0);
  // squares
  CHECK(t(7) == 1.0);
  CHECK(t(9) == 9.0);
  CHECK(t(10) == doctest::Approx(std::sin(1.0)));
  CHECK(t(15) == doctest::Approx(std::cos(3.0)));

  const auto names = term_names(d, {"a", "b", "c"});
  REQUIRE(names.size() == static_cast<std::size_t>(t.size()));
  CHECK(names[0] == "intercept");
  CHECK(names[4] == "a:b");
  CHECK(names[7] == "a^2");
  CHECK(names[10] == "sin(a)");
  CHECK(names[15] == "cos(c)");
}

TEST_CASE("raw dictionary is the identity") {
  DictionarySpec d;
  d.base_dim = 2;
  d.include_intercept = false;
  VectorXd x(2);
  x << -1.5, 4.0;
  CHECK(transform(d, x) == x);
}

TEST_CASE("invalid inputs") {
  DictionarySpec d;
  d.base_dim = 0;
  CHECK_THROWS_AS(validate(d), Error);
  d.base_dim = 2;
  CHECK_THROWS_AS(transform(d, VectorXd::Zero(3)), Error);
  VectorXd x(2);
  x << 1.0, std::nan("");
  CHECK_THROWS_AS(transform(d, x), Error);
  d.frequency = INFINITY;
  CHECK_THROWS_AS(validate(d), Error);
}

TEST_CASE("dictionary spec JSON round trip") {
  DictionarySpec d;
  d.base_dim = 4;
  d.squares = true;
  d.frequency = 2.0;
  CHECK(dictionary_from_json(to_json(d)) == d);
  CHECK_THROWS_AS(dictionary_from_json(Json::object()), Error);
}
