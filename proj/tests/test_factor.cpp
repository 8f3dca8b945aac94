#include <doctest.h>

#include <numeric>

#include "bnmon/error.hpp"
#include "bnmon/factor.hpp"

using namespace bnmon;

TEST_SUITE("factor") {
  TEST_CASE("marginalize sums out the dropped variables") {
    // vars {0 (card 2), 2 (card 3)}; cells in (v0, v2) order, v0 slowest.
    Factor f({0, 2}, {2, 3});
    std::iota(f.values().begin(), f.values().end(), 1.0);  // 1..6
    const Factor m0 = f.marginalize({0});
    CHECK(m0[0] == 6.0);
    CHECK(m0[1] == 15.0);
    const Factor m2 = f.marginalize({2});
    CHECK(m2[0] == 5.0);
    CHECK(m2[1] == 7.0);
    CHECK(m2[2] == 9.0);
    CHECK(f.marginalize({}).values()[0] == 21.0);
  }

  TEST_CASE("multiply broadcasts a sub-table") {
    Factor f({0, 1}, {2, 2}, 1.0);
    Factor g({1}, {2});
    g[0] = 2.0;
    g[1] = 3.0;
    f.multiply(g);
    CHECK(std::vector<double>(f.values().begin(), f.values().end()) == std::vector<double>{2, 3, 2, 3});
  }

  TEST_CASE("slice and restrict select one state") {
    Factor f({1, 4}, {3, 2});
    std::iota(f.values().begin(), f.values().end(), 0.0);  // (v1, v4) -> 2*v1 + v4
    const Factor s = f.slice(1, 2);
    REQUIRE(s.vars() == std::vector<std::size_t>{4});
    CHECK(s[0] == 4.0);
    CHECK(s[1] == 5.0);
    const Factor t = f.slice(4, 1);
    CHECK(t[0] == 1.0);
    CHECK(t[2] == 5.0);
    f.restrict_to(4, 0);
    CHECK(f.total() == 0.0 + 2.0 + 4.0);
  }

  TEST_CASE("values_in_order permutes the layout") {
    Factor f({0, 1}, {2, 3});
    std::iota(f.values().begin(), f.values().end(), 0.0);  // 3*v0 + v1
    const auto swapped = f.values_in_order({1, 0});        // 2*v1 + v0 positions
    CHECK(swapped == std::vector<double>{0, 3, 1, 4, 2, 5});
  }

  TEST_CASE("unsorted variables are rejected") {
    CHECK_THROWS_AS(Factor({2, 1}, {2, 2}), Error);
  }
}
