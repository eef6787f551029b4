#include <catch2/catch_amalgamated.hpp>

#include "jacobi/multiindex.hpp"

using namespace jacobi::multiindex;

TEST_CASE("smallest nonnegative walk sets") {
    const auto i1 = generate(Variant::IPlus, 1);
    REQUIRE(i1.size() == 1);
    CHECK(i1[0].j == std::vector<long>{0});
    CHECK(i1[0].k == std::vector<long>{1});

    const auto h1 = generate(Variant::IHatPlus, 1);
    REQUIRE(h1.size() == 1);
    CHECK(h1[0].j == std::vector<long>{0, 1});
    CHECK(h1[0].k == std::vector<long>{1});
}

TEST_CASE("full walk set of order two") {
    // brute enumeration of the two-branch recursion without pruning
    const auto i2 = generate(Variant::I, 2);
    REQUIRE(i2.size() == 4);
    CHECK(i2[0].j == std::vector<long>{0, -1});
    CHECK(i2[0].k == std::vector<long>{0, -1});
    CHECK(i2[1].j == std::vector<long>{0, -1});
    CHECK(i2[1].k == std::vector<long>{0, 0});
    CHECK(i2[2].j == std::vector<long>{0, 1});
    CHECK(i2[2].k == std::vector<long>{1, 1});
    CHECK(i2[3].j == std::vector<long>{0, 1});
    CHECK(i2[3].k == std::vector<long>{1, 2});
}

TEST_CASE("cardinalities") {
    const std::uint64_t plus[] = {1, 2, 3, 6};
    for (int m = 1; m <= 4; ++m) CHECK(cardinality(Variant::IPlus, m) == plus[m - 1]);
    for (int m = 1; m <= 10; ++m) {
        CHECK(cardinality(Variant::I, m) == (std::uint64_t{1} << m));
        CHECK(cardinality(Variant::IHat, m) == (std::uint64_t{1} << m));
        CHECK(cardinality(Variant::IHatPlus, m) == cardinality(Variant::IPlus, m));
    }
    for (int m = 1; m <= 9; ++m)
        for (Variant v : {Variant::I, Variant::IHat, Variant::IPlus, Variant::IHatPlus})
            CHECK(generate(v, m).size() == cardinality(v, m));
}

TEST_CASE("independent checker") {
    for (int m = 1; m <= 7; ++m) {
        for (Variant v : {Variant::I, Variant::IHat, Variant::IPlus, Variant::IHatPlus}) {
            for (const auto& p : generate(v, m)) CHECK(check_pair(p));
        }
    }
    Pair bad = generate(Variant::IPlus, 3)[0];
    bad.k[1] += 1;  // breaks the branch relation
    CHECK_FALSE(check_pair(bad));
    Pair neg = generate(Variant::I, 2)[0];  // contains j = -1
    neg.variant = Variant::IPlus;
    CHECK_FALSE(check_pair(neg));
}

TEST_CASE("order bounds enforced") {
    CHECK_THROWS_AS(generate(Variant::I, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate(Variant::I, 25), std::invalid_argument);
    CHECK_THROWS_AS(cardinality(Variant::IPlus, -1), std::invalid_argument);
}

TEST_CASE("notation printer") {
    const auto i3 = generate(Variant::IPlus, 3);
    CHECK(to_string(i3[0]) == "(0,1,0|1,1,1)");
    CHECK(to_string(i3[2]) == "(0,1,2|1,2,3)");
}
