#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "jacobi/conditions.hpp"

using namespace jacobi;
using seq::CoefficientSpec;

namespace {

CoefficientSpec parity_b_spec(Rational alpha, Rational beta, Rational gamma) {
    // a_n = n^alpha; b_n = n^beta (even n), n^gamma (odd n)
    seq::SeqRule b;
    b.modulus = 2;
    b.branches = {seq::Branch{seq::PowerTerm{1.0, beta}, 1}, seq::Branch{seq::PowerTerm{1.0, gamma}, 1}};
    return CoefficientSpec(seq::power_rule(1.0, alpha), b);
}

}  // namespace

TEST_CASE("G+ closed values") {
    const auto s1 = seq::power_spec(1.0, Rational{1}, 1.0, Rational{2});
    CHECK(conditions::G_plus(s1, 1, 10) == Catch::Approx(9.0 / 100.0).epsilon(1e-14));

    const auto ones = seq::power_spec(1.0, Rational{0}, 1.0, Rational{0});
    for (long n : {3L, 7L, 20L}) CHECK(conditions::G_plus(ones, 2, n) == Catch::Approx(2.0).epsilon(1e-14));

    // a_n = n^2, b_n = n^3: a_n G+_{3,n} tracks n^{alpha-3}
    const auto b1 = seq::power_spec(1.0, Rational{2}, 1.0, Rational{3});
    const double val = b1.a(100) * conditions::G_plus(b1, 3, 100);
    CHECK(val > 0.008);
    CHECK(val < 0.012);
}

TEST_CASE("G full closed values") {
    const auto lin = seq::power_spec(1.0, Rational{1}, 1.0, Rational{0});
    CHECK(conditions::G_full(lin, 1, 5) == Catch::Approx(9.0).epsilon(1e-14));

    const auto ones = seq::power_spec(1.0, Rational{0}, 1.0, Rational{0});
    CHECK(conditions::G_full(ones, 2, 5) == Catch::Approx(4.0).epsilon(1e-14));

    const auto s = seq::power_spec(1.0, Rational{2}, 1.0, Rational{3});
    const auto a = [&](long n) { return s.a(n); };
    const auto b = [&](long n) { return std::abs(s.b(n)); };
    const double want = a(9) * (a(8) + a(9)) / (b(10) * b(9)) + a(10) * (a(10) + a(11)) / (b(10) * b(11));
    CHECK(conditions::G_full(s, 2, 10) == Catch::Approx(want).epsilon(1e-13));

    CHECK_THROWS_AS(conditions::G_full(s, 3, 3), std::invalid_argument);
}

TEST_CASE("G tilde closed values and boundary") {
    const auto s = seq::power_spec(1.0, Rational{0}, 2.0, Rational{0});  // a = 1, b = 2
    CHECK(conditions::G_tilde(s, 1, 3) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(conditions::G_tilde(s, 1, 1) == Catch::Approx(0.25).epsilon(1e-14));  // a_0 = 0
    CHECK(conditions::G_tilde(s, 2, 5) == Catch::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("G tilde recursion identity") {
    const auto c = seq::power_spec(1.0, Rational{0}, 2.0, Rational{0});
    CHECK(conditions::recursion_check_G_tilde(c, 1, 5));
    const auto s = seq::power_spec(1.0, Rational{1}, 1.0, Rational{2});
    CHECK(conditions::recursion_check_G_tilde(s, 2, 7));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> cst(0.5, 2.0);
    std::uniform_int_distribution<int> num(-3, 3);
    for (int rep = 0; rep < 30; ++rep) {
        const auto r = seq::power_spec(cst(rng), Rational{num(rng), 2}, cst(rng), Rational{num(rng), 2});
        CHECK(conditions::recursion_check_G_tilde(r, 3, 10));
    }
}

TEST_CASE("vanishing diagonal makes the sums infinite") {
    const CoefficientSpec free_op(seq::power_rule(1.0, Rational{0}), seq::zero_rule());
    CHECK(std::isinf(conditions::G_full(free_op, 1, 5)));
    CHECK(std::isinf(conditions::G_plus(free_op, 2, 5)));
    CHECK(std::isinf(conditions::G_tilde(free_op, 1, 5)));
}

TEST_CASE("subset monotonicity and positivity") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> cst(0.5, 2.0);
    std::uniform_int_distribution<int> num(-3, 3);
    for (int rep = 0; rep < 25; ++rep) {
        const auto s = seq::power_spec(cst(rng), Rational{num(rng), 2}, cst(rng), Rational{num(rng), 2});
        for (int m = 1; m <= 4; ++m) {
            for (long n : {m + 2L, 12L, 30L}) {
                const double gp = conditions::G_plus(s, m, n);
                const double gf = conditions::G_full(s, m, n);
                CHECK(gp >= 0.0);
                CHECK(gf >= gp);  // the nonnegative walks are a subset
            }
        }
    }
}

TEST_CASE("ratio factors") {
    const auto s = seq::power_spec(1.0, Rational{1}, 1.0, Rational{2});
    const auto rf = conditions::ratio_factors(s, 4, 3.0);
    CHECK(rf.gamma_minus == Catch::Approx(3.0 / 16.0));
    CHECK(rf.gamma_plus == Catch::Approx(4.0 / 16.0));
    CHECK(rf.c_abs_minus == Catch::Approx(3.0 / 13.0));
    CHECK(rf.c_abs_plus == Catch::Approx(4.0 / 13.0));
    const CoefficientSpec z(seq::power_rule(1.0, Rational{0}), seq::zero_rule());
    CHECK(std::isinf(conditions::ratio_factors(z, 3, 1.0).gamma_plus));
}

TEST_CASE("symbolic exponents of the products") {
    using conditions::ProductKind;
    const auto b1 = seq::power_spec(1.0, Rational{2}, 1.0, Rational{3});
    const auto s1 = conditions::symbolic_exponent_of(ProductKind::G_plus_times_a, b1, 1);
    REQUIRE(s1.has_value());
    REQUIRE(s1->cls[0].dominant().has_value());
    CHECK(s1->cls[0].dominant()->exponent == Rational{1});  // alpha - m = 1

    // parity family: a = n^3 (even) / n^-3 (odd), b = n^2
    seq::SeqRule a;
    a.modulus = 2;
    a.branches = {seq::Branch{seq::PowerTerm{1.0, Rational{3}}, 1},
                  seq::Branch{seq::PowerTerm{1.0, Rational{-3}}, 1}};
    const CoefficientSpec b2(a, seq::power_rule(1.0, Rational{2}));
    const auto s2 = conditions::symbolic_exponent_of(ProductKind::G_plus_times_a, b2, 2);
    REQUIRE(s2.has_value());
    for (long c = 0; c < 2; ++c) {
        REQUIRE(s2->at(c).dominant().has_value());
        CHECK(s2->at(c).dominant()->exponent == Rational{-1});  // m - alpha
    }

    // a = n^(1/3), b = 1: a_n G_{2,n} tracks n^{(m+1)/alpha} = n
    const auto c2 = seq::power_spec(1.0, Rational{1, 3}, 1.0, Rational{0});
    const auto s3 = conditions::symbolic_exponent_of(ProductKind::G_full_times_a, c2, 2);
    REQUIRE(s3.has_value());
    CHECK(s3->cls[0].dominant()->exponent == Rational{1});

    // overrides disable the symbolic route
    seq::SeqRule ob = seq::power_rule(1.0, Rational{3});
    seq::Override ov;
    ov.kind = seq::Override::Kind::Squares;
    ov.base = 0.5;
    ob.override_rule = ov;
    const CoefficientSpec withov(seq::power_rule(1.0, Rational{2}), ob);
    CHECK_FALSE(conditions::symbolic_exponent_of(ProductKind::G_tilde, withov, 1).has_value());
}

TEST_CASE("symbolic dominant term matches numeric evaluation at n = 10^4") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> cst(0.5, 2.0);
    std::uniform_int_distribution<int> num(-3, 3);
    int tested = 0;
    for (int rep = 0; rep < 40 && tested < 20; ++rep) {
        const auto s = seq::power_spec(cst(rng), Rational{num(rng), 2}, cst(rng), Rational{num(rng), 2});
        for (int m = 1; m <= 4; ++m) {
            const auto sym = conditions::symbolic_exponent_of(conditions::ProductKind::G_plus_times_a, s, m);
            REQUIRE(sym.has_value());
            const long n = 10000;
            const auto dom = sym->at(n % sym->modulus).dominant();
            REQUIRE(dom.has_value());
            const double value = s.a(n) * conditions::G_plus(s, m, n);
            const double lhs = std::log(value) - to_double(dom->exponent) * std::log(static_cast<double>(n)) -
                               std::log(dom->coefficient);
            CHECK(std::abs(lhs) < 0.5);
            ++tested;
        }
    }
}

TEST_CASE("parity-diagonal symbolic exponents split by class") {
    // b alternates n^4 / n^5; the odd-m products see the two classes differently
    const auto s = parity_b_spec(Rational{3}, Rational{4}, Rational{5});
    const auto sym = conditions::symbolic_exponent_of(conditions::ProductKind::G_plus_times_a, s, 1);
    REQUIRE(sym.has_value());
    CHECK(sym->at(0).dominant()->exponent == Rational{2});  // 2*3 - 4 on even n
    CHECK(sym->at(1).dominant()->exponent == Rational{1});  // 2*3 - 5 on odd n
}
