#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "jacobi/coeffseq.hpp"

using namespace jacobi;
using seq::Branch;
using seq::CoefficientSpec;
using seq::Override;
using seq::PowerTerm;
using seq::SeqRule;

namespace {

SeqRule parity_rule(Rational even_exp, Rational odd_exp) {
    SeqRule r;
    r.modulus = 2;
    r.branches = {Branch{PowerTerm{1.0, even_exp}, 1}, Branch{PowerTerm{1.0, odd_exp}, 1}};
    return r;
}

// a_n = a_{n-1} for q | n, a_n = n^(q+1) a_{n-1} otherwise; b_n = n^q a_{n-1}
CoefficientSpec exD_spec(long q) {
    SeqRule a;
    a.modulus = q;
    a.recursive = true;
    a.seed = 1.0;
    a.branches.assign(static_cast<std::size_t>(q), Branch{PowerTerm{1.0, Rational{q + 1}}, 1});
    a.branches[0] = Branch{PowerTerm{1.0, Rational{0}}, 1};
    SeqRule b;
    b.modulus = 1;
    b.recursive = true;
    b.seed = 1.0;
    b.branches = {Branch{PowerTerm{1.0, Rational{q}}, 1}};
    return CoefficientSpec(std::move(a), std::move(b));
}

}  // namespace

TEST_CASE("plain power evaluation") {
    const auto spec = seq::power_spec(1.0, Rational{2}, 1.0, Rational{3});
    CHECK(spec.a(3) == Catch::Approx(9.0).epsilon(1e-14));
    CHECK(spec.b(2) == Catch::Approx(8.0).epsilon(1e-14));
    CHECK_THROWS_AS(spec.a(0), std::invalid_argument);
}

TEST_CASE("parity-split power family") {
    // a_n = n^alpha for even n, n^-alpha for odd n; alpha = 2
    const CoefficientSpec spec(parity_rule(Rational{2}, Rational{-2}),
                               seq::power_rule(1.0, Rational{1}));
    CHECK(spec.a(4) == Catch::Approx(16.0).epsilon(1e-14));
    CHECK(spec.a(3) == Catch::Approx(1.0 / 9.0).epsilon(1e-14));
    CHECK(spec.b(5) == Catch::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("recursive chain values") {
    const auto spec = exD_spec(2);
    CHECK(spec.a(1) == 1.0);
    CHECK(spec.a(2) == 1.0);     // 2 = 0 mod 2: factor 1
    CHECK(spec.a(3) == 27.0);    // 3^3 * a_2
    CHECK(spec.b(1) == 1.0);     // seed
    CHECK(spec.b(2) == 4.0);     // 2^2 * a_1
    CHECK(spec.b(3) == 9.0);     // 3^2 * a_2
    CHECK(spec.b(4) == Catch::Approx(16.0 * 27.0).epsilon(1e-14));
    // the chain leaves double range eventually; log-space stays usable
    CHECK_THROWS_AS(spec.a(400), std::domain_error);
    CHECK(std::isfinite(spec.log_a(400)));
    CHECK(std::isfinite(spec.log_abs_b(400)));
}

TEST_CASE("memoized recursive evaluation equals the naive unrolled product") {
    SeqRule a;
    a.modulus = 3;
    a.recursive = true;
    a.seed = 1.5;
    a.branches = {Branch{PowerTerm{1.0, Rational{1}}, 1}, Branch{PowerTerm{1.0, Rational{-1}}, 1},
                  Branch{PowerTerm{1.0, Rational{0}}, 1}};
    const CoefficientSpec spec(a, seq::power_rule(1.0, Rational{1}));
    double naive = 1.5;
    for (long n = 2; n <= 10000; ++n) {
        const Branch& f = a.branches[static_cast<std::size_t>(n % 3)];
        naive *= f.value(static_cast<double>(n));
        REQUIRE(spec.a(n) == naive);  // bit-identical
    }
}

TEST_CASE("sparse overrides") {
    // b_n = (1/2)^n on perfect squares, n^2 otherwise
    SeqRule b = seq::power_rule(1.0, Rational{2});
    Override ov;
    ov.kind = Override::Kind::Squares;
    ov.base = 0.5;
    b.override_rule = ov;
    const CoefficientSpec spec(seq::power_rule(1.0, Rational{1}), b);
    CHECK(spec.b(4) == Catch::Approx(0.0625).epsilon(1e-14));
    CHECK(spec.b(5) == Catch::Approx(25.0).epsilon(1e-14));
    CHECK(spec.b(9) == Catch::Approx(std::pow(0.5, 9)).epsilon(1e-14));
    CHECK(spec.asymptotic_exponent('b', 0) == std::nullopt);
    CHECK(spec.asymptotic_exponent('a', 0) == Rational{1});

    SECTION("explicit list and residue kinds") {
        SeqRule b2 = seq::power_rule(1.0, Rational{1});
        Override lst;
        lst.kind = Override::Kind::List;
        lst.entries = {{3, 0.0}, {7, -2.0}};
        b2.override_rule = lst;
        const CoefficientSpec s2(seq::power_rule(1.0, Rational{0}), b2);
        CHECK(s2.b(3) == 0.0);
        CHECK(s2.sign_b(3) == 0);
        CHECK(s2.b(7) == -2.0);
        CHECK(s2.b(5) == 5.0);
        CHECK(lst.distance_to(5) == 2);

        Override res;
        res.kind = Override::Kind::Residue;
        res.modulus = 3;
        res.residue = 0;
        res.branch = Branch{PowerTerm{2.0, Rational{1}}, -1};
        SeqRule b3 = seq::power_rule(1.0, Rational{0});
        b3.override_rule = res;
        const CoefficientSpec s3(seq::power_rule(1.0, Rational{0}), b3);
        CHECK(s3.b(6) == -12.0);
        CHECK(s3.b(7) == 1.0);
        CHECK_FALSE(res.gaps_diverge());
    }

    SECTION("invalid overrides are rejected") {
        SeqRule bad = seq::power_rule(1.0, Rational{1});
        Override ov2;
        ov2.kind = Override::Kind::Squares;
        ov2.base = 1.5;  // must be in (0,1)
        bad.override_rule = ov2;
        CHECK_THROWS_AS(CoefficientSpec(seq::power_rule(1.0, Rational{1}), bad), std::invalid_argument);

        SeqRule bad2 = seq::power_rule(1.0, Rational{1});
        Override lst;
        lst.kind = Override::Kind::List;
        lst.entries = {{5, 1.0}, {5, 2.0}};  // not strictly increasing
        bad2.override_rule = lst;
        CHECK_THROWS_AS(CoefficientSpec(bad2, seq::power_rule(1.0, Rational{1})), std::invalid_argument);
    }
}

TEST_CASE("asymptotic exponents") {
    const auto b1 = seq::power_spec(1.0, Rational{2}, 1.0, Rational{3});
    CHECK(b1.asymptotic_exponent('a', 0) == Rational{2});
    CHECK(b1.asymptotic_exponent('b', 1) == Rational{3});
    const auto flat = seq::power_spec(1.0, Rational{1}, 1.0, Rational{0});
    CHECK(flat.asymptotic_exponent('b', 0) == Rational{0});
    CHECK(exD_spec(2).asymptotic_exponent('a', 0) == std::nullopt);  // non-telescoping recursion
}

TEST_CASE("power-law consistency at large n") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> cst(0.5, 2.0);
    std::uniform_int_distribution<int> num(-4, 4);
    for (int rep = 0; rep < 20; ++rep) {
        const double c = cst(rng);
        const Rational e{num(rng), 2};
        const auto spec = seq::power_spec(c, e, 1.0, Rational{1});
        for (long n : {1000L, 10000L, 100000L}) {
            const double lhs = std::log(spec.a(n)) - to_double(e) * std::log(static_cast<double>(n)) -
                               std::log(c);
            CHECK(std::abs(lhs) < 1e-9);
        }
    }
}

TEST_CASE("positivity holds across random specs") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> cst(0.1, 3.0);
    std::uniform_int_distribution<int> num(-6, 6);
    for (int rep = 0; rep < 50; ++rep) {
        const auto spec = seq::power_spec(cst(rng), Rational{num(rng), 2}, cst(rng), Rational{num(rng), 2});
        for (long n = 1; n <= 200; ++n) CHECK(spec.a(n) > 0.0);
    }
}

TEST_CASE("growth classification") {
    CHECK(exD_spec(2).growth('a') == seq::Growth::Diverges);
    CHECK(exD_spec(2).growth('b') == seq::Growth::Diverges);
    CHECK(seq::power_spec(1.0, Rational{2}, 1.0, Rational{1}).growth('a') == seq::Growth::PowerLike);

    SeqRule dec;  // a_n = a_{n-1}/n -> super-polynomial decay
    dec.modulus = 1;
    dec.recursive = true;
    dec.seed = 1.0;
    dec.branches = {Branch{PowerTerm{1.0, Rational{-1}}, 1}};
    const CoefficientSpec s(dec, seq::power_rule(1.0, Rational{0}));
    CHECK(s.growth('a') == seq::Growth::Decays);
    CHECK(s.a_diverges() == false);

    SeqRule periodic;  // factors 2, 1/2 -> telescopes to a 2-periodic sequence
    periodic.modulus = 2;
    periodic.recursive = true;
    periodic.seed = 3.0;
    periodic.branches = {Branch{PowerTerm{2.0, Rational{0}}, 1}, Branch{PowerTerm{0.5, Rational{0}}, 1}};
    const CoefficientSpec p(periodic, seq::power_rule(1.0, Rational{1}));
    CHECK(p.growth('a') == seq::Growth::PowerLike);
    const auto prof = p.power_profile('a');
    REQUIRE(prof.has_value());
    CHECK(prof->at(0).exponent == Rational{0});
    CHECK(p.a(11) == p.a(13));  // periodic tail
}

TEST_CASE("ratio profile of a recursive chain") {
    const auto spec = exD_spec(2);
    const auto rp = spec.ratio_profile();
    REQUIRE(rp.has_value());
    CHECK(rp->modulus == 2);
    // class 0 (q | n): gamma+ = n^-q; other classes: gamma+ = n
    CHECK(rp->gp(0).exponent == Rational{-2});
    CHECK(rp->gp(1).exponent == Rational{1});
    CHECK(rp->gm(0).exponent == Rational{-2});
    CHECK(rp->gm(1).exponent == Rational{-2});
    // numeric agreement: gamma+_n = a_n/|b_n|
    for (long n : {10L, 11L, 20L, 21L}) {
        const double want = spec.a(n) / std::abs(spec.b(n));
        const auto& cp = rp->gp(n % 2);
        const double got = cp.constant * std::pow(static_cast<double>(n), to_double(cp.exponent));
        CHECK(got == Catch::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("zero diagonal is allowed") {
    const CoefficientSpec spec(seq::power_rule(1.0, Rational{0}), seq::zero_rule());
    CHECK(spec.b(5) == 0.0);
    CHECK(spec.sign_b(5) == 0);
    CHECK(spec.log_abs_b(5) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("recursive and override cannot combine") {
    SeqRule a = seq::power_rule(1.0, Rational{1});
    a.recursive = true;
    Override ov;
    ov.kind = Override::Kind::Squares;
    ov.base = 0.5;
    a.override_rule = ov;
    CHECK_THROWS_AS(CoefficientSpec(a, seq::power_rule(1.0, Rational{1})), std::invalid_argument);
}
