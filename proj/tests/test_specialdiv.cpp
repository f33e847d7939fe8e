#include "rk4/specialdiv.hpp"

#include <doctest.h>

#include <algorithm>
#include <string>

using namespace rk4;

namespace {

std::vector<u64> values_of(const FactoredOdd& D, std::vector<std::uint64_t> masks)
{
    std::vector<u64> v;
    for (std::uint64_t m : masks) v.push_back(divisor_value(D, m));
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("special divisor examples")
{
    FactoredOdd d39 = factor_odd_squarefree(39);
    CHECK(values_of(d39, special_divisors(d39).elements()) == std::vector<u64>{1, 3, 13, 39});
    CHECK(special_divisors(d39).dim() == 2);
    FactoredOdd d7 = factor_odd_squarefree(7);
    CHECK(values_of(d7, special_divisors(d7).elements()) == std::vector<u64>{1, 7});
    FactoredOdd one = factor_odd_squarefree(1);
    CHECK(special_divisors(one).dim() == 0);
    CHECK(special_divisors(one).ambient() == 0);
}

TEST_CASE("kernel method equals brute force and contains 1 and D")
{
    SpfTable t(30000);
    for (const FactoredOdd& D : SquarefreeRange(t, 30000, 1, 2)) {
        Subspace s = special_divisors(D);
        auto elems = s.elements();
        auto brute = special_divisors_brute(D);
        std::sort(elems.begin(), elems.end());
        REQUIRE(elems == brute);
        const std::uint64_t all = (D.omega() == 0) ? 0 : ((1ULL << D.omega()) - 1);
        CHECK(s.contains(0));
        CHECK(s.contains(all));
    }
}

TEST_CASE("target group naming and parsing")
{
    TargetGroup tg(5, 21);
    CHECK(tg.dimension() == 2);
    for (const Character& chi : tg.characters()) CHECK(tg.parse(tg.name(chi)) == chi);
    CHECK(tg.name(tg.trivial()) == "1");
    CHECK(tg.parse("chi5").coords == 1);
    CHECK(tg.name(tg.parse("chi3*7")) == "chi3*7");
    CHECK_THROWS_AS(tg.parse("chi3"), std::invalid_argument);
    CHECK_THROWS_AS(tg.parse("chi11"), std::invalid_argument);
    CHECK_THROWS_AS(TargetGroup(5, 15), std::invalid_argument);
}

TEST_CASE("admissibility names the failed condition")
{
    TargetGroup tg(5, 3);
    // 7 = 2 mod 5 is a non-square mod 5.
    try {
        tg.check_admissible(factor_odd_squarefree(7));
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("not a square mod n1") != std::string::npos);
    }
    // 19 = 4 mod 5 (square) and 19 = 1 mod 3 (square, but 3 | n2).
    try {
        tg.check_admissible(factor_odd_squarefree(19));
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("which divides n2") != std::string::npos);
    }
    CHECK_THROWS_AS(tg.check_admissible(factor_odd_squarefree(15)), std::invalid_argument);
    CHECK(tg.is_admissible(factor_odd_squarefree(29)));
}

TEST_CASE("m_chi is the character-sum identity and a power of two")
{
    for (auto [n1, n2] : {std::pair<u64, u64>{5, 1}, {13, 1}, {1, 21}, {5, 21}}) {
        TargetGroup tg(n1, n2);
        for (u64 D = 3; D <= 3000; D += 2) {
            FactoredOdd f;
            try {
                f = factor_odd_squarefree(D);
            } catch (const std::invalid_argument&) {
                continue;
            }
            if (!tg.is_admissible(f)) continue;
            const i64 a1 = a_chi(f, tg, tg.trivial());
            const Subspace s = special_divisors(f);
            for (const Character& chi : tg.characters()) {
                int m = m_chi(f, tg, chi);
                CHECK((i64{1} << (f.omega() + 1)) * m == a1 + a_chi(f, tg, chi));
                CHECK(((m & (m - 1)) == 0));
                CHECK((m == (1 << s.dim()) || 2 * m == (1 << s.dim())));
            }
        }
    }
}

TEST_CASE("phi image lies in the target and D maps to zero")
{
    TargetGroup tg(5, 21);
    int seen = 0;
    for (u64 D = 3; D <= 5000; D += 4) {
        FactoredOdd f;
        try {
            f = factor_odd_squarefree(D);
        } catch (const std::invalid_argument&) {
            continue;
        }
        if (!tg.is_admissible(f)) continue;
        ++seen;
        CHECK(tg.phi(static_cast<i64>(D)) == 0);
        Subspace y = image_of_phi(f, tg);
        CHECK(y.ambient() == tg.dimension());
        CHECK(y.dim() <= special_divisors(f).dim() - 1);
    }
    CHECK(seen > 20);
}
