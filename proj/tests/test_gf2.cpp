#include "rk4/gf2.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace rk4;

TEST_CASE("kernel vectors are annihilated and rank-nullity holds")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        int r = 1 + static_cast<int>(rng() % 8), c = 1 + static_cast<int>(rng() % 10);
        BitMatrix m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m.set(i, j, rng() & 1);
        auto ker = m.kernel();
        CHECK(static_cast<int>(ker.size()) + m.rank() == c);
        for (std::uint64_t v : ker)
            for (int i = 0; i < r; ++i) CHECK(dot(m.row(i), v) == 0);
        CHECK(Subspace(c, ker).dim() == static_cast<int>(ker.size()));
        BitMatrix t = m.transpose();
        CHECK(t.rank() == m.rank());
    }
}

TEST_CASE("subspaces are canonical")
{
    Subspace a(4, {0b0011, 0b0101});
    Subspace b(4, {0b0110, 0b0011, 0b0101});
    CHECK(a == b);
    CHECK(a.dim() == 2);
    CHECK(a.contains(0b0110));
    CHECK_FALSE(a.contains(0b1000));
    CHECK(a.elements().size() == 4);
    CHECK(Subspace(3, {0}).dim() == 0);
    CHECK_THROWS_AS(Subspace(2, {0b100}), std::invalid_argument);
}

TEST_CASE("orthogonal complement")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(rng() % 7);
        std::vector<std::uint64_t> gens;
        for (int i = 0; i < 3; ++i) gens.push_back(rng() & ((1ULL << n) - 1));
        Subspace v(n, gens);
        Subspace w = v.orthogonal();
        CHECK(v.dim() + w.dim() == n);
        for (std::uint64_t x : v.elements())
            for (std::uint64_t y : w.elements()) CHECK(dot(x, y) == 0);
        CHECK(w.orthogonal() == v);
    }
}

TEST_CASE("subspace enumeration counts match N2")
{
    for (int s = 0; s <= 5; ++s) {
        auto subs = enumerate_subspaces(s);
        CHECK(BigInt(subs.size()) == n2(s));
        CHECK(std::set<Subspace>(subs.begin(), subs.end()).size() == subs.size());
    }
    CHECK(n2(0) == 1);
    CHECK(n2(-3) == 1);
    CHECK(n2(1) == 2);
    CHECK(n2(2) == 5);
    CHECK(n2(3) == 16);
    CHECK(n2(4) == 67);
    CHECK(gaussian_binomial(4, 2, 2) == 35);
    CHECK(gaussian_binomial(3, 1, 3) == 13);
}

TEST_CASE("Moebius function of the subspace lattice satisfies its defining recursion")
{
    auto subs = enumerate_subspaces(4);
    const Subspace zero(4);
    for (const Subspace& w : subs) {
        BigInt total = 0;
        for (const Subspace& u : subs)
            if (u.is_subspace_of(w)) total += moebius(zero, u);
        CHECK(total == (w.dim() == 0 ? 1 : 0));
    }
}
