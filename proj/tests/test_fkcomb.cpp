#include "rk4/fkcomb.hpp"

#include <doctest.h>

#include <set>

using namespace rk4;

namespace {

// Phi_k evaluated straight from its defining sum over blocks.
int phi_reference(std::uint64_t u, std::uint64_t v, int k)
{
    int s = 0;
    for (int j = 0; j < k; ++j) {
        int u1 = (u >> (2 * j)) & 1, u2 = (u >> (2 * j + 1)) & 1;
        int v1 = (v >> (2 * j)) & 1, v2 = (v >> (2 * j + 1)) & 1;
        s ^= (u1 ^ v1) & (u1 ^ v2);
    }
    return s;
}

}  // namespace

TEST_CASE("phi form and linkage follow the defining formula")
{
    for (int k = 1; k <= 2; ++k) {
        const std::uint64_t n = 1ULL << (2 * k);
        for (std::uint64_t u = 0; u < n; ++u)
            for (std::uint64_t v = 0; v < n; ++v) {
                CHECK(phi_form(u, v, k) == phi_reference(u, v, k));
                CHECK(linked(u, v, k) == ((phi_reference(u, v, k) ^ phi_reference(v, u, k)) == 1));
            }
    }
    // u = (1,0), v = (0,0): Phi(u,v) = 1 and Phi(v,u) = 0, so they are linked.
    CHECK(linked(0b01, 0b00, 1));
    CHECK_FALSE(linked(0b01, 0b10, 1));
}

TEST_CASE("maximal unlinked sets are maximal, pairwise unlinked cosets")
{
    for (int k = 1; k <= 2; ++k) {
        auto sets = maximal_unlinked_sets(k);
        CHECK(!sets.empty());
        const std::uint64_t n = 1ULL << (2 * k);
        std::set<std::vector<std::uint64_t>> distinct(sets.begin(), sets.end());
        CHECK(distinct.size() == sets.size());
        for (const auto& u : sets) {
            for (std::size_t i = 0; i < u.size(); ++i)
                for (std::size_t j = i + 1; j < u.size(); ++j) CHECK_FALSE(linked(u[i], u[j], k));
            std::set<std::uint64_t> in(u.begin(), u.end());
            for (std::uint64_t x = 0; x < n; ++x) {
                if (in.count(x)) continue;
                bool blocked = false;
                for (std::uint64_t y : u) blocked = blocked || linked(x, y, k);
                CHECK(blocked);
            }
        }
    }
}

TEST_CASE("identity holds for every profile with k <= 2")
{
    for (int k = 1; k <= 2; ++k) {
        auto profiles = all_profiles(k);
        std::set<int> ts;
        for (const PsiProfile& prof : profiles) {
            ts.insert(prof.t);
            IdentityReport r = verify_identity(prof);
            CHECK(r.lhs == r.rhs);
            CHECK(r.good_count == r.good_count_b_basis);
            CHECK(r.ok());
        }
        CHECK(static_cast<int>(ts.size()) == k + 1);
    }
    PsiProfile empty{2, 0, {}, {}};
    IdentityReport r = verify_identity(empty);
    CHECK(r.lhs == 160);
    CHECK(r.rhs == 160);
    CHECK(verify_identity(PsiProfile{1, 0, {}, {}}).lhs == 8);
}

TEST_CASE("stability requires each functional to be constant")
{
    std::vector<std::uint64_t> psi{0b01};
    CHECK(is_stable({0b00, 0b10}, psi));
    CHECK(is_stable({0b01, 0b11}, psi));
    CHECK_FALSE(is_stable({0b00, 0b01}, psi));
}
