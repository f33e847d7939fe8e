#pragma once

#include "rk4/gf2.hpp"
#include "rk4/rational.hpp"

#include <cstdint>
#include <vector>

namespace rk4 {

// Points of F2^{2k} are bitmasks; block j occupies bits 2j (first coordinate) and 2j+1 (second).
int phi_form(std::uint64_t u, std::uint64_t v, int k);
bool linked(std::uint64_t u, std::uint64_t v, int k);

// Inclusion-maximal sets of pairwise unlinked points, each sorted ascending.
std::vector<std::vector<std::uint64_t>> maximal_unlinked_sets(int k);

// Signed count over odd residues (h_u) mod 4 with product 3 mod 4.
std::int64_t gamma(const std::vector<std::uint64_t>& u, int k);

// Characters appearing with positive exponent (B), their exponents, and a basis T of span(B).
// Characters live in F2^t with T the standard basis, so coefficient of T[i] in chi is bit i.
struct PsiProfile {
    int k = 1;
    int t = 0;                        // #T
    std::vector<std::uint64_t> b;     // distinct nonzero characters, spanning F2^t
    std::vector<int> exponents;       // i_chi >= 1, sum <= k
};

// One linear functional on F2^{2k} per basis character, as a bitmask.
std::vector<std::uint64_t> psi_functionals(const PsiProfile& prof);

// Every Psi functional is constant on U.
bool is_stable(const std::vector<std::uint64_t>& u, const std::vector<std::uint64_t>& psi);

// All profiles for a given k (up to relabeling of characters).
std::vector<PsiProfile> all_profiles(int k);

struct IdentityReport {
    int k = 0;
    int t = 0;
    BigInt lhs;                  // sum of gamma over stable maximal unlinked sets
    BigInt rhs;                  // 2^{2^k + k - 1} N2(k - t)
    BigInt good_count;           // good subspaces on which all Psi vanish
    BigInt good_count_b_basis;   // same count with the form written in the b-basis
    bool gamma_vanishes_off_good = true;
    bool per_good_total_ok = true;
    bool sets_are_cosets = true;
    bool ok() const;
};

IdentityReport verify_identity(const PsiProfile& prof);

}  // namespace rk4
