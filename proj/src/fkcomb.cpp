#include "rk4/fkcomb.hpp"

#include <bit>
#include <map>
#include <stdexcept>

namespace rk4 {

namespace {

constexpr std::uint64_t kFirstCoords = 0x5555555555555555ULL;

void check_k(int k)
{
    if (k < 1 || k > 3) throw std::invalid_argument("block count k must be in [1, 3]");
}

int parity(std::uint64_t x)
{
    return std::popcount(x) & 1;
}

// Bilinear form sum_j x_{first,j} (y_{first,j} + y_{second,j}).
int form_e(std::uint64_t x, std::uint64_t y)
{
    return parity(x & (y ^ (y >> 1)) & kFirstCoords);
}

// The same form after the change to the basis {e1 + e2, e2, e3 + e4, e4, ...}.
std::uint64_t to_b_basis(std::uint64_t x)
{
    return x ^ ((x & kFirstCoords) << 1);
}

int form_b(std::uint64_t beta, std::uint64_t beta2)
{
    return parity(beta & (beta2 >> 1) & kFirstCoords);
}

bool good_e(const Subspace& u0)
{
    for (std::uint64_t x : u0.basis())
        for (std::uint64_t y : u0.basis())
            if (form_e(x, y)) return false;
    return true;
}

bool psi_vanish(const Subspace& u0, const std::vector<std::uint64_t>& psi)
{
    for (std::uint64_t f : psi)
        for (std::uint64_t x : u0.basis())
            if (parity(f & x)) return false;
    return true;
}

}  // namespace

int phi_form(std::uint64_t u, std::uint64_t v, int k)
{
    int s = 0;
    for (int j = 0; j < k; ++j) {
        int u1 = (u >> (2 * j)) & 1, v1 = (v >> (2 * j)) & 1, v2 = (v >> (2 * j + 1)) & 1;
        s ^= (u1 ^ v1) & (u1 ^ v2);
    }
    return s;
}

bool linked(std::uint64_t u, std::uint64_t v, int k)
{
    return (phi_form(u, v, k) ^ phi_form(v, u, k)) != 0;
}

std::vector<std::vector<std::uint64_t>> maximal_unlinked_sets(int k)
{
    check_k(k);
    const int n = 1 << (2 * k);
    std::vector<std::uint64_t> nbr(n, 0);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && !linked(u, v, k)) nbr[u] |= 1ULL << v;

    std::vector<std::vector<std::uint64_t>> out;
    auto bk = [&](auto&& self, std::uint64_t r, std::uint64_t p, std::uint64_t x) -> void {
        if (p == 0 && x == 0) {
            std::vector<std::uint64_t> set;
            for (std::uint64_t m = r; m; m &= m - 1) set.push_back(std::countr_zero(m));
            out.push_back(std::move(set));
            return;
        }
        int pivot = std::countr_zero(p | x);
        for (std::uint64_t cand = p & ~nbr[pivot]; cand; cand &= cand - 1) {
            int v = std::countr_zero(cand);
            std::uint64_t bit = 1ULL << v;
            self(self, r | bit, p & nbr[v], x & nbr[v]);
            p &= ~bit;
            x |= bit;
        }
    };
    std::uint64_t all = n == 64 ? ~0ULL : ((1ULL << n) - 1);
    bk(bk, 0, all, 0);
    return out;
}

std::int64_t gamma(const std::vector<std::uint64_t>& u, int k)
{
    const int n = static_cast<int>(u.size());
    if (n > 20) throw std::invalid_argument("gamma: set too large");
    std::vector<std::uint64_t> pair_mask(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (phi_form(u[i], u[j], k)) pair_mask[i] |= 1ULL << j;
    std::int64_t total = 0;
    for (std::uint64_t eps = 0; eps < (1ULL << n); ++eps) {
        if (!(std::popcount(eps) & 1)) continue;
        int e = 0;
        for (std::uint64_t m = eps; m; m &= m - 1) e ^= parity(pair_mask[std::countr_zero(m)] & eps);
        total += e ? -1 : 1;
    }
    return total;
}

std::vector<std::uint64_t> psi_functionals(const PsiProfile& prof)
{
    check_k(prof.k);
    if (prof.b.size() != prof.exponents.size()) throw std::invalid_argument("profile: exponent count mismatch");
    int used = 0;
    for (int e : prof.exponents) {
        if (e < 1) throw std::invalid_argument("profile: exponents must be positive");
        used += e;
    }
    if (used > prof.k) throw std::invalid_argument("profile: exponents exceed k");
    if (Subspace(prof.t, prof.b).dim() != prof.t) throw std::invalid_argument("profile: B does not span F2^t");

    // Blocks [0, k - used) are unassigned; then one segment per character of B.
    std::vector<std::uint64_t> segment(prof.b.size(), 0);
    int block = prof.k - used;
    for (std::size_t c = 0; c < prof.b.size(); ++c)
        for (int i = 0; i < prof.exponents[c]; ++i, ++block) segment[c] |= 1ULL << (2 * block);

    std::vector<std::uint64_t> psi(prof.t, 0);
    for (int i = 0; i < prof.t; ++i)
        for (std::size_t c = 0; c < prof.b.size(); ++c)
            if ((prof.b[c] >> i) & 1) psi[i] ^= segment[c];
    return psi;
}

bool is_stable(const std::vector<std::uint64_t>& u, const std::vector<std::uint64_t>& psi)
{
    for (std::uint64_t f : psi)
        for (std::uint64_t x : u)
            if (parity(f & x) != parity(f & u.front())) return false;
    return true;
}

std::vector<PsiProfile> all_profiles(int k)
{
    check_k(k);
    std::vector<PsiProfile> out;
    for (int t = 0; t <= k; ++t) {
        std::vector<std::uint64_t> others;
        for (std::uint64_t v = 1; v < (1ULL << t); ++v)
            if (std::popcount(v) > 1) others.push_back(v);
        for (std::uint64_t pick = 0; pick < (1ULL << others.size()); ++pick) {
            std::vector<std::uint64_t> b;
            for (int i = 0; i < t; ++i) b.push_back(1ULL << i);
            for (std::size_t i = 0; i < others.size(); ++i)
                if ((pick >> i) & 1) b.push_back(others[i]);
            if (static_cast<int>(b.size()) > k) continue;
            std::vector<int> e(b.size(), 1);
            auto rec = [&](auto&& self, std::size_t idx, int budget) -> void {
                if (idx == b.size()) {
                    out.push_back({k, t, b, e});
                    return;
                }
                for (int x = 1; x <= budget - static_cast<int>(b.size() - idx - 1); ++x) {
                    e[idx] = x;
                    self(self, idx + 1, budget - x);
                }
            };
            rec(rec, 0, k);
        }
    }
    return out;
}

bool IdentityReport::ok() const
{
    return lhs == rhs && good_count == n2(k - t) && good_count_b_basis == good_count && gamma_vanishes_off_good &&
           per_good_total_ok && sets_are_cosets;
}

IdentityReport verify_identity(const PsiProfile& prof)
{
    const int k = prof.k;
    std::vector<std::uint64_t> psi = psi_functionals(prof);
    IdentityReport rep;
    rep.k = k;
    rep.t = prof.t;
    const BigInt per_good = BigInt(1) << static_cast<unsigned>((1 << k) + k - 1);
    rep.rhs = per_good * n2(k - prof.t);

    std::map<Subspace, BigInt> totals;
    for (const auto& u : maximal_unlinked_sets(k)) {
        std::vector<std::uint64_t> shifted;
        for (std::uint64_t x : u) shifted.push_back(x ^ u.front());
        Subspace u0(2 * k, shifted);
        if (u0.dim() != k || static_cast<int>(u.size()) != (1 << k)) rep.sets_are_cosets = false;
        std::int64_t g = gamma(u, k);
        if (is_stable(u, psi)) rep.lhs += g;
        if (good_e(u0))
            totals[u0] += g;
        else if (g != 0)
            rep.gamma_vanishes_off_good = false;
    }

    for (const Subspace& u0 : enumerate_subspaces(2 * k)) {
        if (u0.dim() != k) continue;
        bool ge = good_e(u0);
        if (ge) {
            auto it = totals.find(u0);
            if (it == totals.end() || it->second != per_good) rep.per_good_total_ok = false;
        }
        std::vector<std::uint64_t> beta;
        for (std::uint64_t x : u0.basis()) beta.push_back(to_b_basis(x));
        bool gb = true;
        for (std::uint64_t x : beta)
            for (std::uint64_t y : beta)
                if (form_b(x, y)) gb = false;
        if (!psi_vanish(u0, psi)) continue;
        if (ge) rep.good_count += 1;
        if (gb) rep.good_count_b_basis += 1;
    }
    return rep;
}

}  // namespace rk4
