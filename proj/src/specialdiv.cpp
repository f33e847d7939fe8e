#include "rk4/specialdiv.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace rk4 {

u64 divisor_value(const FactoredOdd& D, std::uint64_t mask)
{
    u64 v = 1;
    for (int i = 0; i < D.omega(); ++i)
        if ((mask >> i) & 1) v *= D.primes[i];
    return v;
}

FactoredOdd divisor_factored(const FactoredOdd& D, std::uint64_t mask)
{
    FactoredOdd f;
    for (int i = 0; i < D.omega(); ++i) {
        if ((mask >> i) & 1) {
            f.value *= D.primes[i];
            f.primes.push_back(D.primes[i]);
        }
    }
    return f;
}

bool is_special(const FactoredOdd& D, std::uint64_t mask)
{
    i64 d = static_cast<i64>(divisor_value(D, mask));
    i64 e = static_cast<i64>(D.value) / d;
    for (int i = 0; i < D.omega(); ++i) {
        u64 p = D.primes[i];
        int j = ((mask >> i) & 1) ? jacobi(e, p) : jacobi(d, p);
        if (j != 1) return false;
    }
    return true;
}

std::vector<std::uint64_t> special_divisors_brute(const FactoredOdd& D)
{
    if (D.omega() > 30) throw std::invalid_argument("special_divisors_brute: too many prime factors");
    std::vector<std::uint64_t> out;
    for (std::uint64_t mask = 0; mask < (1ULL << D.omega()); ++mask)
        if (is_special(D, mask)) out.push_back(mask);
    return out;
}

Subspace special_divisors(const FactoredOdd& D)
{
    int w = D.omega();
    // bt(j, i) = B(i, j) where B(i, j) = [(p_i/p_j) = -1] off the diagonal and B(j, j) is the column sum.
    BitMatrix bt(w, w);
    for (int j = 0; j < w; ++j) {
        bool diag = false;
        for (int i = 0; i < w; ++i) {
            if (i == j) continue;
            bool b = jacobi(static_cast<i64>(D.primes[i]), D.primes[j]) == -1;
            bt.set(j, i, b);
            diag ^= b;
        }
        bt.set(j, j, diag);
    }
    return Subspace(w, bt.kernel());
}

int rank4(const FactoredOdd& D)
{
    return special_divisors(D).dim() - 1;
}

TargetGroup::TargetGroup(u64 n1, u64 n2)
{
    if (n1 == 0 || n2 == 0 || n1 % 2 == 0 || n2 % 2 == 0)
        throw std::invalid_argument("target moduli n1, n2 must be odd and positive");
    if (gcd_u64(n1, n2) != 1) throw std::invalid_argument("target moduli n1, n2 must be coprime");
    n1_ = factor_odd_squarefree(n1);
    n2_ = factor_odd_squarefree(n2);
    dim_ = n1_.omega() + std::max(n2_.omega() - 1, 0);
    if (dim_ > 20) throw std::invalid_argument("target group too large");
}

std::vector<Character> TargetGroup::characters() const
{
    std::vector<Character> out;
    for (std::uint64_t c = 0; c < (1ULL << dim_); ++c) out.push_back({c});
    return out;
}

std::vector<u64> TargetGroup::support(Character chi) const
{
    std::vector<u64> out;
    int w1 = n1_.omega();
    for (int i = 0; i < w1; ++i)
        if ((chi.coords >> i) & 1) out.push_back(n1_.primes[i]);
    int parity = 0;
    for (int i = 1; i < n2_.omega(); ++i) {
        if ((chi.coords >> (w1 + i - 1)) & 1) {
            out.push_back(n2_.primes[i]);
            parity ^= 1;
        }
    }
    if (parity) out.push_back(n2_.primes[0]);
    std::sort(out.begin(), out.end());
    return out;
}

std::string TargetGroup::name(Character chi) const
{
    std::vector<u64> s = support(chi);
    if (s.empty()) return "1";
    std::ostringstream os;
    os << "chi";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "*" : "") << s[i];
    return os.str();
}

Character TargetGroup::parse(const std::string& name) const
{
    if (name == "1" || name == "chi1" || name == "trivial") return trivial();
    if (name.rfind("chi", 0) != 0) throw std::invalid_argument("character name must start with 'chi': " + name);
    std::vector<u64> primes;
    std::stringstream ss(name.substr(3));
    std::string tok;
    while (std::getline(ss, tok, '*')) {
        if (tok.empty()) throw std::invalid_argument("malformed character name: " + name);
        primes.push_back(std::stoull(tok));
    }
    int w1 = n1_.omega();
    Character chi;
    int n2_count = 0;
    for (u64 p : primes) {
        auto i1 = std::find(n1_.primes.begin(), n1_.primes.end(), p);
        auto i2 = std::find(n2_.primes.begin(), n2_.primes.end(), p);
        if (i1 != n1_.primes.end()) {
            chi.coords ^= 1ULL << (i1 - n1_.primes.begin());
        } else if (i2 != n2_.primes.end()) {
            ++n2_count;
            int idx = static_cast<int>(i2 - n2_.primes.begin());
            if (idx > 0) chi.coords ^= 1ULL << (w1 + idx - 1);
        } else {
            throw std::invalid_argument("character " + name + ": prime " + std::to_string(p) + " divides neither n1 nor n2");
        }
    }
    if (n2_count % 2) throw std::invalid_argument("character " + name + ": n2 part must have an even number of primes");
    return chi;
}

int TargetGroup::value(Character chi, i64 d) const
{
    int v = 1;
    for (u64 p : support(chi)) {
        int j = jacobi(d, p);
        if (j == 0) throw std::invalid_argument("character value at an integer sharing a factor with the modulus");
        v *= j;
    }
    return v;
}

void TargetGroup::check_admissible(const FactoredOdd& D) const
{
    if (gcd_u64(D.value, n1_.value * n2_.value) != 1)
        throw std::invalid_argument("gcd(D, n1*n2) != 1 for D = " + std::to_string(D.value));
    for (u64 p : n1_.primes)
        if (jacobi(static_cast<i64>(D.value), p) != 1)
            throw std::invalid_argument("D = " + std::to_string(D.value) + " is not a square mod n1 (fails at " + std::to_string(p) + ")");
    for (u64 q : n2_.primes)
        if (jacobi(static_cast<i64>(D.value), q) != -1)
            throw std::invalid_argument("D = " + std::to_string(D.value) + " is a square mod " + std::to_string(q) + ", which divides n2");
}

bool TargetGroup::is_admissible(const FactoredOdd& D) const
{
    if (gcd_u64(D.value, n1_.value * n2_.value) != 1) return false;
    for (u64 p : n1_.primes)
        if (jacobi(static_cast<i64>(D.value), p) != 1) return false;
    for (u64 q : n2_.primes)
        if (jacobi(static_cast<i64>(D.value), q) != -1) return false;
    return true;
}

std::uint64_t TargetGroup::phi(i64 d) const
{
    std::uint64_t out = 0;
    int w1 = n1_.omega();
    for (int i = 0; i < w1; ++i)
        if (jacobi(d, n1_.primes[i]) == -1) out |= 1ULL << i;
    if (n2_.omega() > 0) {
        bool first = jacobi(d, n2_.primes[0]) == -1;
        for (int i = 1; i < n2_.omega(); ++i) {
            bool s = jacobi(d, n2_.primes[i]) == -1;
            if (s != first) out |= 1ULL << (w1 + i - 1);
        }
    }
    return out;
}

Subspace image_of_phi(const FactoredOdd& D, const TargetGroup& tg)
{
    tg.check_admissible(D);
    const Subspace s = special_divisors(D);
    std::vector<std::uint64_t> gens;
    for (std::uint64_t b : s.basis())
        gens.push_back(tg.phi(static_cast<i64>(divisor_value(D, b))));
    return Subspace(tg.dimension(), gens);
}

int m_chi(const FactoredOdd& D, const Subspace& s, const TargetGroup& tg, Character chi)
{
    int count = 0;
    for (std::uint64_t mask : s.elements())
        if (dot(chi.coords, tg.phi(static_cast<i64>(divisor_value(D, mask)))) == 0) ++count;
    return count;
}

int m_chi(const FactoredOdd& D, const TargetGroup& tg, Character chi)
{
    tg.check_admissible(D);
    return m_chi(D, special_divisors(D), tg, chi);
}

i64 a_chi(const FactoredOdd& D, const TargetGroup& tg, Character chi)
{
    tg.check_admissible(D);
    int w = D.omega();
    std::uint64_t all = (1ULL << w) - 1;
    i64 total = 0;
    for (std::uint64_t am = 0; am <= all; ++am) {
        std::uint64_t bm = all & ~am;
        i64 a = static_cast<i64>(divisor_value(D, am));
        i64 b = static_cast<i64>(divisor_value(D, bm));
        i64 s1 = 0;
        for (std::uint64_t c = bm;; c = (c - 1) & bm) {
            s1 += jacobi(a, divisor_value(D, c));
            if (c == 0) break;
        }
        i64 s2 = 0;
        for (std::uint64_t d = am;; d = (d - 1) & am) {
            s2 += jacobi(b, divisor_value(D, d));
            if (d == 0) break;
        }
        total += tg.value(chi, a) * s1 * s2;
    }
    return total;
}

}  // namespace rk4
