#include "rk4/arith.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace rk4 {

u64 gcd_u64(u64 a, u64 b)
{
    while (b != 0) {
        u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

u64 mulmod(u64 a, u64 b, u64 m)
{
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

u64 powmod(u64 base, u64 exp, u64 m)
{
    u64 result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

int jacobi(i64 a, u64 n)
{
    if (n == 0 || (n & 1) == 0) throw std::invalid_argument("jacobi: modulus must be odd and positive, got " + std::to_string(n));
    i64 r = a % static_cast<i64>(n);
    if (r < 0) r += static_cast<i64>(n);
    u64 x = static_cast<u64>(r);
    int sign = 1;
    while (x != 0) {
        int tz = std::countr_zero(x);
        x >>= tz;
        if ((tz & 1) && ((n & 7) == 3 || (n & 7) == 5)) sign = -sign;
        if ((x & 3) == 3 && (n & 3) == 3) sign = -sign;
        u64 t = n % x;
        n = x;
        x = t;
    }
    return n == 1 ? sign : 0;
}

bool is_square_mod(i64 a, const FactoredOdd& n)
{
    for (u64 p : n.primes) {
        int j = jacobi(a, p);
        if (j == 0) throw std::invalid_argument("is_square_mod: gcd(" + std::to_string(a) + ", " + std::to_string(n.value) + ") != 1");
        if (j != 1) return false;
    }
    return true;
}

std::vector<u64> prime_divisors(u64 n)
{
    std::vector<u64> out;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

FactoredOdd factor_odd_squarefree(u64 n)
{
    if (n == 0 || (n & 1) == 0) throw std::invalid_argument("expected an odd positive integer, got " + std::to_string(n));
    FactoredOdd f;
    f.value = n;
    for (u64 p = 3; p * p <= n; p += 2) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) throw std::invalid_argument("not squarefree: " + std::to_string(f.value));
            f.primes.push_back(p);
        }
    }
    if (n > 1) f.primes.push_back(n);
    return f;
}

bool is_prime(u64 n)
{
    if (n < 2) return false;
    for (u64 p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

u64 primitive_root(u64 p)
{
    if (p == 2) return 1;
    std::vector<u64> qs = prime_divisors(p - 1);
    for (u64 g = 2; g < p; ++g) {
        bool ok = true;
        for (u64 q : qs) {
            if (powmod(g, (p - 1) / q, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw std::invalid_argument("no primitive root modulo " + std::to_string(p));
}

SpfTable::SpfTable(u64 limit) : limit_(limit), spf_(limit + 1, 0)
{
    if (limit > 0xffffffffULL) throw std::invalid_argument("SpfTable: limit too large");
    for (u64 i = 2; i <= limit; ++i) {
        if (spf_[i] != 0) continue;
        spf_[i] = static_cast<std::uint32_t>(i);
        if (i * i > limit) continue;
        for (u64 j = i * i; j <= limit; j += i)
            if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
    }
}

std::optional<FactoredOdd> SpfTable::factor_if_odd_squarefree(u64 n) const
{
    if (n == 0 || n > limit_) throw std::out_of_range("SpfTable: " + std::to_string(n) + " outside table");
    if ((n & 1) == 0) return std::nullopt;
    FactoredOdd f;
    f.value = n;
    while (n > 1) {
        u64 p = spf_[n];
        n /= p;
        if (n % p == 0) return std::nullopt;
        f.primes.push_back(p);
    }
    return f;
}

SquarefreeRange::SquarefreeRange(const SpfTable& table, u64 limit, u64 a, u64 q, u64 start)
    : table_(&table), limit_(limit)
{
    if (q == 0) throw std::invalid_argument("modulus q must be positive");
    if (limit > table.limit())
        throw std::out_of_range("limit " + std::to_string(limit) + " exceeds SPF table capacity " + std::to_string(table.limit()));
    a %= q;
    if (q % 2 == 0) {
        step_ = q;
        if (a % 2 == 0) {
            first_ = 0;
            return;
        }
    } else {
        step_ = 2 * q;
        if (a % 2 == 0) a += q;
    }
    if (a == 0) a = step_;
    if (start <= a) {
        first_ = a;
    } else {
        first_ = a + ((start - a + step_ - 1) / step_) * step_;
    }
}

SquarefreeRange::iterator SquarefreeRange::begin() const
{
    iterator it;
    if (first_ == 0 || first_ > limit_) return it;
    it.range_ = this;
    it.next_ = first_;
    it.done_ = false;
    it.advance();
    return it;
}

void SquarefreeRange::iterator::advance()
{
    while (next_ <= range_->limit_) {
        u64 d = next_;
        next_ += range_->step_;
        if (auto f = range_->table_->factor_if_odd_squarefree(d)) {
            current_ = std::move(*f);
            return;
        }
    }
    done_ = true;
}

SquarefreeRange::iterator& SquarefreeRange::iterator::operator++()
{
    advance();
    return *this;
}

}  // namespace rk4
