#pragma once

#include <cstdint>
#include <iterator>
#include <optional>
#include <vector>

namespace rk4 {

using u64 = std::uint64_t;
using i64 = std::int64_t;

// An odd squarefree integer together with its prime factors in ascending order.
// The value 1 has no primes.
struct FactoredOdd {
    u64 value = 1;
    std::vector<u64> primes;

    int omega() const { return static_cast<int>(primes.size()); }
    bool operator==(const FactoredOdd&) const = default;
};

u64 gcd_u64(u64 a, u64 b);
u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 base, u64 exp, u64 m);

// Jacobi symbol (a/n) for odd n >= 1, computed with binary reciprocity.
int jacobi(i64 a, u64 n);

// True iff a is a square modulo the odd squarefree n. Requires gcd(a, n) = 1.
bool is_square_mod(i64 a, const FactoredOdd& n);

// Trial-division factorization of an odd squarefree n; throws if n is even or not squarefree.
FactoredOdd factor_odd_squarefree(u64 n);

// Distinct prime divisors of n >= 1, ascending.
std::vector<u64> prime_divisors(u64 n);

bool is_prime(u64 n);
u64 primitive_root(u64 p);

class SpfTable {
public:
    explicit SpfTable(u64 limit);

    u64 limit() const { return limit_; }
    u64 spf(u64 n) const { return spf_[n]; }

    // Factorization of n when n is odd and squarefree, nullopt otherwise.
    std::optional<FactoredOdd> factor_if_odd_squarefree(u64 n) const;

private:
    u64 limit_;
    std::vector<std::uint32_t> spf_;
};

// Odd squarefree D <= limit with D = a mod q, ascending, each with its factorization.
class SquarefreeRange {
public:
    SquarefreeRange(const SpfTable& table, u64 limit, u64 a, u64 q, u64 start = 1);

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = FactoredOdd;
        using difference_type = std::ptrdiff_t;
        using pointer = const FactoredOdd*;
        using reference = const FactoredOdd&;

        iterator() = default;
        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }
        iterator& operator++();
        void operator++(int) { ++*this; }
        bool operator==(const iterator& o) const { return done_ == o.done_ && (done_ || next_ == o.next_); }

    private:
        friend class SquarefreeRange;
        void advance();

        const SquarefreeRange* range_ = nullptr;
        u64 next_ = 0;
        bool done_ = true;
        FactoredOdd current_;
    };

    iterator begin() const;
    iterator end() const { return iterator{}; }

private:
    const SpfTable* table_;
    u64 limit_;
    u64 step_;
    u64 first_;
};

}  // namespace rk4
