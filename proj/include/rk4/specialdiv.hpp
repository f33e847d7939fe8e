#pragma once

#include "rk4/arith.hpp"
#include "rk4/gf2.hpp"

#include <string>
#include <vector>

namespace rk4 {

// Divisors of D are encoded as bitmasks over D.primes (bit i set iff primes[i] divides d).
u64 divisor_value(const FactoredOdd& D, std::uint64_t mask);
FactoredOdd divisor_factored(const FactoredOdd& D, std::uint64_t mask);

// d | D is special iff d is a square mod D/d and D/d is a square mod d.
bool is_special(const FactoredOdd& D, std::uint64_t mask);

// Masks of all special divisors, found by testing every divisor.
std::vector<std::uint64_t> special_divisors_brute(const FactoredOdd& D);

// The special divisors as a subspace of F2^omega(D), via the kernel of the transposed
// Legendre-symbol matrix.
Subspace special_divisors(const FactoredOdd& D);

// 4-rank of the class group of discriminant -D: dim S(D) - 1.
int rank4(const FactoredOdd& D);

// A character of the target group, given by coordinates in F2^dimension().
struct Character {
    std::uint64_t coords = 0;
    auto operator<=>(const Character&) const = default;
};

// The group G_{n1} x G~_{n2} of Legendre-sign vectors, with n2 signs taken up to a global flip.
// Elements and characters are both coordinatized in F2^dimension(); the pairing is the dot product.
class TargetGroup {
public:
    TargetGroup(u64 n1, u64 n2);

    const FactoredOdd& n1() const { return n1_; }
    const FactoredOdd& n2() const { return n2_; }
    int dimension() const { return dim_; }

    std::vector<Character> characters() const;
    Character trivial() const { return {}; }
    std::string name(Character chi) const;
    Character parse(const std::string& name) const;

    // Primes in the support of chi (n1 part and n2 part).
    std::vector<u64> support(Character chi) const;
    // chi(d) in {+1, -1} for d coprime to n1 n2.
    int value(Character chi, i64 d) const;

    // Throws std::invalid_argument naming the failed condition.
    void check_admissible(const FactoredOdd& D) const;
    bool is_admissible(const FactoredOdd& D) const;

    // Sign vector of d in target coordinates.
    std::uint64_t phi(i64 d) const;

private:
    FactoredOdd n1_, n2_;
    int dim_;
};

Subspace image_of_phi(const FactoredOdd& D, const TargetGroup& tg);

// #{d in S(D) : chi(d) = 1}.
int m_chi(const FactoredOdd& D, const TargetGroup& tg, Character chi);
// Same count from an already computed S(D).
int m_chi(const FactoredOdd& D, const Subspace& s, const TargetGroup& tg, Character chi);

// The character sum A_chi(D) over factorizations D = a'b'.
i64 a_chi(const FactoredOdd& D, const TargetGroup& tg, Character chi);

}  // namespace rk4
