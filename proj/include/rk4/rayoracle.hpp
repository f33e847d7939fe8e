#pragma once

#include "rk4/arith.hpp"
#include "rk4/forms.hpp"
#include "rk4/lattice.hpp"
#include "rk4/measures.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rk4 {

struct AbelianGroupStructure {
    std::vector<std::int64_t> invariant_factors;  // d_1 | d_2 | ..., ones dropped

    BigInt order() const;
    int rank(std::int64_t p) const;  // number of factors divisible by p
    int rank4() const;               // number of factors divisible by 4
};

// Class group of Q(sqrt(-D)) for squarefree D = 3 mod 4, D > 3.
AbelianGroupStructure class_group(std::int64_t D);

// dim S(D) - 1 against the 4-rank of the form class group.
struct Rk4Check {
    int from_special_divisors;
    int from_class_group;
    bool ok() const { return from_special_divisors == from_class_group; }
};
Rk4Check rk4_cross_check(const FactoredOdd& D);

// Splitting type of each prime of c in Q(sqrt(-D)); throws if some l | c ramifies.
RingType detect_ring_type(const FactoredOdd& D, u64 c);

// (O_K / c)^* as a product of cyclic components with discrete logarithms, O_K = Z[w], w = (1 + sqrt(-D)) / 2.
class UnitGroupModC {
public:
    UnitGroupModC(const FactoredOdd& D, u64 c);

    int components() const { return static_cast<int>(orders_.size()); }
    const std::vector<std::int64_t>& orders() const { return orders_; }
    // Product of component orders, i.e. #(O_K/c)^*.
    std::int64_t full_order() const;

    // Coordinates of u + v w; throws if it is not a unit mod c.
    IntVec log(std::int64_t u, std::int64_t v) const;
    IntVec minus_one() const { return log(-1, 0); }
    // Relations presenting (O_K/c)^* / {+-1}.
    std::vector<IntVec> relations() const;
    // Generators of the image of (Z/c)^*.
    std::vector<IntVec> rational_generators() const;

private:
    struct Prime {
        u64 l;
        bool split;
        std::int64_t m;       // w^2 = w - m mod l
        std::int64_t roots[2];  // split: roots of t^2 - t + m
        std::int64_t gen;     // primitive root (split)
        std::vector<std::int32_t> dlog;  // split: size l; inert: size l^2 indexed x + l y
    };
    std::vector<Prime> primes_;
    std::vector<std::int64_t> orders_;
    u64 c_;
};

// 2-rank of W_R = image of (Z/c)^* times squares, inside (O_K/c)^*/{+-1}.
int rk2_wr(const FactoredOdd& D, u64 c);

// The primes q | D span the image of (Z/c)^* in (O_K/c)^* / ({+-1} squares).
bool strongly_type_check(const FactoredOdd& D, u64 c);

struct RayClassGroup {
    AbelianGroupStructure structure;
    std::int64_t class_number = 0;
    std::int64_t unit_quotient_order = 0;  // #(O_K/c)^* / 2, or 1 when c = 1
    int generator_primes = 0;
    int relation_count = 0;
    bool order_certified = false;
};

// Cl(K, c) from harvested principal-ideal relations, certified by its order h * #(O_K/c)^*/2.
RayClassGroup ray_class_group(const FactoredOdd& D, u64 c, std::int64_t budget = 1000000);

// Cl(K, c) modulo the image of (Z/c)^*, i.e. the class group of the order of conductor c.
AbelianGroupStructure ring_class_group(const FactoredOdd& D, u64 c, std::int64_t budget = 1000000);

struct J2Report {
    u64 D = 0;
    u64 c = 0;
    std::string type_flags;  // per prime: "s" split, "i" inert
    std::int64_t h = 0;
    std::string ray_order;
    std::vector<std::int64_t> invariant_factors;
    int j1 = 0;
    int j2 = 0;
    int rank_phi = 0;
    int rk2_wr = 0;
    bool strongly_typed = false;
    int relation_count = 0;
    bool order_certified = false;
    bool relation_holds() const { return j2 == j1 + rk2_wr - rank_phi; }
};

J2Report verify_j2_relation(const FactoredOdd& D, u64 c);

}  // namespace rk4
