#pragma once

#include "rk4/arith.hpp"
#include "rk4/gf2.hpp"
#include "rk4/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace rk4 {

// prod_{i=1}^{s} (1 - M^{-i}) exactly.
Rational eta(int s, unsigned M);

struct EtaInfinity {
    double value;
    double tail_bound;  // |value - true limit| <= tail_bound
};
EtaInfinity eta_infinity(unsigned M);

// A probability of the form coefficient * eta_inf(p).
struct Mass {
    Rational coefficient;
    unsigned p = 2;

    double value() const;
    std::string exact() const;  // "<coefficient>*eta_inf(p)", or "0"
    Mass operator*(const Rational& r) const { return {coefficient * r, p}; }
};

// Cohen-Lenstra probability that an abelian p-group has p-rank j.
Mass mu_cl_rank_mass(unsigned p, int j);

// Surjections F_p^j -> F_p^r.
BigInt count_epi(unsigned p, int j, int r);
// Linear maps F_p^j -> F_p^s of rank r.
BigInt count_hom_rank(unsigned p, int j, int s, int r);

// Exponents k_chi indexed by character coordinates in the dual space.
using KVector = std::map<std::uint64_t, int>;
int k_total(const KVector& k);

// Probability that independent uniform vectors (k_chi copies for each chi) span exactly Y.
Rational prob_generate(const KVector& k, const Subspace& y);

// Predicted E[prod_chi m_chi^{k_chi}] for a dual space of the given dimension.
Rational predicted_mixed_moment(const KVector& k, int ambient);

// Predicted mass of (j = dim S(D)/{1,D}, Im(phi) = Y).
Mass predicted_pair_distribution(int j, const Subspace& y);

// Unramified ring of conductor c: each prime divisor l of c is split or inert.
struct RingPrime {
    u64 l;
    bool split;
};

class RingType {
public:
    RingType() = default;
    explicit RingType(std::vector<RingPrime> primes);

    const std::vector<RingPrime>& primes() const { return primes_; }
    u64 conductor() const;
    // Inert l = 3 mod 4 and split l = 1 mod 4.
    u64 n1() const;
    // Split l = 3 mod 4.
    u64 n2() const;
    int target_dimension() const;
    // 2-rank of (Z/c)^* (R^*/{+-1})^2 inside R^*/{+-1}, from the per-prime structure.
    int w_rank2() const;

private:
    std::vector<RingPrime> primes_;
};

// Predicted mass of (rk4 Cl(K) = j1, rk4 Cl(K, c) = j2).
Mass predicted_joint_4rank(int j1, int j2, const RingType& ring);

enum class AverageMode { Unramified, AllDiscriminants };
AverageMode parse_average_mode(const std::string& s);

// Predicted average of #Cl(K, c)[p] over imaginary quadratic K.
Rational avg_p_torsion_ray(unsigned p, u64 c, AverageMode mode);

// Local data of a ring at an odd prime p: F_p-dimensions of the +/- parts of R^*/R^*p.
struct RingLocalData {
    unsigned p;
    int plus_dim = 0;
    int minus_dim = 0;

    static RingLocalData from_ring(unsigned p, const RingType& ring);
};

// Order of Aut(G) for G = sum Z/p^{lambda_i}.
BigInt automorphism_count(unsigned p, std::vector<int> partition);

struct PropJustResult {
    double lhs;         // truncated sum over groups
    double rhs;         // closed form
    double tail_bound;  // bound on the omitted part of the sum
    double gap;         // |lhs - rhs|
};

// Cohen-Lenstra average of the p-torsion of Cl(R), summed over groups of p-rank <= max_rank
// through Hom(G[p], minus part), against the closed form #plus * (1 + #minus).
PropJustResult verify_prop_just(const RingLocalData& r, int max_rank);

}  // namespace rk4
