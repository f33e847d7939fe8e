#pragma once

#include "rk4/rational.hpp"

#include <cstdint>
#include <vector>

namespace rk4 {

using IntVec = std::vector<std::int64_t>;

// A lattice L with M Z^n <= L <= Z^n, stored as an upper triangular basis whose entries are
// reduced mod M. Row i has pivot d_i | M in column i (d_i = M when no relation reaches it), and
// (M / d_i) * row_i lies in the span of the later rows, so the rows together with M Z^n span L
// and [Z^n : L] = prod d_i.
class ModularLattice {
public:
    ModularLattice(int n, std::int64_t modulus);

    int dimension() const { return n_; }
    std::int64_t modulus() const { return m_; }

    void add(const IntVec& v);

    BigInt index() const;
    std::int64_t pivot(int i) const { return rows_[i][i] == 0 ? m_ : rows_[i][i]; }
    // Row i with the pivot written as d_i (so rows span L exactly).
    IntVec row(int i) const;

    // Invariant factors d_1 | d_2 | ... of Z^n / L, entries equal to 1 dropped.
    std::vector<std::int64_t> invariant_factors() const;

private:
    void insert(IntVec v, std::vector<IntVec>& queue);

    int n_;
    std::int64_t m_;
    std::vector<IntVec> rows_;
};

// Invariant factors of Z^n / (row span of the given integer rows + M Z^n).
std::vector<std::int64_t> smith_invariants_mod(const std::vector<IntVec>& rows, int n, std::int64_t modulus);

// Invariant factors of the subgroup of Z^s / L generated by the given elements, where L is
// spanned by `relations` and contains M Z^s.
std::vector<std::int64_t> subgroup_invariants(const std::vector<IntVec>& relations, const std::vector<IntVec>& generators,
                                              int s, std::int64_t modulus);

}  // namespace rk4
