#pragma once

#include "rk4/rational.hpp"

#include <compare>
#include <cstdint>
#include <vector>

namespace rk4 {

// Dense matrix over F2 with at most 64 columns; bit j of rows[i] is entry (i, j).
class BitMatrix {
public:
    BitMatrix(int nrows, int ncols);

    int rows() const { return static_cast<int>(rows_.size()); }
    int cols() const { return ncols_; }
    bool get(int i, int j) const { return (rows_[i] >> j) & 1; }
    void set(int i, int j, bool v);
    std::uint64_t row(int i) const { return rows_[i]; }

    BitMatrix transpose() const;
    int rank() const;
    // Basis of {x : M x = 0}, x given as a column bitmask.
    std::vector<std::uint64_t> kernel() const;

private:
    int ncols_;
    std::vector<std::uint64_t> rows_;
};

// A subspace of F2^ambient stored as its reduced row echelon basis, so equal
// subspaces compare equal and can be used as map keys.
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(int ambient);
    Subspace(int ambient, const std::vector<std::uint64_t>& generators);

    static Subspace full(int ambient);

    int ambient() const { return ambient_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<std::uint64_t>& basis() const { return basis_; }

    bool contains(std::uint64_t v) const;
    bool is_subspace_of(const Subspace& other) const;
    std::vector<std::uint64_t> elements() const;
    // Annihilator under the standard dot product.
    Subspace orthogonal() const;

    auto operator<=>(const Subspace&) const = default;

private:
    std::uint64_t reduce(std::uint64_t v) const;
    void insert(std::uint64_t v);

    int ambient_ = 0;
    std::vector<std::uint64_t> basis_;  // descending leading bits, pivots cleared elsewhere
};

inline int dot(std::uint64_t a, std::uint64_t b)
{
    return __builtin_popcountll(a & b) & 1;
}

// All subspaces of F2^s, s <= 6.
std::vector<Subspace> enumerate_subspaces(int s);

// Gaussian binomial [n choose k]_base.
BigInt gaussian_binomial(int n, int k, unsigned base);

// Number of subspaces of F2^j; 1 for j <= 0.
BigInt n2(int j);

// Moebius function of the subspace lattice for V <= W.
BigInt moebius(const Subspace& v, const Subspace& w);

}  // namespace rk4
