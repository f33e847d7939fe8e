#include "rk4/gf2.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>
#include <string>

namespace rk4 {

namespace {

std::uint64_t mask_of(int n)
{
    return n >= 64 ? ~0ULL : ((1ULL << n) - 1);
}

int top_bit(std::uint64_t v)
{
    return 63 - std::countl_zero(v);
}

}  // namespace

BitMatrix::BitMatrix(int nrows, int ncols) : ncols_(ncols), rows_(nrows, 0)
{
    if (ncols < 0 || ncols > 64 || nrows < 0) throw std::invalid_argument("BitMatrix: unsupported shape");
}

void BitMatrix::set(int i, int j, bool v)
{
    if (v)
        rows_[i] |= 1ULL << j;
    else
        rows_[i] &= ~(1ULL << j);
}

BitMatrix BitMatrix::transpose() const
{
    if (rows() > 64) throw std::invalid_argument("BitMatrix::transpose: too many rows");
    BitMatrix t(ncols_, rows());
    for (int i = 0; i < rows(); ++i)
        for (int j = 0; j < ncols_; ++j)
            if (get(i, j)) t.set(j, i, true);
    return t;
}

int BitMatrix::rank() const
{
    return Subspace(ncols_, rows_).dim();
}

std::vector<std::uint64_t> BitMatrix::kernel() const
{
    // Gauss-Jordan on rows, then read off one kernel vector per free column.
    std::vector<std::uint64_t> r = rows_;
    std::vector<int> pivot_col;
    std::size_t nr = 0;
    for (int c = 0; c < ncols_ && nr < r.size(); ++c) {
        std::size_t p = nr;
        while (p < r.size() && !((r[p] >> c) & 1)) ++p;
        if (p == r.size()) continue;
        std::swap(r[p], r[nr]);
        for (std::size_t i = 0; i < r.size(); ++i)
            if (i != nr && ((r[i] >> c) & 1)) r[i] ^= r[nr];
        pivot_col.push_back(c);
        ++nr;
    }
    std::uint64_t pivots = 0;
    for (int c : pivot_col) pivots |= 1ULL << c;
    std::vector<std::uint64_t> out;
    for (int f = 0; f < ncols_; ++f) {
        if ((pivots >> f) & 1) continue;
        std::uint64_t v = 1ULL << f;
        for (std::size_t i = 0; i < pivot_col.size(); ++i)
            if ((r[i] >> f) & 1) v |= 1ULL << pivot_col[i];
        out.push_back(v);
    }
    return out;
}

Subspace::Subspace(int ambient) : ambient_(ambient)
{
    if (ambient < 0 || ambient > 64) throw std::invalid_argument("Subspace: ambient dimension out of range");
}

Subspace::Subspace(int ambient, const std::vector<std::uint64_t>& generators) : Subspace(ambient)
{
    for (std::uint64_t g : generators) {
        if (g & ~mask_of(ambient)) throw std::invalid_argument("Subspace: generator outside ambient space");
        insert(g);
    }
}

Subspace Subspace::full(int ambient)
{
    std::vector<std::uint64_t> gens;
    for (int i = 0; i < ambient; ++i) gens.push_back(1ULL << i);
    return Subspace(ambient, gens);
}

std::uint64_t Subspace::reduce(std::uint64_t v) const
{
    for (std::uint64_t b : basis_)
        if ((v >> top_bit(b)) & 1) v ^= b;
    return v;
}

void Subspace::insert(std::uint64_t v)
{
    v = reduce(v);
    if (v == 0) return;
    int t = top_bit(v);
    for (std::uint64_t& b : basis_)
        if ((b >> t) & 1) b ^= v;
    basis_.push_back(v);
    std::sort(basis_.begin(), basis_.end(), std::greater<>());
}

bool Subspace::contains(std::uint64_t v) const
{
    return reduce(v) == 0;
}

bool Subspace::is_subspace_of(const Subspace& other) const
{
    return std::all_of(basis_.begin(), basis_.end(), [&](std::uint64_t b) { return other.contains(b); });
}

std::vector<std::uint64_t> Subspace::elements() const
{
    std::vector<std::uint64_t> out{0};
    for (std::uint64_t b : basis_) {
        std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] ^ b);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Subspace Subspace::orthogonal() const
{
    BitMatrix m(dim(), ambient_);
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < ambient_; ++j)
            if ((basis_[i] >> j) & 1) m.set(i, j, true);
    return Subspace(ambient_, m.kernel());
}

std::vector<Subspace> enumerate_subspaces(int s)
{
    if (s < 0 || s > 6) throw std::invalid_argument("enumerate_subspaces: dimension " + std::to_string(s) + " outside [0, 6]");
    std::set<Subspace> seen{Subspace(s)};
    std::vector<Subspace> frontier{Subspace(s)};
    while (!frontier.empty()) {
        std::vector<Subspace> next;
        for (const Subspace& v : frontier) {
            for (std::uint64_t x = 1; x < (1ULL << s); ++x) {
                if (v.contains(x)) continue;
                std::vector<std::uint64_t> gens = v.basis();
                gens.push_back(x);
                Subspace w(s, gens);
                if (seen.insert(w).second) next.push_back(w);
            }
        }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

BigInt gaussian_binomial(int n, int k, unsigned base)
{
    if (k < 0 || n < 0 || k > n) return 0;
    BigInt num = 1, den = 1, q = base;
    for (int i = 0; i < k; ++i) {
        num *= pow_big(q, static_cast<unsigned>(n - i)) - 1;
        den *= pow_big(q, static_cast<unsigned>(i + 1)) - 1;
    }
    return num / den;
}

BigInt n2(int j)
{
    if (j <= 0) return 1;
    BigInt total = 0;
    for (int k = 0; k <= j; ++k) total += gaussian_binomial(j, k, 2);
    return total;
}

BigInt moebius(const Subspace& v, const Subspace& w)
{
    if (!v.is_subspace_of(w)) throw std::invalid_argument("moebius: V is not contained in W");
    int d = w.dim() - v.dim();
    BigInt m = BigInt(1) << static_cast<unsigned>(d * (d - 1) / 2);
    return (d % 2) ? BigInt(-m) : m;
}

}  // namespace rk4
