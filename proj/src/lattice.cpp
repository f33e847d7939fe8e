#include "rk4/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rk4 {

namespace {

using i128 = __int128;

std::int64_t mod(i128 x, std::int64_t m)
{
    i128 r = x % m;
    if (r < 0) r += m;
    return static_cast<std::int64_t>(r);
}

// Returns g = gcd(a, b) >= 0 with s a + t b = g.
std::int64_t xgcd(std::int64_t a, std::int64_t b, std::int64_t& s, std::int64_t& t)
{
    std::int64_t s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (b != 0) {
        std::int64_t q = a / b;
        std::tie(a, b) = std::make_pair(b, a - q * b);
        std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
        std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    if (a < 0) {
        a = -a;
        s0 = -s0;
        t0 = -t0;
    }
    s = s0;
    t = t0;
    return a;
}

}  // namespace

ModularLattice::ModularLattice(int n, std::int64_t modulus) : n_(n), m_(modulus), rows_(n, IntVec(n, 0))
{
    if (n < 0) throw std::invalid_argument("ModularLattice: negative dimension");
    if (modulus < 1) throw std::invalid_argument("ModularLattice: modulus must be positive");
}

void ModularLattice::add(const IntVec& v)
{
    if (static_cast<int>(v.size()) != n_) throw std::invalid_argument("ModularLattice::add: wrong vector length");
    std::vector<IntVec> queue{v};
    while (!queue.empty()) {
        IntVec w = std::move(queue.back());
        queue.pop_back();
        insert(std::move(w), queue);
    }
}

void ModularLattice::insert(IntVec v, std::vector<IntVec>& queue)
{
    for (auto& x : v) x = mod(x, m_);
    for (int i = 0; i < n_; ++i) {
        std::int64_t x = v[i];
        if (x == 0) continue;
        IntVec& r = rows_[i];
        std::int64_t d = r[i] == 0 ? m_ : r[i];
        if (x % d == 0) {
            std::int64_t q = x / d;
            for (int j = i; j < n_; ++j) v[j] = mod(static_cast<i128>(v[j]) - static_cast<i128>(q) * r[j], m_);
            continue;
        }
        std::int64_t s, t;
        std::int64_t g = xgcd(d, x, s, t);
        IntVec nr(n_, 0), nv(n_, 0);
        for (int j = i; j < n_; ++j) {
            nr[j] = mod(static_cast<i128>(s) * r[j] + static_cast<i128>(t) * v[j], m_);
            nv[j] = mod(static_cast<i128>(d / g) * v[j] - static_cast<i128>(x / g) * r[j], m_);
        }
        nr[i] = g;
        r = nr;
        IntVec extra(n_, 0);
        bool nonzero = false;
        for (int j = i + 1; j < n_; ++j) {
            extra[j] = mod(static_cast<i128>(m_ / g) * nr[j], m_);
            nonzero |= extra[j] != 0;
        }
        if (nonzero) queue.push_back(std::move(extra));
        v = std::move(nv);
    }
}

BigInt ModularLattice::index() const
{
    BigInt p = 1;
    for (int i = 0; i < n_; ++i) p *= pivot(i);
    return p;
}

IntVec ModularLattice::row(int i) const
{
    IntVec r = rows_[i];
    r[i] = pivot(i);
    return r;
}

std::vector<std::int64_t> ModularLattice::invariant_factors() const
{
    std::vector<IntVec> rows;
    for (int i = 0; i < n_; ++i) rows.push_back(row(i));
    return smith_invariants_mod(rows, n_, m_);
}

std::vector<std::int64_t> smith_invariants_mod(const std::vector<IntVec>& input, int n, std::int64_t m)
{
    std::vector<IntVec> a;
    for (const IntVec& r : input) {
        if (static_cast<int>(r.size()) != n) throw std::invalid_argument("smith_invariants_mod: wrong row length");
        IntVec x(n);
        for (int j = 0; j < n; ++j) x[j] = mod(r[j], m);
        a.push_back(std::move(x));
    }
    const int nr = static_cast<int>(a.size());
    std::vector<std::int64_t> diag;
    for (int t = 0; t < n; ++t) {
        if (t >= nr) {
            diag.push_back(m);
            continue;
        }
        while (true) {
            int pi = -1, pj = -1;
            for (int i = t; i < nr; ++i)
                for (int j = t; j < n; ++j)
                    if (a[i][j] != 0 && (pi < 0 || a[i][j] < a[pi][pj])) {
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) break;
            std::swap(a[t], a[pi]);
            for (int i = 0; i < nr; ++i) std::swap(a[i][t], a[i][pj]);
            const std::int64_t p = a[t][t];
            bool dirty = false;
            for (int i = t + 1; i < nr; ++i) {
                if (a[i][t] == 0) continue;
                std::int64_t q = a[i][t] / p;
                for (int j = t; j < n; ++j) a[i][j] = mod(static_cast<i128>(a[i][j]) - static_cast<i128>(q) * a[t][j], m);
                dirty |= a[i][t] != 0;
            }
            for (int j = t + 1; j < n; ++j) {
                if (a[t][j] == 0) continue;
                std::int64_t q = a[t][j] / p;
                for (int i = t; i < nr; ++i) a[i][j] = mod(static_cast<i128>(a[i][j]) - static_cast<i128>(q) * a[i][t], m);
                dirty |= a[t][j] != 0;
            }
            if (dirty) continue;
            std::int64_t g = std::gcd(p, m);
            int bad = -1;
            for (int i = t + 1; i < nr && bad < 0; ++i)
                for (int j = t + 1; j < n; ++j)
                    if (a[i][j] % g != 0) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            for (int j = t; j < n; ++j) a[t][j] = mod(static_cast<i128>(a[t][j]) + a[bad][j], m);
        }
        diag.push_back(a[t][t] == 0 ? m : std::gcd(a[t][t], m));
    }
    std::vector<std::int64_t> out;
    for (std::int64_t d : diag)
        if (d != 1) out.push_back(d);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::int64_t> subgroup_invariants(const std::vector<IntVec>& relations, const std::vector<IntVec>& generators,
                                              int s, std::int64_t modulus)
{
    const int k = static_cast<int>(generators.size());
    if (k == 0) return {};
    ModularLattice lat(s + k, modulus);
    for (const IntVec& r : relations) {
        IntVec v(s + k, 0);
        std::copy(r.begin(), r.end(), v.begin());
        lat.add(v);
    }
    for (int i = 0; i < k; ++i) {
        IntVec v(s + k, 0);
        std::copy(generators[i].begin(), generators[i].end(), v.begin());
        v[s + i] = 1;
        lat.add(v);
    }
    std::vector<IntVec> kernel;
    for (int i = s; i < s + k; ++i) {
        IntVec r = lat.row(i);
        kernel.emplace_back(r.begin() + s, r.end());
    }
    return smith_invariants_mod(kernel, k, modulus);
}

}  // namespace rk4
