#include "rk4/measures.hpp"

#include <cmath>
#include <stdexcept>

namespace rk4 {

namespace {

const std::vector<Subspace>& subspaces_of(int ambient)
{
    static const std::vector<std::vector<Subspace>> all = [] {
        std::vector<std::vector<Subspace>> v;
        for (int s = 0; s <= 6; ++s) v.push_back(enumerate_subspaces(s));
        return v;
    }();
    if (ambient < 0 || ambient > 6) throw std::invalid_argument("dual space dimension must be at most 6");
    return all[ambient];
}

BigInt ipow(unsigned p, int e)
{
    return pow_big(BigInt(p), static_cast<unsigned>(e));
}

long double ld_pow(long double b, int e)
{
    return std::pow(b, static_cast<long double>(e));
}

}  // namespace

Rational eta(int s, unsigned M)
{
    if (M < 2) throw std::invalid_argument("eta: base must be at least 2");
    Rational r = 1;
    for (int i = 1; i <= s; ++i) {
        BigInt q = ipow(M, i);
        r *= Rational(q - 1, q);
    }
    return r;
}

EtaInfinity eta_infinity(unsigned M)
{
    if (M < 2) throw std::invalid_argument("eta_infinity: base must be at least 2");
    const int s = 64;
    long double v = 1;
    for (int i = 1; i <= s; ++i) v *= 1.0L - ld_pow(M, -i);
    long double tail = ld_pow(M, -s) / (M - 1);
    return {static_cast<double>(v), static_cast<double>(tail) + 1e-18};
}

double Mass::value() const
{
    return to_double(coefficient) * eta_infinity(p).value;
}

std::string Mass::exact() const
{
    if (coefficient == 0) return "0";
    return to_string(coefficient) + "*eta_inf(" + std::to_string(p) + ")";
}

Mass mu_cl_rank_mass(unsigned p, int j)
{
    if (j < 0) return {Rational(0), p};
    Rational e = eta(j, p);
    return {Rational(1) / (e * e * Rational(ipow(p, j * j))), p};
}

BigInt count_epi(unsigned p, int j, int r)
{
    if (r < 0 || j < 0 || r > j) return 0;
    BigInt n = 1;
    for (int i = 0; i < r; ++i) n *= ipow(p, j) - ipow(p, i);
    return n;
}

BigInt count_hom_rank(unsigned p, int j, int s, int r)
{
    if (r < 0 || r > j || r > s) return 0;
    return gaussian_binomial(s, r, p) * count_epi(p, j, r);
}

int k_total(const KVector& k)
{
    int t = 0;
    for (const auto& [chi, e] : k) {
        if (e < 0) throw std::invalid_argument("negative exponent in k-vector");
        t += e;
    }
    return t;
}

Rational prob_generate(const KVector& k, const Subspace& y)
{
    Rational total = 0;
    for (const Subspace& v : subspaces_of(y.ambient())) {
        if (!v.is_subspace_of(y)) continue;
        int outside = 0;
        for (const auto& [chi, e] : k)
            if (!v.contains(chi)) outside += e;
        total += Rational(moebius(v, y)) * pow2_rational(-outside);
    }
    return total;
}

Rational predicted_mixed_moment(const KVector& k, int ambient)
{
    for (const auto& [chi, e] : k)
        if (chi >> ambient) throw std::invalid_argument("k-vector character outside the dual space");
    int kt = k_total(k);
    Rational total = 0;
    for (const Subspace& w : subspaces_of(ambient)) {
        if (w.dim() > kt) continue;
        Rational p = prob_generate(k, w);
        if (p != 0) total += p * Rational(n2(kt - w.dim()));
    }
    return total * pow2_rational(kt);
}

Mass predicted_pair_distribution(int j, const Subspace& y)
{
    Mass m = mu_cl_rank_mass(2, j);
    BigInt hom = BigInt(1) << static_cast<unsigned>(j * y.ambient());
    return m * Rational(count_epi(2, j, y.dim()), hom);
}

RingType::RingType(std::vector<RingPrime> primes) : primes_(std::move(primes))
{
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        if (primes_[i].l < 3 || !is_prime(primes_[i].l)) throw std::invalid_argument("ring conductor primes must be odd primes");
        for (std::size_t k = 0; k < i; ++k)
            if (primes_[k].l == primes_[i].l) throw std::invalid_argument("repeated prime in ring conductor");
    }
}

u64 RingType::conductor() const
{
    u64 c = 1;
    for (const RingPrime& rp : primes_) c *= rp.l;
    return c;
}

u64 RingType::n1() const
{
    u64 n = 1;
    for (const RingPrime& rp : primes_)
        if ((rp.l % 4 == 3 && !rp.split) || (rp.l % 4 == 1 && rp.split)) n *= rp.l;
    return n;
}

u64 RingType::n2() const
{
    u64 n = 1;
    for (const RingPrime& rp : primes_)
        if (rp.l % 4 == 3 && rp.split) n *= rp.l;
    return n;
}

int RingType::target_dimension() const
{
    int w1 = static_cast<int>(prime_divisors(n1()).size());
    int w2 = static_cast<int>(prime_divisors(n2()).size());
    return w1 + std::max(w2 - 1, 0);
}

int RingType::w_rank2() const
{
    int inert = 0, split1 = 0, split3 = 0;
    for (const RingPrime& rp : primes_) {
        if (!rp.split)
            ++inert;
        else if (rp.l % 4 == 1)
            ++split1;
        else
            ++split3;
    }
    return inert + 2 * split1 + std::max(split3 - 1, 0);
}

Mass predicted_joint_4rank(int j1, int j2, const RingType& ring)
{
    int a = ring.target_dimension();
    int r = ring.w_rank2() - (j2 - j1);
    Mass m = mu_cl_rank_mass(2, j1);
    BigInt hom = BigInt(1) << static_cast<unsigned>(std::max(j1, 0) * a);
    return m * Rational(count_hom_rank(2, j1, a, r), hom);
}

AverageMode parse_average_mode(const std::string& s)
{
    if (s == "unramified") return AverageMode::Unramified;
    if (s == "all") return AverageMode::AllDiscriminants;
    throw std::invalid_argument("unknown averaging mode '" + s + "' (expected 'unramified' or 'all')");
}

Rational avg_p_torsion_ray(unsigned p, u64 c, AverageMode mode)
{
    if (p < 3 || !is_prime(p)) throw std::invalid_argument("p must be an odd prime");
    if (c == 0) throw std::invalid_argument("conductor must be positive");
    std::vector<u64> ls = prime_divisors(c);
    int one = 0, plus_minus = 0;
    for (u64 l : ls) {
        if (l % p == 1) ++one;
        if (l % p == 1 || l % p == p - 1) ++plus_minus;
    }
    bool p_div = c % p == 0;
    bool p2_div = c % (static_cast<u64>(p) * p) == 0;
    Rational half = Rational(p + 1, 2);
    if (mode == AverageMode::Unramified) {
        Rational t = pow_big(BigInt(p + 1), plus_minus);
        t /= Rational(BigInt(1) << static_cast<unsigned>(plus_minus));
        if (!p2_div) return Rational(ipow(p, one)) * (1 + t);
        return Rational(ipow(p, one + 1)) * (1 + Rational(p) * t);
    }
    if (p == 3) {
        Rational prod = 1;
        for (u64 l : ls) prod *= 1 + Rational(l, l + 1);
        if (!p_div) return Rational(ipow(3, one)) * (1 + prod);
        if (!p2_div) return Rational(ipow(3, one)) * (1 + Rational(6, 7) * prod);
        return Rational(ipow(3, one + 1)) * (1 + Rational(15, 7) * prod);
    }
    Rational prod = 1;
    for (u64 l : ls)
        if ((l * l - 1) % p == 0) prod *= 1 + Rational(p - 1, 2) * Rational(l, l + 1);
    if (!p_div) return Rational(ipow(p, one)) * (1 + prod);
    if (!p2_div) return Rational(ipow(p, one)) * (1 + Rational(2 * p, p + 1) * prod);
    return Rational(ipow(p, one + 1)) * (1 + Rational(p + p * p, p + 1) * prod);
}

RingLocalData RingLocalData::from_ring(unsigned p, const RingType& ring)
{
    RingLocalData r{p};
    for (const RingPrime& rp : ring.primes()) {
        u64 l = rp.l;
        if (l == p) continue;
        bool one = l % p == 1, minus_one = l % p == p - 1;
        if (rp.split && one) {
            ++r.plus_dim;
            ++r.minus_dim;
        } else if (!rp.split && one) {
            ++r.plus_dim;
        } else if (!rp.split && minus_one) {
            ++r.minus_dim;
        }
    }
    return r;
}

BigInt automorphism_count(unsigned p, std::vector<int> lambda)
{
    std::sort(lambda.begin(), lambda.end());
    int n = static_cast<int>(lambda.size());
    for (int e : lambda)
        if (e <= 0) throw std::invalid_argument("partition parts must be positive");
    BigInt total = 1;
    for (int k = 0; k < n; ++k) {
        int d = k, c = k;
        while (d + 1 < n && lambda[d + 1] == lambda[k]) ++d;
        while (c > 0 && lambda[c - 1] == lambda[k]) --c;
        // 1-based: d_k = d + 1, c_k = c + 1.
        total *= ipow(p, d + 1) - ipow(p, k);
        total *= ipow(p, lambda[k] * (n - d - 1));
        total *= ipow(p, (lambda[k] - 1) * (n - c));
    }
    return total;
}

namespace {

// Sum of 1/#Aut(G) over groups of p-rank r and order at most p^max_size, by rank.
void partition_masses(unsigned p, int max_parts, int max_size, std::vector<long double>& by_rank)
{
    by_rank.assign(max_parts + 1, 0.0L);
    std::vector<int> parts;
    auto rec = [&](auto&& self, int remaining, int max_part) -> void {
        by_rank[parts.size()] += 1.0L / automorphism_count(p, parts).convert_to<long double>();
        if (static_cast<int>(parts.size()) == max_parts) return;
        for (int e = std::min(max_part, remaining); e >= 1; --e) {
            parts.push_back(e);
            self(self, remaining - e, e);
            parts.pop_back();
        }
    };
    rec(rec, max_size, max_size);
}

}  // namespace

PropJustResult verify_prop_just(const RingLocalData& r, int max_rank)
{
    unsigned p = r.p;
    if (p < 3 || !is_prime(p)) throw std::invalid_argument("verify_prop_just: p must be an odd prime");
    if (max_rank < 1) throw std::invalid_argument("verify_prop_just: truncation too small to certify");
    const long double eta_inf = eta_infinity(p).value;
    const int a = r.plus_dim, b = r.minus_dim;
    const long double plus = ld_pow(p, a), minus = ld_pow(p, b);

    int max_size = static_cast<int>(std::ceil(40.0 / std::log2(static_cast<double>(p)))) + 4;
    max_size = std::max(max_size, max_rank);
    std::vector<long double> partial;
    partition_masses(p, max_rank, max_size, partial);

    // Average over delta in Hom(G[p], minus part) of #R*[p] #G[p] / #Im(delta).
    auto inner = [&](int rank) {
        long double hom = ld_pow(p, rank * b);
        long double s = 0;
        for (int k = 0; k <= std::min(rank, b); ++k) {
            long double count = count_hom_rank(p, rank, b, k).convert_to<long double>();
            s += count * plus * minus * ld_pow(p, rank) / ld_pow(p, k);
        }
        return s / hom;
    };
    auto rank_mass = [&](int rank) { return eta_inf * to_long_double(mu_cl_rank_mass(p, rank).coefficient); };
    auto upper = [&](int rank) { return plus * (ld_pow(p, rank) + minus); };

    long double lhs = 0, tail = 0;
    for (int rank = 0; rank <= max_rank; ++rank) {
        lhs += eta_inf * partial[rank] * inner(rank);
        long double missing = rank_mass(rank) - eta_inf * partial[rank];
        tail += std::max(missing, 0.0L) * upper(rank) + 1e-15L * upper(rank);
    }
    for (int rank = max_rank + 1; rank <= max_rank + 40; ++rank) tail += rank_mass(rank) * upper(rank);
    long double rhs = plus * (1 + minus);
    PropJustResult out;
    out.lhs = static_cast<double>(lhs);
    out.rhs = static_cast<double>(rhs);
    out.tail_bound = static_cast<double>(tail);
    out.gap = static_cast<double>(std::fabs(lhs - rhs));
    return out;
}

}  // namespace rk4
