#include "rk4/rayoracle.hpp"

#include "rk4/specialdiv.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rk4 {

namespace {

void check_disc(const FactoredOdd& D)
{
    if (D.value <= 3 || D.value % 4 != 3) throw std::invalid_argument("expected squarefree D = 3 mod 4 with D > 3, got " + std::to_string(D.value));
}

std::int64_t pmod(std::int64_t x, std::int64_t m)
{
    x %= m;
    return x < 0 ? x + m : x;
}

std::vector<u64> squarefree_conductor_primes(u64 c)
{
    if (c == 0 || c % 2 == 0) throw std::invalid_argument("conductor must be odd and positive");
    std::vector<u64> ls = prime_divisors(c);
    for (u64 l : ls)
        if ((c / l) % l == 0) throw std::invalid_argument("conductor must be squarefree, got " + std::to_string(c));
    return ls;
}

}  // namespace

BigInt AbelianGroupStructure::order() const
{
    BigInt o = 1;
    for (std::int64_t d : invariant_factors) o *= d;
    return o;
}

int AbelianGroupStructure::rank(std::int64_t p) const
{
    int r = 0;
    for (std::int64_t d : invariant_factors)
        if (d % p == 0) ++r;
    return r;
}

int AbelianGroupStructure::rank4() const
{
    return rank(4);
}

AbelianGroupStructure class_group(std::int64_t D)
{
    return {FormClassGroup(D).invariant_factors()};
}

Rk4Check rk4_cross_check(const FactoredOdd& D)
{
    check_disc(D);
    return {rank4(D), class_group(static_cast<std::int64_t>(D.value)).rank4()};
}

RingType detect_ring_type(const FactoredOdd& D, u64 c)
{
    std::vector<RingPrime> primes;
    for (u64 l : squarefree_conductor_primes(c)) {
        if (D.value % l == 0) throw std::invalid_argument(std::to_string(l) + " ramifies in Q(sqrt(-" + std::to_string(D.value) + "))");
        primes.push_back({l, jacobi(-static_cast<i64>(D.value), l) == 1});
    }
    return RingType(primes);
}

UnitGroupModC::UnitGroupModC(const FactoredOdd& D, u64 c) : c_(c)
{
    check_disc(D);
    RingType ring = detect_ring_type(D, c);
    const std::int64_t mD = static_cast<std::int64_t>((D.value + 1) / 4);
    for (const RingPrime& rp : ring.primes()) {
        Prime pr;
        const std::int64_t l = static_cast<std::int64_t>(rp.l);
        pr.l = rp.l;
        pr.split = rp.split;
        pr.m = mD % l;
        if (pr.split) {
            int found = 0;
            for (std::int64_t r = 0; r < l && found < 2; ++r)
                if ((r * r - r + pr.m) % l == 0) pr.roots[found++] = r;
            if (found != 2) throw std::logic_error("split prime without two roots");
            pr.gen = static_cast<std::int64_t>(primitive_root(rp.l));
            pr.dlog.assign(l, -1);
            std::int64_t x = 1;
            for (std::int64_t k = 0; k < l - 1; ++k) {
                pr.dlog[x] = static_cast<std::int32_t>(k);
                x = x * pr.gen % l;
            }
            orders_.push_back(l - 1);
            orders_.push_back(l - 1);
        } else {
            const std::int64_t q = l * l - 1;
            auto mul = [&](std::pair<std::int64_t, std::int64_t> a, std::pair<std::int64_t, std::int64_t> b) {
                std::int64_t x = pmod(a.first * b.first - pr.m * a.second % l * b.second, l);
                std::int64_t y = pmod(a.first * b.second + a.second * b.first + a.second * b.second, l);
                return std::make_pair(x, y);
            };
            auto power = [&](std::pair<std::int64_t, std::int64_t> a, std::int64_t e) {
                std::pair<std::int64_t, std::int64_t> r{1, 0};
                while (e > 0) {
                    if (e & 1) r = mul(r, a);
                    a = mul(a, a);
                    e >>= 1;
                }
                return r;
            };
            std::vector<u64> qs = prime_divisors(static_cast<u64>(q));
            std::pair<std::int64_t, std::int64_t> g{0, 0};
            for (std::int64_t idx = 1; idx < l * l && g == std::make_pair<std::int64_t, std::int64_t>(0, 0); ++idx) {
                std::pair<std::int64_t, std::int64_t> cand{idx % l, idx / l};
                bool ok = true;
                for (u64 f : qs)
                    if (power(cand, q / static_cast<std::int64_t>(f)) == std::make_pair<std::int64_t, std::int64_t>(1, 0)) ok = false;
                if (ok) g = cand;
            }
            pr.dlog.assign(l * l, -1);
            std::pair<std::int64_t, std::int64_t> x{1, 0};
            for (std::int64_t k = 0; k < q; ++k) {
                pr.dlog[x.first + l * x.second] = static_cast<std::int32_t>(k);
                x = mul(x, g);
            }
            orders_.push_back(q);
        }
        primes_.push_back(std::move(pr));
    }
}

std::int64_t UnitGroupModC::full_order() const
{
    std::int64_t o = 1;
    for (std::int64_t d : orders_) o *= d;
    return o;
}

IntVec UnitGroupModC::log(std::int64_t u, std::int64_t v) const
{
    IntVec out;
    for (const Prime& pr : primes_) {
        const std::int64_t l = static_cast<std::int64_t>(pr.l);
        if (pr.split) {
            for (std::int64_t r : pr.roots) {
                std::int64_t val = pmod(pmod(u, l) + pmod(v, l) * r, l);
                if (val == 0) throw std::invalid_argument("element is not a unit modulo the conductor");
                out.push_back(pr.dlog[val]);
            }
        } else {
            std::int64_t x = pmod(u, l), y = pmod(v, l);
            if (x == 0 && y == 0) throw std::invalid_argument("element is not a unit modulo the conductor");
            out.push_back(pr.dlog[x + l * y]);
        }
    }
    return out;
}

std::vector<IntVec> UnitGroupModC::relations() const
{
    std::vector<IntVec> rel;
    for (int i = 0; i < components(); ++i) {
        IntVec r(components(), 0);
        r[i] = orders_[i];
        rel.push_back(r);
    }
    if (components() > 0) rel.push_back(minus_one());
    return rel;
}

std::vector<IntVec> UnitGroupModC::rational_generators() const
{
    std::vector<IntVec> gens;
    for (const Prime& pr : primes_) {
        const std::int64_t l = static_cast<std::int64_t>(pr.l);
        const std::int64_t rest = static_cast<std::int64_t>(c_) / l;
        std::int64_t g = static_cast<std::int64_t>(primitive_root(pr.l));
        // n = g mod l, n = 1 mod rest.
        std::int64_t n = 1;
        while (n % l != g % l) n += rest;
        gens.push_back(log(n, 0));
    }
    return gens;
}

int rk2_wr(const FactoredOdd& D, u64 c)
{
    UnitGroupModC U(D, c);
    const int s = U.components();
    if (s == 0) return 0;
    std::vector<IntVec> gens = U.rational_generators();
    for (int i = 0; i < s; ++i) {
        IntVec e(s, 0);
        e[i] = 2;
        gens.push_back(e);
    }
    int r = 0;
    for (std::int64_t d : subgroup_invariants(U.relations(), gens, s, U.full_order()))
        if (d % 2 == 0) ++r;
    return r;
}

bool strongly_type_check(const FactoredOdd& D, u64 c)
{
    UnitGroupModC U(D, c);
    const int s = U.components();
    if (s == 0) return true;
    auto mod2 = [](const IntVec& v) {
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] & 1) m |= 1ULL << i;
        return m;
    };
    std::vector<std::uint64_t> span{mod2(U.minus_one())};
    for (u64 q : D.primes) span.push_back(mod2(U.log(static_cast<std::int64_t>(q), 0)));
    Subspace sp(s, span);
    for (const IntVec& g : U.rational_generators())
        if (!sp.contains(mod2(g))) return false;
    return true;
}

namespace {

struct PrimeIdeal {
    std::int64_t p;
    std::int64_t root;  // ideal (p, w - root)
    bool ramified;
};

}  // namespace

namespace {

struct RayLattice {
    ModularLattice lattice;
    RayClassGroup info;
    int ideal_count;
};

RayLattice build_ray_lattice(const FactoredOdd& D, u64 c, std::int64_t budget)
{
    check_disc(D);
    const std::int64_t Dv = static_cast<std::int64_t>(D.value);
    const std::int64_t mD = (Dv + 1) / 4;
    FormClassGroup cg(Dv);
    UnitGroupModC U(D, c);
    RayClassGroup out;
    out.class_number = cg.order();
    out.unit_quotient_order = U.components() == 0 ? 1 : U.full_order() / 2;
    const std::int64_t target = out.class_number * out.unit_quotient_order;

    // Prime ideals of small norm coprime to c whose classes generate Cl(K).
    std::vector<PrimeIdeal> ideals;
    std::int64_t bound = std::max<std::int64_t>(60, static_cast<std::int64_t>(2.0 / M_PI * std::sqrt(static_cast<double>(Dv))) + 1);
    while (true) {
        ideals.clear();
        std::vector<int> classes;
        for (std::int64_t p = 2; p <= bound; ++p) {
            if (!is_prime(static_cast<u64>(p)) || c % static_cast<u64>(p) == 0) continue;
            std::vector<std::int64_t> roots;
            for (std::int64_t r = 0; r < p; ++r)
                if (pmod(r * r - r + mD, p) == 0) roots.push_back(r);
            bool ram = Dv % p == 0;
            for (std::int64_t r : roots) {
                ideals.push_back({p, r, ram});
                std::int64_t b = 2 * r - 1;
                classes.push_back(cg.index_of({p, b, (b * b + Dv) / (4 * p)}));
            }
        }
        if (cg.generated_order(classes) == cg.order()) break;
        bound *= 2;
    }
    const int r = static_cast<int>(ideals.size());
    const int s = U.components();
    out.generator_primes = r;
    ModularLattice lat(r + s, target);

    auto with_units = [&](IntVec head, const IntVec& unit_log) {
        head.resize(r + s, 0);
        for (int i = 0; i < s; ++i) head[r + i] = -unit_log[i];
        return head;
    };
    for (const IntVec& rel : U.relations()) {
        IntVec v(r + s, 0);
        for (int i = 0; i < s; ++i) v[r + i] = rel[i];
        lat.add(v);
    }
    for (int i = 0; i < r; ++i) {
        // (p) = p pbar for split p, q^2 for ramified q.
        if (i + 1 < r && ideals[i + 1].p == ideals[i].p) {
            IntVec v(r, 0);
            v[i] = v[i + 1] = 1;
            lat.add(with_units(v, U.log(ideals[i].p, 0)));
        } else if (ideals[i].ramified) {
            IntVec v(r, 0);
            v[i] = 2;
            lat.add(with_units(v, U.log(ideals[i].p, 0)));
        }
    }

    std::int64_t tried = 0;
    for (std::int64_t radius = 1; lat.index() != target; ++radius) {
        for (std::int64_t v = 1; v <= radius && lat.index() != target; ++v) {
            for (std::int64_t u = -radius; u <= radius; ++u) {
                if (v != radius && std::abs(u) != radius) continue;
                if (++tried > budget) throw std::runtime_error("ray_class_group: relation budget exhausted");
                if (std::gcd(std::abs(u), v) != 1) continue;
                std::int64_t norm = u * u + u * v + mD * v * v;
                if (std::gcd(norm, static_cast<std::int64_t>(c)) != 1) continue;
                IntVec head(r, 0);
                std::int64_t rest = norm;
                for (int i = 0; i < r && rest > 1; ++i) {
                    const PrimeIdeal& id = ideals[i];
                    if (rest % id.p != 0) continue;
                    if (!id.ramified && pmod(u + v * id.root, id.p) != 0) continue;
                    while (rest % id.p == 0) {
                        rest /= id.p;
                        ++head[i];
                    }
                }
                if (rest != 1) continue;
                lat.add(with_units(head, U.log(u, v)));
                ++out.relation_count;
                if (lat.index() == target) break;
            }
        }
        if (lat.index() < target) throw std::logic_error("ray_class_group: relation lattice index below the certified order");
    }
    out.order_certified = lat.index() == target;
    return {lat, out, r};
}

}  // namespace

RayClassGroup ray_class_group(const FactoredOdd& D, u64 c, std::int64_t budget)
{
    RayLattice rl = build_ray_lattice(D, c, budget);
    RayClassGroup out = rl.info;
    out.structure.invariant_factors = rl.lattice.invariant_factors();
    if (out.structure.order() != out.class_number * out.unit_quotient_order)
        throw std::logic_error("ray_class_group: Smith form order mismatch");
    return out;
}

AbelianGroupStructure ring_class_group(const FactoredOdd& D, u64 c, std::int64_t budget)
{
    RayLattice rl = build_ray_lattice(D, c, budget);
    UnitGroupModC U(D, c);
    const int r = rl.ideal_count;
    for (const IntVec& g : U.rational_generators()) {
        IntVec v(r + U.components(), 0);
        for (int i = 0; i < U.components(); ++i) v[r + i] = g[i];
        rl.lattice.add(v);
    }
    return {rl.lattice.invariant_factors()};
}

J2Report verify_j2_relation(const FactoredOdd& D, u64 c)
{
    J2Report rep;
    rep.D = D.value;
    rep.c = c;
    RingType ring = detect_ring_type(D, c);
    std::ostringstream flags;
    for (std::size_t i = 0; i < ring.primes().size(); ++i)
        flags << (i ? "," : "") << ring.primes()[i].l << (ring.primes()[i].split ? "s" : "i");
    rep.type_flags = flags.str();
    rep.strongly_typed = strongly_type_check(D, c);
    TargetGroup tg(ring.n1(), ring.n2());
    rep.rank_phi = image_of_phi(D, tg).dim();
    rep.j1 = rank4(D);
    rep.rk2_wr = rk2_wr(D, c);
    RayClassGroup ray = ray_class_group(D, c);
    rep.h = ray.class_number;
    rep.ray_order = ray.structure.order().str();
    rep.invariant_factors = ray.structure.invariant_factors;
    rep.j2 = ray.structure.rank4();
    rep.relation_count = ray.relation_count;
    rep.order_certified = ray.order_certified;
    return rep;
}

}  // namespace rk4
