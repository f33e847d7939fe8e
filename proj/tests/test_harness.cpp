#include "rk4/harness.hpp"
#include "rk4/rayoracle.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace rk4;

namespace {

ExperimentConfig small_config(u64 X)
{
    ExperimentConfig cfg;
    cfg.X = X;
    cfg.q = 60;
    cfg.a = 59;
    cfg.n1 = 5;
    cfg.n2 = 1;
    cfg.kvectors = {KVector{{0, 1}}, KVector{{1, 1}}, KVector{{0, 2}}, KVector{{0, 1}, {1, 2}}};
    cfg.block_size = 1000;
    return cfg;
}

std::string rejection(ExperimentConfig cfg)
{
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("configuration checks name the failed condition")
{
    ExperimentConfig cfg = small_config(1000);
    CHECK(rejection(cfg).empty());
    cfg.q = 30;
    CHECK(rejection(cfg) == "4*n1*n2 does not divide q");
    cfg = small_config(1000);
    cfg.a = 57;
    CHECK(rejection(cfg).find("a is not 3 mod 4") != std::string::npos);
    cfg.a = 55;
    CHECK(rejection(cfg) == "gcd(a, q) != 1");
    cfg = small_config(1000);
    cfg.a = 43;  // 43 = 3 mod 5, a non-square
    CHECK(rejection(cfg).find("not a square mod n1") != std::string::npos);
    cfg = small_config(1000);
    cfg.n2 = 3;
    cfg.q = 60;
    cfg.a = 59;  // 59 = 2 mod 3, a non-square
    CHECK(rejection(cfg).empty());
    cfg.q = 180;
    cfg.a = 79;  // 79 = 1 mod 3, a square
    CHECK(rejection(cfg).find("which divides n2") != std::string::npos);
}

TEST_CASE("empty range yields an empty report")
{
    ExperimentConfig cfg = small_config(50);
    EmpiricalReport rep = run_experiment(cfg);
    CHECK(rep.N == 0);
    CHECK(rep.moments.empty());
    CHECK(rep.distribution.empty());
}

TEST_CASE("accumulators agree with a per-D definitional computation")
{
    ExperimentConfig cfg = small_config(20000);
    ExperimentState st = run_blocks(cfg, ExperimentState{});
    TargetGroup tg = cfg.target();
    std::vector<BigInt> sums(cfg.kvectors.size(), 0);
    u64 n = 0;
    std::map<DistributionKey, u64> dist;
    SpfTable t(cfg.X);
    for (const FactoredOdd& D : SquarefreeRange(t, cfg.X, cfg.a, cfg.q)) {
        ++n;
        for (std::size_t i = 0; i < cfg.kvectors.size(); ++i) {
            BigInt prod = 1;
            for (const auto& [chi, e] : cfg.kvectors[i])
                for (int r = 0; r < e; ++r) prod *= m_chi(D, tg, Character{chi});
            sums[i] += prod;
        }
        ++dist[{special_divisors(D).dim() - 1, image_of_phi(D, tg)}];
    }
    CHECK(st.moments.count() == n);
    for (std::size_t i = 0; i < sums.size(); ++i) CHECK(st.moments.sum(i) == sums[i]);
    CHECK(st.distribution.counts() == dist);
    CHECK(st.distribution.total() == n);
    CHECK(st.audit.failures == 0);
}

TEST_CASE("merge is a commutative monoid and runs are shard independent")
{
    ExperimentConfig cfg = small_config(30000);
    SpfTable t(cfg.X);
    ExperimentState a = process_block(cfg, t, 3);
    ExperimentState b = process_block(cfg, t, 7);
    ExperimentState ab = a, ba = b;
    ab.merge(b);
    ba.merge(a);
    CHECK(ab == ba);
    ExperimentState e;
    e.merge(a);
    CHECK(e == a);
    CHECK_THROWS_AS(ab.merge(a), std::invalid_argument);

    cfg.shards = 1;
    ExperimentState one = run_blocks(cfg, ExperimentState{});
    cfg.shards = 4;
    ExperimentState four = run_blocks(cfg, ExperimentState{});
    CHECK(one == four);
    CHECK(one.serialize() == four.serialize());

    ExperimentConfig coarse = cfg;
    coarse.block_size = 7777;
    ExperimentState other = run_blocks(coarse, ExperimentState{});
    CHECK(other.moments == one.moments);
    CHECK(other.distribution == one.distribution);
}

TEST_CASE("state serialization round trips and resumes")
{
    ExperimentConfig cfg = small_config(12000);
    ExperimentState full = run_blocks(cfg, ExperimentState{});
    CHECK(ExperimentState::deserialize(full.serialize()) == full);
    CHECK_THROWS_AS(ExperimentState::deserialize("1 2 3"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentState::deserialize(full.serialize() + " 9"), std::invalid_argument);

    SpfTable t(cfg.X);
    ExperimentState partial = process_block(cfg, t, 0);
    partial.merge(process_block(cfg, t, 5));
    ExperimentState resumed = run_blocks(cfg, ExperimentState::deserialize(partial.serialize()));
    CHECK(resumed == full);
}

TEST_CASE("report carries predictions and gaps")
{
    ExperimentConfig cfg = small_config(100000);
    EmpiricalReport rep = run_experiment(cfg);
    REQUIRE(rep.moments.size() == 4);
    CHECK(rep.moments[0].predicted == 4);
    CHECK(rep.moments[1].predicted == 3);
    CHECK(rep.moments[2].predicted == 20);
    for (const MomentRow& m : rep.moments) CHECK(m.abs_gap == doctest::Approx(std::fabs(to_double(m.empirical - m.predicted))));
    double freq = 0;
    for (const DistributionRow& d : rep.distribution) {
        freq += d.freq;
        CHECK(d.image.ambient() == 1);
    }
    CHECK(freq == doctest::Approx(1.0));
}

TEST_CASE("F coefficients")
{
    auto a = f_coefficients(30);
    auto closed = f_coefficients_closed(30);
    CHECK(std::fabs(a[0] - 1) < 1e-18L);
    CHECK(std::fabs(a[1] + 2) < 1e-15L);
    CHECK(std::fabs(a[2] - 4.0L / 3) < 1e-15L);
    for (int n = 0; n <= 30; ++n) CHECK(std::fabs(a[n] - closed[n]) <= 1e-15L * std::fabs(closed[n]));
}

TEST_CASE("moment inversion")
{
    SUBCASE("constant moments")
    {
        MomentTable t;
        t.support_bound = 1;
        for (int n = 0; n <= 40; ++n) t.values[{n}] = 1;
        InversionResult r = invert_moments(t, 5, 40);
        CHECK(std::fabs(r.masses.at({0}) - 1) < 1e-12L);
        for (int m = 1; m < 5; ++m) CHECK(std::fabs(r.masses.at({m})) < 1e-12L);
    }
    SUBCASE("two-point mass")
    {
        MomentTable t;
        t.support_bound = 1;
        for (int n = 0; n <= 40; ++n) t.values[{n}] = (1 + std::ldexp(1.0L, n)) / 2;
        InversionResult r = invert_moments(t, 5, 40);
        CHECK(std::fabs(r.masses.at({0}) - 0.5L) < 1e-10L);
        CHECK(std::fabs(r.masses.at({1}) - 0.5L) < 1e-10L);
        CHECK(std::fabs(r.masses.at({2})) < 1e-10L);
    }
    SUBCASE("predicted single-character table gives the rank masses")
    {
        InversionResult r = invert_moments(predicted_moment_table(0, 40), 6, 40);
        CHECK(std::fabs(r.masses.at({0})) < 1e-10L);
        for (int j = 0; j <= 4; ++j)
            CHECK(std::fabs(r.masses.at({j + 1}) - static_cast<long double>(mu_cl_rank_mass(2, j).value())) < 1e-10L);
        CHECK(r.residual_bound < 1e-8L);
    }
    SUBCASE("two characters with finite support")
    {
        MomentTable t;
        t.characters = 2;
        t.support_bound = 2;
        const std::map<std::vector<int>, long double> x{{{0, 1}, 0.25L}, {{1, 1}, 0.5L}, {{2, 0}, 0.25L}};
        for (int n0 = 0; n0 <= 30; ++n0)
            for (int n1 = 0; n0 + n1 <= 30; ++n1) {
                long double c = 0;
                for (const auto& [m, w] : x) c += w * std::ldexp(1.0L, m[0] * n0 + m[1] * n1);
                t.values[{n0, n1}] = c;
            }
        InversionResult r = invert_moments(t, 4, 30, 1e-10L);
        for (const auto& [m, got] : r.masses) {
            auto it = x.find(m);
            CHECK(std::fabs(got - (it == x.end() ? 0.0L : it->second)) < 1e-10L);
        }
    }
    SUBCASE("errors")
    {
        MomentTable t;
        for (int n = 0; n <= 10; ++n) t.values[{n}] = 1;
        t.support_bound = 1;
        CHECK_THROWS_WITH_AS(invert_moments(t, 4, 20), doctest::Contains("insufficient table coverage"), std::invalid_argument);
        MomentTable multi = predicted_moment_table(1, 20);
        CHECK_THROWS_WITH_AS(invert_moments(multi, 3, 20), doctest::Contains("residual above tolerance"), std::runtime_error);
    }
}

TEST_CASE("empirical joint 4-rank table agrees with the ray class oracle")
{
    RingType ring({{5, true}});
    ExperimentConfig cfg;
    cfg.X = 1500;
    cfg.q = 60;
    cfg.a = 59;
    cfg.n1 = ring.n1();
    cfg.n2 = ring.n2();
    JointReport rep = empirical_joint_4rank(cfg, ring);
    std::map<std::pair<int, int>, u64> oracle;
    u64 n = 0;
    SpfTable t(cfg.X);
    for (const FactoredOdd& D : SquarefreeRange(t, cfg.X, cfg.a, cfg.q)) {
        if (D.value <= 3 || !strongly_type_check(D, 5)) continue;
        if (!detect_ring_type(D, 5).primes()[0].split) continue;
        J2Report j = verify_j2_relation(D, 5);
        ++oracle[{j.j1, j.j2}];
        ++n;
    }
    CHECK(rep.N == n);
    CHECK(n > 0);
    u64 cell_total = 0;
    for (const JointCell& c : rep.cells) {
        cell_total += c.count;
        auto it = oracle.find({c.j1, c.j2});
        CHECK(c.count == (it == oracle.end() ? 0 : it->second));
        CHECK(c.j2 - c.j1 <= ring.w_rank2());
    }
    CHECK(cell_total == n);
    ExperimentConfig wrong = cfg;
    wrong.n1 = 1;
    wrong.q = 4;
    wrong.a = 3;
    CHECK_THROWS_AS(empirical_joint_4rank(wrong, ring), std::invalid_argument);
}
