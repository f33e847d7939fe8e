#include "rk4/fkcomb.hpp"
#include "rk4/harness.hpp"
#include "rk4/measures.hpp"
#include "rk4/rayoracle.hpp"
#include "rk4/specialdiv.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

using namespace rk4;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

Outcome subspace_law()
{
    SpfTable t(100000);
    u64 n = 0, bad = 0;
    for (const FactoredOdd& D : SquarefreeRange(t, 100000, 1, 2)) {
        ++n;
        Subspace s = special_divisors(D);
        auto kernel = s.elements();
        std::sort(kernel.begin(), kernel.end());
        auto brute = special_divisors_brute(D);
        const std::uint64_t all = D.omega() == 0 ? 0 : (1ULL << D.omega()) - 1;
        bool closed = true;
        for (std::uint64_t x : brute)
            for (std::uint64_t y : brute) closed = closed && std::binary_search(brute.begin(), brute.end(), x ^ y);
        if (kernel != brute || !closed || !s.contains(0) || !s.contains(all)) ++bad;
    }
    return {bad == 0, std::to_string(n) + " odd squarefree D <= 1e5, " + std::to_string(bad) + " failures"};
}

Outcome character_sum_identity()
{
    u64 checks = 0, bad = 0;
    for (auto [n1, n2] : {std::pair<u64, u64>{5, 1}, {7, 1}, {13, 1}, {1, 21}, {5, 21}}) {
        TargetGroup tg(n1, n2);
        SpfTable t(10000);
        for (const FactoredOdd& D : SquarefreeRange(t, 10000, 1, 2)) {
            if (!tg.is_admissible(D)) continue;
            const i64 a1 = a_chi(D, tg, tg.trivial());
            for (const Character& chi : tg.characters()) {
                ++checks;
                if ((i64{1} << (D.omega() + 1)) * m_chi(D, tg, chi) != a1 + a_chi(D, tg, chi)) ++bad;
            }
        }
    }
    return {bad == 0 && checks > 0, std::to_string(checks) + " (D, target, chi) checks, " + std::to_string(bad) + " mismatches"};
}

Outcome rank4_realization()
{
    SpfTable t(20000);
    u64 n = 0, bad = 0;
    for (const FactoredOdd& D : SquarefreeRange(t, 20000, 3, 4)) {
        if (D.value <= 3) continue;
        ++n;
        if (!rk4_cross_check(D).ok()) ++bad;
    }
    return {bad == 0, std::to_string(n) + " D = 3 mod 4 in (3, 2e4], " + std::to_string(bad) + " mismatches"};
}

Outcome combinatorial_identity(bool slow)
{
    u64 profiles = 0, bad = 0;
    for (int k = 1; k <= (slow ? 3 : 2); ++k)
        for (const PsiProfile& prof : all_profiles(k)) {
            if (k == 3 && prof.t > 1) continue;
            ++profiles;
            if (!verify_identity(prof).ok()) ++bad;
        }
    std::string detail = std::to_string(profiles) + " profiles, " + std::to_string(bad) + " failures";
    detail += slow ? " (k = 3 with #T <= 1 included)" : " (k = 3 needs --slow)";
    return {bad == 0, detail};
}

long double direct_moment(const KVector& k, int ambient, int max_j, const std::vector<Subspace>& subs)
{
    long double total = 0;
    for (int j = 0; j <= max_j; ++j) {
        const long double mass = static_cast<long double>(mu_cl_rank_mass(2, j).value());
        for (const Subspace& y : subs) {
            BigInt epi = count_epi(2, j, y.dim());
            if (epi == 0) continue;
            const long double py = static_cast<long double>(to_double(Rational(epi, BigInt(1) << static_cast<unsigned>(j * ambient))));
            int logm = 0;
            for (const auto& [chi, e] : k) {
                bool orth = true;
                for (std::uint64_t b : y.basis()) orth = orth && dot(chi, b) == 0;
                logm += e * (j + (orth ? 1 : 0));
            }
            total += mass * py * std::ldexp(1.0L, logm);
        }
    }
    return total;
}

Outcome moment_closed_form()
{
    u64 n = 0;
    long double worst = 0;
    for (int ambient = 0; ambient <= 3; ++ambient) {
        const std::uint64_t nchars = 1ULL << ambient;
        const auto subs = enumerate_subspaces(ambient);
        KVector k;
        std::function<void(std::uint64_t, int)> rec = [&](std::uint64_t chi, int left) {
            if (chi == nchars) {
                if (k.empty()) return;
                ++n;
                const long double closed = static_cast<long double>(to_double(predicted_mixed_moment(k, ambient)));
                worst = std::max(worst, std::fabs(closed - direct_moment(k, ambient, 40, subs)));
                return;
            }
            for (int e = 0; e <= left; ++e) {
                if (e) k[chi] = e;
                rec(chi + 1, left - e);
                k.erase(chi);
            }
        };
        rec(0, 4);
    }
    return {worst <= 1e-10L, std::to_string(n) + " k-vectors, max |closed - direct| = " + fmt(static_cast<double>(worst))};
}

Outcome inversion()
{
    InversionResult inv = invert_moments(predicted_moment_table(0, 40), 6, 40);
    long double err = std::fabs(inv.masses.at({0}));
    for (int j = 0; j <= 3; ++j)
        err = std::max(err, std::fabs(inv.masses.at({j + 1}) - static_cast<long double>(mu_cl_rank_mass(2, j).value())));

    long double synth = 0;
    auto round_trip = [&](int chars, const std::map<std::vector<int>, long double>& x, int box) {
        MomentTable t;
        t.characters = chars;
        t.support_bound = 1;
        for (const auto& kv : x)
            for (int e : kv.first) t.support_bound = std::max(t.support_bound, e);
        const int trunc = 30;
        std::vector<int> n(chars, 0);
        std::function<void(int, int)> fill = [&](int i, int left) {
            if (i == chars) {
                long double c = 0;
                for (const auto& [m, w] : x) {
                    int d = 0;
                    for (int q = 0; q < chars; ++q) d += m[q] * n[q];
                    c += w * std::ldexp(1.0L, d);
                }
                t.values[n] = c;
                return;
            }
            for (int e = 0; e <= left; ++e) {
                n[i] = e;
                fill(i + 1, left - e);
            }
            n[i] = 0;
        };
        fill(0, trunc);
        InversionResult r = invert_moments(t, box, trunc, 1e-10L);
        for (const auto& [m, got] : r.masses) {
            auto it = x.find(m);
            synth = std::max(synth, std::fabs(got - (it == x.end() ? 0.0L : it->second)));
        }
    };
    round_trip(1, {{{0}, 0.25L}, {{1}, 0.5L}, {{3}, 0.25L}}, 5);
    round_trip(2, {{{0, 1}, 0.25L}, {{1, 1}, 0.5L}, {{2, 0}, 0.25L}}, 4);
    const bool ok = err <= 1e-8L && synth <= 1e-10L;
    return {ok, "predicted masses j <= 3 max error " + fmt(static_cast<double>(err)) + ", synthetic round trips max error " +
                    fmt(static_cast<double>(synth))};
}

struct EmpiricalRun {
    EmpiricalReport report;
    double seconds;
};

EmpiricalRun empirical_run()
{
    ExperimentConfig cfg;
    cfg.X = 10000000;
    cfg.q = 60;
    cfg.a = 59;
    cfg.n1 = 5;
    cfg.n2 = 1;
    cfg.kvectors = {KVector{{0, 1}}, KVector{{1, 1}}};
    cfg.shards = std::max(1u, std::thread::hardware_concurrency());
    const auto t0 = std::chrono::steady_clock::now();
    EmpiricalReport rep = run_experiment(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {rep, secs};
}

Outcome empirical_moments(const EmpiricalRun& run)
{
    const MomentRow& m1 = run.report.moments.at(0);
    const MomentRow& mchi = run.report.moments.at(1);
    const bool ok = m1.rel_gap <= 0.10 && mchi.rel_gap <= 0.10 && run.seconds <= 600 && run.report.audit.failures == 0;
    return {ok, "N = " + std::to_string(run.report.N) + ", E[m_1] = " + fmt(to_double(m1.empirical)) + " vs 4 (rel gap " +
                    fmt(m1.rel_gap) + "), E[m_chi5] = " + fmt(to_double(mchi.empirical)) + " vs 3 (rel gap " + fmt(mchi.rel_gap) +
                    "), " + fmt(run.seconds) + " s, audit failures " + std::to_string(run.report.audit.failures)};
}

Outcome empirical_distribution(const EmpiricalRun& run)
{
    const double eta = eta_infinity(2).value;
    double f0 = 0, f1 = 0;
    for (const DistributionRow& d : run.report.distribution) {
        if (d.dim == 0) f0 += d.freq;
        if (d.dim == 1 && d.image == Subspace::full(1)) f1 += d.freq;
    }
    const bool ok = std::fabs(f0 - eta) <= 0.02 && std::fabs(f1 - eta) <= 0.02;
    return {ok, "freq(dim 0) = " + fmt(f0) + " (gap " + fmt(std::fabs(f0 - eta)) + "), freq(dim 1, full image) = " + fmt(f1) +
                    " (gap " + fmt(std::fabs(f1 - eta)) + "), target " + fmt(eta)};
}

Outcome ray_oracle()
{
    u64 checked = 0, skipped = 0, mismatches = 0, uncertified = 0;
    std::ostringstream per_c;
    SpfTable t(2000);
    for (u64 c : {5ULL, 13ULL, 21ULL}) {
        u64 c_checked = 0, c_skipped = 0, c_ramified = 0;
        for (const FactoredOdd& D : SquarefreeRange(t, 2000, 3, 4)) {
            if (D.value <= 3) continue;
            if (gcd_u64(D.value, c) != 1) {
                ++c_ramified;
                continue;
            }
            J2Report r = verify_j2_relation(D, c);
            if (!r.order_certified) ++uncertified;
            if (!r.strongly_typed) {
                ++c_skipped;
                continue;
            }
            ++c_checked;
            if (!r.relation_holds()) {
                ++mismatches;
                std::printf("  mismatch: D = %llu, c = %llu, j1 = %d, j2 = %d, rk2(W_R) = %d, rank(phi) = %d\n",
                            static_cast<unsigned long long>(D.value), static_cast<unsigned long long>(c), r.j1, r.j2, r.rk2_wr, r.rank_phi);
            }
        }
        per_c << " c=" << c << ": " << c_checked << " checked, " << c_skipped << " skipped (not strongly typed), " << c_ramified
              << " excluded (gcd(D, c) > 1);";
        checked += c_checked;
        skipped += c_skipped;
    }
    const bool ok = mismatches == 0 && uncertified == 0 && checked > 0;
    return {ok, std::to_string(checked) + " checked, " + std::to_string(mismatches) + " mismatches, " + std::to_string(uncertified) +
                    " uncertified;" + per_c.str()};
}

Outcome evaluators()
{
    bool ok = avg_p_torsion_ray(3, 5, AverageMode::Unramified) == 3;
    ok = ok && avg_p_torsion_ray(3, 45, AverageMode::Unramified) == 21;
    ok = ok && avg_p_torsion_ray(5, 11, AverageMode::Unramified) == 20;
    for (int j = 0; j <= 3; ++j) {
        // Rank-j mass of the 4-rank law: 2^{-j^2} prod_{i <= j} (1 - 2^{-i})^{-2}, times eta_inf(2).
        Rational fk(1, BigInt(1) << static_cast<unsigned>(j * j));
        for (int i = 1; i <= j; ++i) {
            Rational f = 1 - Rational(1, BigInt(1) << static_cast<unsigned>(i));
            fk /= f * f;
        }
        ok = ok && predicted_joint_4rank(j, j, RingType()).coefficient == fk;
    }
    return {ok, "p-averages 3, 21, 20 and c = 1 joint law at (j, j), j <= 3, compared exactly"};
}

Outcome prop_just()
{
    double worst_tail = 0;
    bool ok = true;
    int instances = 0;
    for (auto [plus, minus] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}}) {
        PropJustResult r = verify_prop_just(RingLocalData{3, plus, minus}, 12);
        ok = ok && r.gap <= r.tail_bound && r.tail_bound < 1e-6;
        worst_tail = std::max(worst_tail, r.tail_bound);
        ++instances;
    }
    return {ok, std::to_string(instances) + " instances at p = 3 (four with nontrivial minus part), max tail bound " + fmt(worst_tail)};
}

}  // namespace

int main(int argc, char** argv)
{
    bool slow = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--slow") == 0) slow = true;

    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
        std::fflush(stdout);
    };

    report(1, "subspace law", subspace_law);
    report(2, "character-sum identity", character_sum_identity);
    report(3, "4-rank realization", rank4_realization);
    report(4, "combinatorial identity", [&] { return combinatorial_identity(slow); });
    report(5, "moment closed form", moment_closed_form);
    report(6, "moment inversion", inversion);
    EmpiricalRun run{};
    bool have_run = false;
    auto ensure_run = [&] {
        if (!have_run) run = empirical_run();
        have_run = true;
    };
    report(7, "empirical moments", [&] {
        ensure_run();
        return empirical_moments(run);
    });
    report(8, "empirical distribution", [&] {
        ensure_run();
        return empirical_distribution(run);
    });
    report(9, "ray class oracle agreement", ray_oracle);
    report(10, "formula evaluators", evaluators);
    report(11, "p-torsion average", prop_just);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
