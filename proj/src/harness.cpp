#include "rk4/harness.hpp"

#include "rk4/rayoracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rk4 {

namespace {

u64 splitmix64(u64 x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

bool audit_selected(u64 D)
{
    return splitmix64(D) % 100 == 0;
}

bool orthogonal_to(std::uint64_t chi, const Subspace& image)
{
    for (std::uint64_t b : image.basis())
        if (dot(chi, b)) return false;
    return true;
}

}  // namespace

void ExperimentConfig::validate() const
{
    if (n1 == 0 || n2 == 0 || n1 % 2 == 0 || n2 % 2 == 0) throw std::invalid_argument("n1 and n2 must be odd and positive");
    if (gcd_u64(n1, n2) != 1) throw std::invalid_argument("n1 and n2 must be coprime");
    FactoredOdd f1 = factor_odd_squarefree(n1);
    FactoredOdd f2 = factor_odd_squarefree(n2);
    if (q == 0 || q % (4 * n1 * n2) != 0) throw std::invalid_argument("4*n1*n2 does not divide q");
    if (a % 4 != 3) throw std::invalid_argument("a is not 3 mod 4");
    if (gcd_u64(a, q) != 1) throw std::invalid_argument("gcd(a, q) != 1");
    for (u64 p : f1.primes)
        if (jacobi(static_cast<i64>(a), p) != 1)
            throw std::invalid_argument("a is not a square mod n1 (fails at " + std::to_string(p) + ")");
    for (u64 p : f2.primes)
        if (jacobi(static_cast<i64>(a), p) != -1)
            throw std::invalid_argument("a is a square mod " + std::to_string(p) + ", which divides n2");
    if (shards == 0) throw std::invalid_argument("shards must be positive");
    if (block_size == 0) throw std::invalid_argument("block size must be positive");
    int dim = TargetGroup(n1, n2).dimension();
    for (const KVector& k : kvectors)
        for (const auto& [chi, e] : k) {
            if (chi >= (1ULL << dim)) throw std::invalid_argument("k-vector names a character outside the target group");
            if (e < 0) throw std::invalid_argument("k-vector exponents must be non-negative");
        }
}

std::string ExperimentConfig::canonical() const
{
    std::ostringstream os;
    os << "X=" << X << ";q=" << q << ";a=" << a << ";n1=" << n1 << ";n2=" << n2 << ";block=" << block_size << ";k=";
    for (const KVector& k : kvectors) {
        os << "[";
        for (const auto& [chi, e] : k) os << chi << ":" << e << ",";
        os << "]";
    }
    return os.str();
}

u64 ExperimentConfig::block_count() const
{
    return X == 0 ? 0 : (X + block_size - 1) / block_size;
}

void MomentAccumulator::add(const std::vector<int>& log2_values)
{
    if (log2_values.size() != hist_.size()) throw std::invalid_argument("moment accumulator: k-vector count mismatch");
    ++n_;
    for (std::size_t i = 0; i < hist_.size(); ++i) ++hist_[i][log2_values[i]];
}

void MomentAccumulator::merge(const MomentAccumulator& other)
{
    if (other.n_ == 0 && other.hist_.empty()) return;
    if (n_ == 0 && hist_.empty()) {
        *this = other;
        return;
    }
    if (other.hist_.size() != hist_.size()) throw std::invalid_argument("moment accumulator merge: configuration mismatch");
    n_ += other.n_;
    for (std::size_t i = 0; i < hist_.size(); ++i)
        for (const auto& [e, c] : other.hist_[i]) hist_[i][e] += c;
}

BigInt MomentAccumulator::sum(std::size_t i) const
{
    BigInt total = 0;
    for (const auto& [e, c] : hist_.at(i)) total += BigInt(c) << e;
    return total;
}

BigInt MomentAccumulator::sum_of_squares(std::size_t i) const
{
    BigInt total = 0;
    for (const auto& [e, c] : hist_.at(i)) total += BigInt(c) << (2 * e);
    return total;
}

Rational MomentAccumulator::mean(std::size_t i) const
{
    if (n_ == 0) throw std::domain_error("mean of an empty accumulator");
    return Rational(sum(i), BigInt(n_));
}

void DistributionAccumulator::merge(const DistributionAccumulator& other)
{
    for (const auto& [key, c] : other.counts_) counts_[key] += c;
}

u64 DistributionAccumulator::total() const
{
    u64 t = 0;
    for (const auto& kv : counts_) t += kv.second;
    return t;
}

void ExperimentState::merge(const ExperimentState& other)
{
    for (u64 b : other.completed_blocks)
        if (completed_blocks.count(b)) throw std::invalid_argument("merge: block " + std::to_string(b) + " present in both states");
    moments.merge(other.moments);
    distribution.merge(other.distribution);
    audit.merge(other.audit);
    completed_blocks.insert(other.completed_blocks.begin(), other.completed_blocks.end());
}

std::string ExperimentState::serialize() const
{
    std::ostringstream os;
    os << moments.n_ << ' ' << moments.hist_.size();
    for (const auto& h : moments.hist_) {
        os << ' ' << h.size();
        for (const auto& [e, c] : h) os << ' ' << e << ' ' << c;
    }
    os << ' ' << distribution.counts_.size();
    for (const auto& [key, c] : distribution.counts_) {
        os << ' ' << key.first << ' ' << key.second.ambient() << ' ' << key.second.dim();
        for (std::uint64_t b : key.second.basis()) os << ' ' << b;
        os << ' ' << c;
    }
    os << ' ' << audit.checked << ' ' << audit.failures;
    os << ' ' << completed_blocks.size();
    for (u64 b : completed_blocks) os << ' ' << b;
    return os.str();
}

ExperimentState ExperimentState::deserialize(const std::string& text)
{
    std::istringstream is(text);
    auto next = [&is]() -> long long {
        long long v;
        if (!(is >> v)) throw std::invalid_argument("malformed accumulator state");
        return v;
    };
    auto next_count = [&next]() -> std::size_t {
        long long v = next();
        if (v < 0 || v > (1LL << 40)) throw std::invalid_argument("malformed accumulator state");
        return static_cast<std::size_t>(v);
    };
    ExperimentState s;
    s.moments.n_ = next_count();
    s.moments.hist_.resize(next_count());
    for (auto& h : s.moments.hist_) {
        std::size_t len = next_count();
        for (std::size_t i = 0; i < len; ++i) {
            int e = static_cast<int>(next());
            h[e] = next_count();
        }
    }
    std::size_t dlen = next_count();
    for (std::size_t i = 0; i < dlen; ++i) {
        int dim = static_cast<int>(next());
        int ambient = static_cast<int>(next());
        std::size_t nb = next_count();
        std::vector<std::uint64_t> basis;
        for (std::size_t j = 0; j < nb; ++j) basis.push_back(static_cast<std::uint64_t>(next()));
        Subspace sub(ambient, basis);
        if (sub.basis() != basis) throw std::invalid_argument("accumulator state has a non-canonical subspace key");
        s.distribution.counts_[{dim, sub}] = next_count();
    }
    s.audit.checked = next_count();
    s.audit.failures = next_count();
    std::size_t blen = next_count();
    for (std::size_t i = 0; i < blen; ++i) s.completed_blocks.insert(next_count());
    std::string rest;
    if (is >> rest) throw std::invalid_argument("trailing data in accumulator state");
    return s;
}

ExperimentState process_block(const ExperimentConfig& cfg, const SpfTable& table, u64 block)
{
    const TargetGroup tg = cfg.target();
    const int dim = tg.dimension();
    const std::vector<Character> chars = tg.characters();
    ExperimentState st;
    st.moments = MomentAccumulator(cfg.kvectors.size());
    st.completed_blocks.insert(block);
    const u64 lo = block * cfg.block_size + 1;
    const u64 hi = std::min(cfg.X, (block + 1) * cfg.block_size);
    if (lo > hi) return st;

    std::vector<int> exps(chars.size());
    std::vector<int> logs(cfg.kvectors.size());
    for (const FactoredOdd& D : SquarefreeRange(table, hi, cfg.a, cfg.q, lo)) {
        Subspace s = special_divisors(D);
        std::vector<std::uint64_t> gens;
        for (std::uint64_t b : s.basis()) gens.push_back(tg.phi(static_cast<i64>(divisor_value(D, b))));
        Subspace image(dim, gens);
        for (std::size_t i = 0; i < chars.size(); ++i) exps[i] = s.dim() - (orthogonal_to(chars[i].coords, image) ? 0 : 1);
        for (std::size_t i = 0; i < cfg.kvectors.size(); ++i) {
            int e = 0;
            for (const auto& [chi, k] : cfg.kvectors[i]) e += k * exps[chi];
            logs[i] = e;
        }
        st.moments.add(logs);
        st.distribution.add(s.dim() - 1, image);

        if (audit_selected(D.value)) {
            ++st.audit.checked;
            const i64 a1 = a_chi(D, tg, tg.trivial());
            for (std::size_t i = 0; i < chars.size(); ++i) {
                const int fast = 1 << exps[i];
                const int slow = m_chi(D, s, tg, chars[i]);
                const i64 lhs = (i64{1} << (D.omega() + 1)) * fast;
                const i64 rhs = a1 + a_chi(D, tg, chars[i]);
                if (fast != slow || lhs != rhs) {
                    ++st.audit.failures;
                    break;
                }
            }
        }
    }
    return st;
}

ExperimentState run_blocks(const ExperimentConfig& cfg, ExperimentState state,
                           const std::function<void(const ExperimentState&)>& on_block)
{
    cfg.validate();
    if (state.moments.kcount() == 0 && state.moments.count() == 0) state.moments = MomentAccumulator(cfg.kvectors.size());
    if (state.moments.kcount() != cfg.kvectors.size()) throw std::invalid_argument("resumed state does not match the k-vector list");
    std::vector<u64> pending;
    for (u64 b = 0; b < cfg.block_count(); ++b)
        if (!state.completed_blocks.count(b)) pending.push_back(b);
    for (u64 b : state.completed_blocks)
        if (b >= cfg.block_count()) throw std::invalid_argument("resumed state contains a block outside the range");
    if (pending.empty()) return state;

    const SpfTable table(cfg.X);
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr failure;
    auto worker = [&]() {
        try {
            for (std::size_t i = next++; i < pending.size(); i = next++) {
                ExperimentState part = process_block(cfg, table, pending[i]);
                std::lock_guard<std::mutex> lock(mu);
                state.merge(part);
                if (on_block) on_block(state);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!failure) failure = std::current_exception();
            next = pending.size();
        }
    };
    const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(cfg.shards, pending.size()));
    std::vector<std::thread> threads;
    for (unsigned t = 1; t < nthreads; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
    return state;
}

EmpiricalReport build_report(const ExperimentConfig& cfg, const ExperimentState& state)
{
    EmpiricalReport rep;
    rep.N = state.moments.count();
    rep.audit = state.audit;
    if (rep.N == 0) return rep;
    const int dim = cfg.target().dimension();
    for (std::size_t i = 0; i < cfg.kvectors.size(); ++i) {
        MomentRow row;
        row.k = cfg.kvectors[i];
        row.empirical = state.moments.mean(i);
        row.predicted = predicted_mixed_moment(row.k, dim);
        Rational gap = row.empirical - row.predicted;
        if (gap < 0) gap = -gap;
        row.abs_gap = to_double(gap);
        row.rel_gap = row.predicted == 0 ? std::numeric_limits<double>::infinity() : to_double(gap / row.predicted);
        rep.moments.push_back(row);
    }
    for (const auto& [key, c] : state.distribution.counts()) {
        DistributionRow row{key.first, key.second, c, to_double(Rational(BigInt(c), BigInt(rep.N))),
                            predicted_pair_distribution(key.first, key.second)};
        rep.distribution.push_back(row);
    }
    return rep;
}

EmpiricalReport run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    return build_report(cfg, run_blocks(cfg, ExperimentState{}));
}

JointReport empirical_joint_4rank(const ExperimentConfig& cfg, const RingType& ring)
{
    cfg.validate();
    if (cfg.n1 != ring.n1() || cfg.n2 != ring.n2())
        throw std::invalid_argument("configuration (n1, n2) does not match the ring type");
    const u64 c = ring.conductor();
    const TargetGroup tg = cfg.target();
    const int w = ring.w_rank2();
    const SpfTable table(cfg.X);
    std::map<std::pair<int, int>, u64> counts;
    JointReport rep;
    int max_j1 = 3;
    for (const FactoredOdd& D : SquarefreeRange(table, cfg.X, cfg.a, cfg.q, 1)) {
        if (D.value <= 3) {
            ++rep.skipped_type;
            continue;
        }
        if (gcd_u64(D.value, c) != 1) {
            ++rep.skipped_type;
            continue;
        }
        RingType actual = detect_ring_type(D, c);
        bool same = actual.primes().size() == ring.primes().size();
        for (std::size_t i = 0; same && i < ring.primes().size(); ++i)
            same = actual.primes()[i].l == ring.primes()[i].l && actual.primes()[i].split == ring.primes()[i].split;
        if (!same) {
            ++rep.skipped_type;
            continue;
        }
        if (!strongly_type_check(D, c)) {
            ++rep.skipped_not_strongly_typed;
            continue;
        }
        Subspace s = special_divisors(D);
        std::vector<std::uint64_t> gens;
        for (std::uint64_t b : s.basis()) gens.push_back(tg.phi(static_cast<i64>(divisor_value(D, b))));
        const int rank_phi = Subspace(tg.dimension(), gens).dim();
        const int j1 = s.dim() - 1;
        ++counts[{j1, j1 + w - rank_phi}];
        ++rep.N;
        max_j1 = std::max(max_j1, j1);
    }
    for (int j1 = 0; j1 <= max_j1; ++j1) {
        for (int j2 = 0; j2 <= j1 + w; ++j2) {
            auto it = counts.find({j1, j2});
            u64 cnt = it == counts.end() ? 0 : it->second;
            Mass m = predicted_joint_4rank(j1, j2, ring);
            if (cnt == 0 && m.coefficient == 0) continue;
            double freq = rep.N == 0 ? 0.0 : static_cast<double>(cnt) / static_cast<double>(rep.N);
            rep.cells.push_back({j1, j2, cnt, freq, m});
        }
    }
    return rep;
}

long double MomentTable::at(const std::vector<int>& n) const
{
    auto it = values.find(n);
    if (it == values.end()) throw std::invalid_argument("insufficient table coverage: missing moment entry");
    return it->second;
}

namespace {

// All n in N^c with |n|_1 <= total, in lexicographic order.
std::vector<std::vector<int>> exponent_vectors(int c, int total)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur(c, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == c) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[i] = v;
            rec(i + 1, left - v);
        }
        cur[i] = 0;
    };
    rec(0, total);
    return out;
}

// F(2^{-e}) = prod_{n >= 0} (1 - 2^{-e-n}) for e >= 1.
long double f_at_power(int e)
{
    long double v = 1;
    for (int n = 0; n < 200; ++n) v *= 1 - std::ldexp(1.0L, -e - n);
    return v;
}

// log2 N2(s) for s = 0..smax, via N2(n+1) = 2 N2(n) + (2^n - 1) N2(n-1).
std::vector<long double> log2_n2_table(int smax)
{
    std::vector<long double> L(smax + 2, 0);
    L[0] = 0;
    if (smax >= 1) L[1] = 1;
    for (int n = 1; n + 1 <= smax; ++n) {
        long double x = L[n] - L[n - 1] - n + 1;
        L[n + 1] = L[n - 1] + n + std::log2(std::exp2(x) + 1 - std::ldexp(1.0L, -n));
    }
    return L;
}

}  // namespace

MomentTable predicted_moment_table(int ambient, int max_total)
{
    if (ambient < 0 || ambient > 3) throw std::invalid_argument("predicted moment table: ambient dimension must be in [0, 3]");
    MomentTable t;
    t.characters = 1 << ambient;
    for (const auto& n : exponent_vectors(t.characters, max_total)) {
        KVector k;
        for (int i = 0; i < t.characters; ++i)
            if (n[i]) k[static_cast<std::uint64_t>(i)] = n[i];
        t.values[n] = to_long_double(predicted_mixed_moment(k, ambient));
    }
    return t;
}

std::vector<long double> f_coefficients(int degree)
{
    std::vector<long double> a(degree + 1, 0);
    a[0] = 1;
    for (int i = 0; i <= degree + 80; ++i) {
        const long double r = std::ldexp(1.0L, -i);
        for (int j = degree; j >= 1; --j) a[j] -= r * a[j - 1];
    }
    return a;
}

std::vector<long double> f_coefficients_closed(int degree)
{
    std::vector<long double> a(degree + 1, 0);
    long double denom = 1;
    for (int n = 0; n <= degree; ++n) {
        if (n > 0) denom *= 1 - std::ldexp(1.0L, -n);
        long double mag = std::ldexp(1.0L, -(n * (n - 1) / 2)) / denom;
        a[n] = (n % 2) ? -mag : mag;
    }
    return a;
}

InversionResult invert_moments(const MomentTable& table, int box, int trunc, long double tolerance)
{
    const int c = table.characters;
    if (c < 1 || c > 8) throw std::invalid_argument("invert_moments: character count must be in [1, 8]");
    if (box < 1) throw std::invalid_argument("invert_moments: box must be positive");
    if (trunc < 1) throw std::invalid_argument("invert_moments: truncation depth must be positive");
    InversionResult res;

    const int extra = 60;
    const std::vector<long double> a = f_coefficients(trunc);
    const std::vector<long double> closed = f_coefficients_closed(trunc + extra);
    for (int n = 0; n <= trunc; ++n)
        res.coefficient_check = std::max(res.coefficient_check, std::fabs(a[n] - closed[n]) / std::fabs(closed[n]));

    // Residual: sum over |n|_1 = s > trunc of |a_n| C_n 2^{-n.k} <= G(s) 2^{-s} A_s with k >= 1,
    // where A_s is the s-th coefficient of (sum |a_n| t^n)^c.
    const int smax = trunc + extra;
    std::vector<long double> mag(smax + 1);
    for (int n = 0; n <= smax; ++n) mag[n] = std::fabs(closed[n]);
    std::vector<long double> conv = mag;
    for (int r = 1; r < c; ++r) {
        std::vector<long double> nxt(smax + 1, 0);
        for (int i = 0; i <= smax; ++i)
            for (int j = 0; i + j <= smax; ++j) nxt[i + j] += conv[i] * mag[j];
        conv = nxt;
    }
    const std::vector<long double> log_n2 = log2_n2_table(smax);
    const long double c0 = table.at(std::vector<int>(c, 0));
    long double residual = 0;
    long double first_term = 0, last_term = 0;
    for (int s = trunc + 1; s <= smax; ++s) {
        long double log_growth = table.support_bound > 0
                                     ? std::log2(std::max(c0, 1.0L)) + static_cast<long double>(table.support_bound) * s
                                     : s + log_n2[s];
        long double term = conv[s] > 0 ? std::exp2(log_growth - s + std::log2(conv[s])) : 0;
        if (s == trunc + 1) first_term = term;
        last_term = term;
        residual += term;
    }
    if (!(last_term <= first_term * 1e-12L) && last_term > 0) residual = std::numeric_limits<long double>::infinity();
    res.residual_bound = residual;
    if (!(residual <= tolerance))
        throw std::runtime_error("invert_moments: residual above tolerance (bound " + std::to_string(static_cast<double>(residual)) + ")");

    const std::vector<std::vector<int>> ns = exponent_vectors(c, trunc);
    std::vector<long double> an(ns.size());
    std::vector<long double> cn(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        long double prod = 1;
        for (int v : ns[i]) prod *= a[v];
        an[i] = prod;
        cn[i] = table.at(ns[i]);
    }

    std::vector<long double> f_pow(box + 1, 1);
    for (int e = 1; e <= box; ++e) f_pow[e] = f_at_power(e);

    // Box points m in [0, box)^c in lexicographic order.
    std::vector<std::vector<int>> ms;
    {
        std::vector<int> cur(c, 0);
        while (true) {
            ms.push_back(cur);
            int i = c - 1;
            while (i >= 0 && ++cur[i] == box) cur[i--] = 0;
            if (i < 0) break;
        }
    }
    const long double pivot = std::pow(f_pow[1], c);
    for (const auto& m : ms) {
        std::vector<int> k(c);
        for (int i = 0; i < c; ++i) k[i] = m[i] + 1;
        long double lhs = 0;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            int dotnk = 0;
            for (int j = 0; j < c; ++j) dotnk += ns[i][j] * k[j];
            lhs += an[i] * cn[i] * std::ldexp(1.0L, -dotnk);
        }
        for (const auto& [prev, x] : res.masses) {
            bool below = true;
            for (int j = 0; j < c && below; ++j) below = prev[j] < k[j];
            if (!below) continue;
            long double f = 1;
            for (int j = 0; j < c; ++j) f *= f_pow[k[j] - prev[j]];
            lhs -= f * x;
        }
        res.masses[m] = lhs / pivot;
    }
    return res;
}

}  // namespace rk4
