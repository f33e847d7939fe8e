#pragma once

#include "rk4/arith.hpp"
#include "rk4/measures.hpp"
#include "rk4/specialdiv.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rk4 {

struct ExperimentConfig {
    u64 X = 0;
    u64 q = 4;
    u64 a = 3;
    u64 n1 = 1;
    u64 n2 = 1;
    std::vector<KVector> kvectors;  // keyed by character coordinates of TargetGroup(n1, n2)
    unsigned shards = 1;
    u64 block_size = 1 << 18;

    // Checks 4 n1 n2 | q, a = 3 mod 4, gcd(a, q) = 1, a square mod n1, a non-square mod each prime of n2.
    void validate() const;
    TargetGroup target() const { return TargetGroup(n1, n2); }
    // Canonical text used for checkpoint identity.
    std::string canonical() const;
    u64 block_count() const;
};

// Exact running sums of prod m_chi^{k_chi}. Every m_chi is a power of two, so each sum is kept as
// a histogram of exponents: sum = sum_e count[e] 2^e.
class MomentAccumulator {
public:
    MomentAccumulator() = default;
    explicit MomentAccumulator(std::size_t kcount) : hist_(kcount) {}

    void add(const std::vector<int>& log2_values);
    void merge(const MomentAccumulator& other);

    u64 count() const { return n_; }
    std::size_t kcount() const { return hist_.size(); }
    BigInt sum(std::size_t i) const;
    BigInt sum_of_squares(std::size_t i) const;
    Rational mean(std::size_t i) const;

    bool operator==(const MomentAccumulator&) const = default;

private:
    friend struct ExperimentState;
    u64 n_ = 0;
    std::vector<std::map<int, u64>> hist_;
};

using DistributionKey = std::pair<int, Subspace>;

class DistributionAccumulator {
public:
    void add(int dim, const Subspace& image) { ++counts_[{dim, image}]; }
    void merge(const DistributionAccumulator& other);
    u64 total() const;
    const std::map<DistributionKey, u64>& counts() const { return counts_; }

    bool operator==(const DistributionAccumulator&) const = default;

private:
    friend struct ExperimentState;
    std::map<DistributionKey, u64> counts_;
};

struct AuditStats {
    u64 checked = 0;
    u64 failures = 0;
    void merge(const AuditStats& o)
    {
        checked += o.checked;
        failures += o.failures;
    }
    bool operator==(const AuditStats&) const = default;
};

// Accumulated state of a partially or fully processed experiment.
struct ExperimentState {
    MomentAccumulator moments;
    DistributionAccumulator distribution;
    AuditStats audit;
    std::set<u64> completed_blocks;

    void merge(const ExperimentState& other);
    std::string serialize() const;
    static ExperimentState deserialize(const std::string& text);
    bool operator==(const ExperimentState&) const = default;
};

// Processes one block of the D-range into a fresh state.
ExperimentState process_block(const ExperimentConfig& cfg, const SpfTable& table, u64 block);

// Runs all blocks not yet in `state.completed_blocks` with cfg.shards worker threads. The
// callback (if any) is invoked under a lock after each finished block with the merged state.
ExperimentState run_blocks(const ExperimentConfig& cfg, ExperimentState state,
                           const std::function<void(const ExperimentState&)>& on_block = {});

struct MomentRow {
    KVector k;
    Rational empirical;
    Rational predicted;
    double abs_gap;
    double rel_gap;
};

struct DistributionRow {
    int dim;
    Subspace image;
    u64 count;
    double freq;
    Mass predicted;
};

struct EmpiricalReport {
    u64 N = 0;
    std::vector<MomentRow> moments;
    std::vector<DistributionRow> distribution;
    AuditStats audit;
};

EmpiricalReport build_report(const ExperimentConfig& cfg, const ExperimentState& state);

// Full run: validate, process all blocks, build the report.
EmpiricalReport run_experiment(const ExperimentConfig& cfg);

struct JointCell {
    int j1;
    int j2;
    u64 count;
    double freq;
    Mass predicted;
};

struct JointReport {
    u64 N = 0;
    u64 skipped_type = 0;
    u64 skipped_not_strongly_typed = 0;
    std::vector<JointCell> cells;
};

// Joint (rk4 Cl(K), rk4 Cl(K,c)) frequencies over D in the configured progression whose ring of
// conductor c has the given type, using j2 = j1 + rk2(W_R) - rank(phi) on strongly typed D.
JointReport empirical_joint_4rank(const ExperimentConfig& cfg, const RingType& ring);

// Exponent vectors index characters in a fixed order; C_n for all n with |n|_1 <= coverage.
struct MomentTable {
    int characters = 1;
    std::map<std::vector<int>, long double> values;
    // When positive, C_n <= C_0 2^{support_bound |n|_1} (finite-support synthetic tables);
    // otherwise the bound C_n <= 2^{|n|_1} N2(|n|_1) valid for predicted tables.
    int support_bound = 0;

    long double at(const std::vector<int>& n) const;
};

// Exact predicted table over the given dual dimension: characters ordered by coordinates.
MomentTable predicted_moment_table(int ambient, int max_total);

struct InversionResult {
    std::map<std::vector<int>, long double> masses;  // x(m) for m in [0, box)^characters
    long double residual_bound = 0;
    long double coefficient_check = 0;  // max relative gap between series and closed-form a_n
};

// Taylor coefficients of F(t) = prod_{n >= 0} (1 - t 2^{-n}), by series multiplication.
std::vector<long double> f_coefficients(int degree);
// Same coefficients from the closed form (-1)^n 2^{-n(n-1)/2} / prod_{i<=n} (1 - 2^{-i}).
std::vector<long double> f_coefficients_closed(int degree);

InversionResult invert_moments(const MomentTable& table, int box, int trunc, long double tolerance = 1e-8L);

}  // namespace rk4
