#pragma once

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rk4::cli {

inline constexpr int exit_pass = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_falsified = 3;
inline constexpr int schema_version = 1;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Result {
    nlohmann::json body;
    int exit_code = exit_pass;
};

// Prints the result as JSON or as readable text.
void print_result(const Result& r, bool json);

Result cmd_special_divisors(std::uint64_t D);

Result cmd_predict_pair(std::uint64_t n1, std::uint64_t n2, int j, const std::string& image);
Result cmd_predict_joint(std::uint64_t c, const std::string& split, int j1, int j2);
Result cmd_predict_moment(std::uint64_t n1, std::uint64_t n2, const std::string& k);
Result cmd_predict_average(unsigned p, std::uint64_t c, const std::string& mode);

struct ExperimentOptions {
    std::string X;
    std::uint64_t q = 0;
    std::uint64_t a = 0;
    std::uint64_t n1 = 1;
    std::uint64_t n2 = 1;
    std::vector<std::string> k;
    unsigned shards = 1;
    std::uint64_t block_size = 1 << 18;
    std::string checkpoint;
    bool resume = false;
    std::string csv;
    bool omit_timing = false;
};
Result cmd_experiment(const ExperimentOptions& opt);

Result cmd_verify_combinatorics(int k, bool slow);
Result cmd_verify_prop_just(unsigned p, int max_rank, int plus, int minus);
Result cmd_verify_inversion();
Result cmd_verify_oracle(std::uint64_t Dmax, std::uint64_t c);

// Parses "1e6", "1000000" and similar into a positive integer bound.
std::uint64_t parse_bound(const std::string& s);

}  // namespace rk4::cli
