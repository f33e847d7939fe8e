#include "checkpoint.hpp"

#include <json.hpp>
#include <openssl/evp.h>
#include <openssl/sha.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rk4::cli {

std::string sha256_hex(const std::string& data)
{
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
    std::ostringstream os;
    for (unsigned char b : digest) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
    return os.str();
}

std::string base64_encode(const std::string& data)
{
    std::vector<unsigned char> out(4 * ((data.size() + 2) / 3) + 1);
    int n = EVP_EncodeBlock(out.data(), reinterpret_cast<const unsigned char*>(data.data()), static_cast<int>(data.size()));
    return std::string(reinterpret_cast<char*>(out.data()), static_cast<std::size_t>(n));
}

std::string base64_decode(const std::string& text)
{
    if (text.size() % 4 != 0) throw std::invalid_argument("checkpoint: malformed base64 state");
    std::vector<unsigned char> out(3 * (text.size() / 4) + 1);
    int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
    if (n < 0) throw std::invalid_argument("checkpoint: malformed base64 state");
    std::size_t pad = 0;
    if (!text.empty() && text.back() == '=') ++pad;
    if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
    return std::string(reinterpret_cast<char*>(out.data()), static_cast<std::size_t>(n) - pad);
}

void write_checkpoint(const std::string& path, const ExperimentConfig& cfg, const ExperimentState& state)
{
    nlohmann::json j;
    j["config_hash"] = sha256_hex(cfg.canonical());
    j["completed_blocks"] = std::vector<u64>(state.completed_blocks.begin(), state.completed_blocks.end());
    j["accumulator_state"] = base64_encode(state.serialize());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write checkpoint " + tmp);
        out << j.dump() << '\n';
    }
    std::filesystem::rename(tmp, path);
}

std::optional<ExperimentState> read_checkpoint(const std::string& path, const ExperimentConfig& cfg)
{
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("checkpoint " + path + " is not valid JSON: " + e.what());
    }
    if (!j.contains("config_hash") || !j.contains("completed_blocks") || !j.contains("accumulator_state"))
        throw std::invalid_argument("checkpoint " + path + " is missing required fields");
    if (j["config_hash"].get<std::string>() != sha256_hex(cfg.canonical()))
        throw std::invalid_argument("checkpoint " + path + " was written for a different configuration");
    ExperimentState st = ExperimentState::deserialize(base64_decode(j["accumulator_state"].get<std::string>()));
    auto blocks = j["completed_blocks"].get<std::vector<u64>>();
    if (std::set<u64>(blocks.begin(), blocks.end()) != st.completed_blocks)
        throw std::invalid_argument("checkpoint " + path + ": completed_blocks disagrees with the accumulator state");
    return st;
}

}  // namespace rk4::cli
