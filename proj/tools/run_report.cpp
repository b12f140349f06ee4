#include "run_report.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace mcdist::cli {

RunReport::RunReport(std::vector<std::string> argv) : argv_(std::move(argv)) {}

void RunReport::add_input(const std::filesystem::path& path) {
    nlohmann::ordered_json entry;
    entry["path"] = path.generic_string();
    const std::string digest = sha256_file(path);
    entry["sha256"] = digest.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(digest);
    inputs_.push_back(std::move(entry));
}

void RunReport::add_timing(const std::string& stage, double ms) {
    // repeated stages accumulate
    double prev = timings_.contains(stage) ? timings_[stage].get<double>() : 0.0;
    timings_[stage] = prev + ms;
}

void RunReport::warn(const std::string& text) { warnings_.push_back(text); }

std::string RunReport::to_json(int exit_code) const {
    nlohmann::ordered_json j;
    j["schema"] = "mcdist.report/1";
    j["command"] = argv_;
    j["seed"] = seed_;
    j["inputs"] = inputs_;
    j["timings_ms"] = timings_;
    j["result"] = result_;
    j["warnings"] = warnings_;
    j["exit_code"] = exit_code;
    if (!error_.empty()) j["error"] = error_;
    return j.dump(1) + "\n";
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);

    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

}  // namespace mcdist::cli
