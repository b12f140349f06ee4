#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mcdist::cli {

/// Exit codes are part of the command-line contract.
enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kSolveFailed = 3,
    kUnsupported = 4,
    kAboveTolerance = 5,
};

/// Machine-readable record of one invocation, written to stderr with --json.
class RunReport {
  public:
    explicit RunReport(std::vector<std::string> argv);

    void add_input(const std::filesystem::path& path);
    void add_timing(const std::string& stage, double ms);
    void warn(const std::string& text);
    nlohmann::ordered_json& result() { return result_; }
    void set_seed(unsigned long long seed) { seed_ = seed; }
    void set_error(const std::string& text) { error_ = text; }

    std::string to_json(int exit_code) const;

  private:
    std::vector<std::string> argv_;
    nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
    nlohmann::ordered_json timings_ = nlohmann::ordered_json::object();
    nlohmann::ordered_json result_ = nlohmann::ordered_json::object();
    std::vector<std::string> warnings_;
    std::string error_;
    unsigned long long seed_ = 0;
};

/// Hex SHA-256 of a file's bytes; empty when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

/// Wall-clock milliseconds of one stage, added to the report on scope exit.
class StageTimer {
  public:
    StageTimer(RunReport& report, std::string stage)
        : report_(report), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        auto d = std::chrono::steady_clock::now() - start_;
        report_.add_timing(stage_, std::chrono::duration<double, std::milli>(d).count());
    }
    StageTimer(const StageTimer&) = delete;
    StageTimer& operator=(const StageTimer&) = delete;

  private:
    RunReport& report_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace mcdist::cli
