#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace kruns::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2 };

using Cell = std::variant<std::int64_t, double, std::string>;

// A table of results plus the configuration that produced it.
struct Report {
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    // Fixed decimals used for double cells of a column in CSV; rendering only.
    std::map<std::string, int> precision;

    bool operator==(const Report& o) const {
        return config == o.config && columns == o.columns && rows == o.rows;
    }
};

inline constexpr int kSchemaVersion = 1;

std::string to_csv(const Report& r);
std::string to_json(const Report& r);
// Throws std::invalid_argument on malformed input or an unknown schema.
Report report_from_json(std::string_view text);

// Six-decimal fixed rendering used for bound cells.
std::string format_fixed(double v, int decimals);

struct VerifyOptions {
    long max_n = 12;
    bool waiting = false;
    bool inject_fault = false;
    std::uint64_t seed = 1;
    std::uint64_t trials = 20000;
};

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;  // first failing cell, or a short summary
};

std::vector<CheckResult> run_verify_suite(const VerifyOptions& opts);

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kruns::cli
