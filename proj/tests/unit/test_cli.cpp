#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kruns/cli.hpp"

using namespace kruns::cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "kruns");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

bool has_line(const std::string& text, const std::string& line) {
    for (const auto& l : lines(text))
        if (l == line) return true;
    return false;
}

}  // namespace

TEST_CASE("pmf") {
    auto r = invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "3", "--p", "0.5", "--format", "csv"});
    CHECK(r.code == kOk);
    CHECK(lines(r.out) == std::vector<std::string>{"n,p,m,probability", "3,0.5,0,0.875", "3,0.5,1,0.125"});

    auto single = invoke({"pmf", "--k1", "3", "--k2", "4", "--n", "7", "--q", "0.11"});
    CHECK(lines(single.out) == std::vector<std::string>{"n,p,m,probability", "7,0.89,0,1"});

    for (const char* method : {"embedding", "closed", "brute"}) {
        auto m = invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "3", "--p", "0.5", "--method", method});
        CHECK(m.out == r.out);
    }
    auto exact = invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "3", "--p", "1/2", "--mode", "exact"});
    CHECK(has_line(exact.out, "3,0.5,1,0.125,1/8"));

    auto mc = invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "3", "--p", "0.5", "--method", "monte-carlo", "--trials", "500"});
    CHECK(mc.code == kOk);
    CHECK(lines(mc.out).front() == "n,p,m,probability,std_error");
    CHECK(mc.out == invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "3", "--p", "0.5", "--method", "monte-carlo", "--trials", "500", "--seed", "1"}).out);
}

TEST_CASE("usage errors exit 2") {
    CHECK(invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "-1", "--p", "0.5"}).code == kUsage);
    CHECK(invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "3"}).code == kUsage);
    CHECK(invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "3", "--p", "0.5", "--q", "0.5"}).code == kUsage);
    CHECK(invoke({"pmf", "--k1", "0", "--k2", "1", "--n", "3", "--p", "0.5"}).code == kUsage);
    CHECK(invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "3", "--p", "1.5"}).code == kUsage);
    CHECK(invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "3", "--p", "pi"}).code == kUsage);
    CHECK(invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "30", "--p", "0.5", "--method", "brute"}).code == kUsage);
    CHECK(invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "70", "--p", "0.5", "--method", "closed"}).code == kUsage);
    CHECK(invoke({"bounds", "--family", "poisson", "--two", "--k1", "1", "--k2", "1", "--n", "30", "--p", "0.5"}).code == kUsage);
    CHECK(invoke({"table", "--preset", "other"}).code == kUsage);
    CHECK(invoke({}).code == kUsage);
    auto bad = invoke({"frobnicate"});
    CHECK(bad.code == kUsage);
    CHECK_FALSE(bad.err.empty());
    CHECK(invoke({"--help"}).code == kOk);
}

TEST_CASE("bounds") {
    auto po = invoke({"bounds", "--family", "poisson", "--one", "--k1", "3", "--k2", "4", "--n", "50", "--q", "0.11"});
    REQUIRE(po.code == kOk);
    auto rows = lines(po.out);
    CHECK(rows[0] == "family,parameters,k1,k2,n,p,q,matched_1,matched_2,bound,status,note");
    CHECK(rows[1].find(",0.233227,ok,") != std::string::npos);

    auto pb = invoke({"bounds", "--family", "pseudo-binomial", "--two", "--k1", "3", "--k2", "4", "--n", "50", "--q", "0.11"});
    CHECK(lines(pb.out)[1].find(",NA(s_nk),") != std::string::npos);
    auto nb = invoke({"bounds", "--family", "negative-binomial", "--two", "--k1", "4", "--k2", "5", "--n", "250", "--q", "0.14"});
    CHECK(lines(nb.out)[1].find(",NA(s_nk),") != std::string::npos);

    auto blocked = invoke({"bounds", "--family", "negative-binomial", "--two", "--k1", "3", "--k2", "4", "--n", "50", "--q", "0.11"});
    CHECK(lines(blocked.out)[1].find(",BLOCKED(c7),") != std::string::npos);
    auto assumed = invoke({"bounds", "--family", "negative-binomial", "--two", "--k1", "3", "--k2", "4", "--n", "50", "--q", "0.11", "--assume-c7"});
    CHECK(lines(assumed.out)[1].find(",ASSUMED(c7),") != std::string::npos);

    auto grid = invoke({"bounds", "--family", "poisson", "--k1", "3", "--k2", "4", "--n", "50,60", "--q", "0.11,0.12"});
    CHECK(lines(grid.out).size() == 5);

    auto fixed = invoke({"bounds", "--family", "pseudo-binomial", "--k1", "3", "--k2", "4", "--n", "50", "--q", "0.11", "--convention", "fixed-alpha"});
    CHECK(fixed.code == kUsage);
}

TEST_CASE("table preset") {
    auto t = invoke({"table", "--preset", "paper-table-1"});
    REQUIRE(t.code == kOk);
    auto rows = lines(t.out);
    CHECK(rows.size() == 61);
    CHECK(has_line(t.out, "one,poisson,3,4,50,0.11,0.233227,ok"));
    CHECK(has_line(t.out, "one,poisson,4,5,250,0.12,0.037287,ok"));
    CHECK(has_line(t.out, "two,pseudo-binomial,3,4,50,0.11,NA(s_nk),NA(s_nk)"));
    CHECK(has_line(t.out, "two,negative-binomial,3,4,50,0.11,BLOCKED(c7),BLOCKED(c7)"));
    auto assumed = invoke({"table", "--preset", "paper-table-1", "--assume-c7"});
    CHECK(assumed.out.find("ASSUMED(c7)") != std::string::npos);
    CHECK(assumed.out.find("BLOCKED(c7)") == std::string::npos);
}

TEST_CASE("JSON output round-trips") {
    const std::vector<std::vector<std::string>> commands = {
        {"pmf", "--k1", "1", "--k2", "2", "--n", "9,10", "--p", "0.3", "--mode", "exact"},
        {"moments", "--k1", "1", "--k2", "1", "--n", "12", "--p", "0.5", "--j-max", "3"},
        {"waiting", "--k1", "1", "--k2", "1", "--p", "1/2", "--r", "1,2", "--m-max", "12"},
        {"waiting", "--k1", "2", "--k2", "1", "--p", "1/2", "--r", "2", "--moments", "2", "--mode", "exact"},
        {"bounds", "--family", "negative-binomial", "--two", "--k1", "3", "--k2", "4", "--n", "50,60", "--q", "0.11,0.13"},
        {"table", "--preset", "paper-table-1", "--assume-c7"},
    };
    for (auto args : commands) {
        args.push_back("--format");
        args.push_back("json");
        auto r = invoke(args);
        REQUIRE(r.code == kOk);
        auto parsed = report_from_json(r.out);
        CHECK(to_json(parsed) == r.out);
        CHECK(report_from_json(to_json(parsed)) == parsed);
        CHECK(r.out.find("\"schema\": 1") != std::string::npos);
    }
}

TEST_CASE("report serialization") {
    Report rep;
    rep.config["command"] = "x";
    rep.columns = {"a", "b", "c"};
    rep.rows = {{std::int64_t{1}, 0.1, std::string("plain")}, {std::int64_t{-4}, 1e-300, std::string("has,comma \"q\"")}};
    CHECK(report_from_json(to_json(rep)) == rep);
    CHECK(to_csv(rep) == "a,b,c\n1,0.1,plain\n-4,1e-300,\"has,comma \"\"q\"\"\"\n");
    rep.precision["b"] = 6;
    CHECK(lines(to_csv(rep))[1] == "1,0.100000,plain");
    CHECK(format_fixed(0.0617869346, 6) == "0.061787");

    CHECK_THROWS_AS(report_from_json("{"), std::invalid_argument);
    CHECK_THROWS_AS(report_from_json(R"({"schema": 2, "config": {}, "columns": [], "rows": []})"), std::invalid_argument);
}

TEST_CASE("verify") {
    auto ok = invoke({"verify", "--max-n", "9", "--waiting"});
    CHECK(ok.code == kOk);
    CHECK(ok.out.find("FAIL") == std::string::npos);
    CHECK(has_line(ok.out, "waiting_pgf_at_one,PASS,27 cases"));

    auto bad = invoke({"verify", "--max-n", "9", "--inject-fault"});
    CHECK(bad.code == kVerifyFailed);
    CHECK(bad.out.find("pmf_four_way,FAIL,k1=") != std::string::npos);
    CHECK(invoke({"verify", "--max-n", "40"}).code == kUsage);
}

TEST_CASE("output file") {
    const std::string path = "test_cli_output.csv";
    auto r = invoke({"pmf", "--k1", "1", "--k2", "1", "--n", "3", "--p", "0.5", "--output", path});
    CHECK(r.code == kOk);
    CHECK(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == "n,p,m,probability\n3,0.5,0,0.875\n3,0.5,1,0.125\n");
    std::remove(path.c_str());
}
