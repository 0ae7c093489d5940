#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "goalspot/kb_io.hpp"
#include "goalspot/service.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace goalspot;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args, const std::string& input = "") {
    args.insert(args.begin(), "goalspot");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::istringstream in(input);
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
    return {code, out.str(), err.str()};
}

std::string demo_kb() { return (fixtures::data_dir() / "demo_kb.json").string(); }
std::string demo_suite() { return (fixtures::data_dir() / "demo_smoke.tsv").string(); }

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    for (std::string l; std::getline(ss, l);) out.push_back(l);
    return out;
}

std::string temp_file(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path.string();
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, QueryPrintGolden) {
    auto r = run_cli({"query", "--kb", demo_kb(), "print"});
    EXPECT_EQ(r.code, cli::kExitOk);
    EXPECT_EQ(r.out, read_file(std::filesystem::path(GOALSPOT_GOLDEN_DIR) / "query_print.txt"));
    EXPECT_EQ(lines(r.out)[0].rfind("1\t", 0), 0u);
    EXPECT_NE(lines(r.out)[0].find("\tprint-document\t"), std::string::npos);
}

TEST(Cli, TopOneSingleLine) {
    auto r = run_cli({"query", "--kb", demo_kb(), "--top", "1", "create", "a", "chart"});
    EXPECT_EQ(r.code, 0);
    ASSERT_EQ(lines(r.out).size(), 1u);
    EXPECT_NE(r.out.find("create-chart"), std::string::npos);
}

TEST(Cli, MissingKb) {
    auto r = run_cli({"query", "--kb", "/no/such/kb.json", "print"});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, InvalidKbIsDataError) {
    auto path = temp_file("goalspot_bad_kb.json", R"({"goals":[],"nodes":[],"links":[]})");
    auto r = run_cli({"query", "--kb", path, "print"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("no-goals"), std::string::npos);
    r = run_cli({"validate", "--kb", path});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("no-goals"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({"query", "print"}).code, 2);
    EXPECT_EQ(run_cli({"query", "--kb", demo_kb(), "--top", "0", "print"}).code, 2);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, Validate) {
    auto r = run_cli({"validate", "--kb", demo_kb()});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("ok"), std::string::npos);
}

TEST(Cli, SmokeGate) {
    auto r = run_cli({"smoke", "--kb", demo_kb(), "--suite", demo_suite(), "--top", "5", "--min-rate", "0.99"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    r = run_cli({"smoke", "--kb", demo_kb(), "--suite", demo_suite(), "--min-rate", "1.01"});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, SmokeJson) {
    auto r = run_cli({"smoke", "--kb", demo_kb(), "--suite", demo_suite(), "--json"});
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["passed"], true);
    EXPECT_GE(j["cases"].get<int>(), 100);
}

TEST(Cli, SmokeMalformedLine) {
    auto suite = temp_file("goalspot_bad_suite.tsv", "print\tprint-document\nno tab on this line\n");
    auto r = run_cli({"smoke", "--kb", demo_kb(), "--suite", suite});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST(Cli, SmokeUnknownGoal) {
    auto suite = temp_file("goalspot_unknown_goal.tsv", "print\tnot-a-goal\n");
    EXPECT_EQ(run_cli({"smoke", "--kb", demo_kb(), "--suite", suite}).code, 2);
}

TEST(Cli, ReplRanksEachLine) {
    auto r = run_cli({"repl", "--kb", demo_kb(), "--top", "1"}, "print\n\ncreate a chart\nchange this chart\n");
    EXPECT_EQ(r.code, 0);
    auto p = r.out.find("print-document");
    auto c = r.out.find("create-chart");
    auto m = r.out.find("modify-chart");
    ASSERT_NE(p, std::string::npos);
    ASSERT_NE(c, std::string::npos);
    ASSERT_NE(m, std::string::npos);
    EXPECT_LT(p, c);
    EXPECT_LT(c, m);
    // the KB is not changed by a session: the same line ranks the same afterwards
    auto again = run_cli({"repl", "--kb", demo_kb(), "--top", "1"}, "change this chart\nprint\nprint\n");
    auto first = again.out.substr(again.out.find("print-document"));
    EXPECT_NE(first.find("print-document", 1), std::string::npos);
}

TEST(Cli, SynthDeterministic) {
    auto a = run_cli({"synth", "--goals", "5", "--terms", "20", "--links", "30", "--seed", "4"});
    auto b = run_cli({"synth", "--goals", "5", "--terms", "20", "--links", "30", "--seed", "4"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    auto kb = load_kb(a.out);
    EXPECT_EQ(kb.links().size(), 30u);
    EXPECT_EQ(run_cli({"synth", "--goals", "2", "--terms", "2", "--links", "5"}).code, 2);
}

TEST(Cli, Bench) {
    auto r = run_cli({"bench", "--kb", demo_kb(), "--queries", "20"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("median_rank_ms"), std::string::npos);
}

TEST(Cli, ExplainAndPrecision) {
    auto r = run_cli({"query", "--kb", demo_kb(), "--top", "1", "--explain", "--full-precision", "print"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("t-print\tseen-linked"), std::string::npos);
    EXPECT_NE(r.out.find("absent-aggregate"), std::string::npos);
}

TEST(Cli, ParityWithService) {
    auto kb = load_kb_file(demo_kb());
    QueryService svc(kb);
    for (const char* q : {"print", "create a chart", "change this chart", "how do I add up a column", "qwerty"}) {
        for (int k : {1, 5, 10}) {
            auto r = run_cli({"query", "--kb", demo_kb(), "--top", std::to_string(k), "--full-precision", q});
            auto j = nlohmann::json::parse(svc.query(nlohmann::json{{"text", q}, {"topK", k}}.dump()).body);
            auto ls = lines(r.out);
            ASSERT_EQ(ls.size(), j["results"].size());
            for (std::size_t i = 0; i < ls.size(); ++i) {
                std::istringstream row(ls[i]);
                std::string rank, post, id;
                std::getline(row, rank, '\t');
                std::getline(row, post, '\t');
                std::getline(row, id, '\t');
                EXPECT_EQ(id, j["results"][i]["goalId"]);
                EXPECT_NEAR(std::stod(post), j["results"][i]["posterior"].get<double>(), 1e-12);
            }
        }
    }
}

TEST(Cli, ServePortBusy) {
    httplib::Server blocker;
    int port = blocker.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    auto r = run_cli({"serve", "--kb", demo_kb(), "--host", "127.0.0.1", "--port", std::to_string(port)});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, ServeBadKb) {
    EXPECT_EQ(run_cli({"serve", "--kb", "/no/such.json", "--port", "0"}).code, 2);
}
