#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "goalspot/engine.hpp"
#include "goalspot/errors.hpp"
#include "goalspot/harness.hpp"
#include "goalspot/kb_io.hpp"
#include "http_server.hpp"

namespace goalspot::cli {
namespace {

struct Flags {
    std::string kbPath;
    std::size_t top = 5;
    bool explain = false;
    bool noDefiniteness = false;
    bool noNounVerb = false;
    bool fullPrecision = false;

    RankOptions rank_options() const { return {top, !noDefiniteness, !noNounVerb, explain}; }
};

void add_kb_flag(CLI::App* cmd, Flags& f, bool required = true) {
    auto* opt = cmd->add_option("--kb", f.kbPath, "Knowledge base JSON file");
    if (required) opt->required();
}

void add_rank_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--top", f.top, "Number of results")->check(CLI::PositiveNumber);
    cmd->add_flag("--explain", f.explain, "Print per-node factors");
    cmd->add_flag("--no-definiteness", f.noDefiniteness, "Ignore definite/indefinite usage");
    cmd->add_flag("--no-nounverb", f.noNounVerb, "Ignore noun/verb usage");
    cmd->add_flag("--full-precision", f.fullPrecision, "Print posteriors with 17 significant digits");
}

std::string format_posterior(double p, bool full) {
    char buf[64];
    std::snprintf(buf, sizeof buf, full ? "%.17g" : "%.6f", p);
    return buf;
}

void print_ranking(const KnowledgeBase& kb, const RankResult& result, const Flags& f, std::ostream& out) {
    for (const auto& p : result.postings) {
        out << p.rank << '\t' << format_posterior(p.posterior, f.fullPrecision) << '\t' << p.goalId << '\t'
            << kb.goals()[p.goal].title << '\n';
        for (const auto& factor : p.factors) {
            out << "    " << factor.nodeId << '\t' << to_string(factor.outcome) << '\t'
                << format_posterior(factor.factor, true);
            if (factor.effectiveProb) out << "\tp=" << format_posterior(*factor.effectiveProb, true);
            if (factor.count != 1) out << "\tcount=" << factor.count;
            out << '\n';
        }
    }
}

std::optional<KnowledgeBase> open_kb(const std::string& path, std::ostream& err) {
    try {
        return load_kb_file(path);
    } catch (const KbError& e) {
        err << "goalspot: " << path << ": " << e.what() << '\n';
    }
    return std::nullopt;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

int cmd_query(const Flags& f, const std::vector<std::string>& words, std::ostream& out, std::ostream& err) {
    auto kb = open_kb(f.kbPath, err);
    if (!kb) return kExitUsage;
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    print_ranking(*kb, rank(*kb, text, f.rank_options()), f, out);
    return kExitOk;
}

int cmd_repl(const Flags& f, std::istream& in, std::ostream& out, std::ostream& err) {
    auto kb = open_kb(f.kbPath, err);
    if (!kb) return kExitUsage;
    std::string line;
    while (true) {
        out << "goalspot> " << std::flush;
        if (!std::getline(in, line)) break;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line == ":q" || line == ":quit") break;
        print_ranking(*kb, rank(*kb, line, f.rank_options()), f, out);
    }
    out << '\n';
    return kExitOk;
}

int cmd_validate(const Flags& f, std::ostream& out, std::ostream& err) {
    std::ifstream file(f.kbPath, std::ios::binary);
    if (!file) {
        err << "goalspot: cannot open " << f.kbPath << '\n';
        return kExitUsage;
    }
    std::string doc((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    std::vector<Violation> violations;
    KbData data;
    try {
        data = parse_kb(doc);
        violations = validate_kb(data);
    } catch (const KbError& e) {
        violations = e.violations();
    }
    if (!violations.empty()) {
        for (const auto& v : violations) err << format_violation(v) << '\n';
        err << violations.size() << " violation(s)\n";
        return kExitUsage;
    }
    out << "ok: " << data.goals.size() << " goals, " << data.nodes.size() << " nodes, " << data.links.size()
        << " links\n";
    return kExitOk;
}

int cmd_smoke(const Flags& f, const std::string& suitePath, double minRate, bool json, std::ostream& out,
              std::ostream& err) {
    auto kb = open_kb(f.kbPath, err);
    if (!kb) return kExitUsage;
    try {
        auto suite = load_smoke_suite(suitePath);
        if (minRate > 1.0) {
            // Unreachable gate: report and fail without treating it as bad input.
            auto report = run_smoke(*kb, suite, f.top, 1.0, f.rank_options());
            report.threshold = minRate;
            report.passed = false;
            out << (json ? smoke_report_json(report, suite) + "\n" : smoke_report_table(report, suite));
            return kExitGateFailed;
        }
        auto report = run_smoke(*kb, suite, f.top, minRate, f.rank_options());
        out << (json ? smoke_report_json(report, suite) + "\n" : smoke_report_table(report, suite));
        return report.passed ? kExitOk : kExitGateFailed;
    } catch (const SuiteParseError& e) {
        err << "goalspot: " << suitePath << ": " << e.what() << '\n';
    } catch (const DomainError& e) {
        err << "goalspot: " << e.what() << '\n';
    }
    return kExitUsage;
}

int cmd_synth(const SynthParams& params, const std::string& outPath, std::ostream& out, std::ostream& err) {
    try {
        auto kb = synth_kb(params);
        std::string doc = serialize_kb(kb.data());
        if (outPath.empty() || outPath == "-") {
            out << doc << '\n';
        } else {
            std::ofstream file(outPath, std::ios::binary);
            if (!file) {
                err << "goalspot: cannot write " << outPath << '\n';
                return kExitUsage;
            }
            file << doc << '\n';
        }
    } catch (const DomainError& e) {
        err << "goalspot: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_bench(const Flags& f, const SynthParams& params, std::size_t queries, std::ostream& out, std::ostream& err) {
    using clock = std::chrono::steady_clock;
    std::string doc;
    if (!f.kbPath.empty()) {
        std::ifstream file(f.kbPath, std::ios::binary);
        if (!file) {
            err << "goalspot: cannot open " << f.kbPath << '\n';
            return kExitUsage;
        }
        doc.assign(std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>());
    } else {
        doc = serialize_kb(synth_kb(params).data());
    }
    auto t0 = clock::now();
    std::optional<KnowledgeBase> kb;
    try {
        kb.emplace(load_kb(doc));
    } catch (const KbError& e) {
        err << "goalspot: " << e.what() << '\n';
        return kExitUsage;
    }
    double loadMs = std::chrono::duration<double, std::milli>(clock::now() - t0).count();

    Rng rng(params.seed);
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < queries; ++i)
        texts.push_back(sample_query(*kb, rng.below(kb->goals().size()), rng.next()).text);
    std::vector<double> latencies;
    for (const auto& t : texts) {
        auto s = clock::now();
        auto r = rank(*kb, t, f.rank_options());
        latencies.push_back(std::chrono::duration<double, std::milli>(clock::now() - s).count());
        if (r.postings.empty()) return kExitUsage;
    }
    auto sorted = latencies;
    std::sort(sorted.begin(), sorted.end());
    double p95 = sorted.empty() ? 0.0 : sorted[std::min(sorted.size() - 1, sorted.size() * 95 / 100)];
    out << "goals " << kb->goals().size() << ", nodes " << kb->nodes().size() << ", links " << kb->links().size()
        << '\n';
    out << "load_ms " << loadMs << '\n';
    out << "queries " << queries << '\n';
    out << "median_rank_ms " << median(latencies) << '\n';
    out << "p95_rank_ms " << p95 << '\n';
    return kExitOk;
}

int cmd_serve(const Flags& f, const std::string& host, int port, std::ostream& out, std::ostream& err) {
    auto kb = open_kb(f.kbPath, err);
    if (!kb) return kExitUsage;
    HttpServer server(*kb);
    if (!server.bind(host, port)) {
        err << "goalspot: cannot bind " << host << ":" << port << '\n';
        return kExitUsage;
    }
    out << "listening on http://" << host << ":" << server.port() << '\n' << std::flush;
    server.listen();
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"goalspot: Bayesian term-spotting help retrieval", "goalspot"};
    app.require_subcommand(1);

    Flags f;
    std::vector<std::string> words;
    std::string suitePath;
    double minRate = 0.99;
    bool json = false;
    std::string outPath;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::size_t queries = 1000;
    SynthParams synth;
    synth.numGoals = 1000;
    synth.numTerms = 5000;
    synth.numLinks = 145000;
    synth.seed = 7;

    auto* query = app.add_subcommand("query", "Rank goals for one query");
    add_kb_flag(query, f);
    add_rank_flags(query, f);
    query->add_option("text", words, "Query text")->required();

    auto* repl = app.add_subcommand("repl", "Rank every line read from standard input");
    add_kb_flag(repl, f);
    add_rank_flags(repl, f);

    auto* validate = app.add_subcommand("validate", "Check a knowledge base file");
    add_kb_flag(validate, f);

    auto* smoke = app.add_subcommand("smoke", "Run a smoke-test suite against a knowledge base");
    add_kb_flag(smoke, f);
    add_rank_flags(smoke, f);
    smoke->add_option("--suite", suitePath, "Suite file (query<TAB>goal[,goal])")->required();
    smoke->add_option("--min-rate", minRate, "Required top-K hit rate");
    smoke->add_flag("--json", json, "Emit the report as JSON");

    auto addSynthFlags = [&](CLI::App* cmd) {
        cmd->add_option("--goals", synth.numGoals, "Number of goals");
        cmd->add_option("--terms", synth.numTerms, "Number of evidence nodes");
        cmd->add_option("--links", synth.numLinks, "Number of goal-node links");
        cmd->add_option("--seed", synth.seed, "Random seed");
    };
    auto* synthCmd = app.add_subcommand("synth", "Write a synthetic knowledge base");
    addSynthFlags(synthCmd);
    synthCmd->add_option("--out", outPath, "Output file (default: stdout)");

    auto* bench = app.add_subcommand("bench", "Time loading and ranking");
    add_kb_flag(bench, f, false);
    add_rank_flags(bench, f);
    addSynthFlags(bench);
    bench->add_option("--queries", queries, "Number of sampled queries");

    auto* serve = app.add_subcommand("serve", "Serve the HTTP query API");
    add_kb_flag(serve, f);
    serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
    serve->add_option("--host", host, "Bind address");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (*query) return cmd_query(f, words, out, err);
    if (*repl) return cmd_repl(f, in, out, err);
    if (*validate) return cmd_validate(f, out, err);
    if (*smoke) return cmd_smoke(f, suitePath, minRate, json, out, err);
    if (*synthCmd) return cmd_synth(synth, outPath, out, err);
    if (*bench) return cmd_bench(f, synth, queries, out, err);
    if (*serve) return cmd_serve(f, host, port, out, err);
    return kExitUsage;
}

}  // namespace goalspot::cli
