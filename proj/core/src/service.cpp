#include "goalspot/service.hpp"

#include <chrono>
#include <type_traits>

#include "goalspot/errors.hpp"
#include "json.hpp"

namespace goalspot {

using ojson = nlohmann::ordered_json;

namespace {

// Code points in a UTF-8 string (continuation bytes are not counted).
std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

ServiceResponse error(int status, const std::string& message) {
    ojson j;
    j["error"] = message;
    return {status, j.dump()};
}

ojson link_json(const KnowledgeBase& kb, const Link& l) {
    ojson j;
    j["node"] = l.nodeId;
    if (auto n = kb.find_node(l.nodeId)) {
        const auto& node = kb.nodes()[*n];
        j["kind"] = std::string(to_string(node.kind));
        ojson surfaces = ojson::array();
        for (const auto& s : node.surfaces) {
            std::string text;
            for (const auto& t : s.tokens) text += (text.empty() ? "" : " ") + t;
            surfaces.push_back(text);
        }
        j["surfaces"] = std::move(surfaces);
    }
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PlainProb>) {
                j["form"] = "plain";
                j["p"] = v.p.value;
            } else if constexpr (std::is_same_v<T, DefinitenessSplit>) {
                j["form"] = "definitenessSplit";
                j["pIndef"] = v.pIndef.value;
                j["pDef"] = v.pDef.value;
            } else if constexpr (std::is_same_v<T, NounVerbSplit>) {
                j["form"] = "nounVerbSplit";
                j["pNoun"] = v.pNoun.value;
                j["pVerb"] = v.pVerb.value;
            } else {
                j["form"] = "fullSplit";
                j["pNounIndef"] = v.pNounIndef.value;
                j["pNounDef"] = v.pNounDef.value;
                j["pVerb"] = v.pVerb.value;
            }
        },
        l.probs);
    return j;
}

ojson meta_json(const KbMeta& m) { return ojson{{"name", m.name}, {"version", m.version}, {"language", m.language}}; }

}  // namespace

QueryRequest parse_query_request(std::string_view body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body.begin(), body.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw RequestError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw RequestError("request body must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (k != "text" && k != "topK" && k != "explain" && k != "toggles") throw RequestError("unknown field '" + k + "'");

    QueryRequest req;
    if (!j.contains("text") || !j["text"].is_string()) throw RequestError("'text' must be a string");
    req.text = j["text"].get<std::string>();
    if (utf8_length(req.text) > kMaxQueryChars)
        throw RequestError("'text' exceeds " + std::to_string(kMaxQueryChars) + " characters");
    if (j.contains("topK")) {
        const auto& k = j["topK"];
        if (!k.is_number_integer() || k.get<long long>() < 1) throw RequestError("'topK' must be an integer >= 1");
        req.topK = static_cast<std::size_t>(k.get<long long>());
    }
    if (j.contains("explain")) {
        if (!j["explain"].is_boolean()) throw RequestError("'explain' must be a boolean");
        req.explain = j["explain"].get<bool>();
    }
    if (j.contains("toggles")) {
        const auto& t = j["toggles"];
        if (!t.is_object()) throw RequestError("'toggles' must be an object");
        for (const auto& [k, v] : t.items()) {
            if (k != "definiteness" && k != "nounVerb") throw RequestError("unknown toggle '" + k + "'");
            if (!v.is_boolean()) throw RequestError("toggle '" + k + "' must be a boolean");
        }
        if (t.contains("definiteness")) req.definiteness = t["definiteness"].get<bool>();
        if (t.contains("nounVerb")) req.nounVerb = t["nounVerb"].get<bool>();
    }
    return req;
}

std::string query_response_json(const KnowledgeBase& kb, const RankResult& result, const QueryRequest& request,
                                double elapsedMicros) {
    ojson j;
    ojson results = ojson::array();
    for (const auto& p : result.postings) {
        ojson r;
        r["goalId"] = p.goalId;
        r["title"] = kb.goals()[p.goal].title;
        r["posterior"] = p.posterior;
        r["logScore"] = p.logScore;
        r["rank"] = p.rank;
        if (request.explain) {
            ojson factors = ojson::array();
            for (const auto& f : p.factors) {
                ojson fj;
                fj["node"] = f.nodeId;
                fj["outcome"] = std::string(to_string(f.outcome));
                fj["factor"] = f.factor;
                fj["logFactor"] = f.logFactor;
                if (f.effectiveProb) fj["effectiveProb"] = *f.effectiveProb;
                fj["count"] = f.count;
                factors.push_back(std::move(fj));
            }
            r["factors"] = std::move(factors);
        }
        results.push_back(std::move(r));
    }
    j["results"] = std::move(results);

    ojson acts = ojson::array();
    for (const auto& a : result.analysis.activations) {
        ojson aj;
        aj["node"] = a.nodeId;
        aj["surface"] = a.matchedSurface;
        aj["span"] = {a.span.begin, a.span.end};
        aj["functionWords"] = a.context.functionWords;
        aj["pIndefinite"] = a.usage.pIndefinite;
        aj["pNoun"] = a.usage.pNoun;
        acts.push_back(std::move(aj));
    }
    j["analysis"] = {{"activations", std::move(acts)},
                     {"toggles", {{"definiteness", request.definiteness}, {"nounVerb", request.nounVerb}}}};
    j["kb"] = meta_json(kb.meta());
    j["timing"] = {{"micros", elapsedMicros}};
    return j.dump();
}

ServiceResponse QueryService::query(std::string_view body) const {
    QueryRequest req;
    try {
        req = parse_query_request(body);
    } catch (const RequestError& e) {
        return error(400, e.what());
    }
    auto start = std::chrono::steady_clock::now();
    auto result = rank(kb_, req.text, req.rank_options());
    double micros = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
    return {200, query_response_json(kb_, result, req, micros)};
}

ServiceResponse QueryService::goal(std::string_view id) const {
    auto g = kb_.find_goal(id);
    if (!g) return error(404, "unknown goal '" + std::string(id) + "'");
    const auto& goal = kb_.goals()[*g];
    ojson j;
    j["id"] = goal.id;
    j["title"] = goal.title;
    j["prior"] = goal.prior;
    ojson links = ojson::array();
    for (const auto& c : kb_.goal_links(*g)) links.push_back(link_json(kb_, kb_.links()[c.link]));
    j["links"] = std::move(links);
    return {200, j.dump()};
}

ServiceResponse QueryService::stats() const {
    ojson j;
    j["goals"] = kb_.goals().size();
    j["nodes"] = kb_.nodes().size();
    j["links"] = kb_.links().size();
    j["leak"] = kb_.leak();
    j["scale"] = {{"pMin", kb_.scale().pMin}, {"pMax", kb_.scale().pMax}, {"ratio", kb_.scale().ratio()}};
    j["meta"] = meta_json(kb_.meta());
    return {200, j.dump()};
}

ServiceResponse QueryService::health() const { return {200, R"({"ok":true})"}; }

ServiceResponse QueryService::handle(std::string_view method, std::string_view path, std::string_view body) const {
    constexpr std::string_view kGoalPrefix = "/v1/goals/";
    if (path == "/v1/query") {
        if (method != "POST") return error(405, "use POST");
        return query(body);
    }
    if (path.substr(0, kGoalPrefix.size()) == kGoalPrefix) {
        if (method != "GET") return error(405, "use GET");
        return goal(path.substr(kGoalPrefix.size()));
    }
    if (path == "/v1/kb/stats") {
        if (method != "GET") return error(405, "use GET");
        return stats();
    }
    if (path == "/v1/health") {
        if (method != "GET") return error(405, "use GET");
        return health();
    }
    return error(404, "no route for " + std::string(path));
}

}  // namespace goalspot
