#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "goalspot/engine.hpp"
#include "goalspot/kb.hpp"

namespace goalspot {

inline constexpr std::size_t kMaxQueryChars = 4096;

struct QueryRequest {
    std::string text;
    std::size_t topK = 5;
    bool explain = false;
    bool definiteness = true;
    bool nounVerb = true;

    RankOptions rank_options() const { return {topK, definiteness, nounVerb, explain}; }
};

class RequestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses `{text, topK?, explain?, toggles?: {definiteness?, nounVerb?}}`.
QueryRequest parse_query_request(std::string_view body);

/// QueryResponse document for a finished ranking.
std::string query_response_json(const KnowledgeBase& kb, const RankResult& result, const QueryRequest& request,
                                double elapsedMicros);

struct ServiceResponse {
    int status = 200;
    std::string body;
};

/// Transport-independent request router for the HTTP API. Holds only a
/// reference to the read-only KB, so one instance serves any number of
/// threads.
class QueryService {
public:
    explicit QueryService(const KnowledgeBase& kb) : kb_(kb) {}

    ServiceResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

    ServiceResponse query(std::string_view body) const;
    ServiceResponse goal(std::string_view id) const;
    ServiceResponse stats() const;
    ServiceResponse health() const;

private:
    const KnowledgeBase& kb_;
};

}  // namespace goalspot
