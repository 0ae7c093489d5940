#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "goalspot/kb.hpp"

namespace goalspot {

struct Violation {
    std::string rule;     // stable rule id, e.g. "surface-disjointness"
    std::string path;     // JSON-pointer-like location of the offending entity
    std::string message;

    bool operator==(const Violation&) const = default;
};

std::string format_violation(const Violation& v);

/// Thrown by the loader. Schema problems use rule "schema" (or "parse"
/// for malformed JSON); invariant failures carry their validation rule id.
class KbError : public std::runtime_error {
public:
    explicit KbError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// Every invariant of the data model. Empty result iff the KB is valid.
std::vector<Violation> validate_kb(const KbData& kb);

/// Parses a KB document into plain data without checking invariants.
/// Throws KbError on malformed JSON or schema violations.
KbData parse_kb(std::string_view document);

/// parse_kb + validate_kb + indexing.
KnowledgeBase load_kb(std::string_view document);
KnowledgeBase load_kb_file(const std::filesystem::path& path);

/// Canonical JSON form. load_kb(serialize_kb(kb)) reproduces kb exactly.
std::string serialize_kb(const KbData& kb, int indent = -1);

}  // namespace goalspot
