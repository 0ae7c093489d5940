// Turns a hand-written KB into the stored form: surfaces may be given as
// plain strings ("Page Breaks"), which are tokenized, lowercased and stemmed
// unless marked exact-case. Output is validated and pretty-printed.
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include "goalspot/kb_io.hpp"
#include "goalspot/stemmer.hpp"
#include "goalspot/text_pipeline.hpp"
#include "json.hpp"

using nlohmann::ordered_json;

namespace {

ordered_json normalize_surface(const ordered_json& s, bool exactByDefault) {
    ordered_json out = s.is_string() ? ordered_json{{"text", s}} : s;
    bool exact = out.value("exactCase", exactByDefault);
    if (out.contains("text")) {
        ordered_json toks = ordered_json::array();
        for (const auto& t : goalspot::tokenize(out["text"].get<std::string>())) toks.push_back(exact ? t.raw : t.lemma);
        out.erase("text");
        out["tokens"] = toks;
    } else if (!exact && out.contains("tokens")) {
        for (auto& t : out["tokens"]) t = goalspot::stem(t.get<std::string>());
    }
    ordered_json ordered;
    ordered["tokens"] = out["tokens"];
    if (exact) ordered["exactCase"] = true;
    return ordered;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2 || argc > 3) {
        std::cerr << "usage: goalspot-kbnorm SOURCE.json [OUT.json]\n";
        return 2;
    }
    std::ifstream in(argv[1], std::ios::binary);
    if (!in) {
        std::cerr << "goalspot-kbnorm: cannot open " << argv[1] << '\n';
        return 2;
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
        for (auto& node : doc.at("nodes")) {
            bool exact = node.value("caseSensitive", false);
            for (auto& s : node.at("surfaces")) s = normalize_surface(s, exact);
        }
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "goalspot-kbnorm: " << e.what() << '\n';
        return 2;
    }
    std::string text;
    try {
        text = goalspot::serialize_kb(goalspot::load_kb(doc.dump()).data(), 2);
    } catch (const goalspot::KbError& e) {
        for (const auto& v : e.violations()) std::cerr << goalspot::format_violation(v) << '\n';
        return 2;
    }
    if (argc == 3) {
        std::ofstream out(argv[2], std::ios::binary);
        out << text << '\n';
        if (!out) {
            std::cerr << "goalspot-kbnorm: cannot write " << argv[2] << '\n';
            return 2;
        }
    } else {
        std::cout << text << '\n';
    }
    return 0;
}
