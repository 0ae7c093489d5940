#include "goalspot/kb_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>
#include <unordered_map>
#include <unordered_set>

#include "goalspot/errors.hpp"
#include "goalspot/stemmer.hpp"
#include "json.hpp"

namespace goalspot {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_violation(const Violation& v) { return "[" + v.rule + "] " + v.path + ": " + v.message; }

namespace {

std::string join_messages(const std::vector<Violation>& vs) {
    std::string out = "knowledge base rejected";
    for (const auto& v : vs) out += "\n  " + format_violation(v);
    return out;
}

bool open_unit(double p) { return std::isfinite(p) && p > 0.0 && p < 1.0; }

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

struct LinkSlot {
    const char* pKey;
    const char* bucketKey;
};

constexpr LinkSlot kSlotP{"p", "bucket"};
constexpr LinkSlot kSlotIndef{"pIndef", "bucketIndef"};
constexpr LinkSlot kSlotDef{"pDef", "bucketDef"};
constexpr LinkSlot kSlotNoun{"pNoun", "bucketNoun"};
constexpr LinkSlot kSlotVerb{"pVerb", "bucketVerb"};
constexpr LinkSlot kSlotNounIndef{"pNounIndef", "bucketNounIndef"};
constexpr LinkSlot kSlotNounDef{"pNounDef", "bucketNounDef"};
constexpr LinkSlot kAllSlots[] = {kSlotP, kSlotIndef, kSlotDef, kSlotNoun, kSlotVerb, kSlotNounIndef, kSlotNounDef};

class Parser {
public:
    KbData run(std::string_view document) {
        json doc;
        try {
            doc = json::parse(document.begin(), document.end());
        } catch (const json::parse_error& e) {
            throw KbError({Violation{"parse", "/", e.what()}});
        }
        KbData kb;
        if (!doc.is_object()) {
            fail("/", "top level must be an object");
            throw KbError(std::move(errors_));
        }
        allow_keys(doc, "", {"meta", "scale", "leak", "indefiniteness", "nounVerbPrior", "goals", "nodes", "links"});

        if (doc.contains("meta")) parse_meta(doc["meta"], kb.meta);
        if (doc.contains("scale")) parse_scale(doc["scale"], kb.scale);
        if (doc.contains("leak")) number(doc["leak"], "/leak", kb.leak);
        if (doc.contains("indefiniteness")) parse_indefiniteness(doc["indefiniteness"], kb.indefiniteness);
        if (doc.contains("nounVerbPrior")) number(doc["nounVerbPrior"], "/nounVerbPrior", kb.nounVerbPrior);

        parse_goals(required_array(doc, "goals"), kb.goals);
        parse_nodes(required_array(doc, "nodes"), kb.nodes);
        parse_links(required_array(doc, "links"), kb.scale, kb.links);

        if (!errors_.empty()) throw KbError(std::move(errors_));
        return kb;
    }

private:
    void fail(std::string path, std::string message, std::string rule = "schema") {
        errors_.push_back(Violation{std::move(rule), std::move(path), std::move(message)});
    }

    void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
        for (const auto& [k, v] : obj.items()) {
            bool known = std::any_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; });
            if (!known) fail(path + "/" + k, "unknown key");
        }
    }

    const json& required_array(const json& doc, const char* key) {
        static const json empty = json::array();
        if (!doc.contains(key)) {
            fail(std::string("/") + key, "missing required array");
            return empty;
        }
        const json& v = doc[key];
        if (!v.is_array()) {
            fail(std::string("/") + key, "must be an array");
            return empty;
        }
        return v;
    }

    bool number(const json& v, const std::string& path, double& out) {
        if (!v.is_number()) {
            fail(path, "must be a number");
            return false;
        }
        out = v.get<double>();
        return true;
    }

    bool string(const json& v, const std::string& path, std::string& out) {
        if (!v.is_string()) {
            fail(path, "must be a string");
            return false;
        }
        out = v.get<std::string>();
        return true;
    }

    bool boolean(const json& v, const std::string& path, bool& out) {
        if (!v.is_boolean()) {
            fail(path, "must be a boolean");
            return false;
        }
        out = v.get<bool>();
        return true;
    }

    bool object(const json& v, const std::string& path) {
        if (!v.is_object()) {
            fail(path, "must be an object");
            return false;
        }
        return true;
    }

    void parse_meta(const json& m, KbMeta& meta) {
        if (!object(m, "/meta")) return;
        allow_keys(m, "/meta", {"name", "version", "language"});
        if (m.contains("name")) string(m["name"], "/meta/name", meta.name);
        if (m.contains("version")) string(m["version"], "/meta/version", meta.version);
        if (m.contains("language")) string(m["language"], "/meta/language", meta.language);
    }

    void parse_scale(const json& s, BucketScale& scale) {
        if (!object(s, "/scale")) return;
        allow_keys(s, "/scale", {"pMin", "pMax"});
        double pMin = 0, pMax = BucketScale::kDefaultPMax;
        bool hasMin = s.contains("pMin") && number(s["pMin"], "/scale/pMin", pMin);
        bool hasMax = s.contains("pMax") && number(s["pMax"], "/scale/pMax", pMax);
        if (hasMin && hasMax) {
            scale = BucketScale{pMin, pMax};
        } else if (hasMax) {
            scale = BucketScale::from_max_and_ratio(pMax, BucketScale::kDefaultRatio);
        } else if (hasMin) {
            scale = BucketScale{pMin, BucketScale::kDefaultPMax};
        }
    }

    void parse_indefiniteness(const json& d, IndefinitenessModel& model) {
        if (!object(d, "/indefiniteness")) return;
        allow_keys(d, "/indefiniteness", {"prior", "functionWords"});
        if (d.contains("prior")) number(d["prior"], "/indefiniteness/prior", model.priorIndef);
        if (!d.contains("functionWords")) return;
        const json& fws = d["functionWords"];
        if (!fws.is_array()) {
            fail("/indefiniteness/functionWords", "must be an array");
            return;
        }
        model.functionWords.clear();
        for (std::size_t i = 0; i < fws.size(); ++i) {
            std::string path = "/indefiniteness/functionWords/" + std::to_string(i);
            const json& f = fws[i];
            if (!object(f, path)) continue;
            allow_keys(f, path, {"surface", "pGivenIndef", "pGivenDef", "class"});
            std::string surface, cls = "other";
            FunctionWord fw;
            bool ok = f.contains("surface") && string(f["surface"], path + "/surface", surface);
            if (!f.contains("surface")) fail(path + "/surface", "missing");
            if (!f.contains("pGivenIndef") || !number(f["pGivenIndef"], path + "/pGivenIndef", fw.pGivenIndef)) {
                if (!f.contains("pGivenIndef")) fail(path + "/pGivenIndef", "missing");
                ok = false;
            }
            if (!f.contains("pGivenDef") || !number(f["pGivenDef"], path + "/pGivenDef", fw.pGivenDef)) {
                if (!f.contains("pGivenDef")) fail(path + "/pGivenDef", "missing");
                ok = false;
            }
            if (f.contains("class") && string(f["class"], path + "/class", cls)) {
                auto c = parse_function_word_class(cls);
                if (!c) {
                    fail(path + "/class", "unknown function-word class '" + cls + "'");
                    ok = false;
                } else {
                    fw.cls = *c;
                }
            }
            if (!ok) continue;
            if (!model.functionWords.emplace(surface, fw).second) {
                fail(path + "/surface", "duplicate function word '" + surface + "'", "duplicate-function-word");
            }
        }
    }

    void parse_goals(const json& goals, std::vector<Goal>& out) {
        std::vector<double> raw;
        for (std::size_t i = 0; i < goals.size(); ++i) {
            std::string path = "/goals/" + std::to_string(i);
            const json& g = goals[i];
            if (!object(g, path)) continue;
            allow_keys(g, path, {"id", "title", "prior"});
            Goal goal;
            if (!g.contains("id")) fail(path + "/id", "missing");
            else string(g["id"], path + "/id", goal.id);
            if (g.contains("title")) string(g["title"], path + "/title", goal.title);
            else goal.title = goal.id;
            double weight = 1.0;
            if (g.contains("prior") && number(g["prior"], path + "/prior", weight)) {
                if (!std::isfinite(weight) || weight <= 0.0) {
                    fail(path + "/prior", "raw prior must be positive", "prior-positive");
                    weight = 1.0;
                }
            }
            raw.push_back(weight);
            out.push_back(std::move(goal));
        }
        double sum = 0.0;
        for (double w : raw) sum += w;
        // Already-normalized priors are kept bit-for-bit so that
        // serialize -> load is an identity.
        bool normalize = std::abs(sum - 1.0) > 1e-12;
        for (std::size_t i = 0; i < out.size(); ++i) out[i].prior = normalize ? raw[i] / sum : raw[i];
    }

    void parse_nodes(const json& nodes, std::vector<EvidenceNode>& out) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            std::string path = "/nodes/" + std::to_string(i);
            const json& n = nodes[i];
            if (!object(n, path)) continue;
            allow_keys(n, path, {"id", "kind", "caseSensitive", "zeroDerivation", "surfaces"});
            EvidenceNode node;
            if (!n.contains("id")) fail(path + "/id", "missing");
            else string(n["id"], path + "/id", node.id);
            std::string kind = "term";
            if (n.contains("kind") && string(n["kind"], path + "/kind", kind)) {
                auto k = parse_node_kind(kind);
                if (!k) fail(path + "/kind", "unknown node kind '" + kind + "'");
                else node.kind = *k;
            }
            if (n.contains("caseSensitive")) boolean(n["caseSensitive"], path + "/caseSensitive", node.caseSensitive);
            if (n.contains("zeroDerivation")) boolean(n["zeroDerivation"], path + "/zeroDerivation", node.zeroDerivation);
            if (!n.contains("surfaces") || !n["surfaces"].is_array()) {
                fail(path + "/surfaces", "missing or not an array");
            } else {
                const json& ss = n["surfaces"];
                for (std::size_t s = 0; s < ss.size(); ++s) {
                    std::string spath = path + "/surfaces/" + std::to_string(s);
                    if (!object(ss[s], spath)) continue;
                    allow_keys(ss[s], spath, {"tokens", "exactCase"});
                    SurfaceForm form;
                    if (ss[s].contains("exactCase")) boolean(ss[s]["exactCase"], spath + "/exactCase", form.exactCase);
                    if (!ss[s].contains("tokens") || !ss[s]["tokens"].is_array()) {
                        fail(spath + "/tokens", "missing or not an array");
                        continue;
                    }
                    const json& toks = ss[s]["tokens"];
                    for (std::size_t t = 0; t < toks.size(); ++t) {
                        std::string tok;
                        if (string(toks[t], spath + "/tokens/" + std::to_string(t), tok)) form.tokens.push_back(tok);
                    }
                    node.surfaces.push_back(std::move(form));
                }
            }
            out.push_back(std::move(node));
        }
    }

    bool slot_present(const json& l, const LinkSlot& slot) const {
        return l.contains(slot.pKey) || l.contains(slot.bucketKey);
    }

    Assessed read_slot(const json& l, const LinkSlot& slot, const std::string& path, const BucketScale& scale) {
        Assessed a;
        bool hasP = l.contains(slot.pKey);
        bool hasB = l.contains(slot.bucketKey);
        if (hasP && hasB) {
            fail(path, std::string("both '") + slot.pKey + "' and '" + slot.bucketKey + "' given");
            return a;
        }
        if (hasP) {
            number(l[slot.pKey], path + "/" + slot.pKey, a.value);
            return a;
        }
        const json& b = l[slot.bucketKey];
        std::string bpath = path + "/" + slot.bucketKey;
        if (!b.is_number_integer()) {
            fail(bpath, "bucket must be an integer");
            return a;
        }
        auto bucket = b.get<long long>();
        if (bucket < kMinBucket || bucket > kMaxBucket) {
            fail(bpath, "bucket " + std::to_string(bucket) + " outside 1..13", "bucket-range");
            return a;
        }
        a.bucket = static_cast<int>(bucket);
        if (!scale.valid()) {
            fail("/scale", "scale must satisfy 0 < pMin < pMax < 1", "scale-order");
            return a;
        }
        a.value = bucket_to_probability(*a.bucket, scale);
        return a;
    }

    void parse_links(const json& links, const BucketScale& scale, std::vector<Link>& out) {
        for (std::size_t i = 0; i < links.size(); ++i) {
            std::string path = "/links/" + std::to_string(i);
            const json& l = links[i];
            if (!object(l, path)) continue;
            allow_keys(l, path,
                       {"goal", "node", "p", "bucket", "pIndef", "bucketIndef", "pDef", "bucketDef", "pNoun", "bucketNoun",
                        "pVerb", "bucketVerb", "pNounIndef", "bucketNounIndef", "pNounDef", "bucketNounDef"});
            Link link;
            if (!l.contains("goal")) fail(path + "/goal", "missing");
            else string(l["goal"], path + "/goal", link.goalId);
            if (!l.contains("node")) fail(path + "/node", "missing");
            else string(l["node"], path + "/node", link.nodeId);

            unsigned mask = 0;
            for (std::size_t s = 0; s < std::size(kAllSlots); ++s)
                if (slot_present(l, kAllSlots[s])) mask |= 1u << s;
            // Bit order follows kAllSlots.
            constexpr unsigned kPlain = 1u << 0;
            constexpr unsigned kDefSplit = (1u << 1) | (1u << 2);
            constexpr unsigned kNvSplit = (1u << 3) | (1u << 4);
            constexpr unsigned kFull = (1u << 5) | (1u << 6) | (1u << 4);
            if (mask == kPlain) {
                link.probs = PlainProb{read_slot(l, kSlotP, path, scale)};
            } else if (mask == kDefSplit) {
                link.probs = DefinitenessSplit{read_slot(l, kSlotIndef, path, scale), read_slot(l, kSlotDef, path, scale)};
            } else if (mask == kNvSplit) {
                link.probs = NounVerbSplit{read_slot(l, kSlotNoun, path, scale), read_slot(l, kSlotVerb, path, scale)};
            } else if (mask == kFull) {
                link.probs = FullSplit{read_slot(l, kSlotNounIndef, path, scale), read_slot(l, kSlotNounDef, path, scale),
                                       read_slot(l, kSlotVerb, path, scale)};
            } else {
                fail(path, "exactly one probability form required: p | pIndef/pDef | pNoun/pVerb | pNounIndef/pNounDef/pVerb");
                continue;
            }
            out.push_back(std::move(link));
        }
    }

    std::vector<Violation> errors_;
};

// ---------------------------------------------------------------------------
// Validation

class Validator {
public:
    explicit Validator(const KbData& kb) : kb_(kb) {}

    std::vector<Violation> run() {
        check_globals();
        check_goals();
        check_nodes();
        check_function_words();
        check_links();
        return std::move(out_);
    }

private:
    void add(std::string rule, std::string path, std::string message) {
        out_.push_back(Violation{std::move(rule), std::move(path), std::move(message)});
    }

    void prob(double p, const std::string& path) {
        if (!open_unit(p)) add("probability-open-interval", path, "probability not in open interval (0,1): " + fmt(p));
    }

    static std::string fmt(double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    }

    void check_globals() {
        const auto& s = kb_.scale;
        if (!s.valid()) add("scale-order", "/scale", "scale must satisfy 0 < pMin < pMax < 1");
        prob(kb_.leak, "/leak");
        if (open_unit(kb_.leak) && s.valid() && kb_.leak >= s.pMin) {
            add("leak-exceeds-bucket-floor", "/leak",
                "leak " + fmt(kb_.leak) + " must be below the bucket-1 probability " + fmt(s.pMin));
        }
        prob(kb_.nounVerbPrior, "/nounVerbPrior");
        prob(kb_.indefiniteness.priorIndef, "/indefiniteness/prior");
    }

    void check_goals() {
        if (kb_.goals.empty()) add("no-goals", "/goals", "at least one goal required");
        std::unordered_set<std::string> seen;
        double sum = 0.0;
        for (std::size_t i = 0; i < kb_.goals.size(); ++i) {
            const auto& g = kb_.goals[i];
            std::string path = "/goals/" + std::to_string(i);
            if (g.id.empty()) add("empty-id", path + "/id", "goal id must be non-empty");
            if (!seen.insert(g.id).second) add("duplicate-goal-id", path + "/id", "duplicate goal id '" + g.id + "'");
            if (!(std::isfinite(g.prior) && g.prior > 0.0 && g.prior <= 1.0))
                add("prior-range", path + "/prior", "prior must lie in (0,1]: " + fmt(g.prior));
            sum += g.prior;
        }
        if (!kb_.goals.empty() && std::abs(sum - 1.0) > 1e-9)
            add("prior-sum", "/goals", "priors sum to " + fmt(sum) + ", expected 1");
    }

    void check_nodes() {
        std::unordered_set<std::string> ids;
        // surface key -> owning node id
        std::unordered_map<std::string, std::string> surfaceOwner;
        for (std::size_t i = 0; i < kb_.nodes.size(); ++i) {
            const auto& n = kb_.nodes[i];
            std::string path = "/nodes/" + std::to_string(i);
            if (n.id.empty()) add("empty-id", path + "/id", "node id must be non-empty");
            if (!ids.insert(n.id).second) add("duplicate-node-id", path + "/id", "duplicate node id '" + n.id + "'");
            if (n.zeroDerivation && n.kind != NodeKind::Term)
                add("zero-derivation-kind", path + "/zeroDerivation", "only term nodes may be zero-derivation");
            if (n.surfaces.empty()) add("empty-surfaces", path + "/surfaces", "node needs at least one surface");
            if (n.kind == NodeKind::Metonym && n.surfaces.size() < 2)
                add("metonym-too-few-surfaces", path + "/surfaces", "metonym needs at least two surfaces");

            for (std::size_t s = 0; s < n.surfaces.size(); ++s) {
                const auto& sf = n.surfaces[s];
                std::string spath = path + "/surfaces/" + std::to_string(s);
                if (sf.tokens.empty()) {
                    add("empty-surface", spath + "/tokens", "surface has no tokens");
                    continue;
                }
                if (n.kind == NodeKind::Term && sf.tokens.size() != 1)
                    add("term-multi-token", spath + "/tokens", "term surfaces are single tokens");
                if (n.kind == NodeKind::Phrase && sf.tokens.size() < 2)
                    add("phrase-too-short", spath + "/tokens", "phrase surfaces need at least two tokens");
                bool exact = n.surface_is_exact(sf);
                for (std::size_t t = 0; t < sf.tokens.size(); ++t) {
                    const auto& tok = sf.tokens[t];
                    std::string tpath = spath + "/tokens/" + std::to_string(t);
                    bool bad = tok.empty() || std::any_of(tok.begin(), tok.end(), [](char c) {
                                   return std::isspace(static_cast<unsigned char>(c)) != 0;
                               });
                    if (bad) {
                        add("token-format", tpath, "token must be non-empty without whitespace");
                        continue;
                    }
                    if (!exact && stem(lower_ascii(tok)) != tok)
                        add("lemma-not-stemmed", tpath,
                            "'" + tok + "' is not a stemmed lemma (expected '" + stem(lower_ascii(tok)) + "')");
                }
                std::string key = (exact ? "E\x1f" : "F\x1f");
                for (const auto& tok : sf.tokens) key += tok + "\x1f";
                auto [it, inserted] = surfaceOwner.emplace(key, n.id);
                if (!inserted) {
                    std::string text;
                    for (const auto& tok : sf.tokens) text += (text.empty() ? "" : " ") + tok;
                    if (it->second == n.id)
                        add("duplicate-surface", spath, "surface '" + text + "' repeated within node '" + n.id + "'");
                    else
                        add("surface-disjointness", spath,
                            "surface '" + text + "' attached to nodes '" + it->second + "' and '" + n.id + "'");
                }
            }
        }
    }

    void check_function_words() {
        std::unordered_set<std::string> singleFolded;
        for (const auto& n : kb_.nodes)
            for (const auto& sf : n.surfaces)
                if (sf.tokens.size() == 1) singleFolded.insert(lower_ascii(sf.tokens.front()));
        for (const auto& [w, fw] : kb_.indefiniteness.functionWords) {
            std::string path = "/indefiniteness/functionWords/" + w;
            bool bad = w.empty() || lower_ascii(w) != w || std::any_of(w.begin(), w.end(), [](char c) {
                           return std::isspace(static_cast<unsigned char>(c)) != 0;
                       });
            if (bad) add("function-word-format", path, "function words are single lower-case tokens");
            prob(fw.pGivenIndef, path + "/pGivenIndef");
            prob(fw.pGivenDef, path + "/pGivenDef");
            if (singleFolded.count(w) || singleFolded.count(stem(w)))
                add("function-word-overlap", path, "function word '" + w + "' is also an evidence surface");
        }
    }

    void check_links() {
        std::unordered_map<std::string, const EvidenceNode*> nodes;
        for (const auto& n : kb_.nodes) nodes.emplace(n.id, &n);
        std::unordered_set<std::string> goals;
        for (const auto& g : kb_.goals) goals.insert(g.id);
        std::set<std::pair<std::string, std::string>> pairs;

        for (std::size_t i = 0; i < kb_.links.size(); ++i) {
            const auto& l = kb_.links[i];
            std::string path = "/links/" + std::to_string(i);
            if (!goals.count(l.goalId)) add("unresolved-goal", path + "/goal", "unknown goal '" + l.goalId + "'");
            auto nit = nodes.find(l.nodeId);
            if (nit == nodes.end()) add("unresolved-node", path + "/node", "unknown node '" + l.nodeId + "'");
            if (!pairs.emplace(l.goalId, l.nodeId).second)
                add("duplicate-link", path, "duplicate link " + l.goalId + " -> " + l.nodeId);

            auto check = [&](const Assessed& a, const char* key) {
                std::string p = path + "/" + key;
                prob(a.value, p);
                if (a.bucket) {
                    if (*a.bucket < kMinBucket || *a.bucket > kMaxBucket) {
                        add("bucket-range", p, "bucket outside 1..13");
                    } else if (kb_.scale.valid() && a.value != bucket_to_probability(*a.bucket, kb_.scale)) {
                        add("bucket-mismatch", p, "value does not match its bucket on this scale");
                    }
                }
            };
            bool zd = nit != nodes.end() && nit->second->zeroDerivation;
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, PlainProb>) {
                        check(v.p, "p");
                    } else if constexpr (std::is_same_v<T, DefinitenessSplit>) {
                        check(v.pIndef, "pIndef");
                        check(v.pDef, "pDef");
                        if (zd)
                            add("split-kind-mismatch", path,
                                "zero-derivation node '" + l.nodeId + "' needs a full split to carry definiteness");
                    } else if constexpr (std::is_same_v<T, NounVerbSplit>) {
                        check(v.pNoun, "pNoun");
                        check(v.pVerb, "pVerb");
                        if (nit != nodes.end() && !zd)
                            add("split-kind-mismatch", path,
                                "noun/verb split on node '" + l.nodeId + "' without zeroDerivation");
                    } else {
                        check(v.pNounIndef, "pNounIndef");
                        check(v.pNounDef, "pNounDef");
                        check(v.pVerb, "pVerb");
                        if (nit != nodes.end() && !zd)
                            add("split-kind-mismatch", path, "full split on node '" + l.nodeId + "' without zeroDerivation");
                    }
                },
                l.probs);
        }
    }

    const KbData& kb_;
    std::vector<Violation> out_;
};

// ---------------------------------------------------------------------------
// Serialization

void put_slot(ordered_json& j, const Assessed& a, const LinkSlot& slot) {
    if (a.bucket) j[slot.bucketKey] = *a.bucket;
    else j[slot.pKey] = a.value;
}

}  // namespace

KbError::KbError(std::vector<Violation> violations)
    : std::runtime_error(join_messages(violations)), violations_(std::move(violations)) {}

std::vector<Violation> validate_kb(const KbData& kb) { return Validator(kb).run(); }

KbData parse_kb(std::string_view document) { return Parser().run(document); }

KnowledgeBase load_kb(std::string_view document) { return KnowledgeBase::build(parse_kb(document)); }

KnowledgeBase load_kb_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw KbError({Violation{"io", path.string(), "cannot open file"}});
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_kb(ss.str());
}

std::string serialize_kb(const KbData& kb, int indent) {
    ordered_json doc;
    doc["meta"] = {{"name", kb.meta.name}, {"version", kb.meta.version}, {"language", kb.meta.language}};
    doc["scale"] = {{"pMin", kb.scale.pMin}, {"pMax", kb.scale.pMax}};
    doc["leak"] = kb.leak;

    ordered_json fws = ordered_json::array();
    for (const auto& [w, fw] : kb.indefiniteness.functionWords) {
        fws.push_back({{"surface", w},
                       {"pGivenIndef", fw.pGivenIndef},
                       {"pGivenDef", fw.pGivenDef},
                       {"class", std::string(to_string(fw.cls))}});
    }
    doc["indefiniteness"] = {{"prior", kb.indefiniteness.priorIndef}, {"functionWords", std::move(fws)}};
    doc["nounVerbPrior"] = kb.nounVerbPrior;

    ordered_json goals = ordered_json::array();
    for (const auto& g : kb.goals) goals.push_back({{"id", g.id}, {"title", g.title}, {"prior", g.prior}});
    doc["goals"] = std::move(goals);

    ordered_json nodes = ordered_json::array();
    for (const auto& n : kb.nodes) {
        ordered_json j;
        j["id"] = n.id;
        j["kind"] = std::string(to_string(n.kind));
        if (n.caseSensitive) j["caseSensitive"] = true;
        if (n.zeroDerivation) j["zeroDerivation"] = true;
        ordered_json surfaces = ordered_json::array();
        for (const auto& s : n.surfaces) {
            ordered_json sj;
            sj["tokens"] = s.tokens;
            if (s.exactCase) sj["exactCase"] = true;
            surfaces.push_back(std::move(sj));
        }
        j["surfaces"] = std::move(surfaces);
        nodes.push_back(std::move(j));
    }
    doc["nodes"] = std::move(nodes);

    ordered_json links = ordered_json::array();
    for (const auto& l : kb.links) {
        ordered_json j;
        j["goal"] = l.goalId;
        j["node"] = l.nodeId;
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, PlainProb>) {
                    put_slot(j, v.p, kSlotP);
                } else if constexpr (std::is_same_v<T, DefinitenessSplit>) {
                    put_slot(j, v.pIndef, kSlotIndef);
                    put_slot(j, v.pDef, kSlotDef);
                } else if constexpr (std::is_same_v<T, NounVerbSplit>) {
                    put_slot(j, v.pNoun, kSlotNoun);
                    put_slot(j, v.pVerb, kSlotVerb);
                } else {
                    put_slot(j, v.pNounIndef, kSlotNounIndef);
                    put_slot(j, v.pNounDef, kSlotNounDef);
                    put_slot(j, v.pVerb, kSlotVerb);
                }
            },
            l.probs);
        links.push_back(std::move(j));
    }
    doc["links"] = std::move(links);
    return doc.dump(indent);
}

}  // namespace goalspot
