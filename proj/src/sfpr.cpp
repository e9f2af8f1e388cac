#include "capcot/sfpr.hpp"

#include "capcot/parse.hpp"
#include "capcot/textutil.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace capcot {

namespace {

const std::set<std::string>& imperative_starters() {
    static const std::set<std::string> verbs = {
        "add",     "always",  "apply",   "avoid",    "break",   "check",  "compute",
        "confirm", "define",  "do",      "emit",     "enforce", "ensure", "explain",
        "include", "justify", "keep",    "list",     "never",   "normalize",
        "prefer",  "prove",   "provide", "recheck",  "require", "restate",
        "separate","show",    "state",   "test",     "treat",   "use",    "validate",
        "verify",  "weight",  "write"};
    return verbs;
}

bool has_digit(const std::string& tok) {
    return std::any_of(tok.begin(), tok.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

/// Removes quoted spans and digit-bearing tokens that do not occur in the
/// base prompt. Returns the stripped sentence, or empty when too little
/// content survives.
std::string generalize(const std::string& sentence, const std::set<std::string>& base_tokens) {
    // drop "..."-quoted spans (expressions lifted from a specific chain)
    std::string s;
    bool in_quote = false;
    for (char c : sentence) {
        if (c == '"') {
            in_quote = !in_quote;
            continue;
        }
        if (!in_quote) s.push_back(c);
    }

    bool stripped = in_quote ? true : (s.size() != sentence.size());
    std::string out;
    for (const auto& tok : text::tokenize(s)) {
        std::string bare;
        for (char c : tok)
            if (std::isalnum(static_cast<unsigned char>(c)))
                bare.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (has_digit(bare) && !base_tokens.count(bare)) {
            stripped = true;
            continue;
        }
        if (!out.empty()) out += " ";
        out += tok;
    }
    if (!stripped) return sentence;
    return text::word_tokens(out).size() >= 3 ? text::trim(out) : std::string();
}

std::string make_imperative(const std::string& sentence) {
    auto words = text::word_tokens(sentence);
    if (!words.empty() && imperative_starters().count(words.front())) return sentence;
    std::string s = sentence;
    if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    return "Ensure " + s;
}

bool is_duplicate(const std::string& candidate, const std::vector<std::string>& existing) {
    const std::string key = normalize_guideline(candidate);
    for (const auto& g : existing) {
        if (normalize_guideline(g) == key) return true;
        if (text::token_jaccard(candidate, g) >= kDuplicateJaccard) return true;
    }
    return false;
}

} // namespace

RolePrompt sfpr_refine(const RolePrompt& p, const std::vector<std::string>& directives,
                       int cap, int /*round*/) {
    std::set<std::string> base_tokens;
    for (const auto& block : p.base_blocks)
        for (const auto& tok : text::word_tokens(block)) base_tokens.insert(tok);

    std::vector<std::string> guidelines = p.dynamic_guidelines;
    bool changed = false;

    for (const auto& directive : directives) {
        for (const auto& sentence : text::split_sentences(directive)) {
            std::string g = generalize(sentence, base_tokens);
            if (g.empty()) continue;
            g = make_imperative(g);
            if (is_duplicate(g, guidelines)) continue;
            while (static_cast<int>(guidelines.size()) >= cap)
                guidelines.erase(guidelines.begin());  // FIFO eviction
            guidelines.push_back(g);
            changed = true;
        }
    }

    if (!changed) return p;
    RolePrompt out = p;
    out.dynamic_guidelines = std::move(guidelines);
    out.version = p.version + 1;
    return out;
}

RolePrompt sfpr_refine_challenger(const RolePrompt& p_c, const ErrorStrategy& strategy,
                                  const std::vector<std::string>& directives, int cap,
                                  int round) {
    RolePrompt refined = sfpr_refine(p_c, directives, cap, round);
    // the strategy stamp always counts as one update; guideline changes do
    // not add a second bump in the same application
    refined.version = p_c.version + 1;
    refined.strategy_slot = strategy;
    return refined;
}

RolePrompt sfpr_refine_self(const RolePrompt& p_d, const FeedbackLedger& ledger, int cap,
                            int round) {
    std::size_t defects = 0;
    for (const auto& e : ledger.entries)
        if (e.bundle.status != BundleStatus::Ok) ++defects;
    if (defects == 0) return p_d;
    return sfpr_refine(p_d, {kFormatDisciplineGuideline}, cap, round);
}

} // namespace capcot
