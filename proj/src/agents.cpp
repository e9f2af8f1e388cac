#include "capcot/agents.hpp"

#include "capcot/errors.hpp"
#include "capcot/parse.hpp"
#include "capcot/prompt.hpp"
#include "capcot/textutil.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

namespace capcot {

std::uint64_t Rng::below(std::uint64_t n) {
    for (;;) {
        std::uint64_t x = eng_();
        std::uint64_t r = x % n;
        if (x - r <= std::numeric_limits<std::uint64_t>::max() - (n - 1)) return r;
    }
}

ErrorStrategy sample_error_strategy(const std::set<ErrorFamily>& taxonomy, Rng& rng) {
    if (taxonomy.empty()) throw EmptyTaxonomy();
    const std::vector<ErrorFamily> families(taxonomy.begin(), taxonomy.end());
    const std::uint64_t n = families.size();

    std::uint64_t k = (n == 1) ? 1 : 1 + rng.below(2);
    std::set<ErrorFamily> chosen;
    if (k == 1) {
        chosen.insert(families[rng.below(n)]);
    } else {
        // uniform unordered pair via pair-index decoding
        std::uint64_t idx = rng.below(n * (n - 1) / 2);
        std::uint64_t i = 0;
        while (idx >= n - 1 - i) {
            idx -= n - 1 - i;
            ++i;
        }
        chosen.insert(families[i]);
        chosen.insert(families[i + 1 + idx]);
    }
    return cold_start_strategy(chosen);
}

namespace {

CompletionRequest make_request(Role role, std::string rendered, const Query& q,
                               const CallContext& ctx) {
    CompletionRequest req;
    req.model = ctx.model;
    req.messages.push_back({"user", std::move(rendered)});
    req.decoding = ctx.decoding;
    req.tag.role = role;
    req.tag.round = ctx.round;
    req.tag.query_id = q.id;
    req.tag.run_id = ctx.run_id;
    return req;
}

} // namespace

ReasoningChain solve(const RolePrompt& p_s, const Query& q, const CallContext& ctx,
                     Backend& b) {
    auto resp = b.complete(make_request(Role::Solver, render_prompt(p_s, q), q, ctx));
    return parse_chain(resp.content, Role::Solver);
}

ReasoningChain challenge(const RolePrompt& p_c, const Query& q,
                         const ErrorStrategy& strategy, const CallContext& ctx,
                         Backend& b) {
    RolePrompt render_copy = p_c;
    render_copy.strategy_slot = strategy;
    auto resp =
        b.complete(make_request(Role::Challenger, render_prompt(render_copy, q), q, ctx));
    return parse_chain(resp.content, Role::Challenger);
}

FeedbackBundle critique(const RolePrompt& p_f, const Query& q, const ReasoningChain& c_s,
                        const ReasoningChain& c_c, const CallContext& ctx, Backend& b) {
    RenderContext extra;
    extra.solver_chain = c_s.raw_text;
    extra.challenger_chain = c_c.raw_text;
    auto resp =
        b.complete(make_request(Role::Feedback, render_prompt(p_f, q, extra), q, ctx));
    return parse_feedback(resp.content, ctx.round);
}

// ---------------------------------------------------------------------------
// Feedback parsing

namespace {

using text::contains_ci;
using text::trim;

std::optional<FeedbackItem> parse_inline_item(const std::string& block) {
    FeedbackItem item;
    bool have_chain = false, have_step = false, have_suggestion = false;

    std::vector<std::string> fields;
    std::string cur;
    for (char c : block) {
        if (c == ';') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);

    for (const auto& f : fields) {
        auto colon = f.find(':');
        if (colon == std::string::npos) continue;
        std::string key = text::to_lower(trim(f.substr(0, colon)));
        std::string value = trim(f.substr(colon + 1));
        if (key == "chain") {
            if (contains_ci(value, "c_s") || contains_ci(value, "solver")) {
                item.chain = Role::Solver;
                have_chain = true;
            } else if (contains_ci(value, "c_c") || contains_ci(value, "challenger")) {
                item.chain = Role::Challenger;
                have_chain = true;
            }
        } else if (key == "step") {
            // ranges like "(4)-(5)" collapse to the first index
            std::size_t i = 0;
            while (i < value.size() && !std::isdigit(static_cast<unsigned char>(value[i])))
                ++i;
            std::size_t start = i;
            while (i < value.size() && std::isdigit(static_cast<unsigned char>(value[i])))
                ++i;
            if (i > start) {
                item.step = std::stoi(value.substr(start, i - start));
                have_step = true;
            }
        } else if (key == "issue type") {
            if (contains_ci(value, "missing assumption")) {
                item.issue = IssueType::MissingAssumption;
            } else if (contains_ci(value, "incorrect inference")) {
                item.issue = IssueType::IncorrectInference;
            } else if (contains_ci(value, "unclear step")) {
                item.issue = IssueType::UnclearStep;
            } else {
                item.issue = IssueType::Other;
                item.issue_text = value;
            }
        } else if (key == "suggestion") {
            item.suggestion = value;
            have_suggestion = !value.empty();
        }
    }
    if (!have_chain || !have_step || !have_suggestion) return std::nullopt;
    return item;
}

bool is_section_header(const std::string& line) {
    std::string t = trim(line);
    return !t.empty() && t.front() == '[' && t.find(']') != std::string::npos;
}

} // namespace

FeedbackBundle parse_feedback(std::string_view raw, int round) {
    FeedbackBundle bundle;
    bundle.raw_text = std::string(raw);

    // inline step items anywhere in the text
    const std::string s(raw);
    std::size_t pos = 0;
    while ((pos = s.find('{', pos)) != std::string::npos) {
        std::size_t close = s.find('}', pos);
        if (close == std::string::npos) break;
        std::string block = s.substr(pos + 1, close - pos - 1);
        if (contains_ci(block, "chain")) {
            if (auto item = parse_inline_item(block)) bundle.items.push_back(*item);
        }
        pos = close + 1;
    }

    // bracketed sections
    enum class Section { None, Directive, Strategy };
    Section section = Section::None;
    std::vector<std::string> directive_lines;
    std::string strategy_name;
    std::string strategy_def;
    bool in_strategy_def = false;

    for (const auto& line : text::split_lines(s)) {
        if (is_section_header(line)) {
            if (contains_ci(line, "step 1 output"))
                section = Section::Directive;
            else if (contains_ci(line, "step 2 output"))
                section = Section::Strategy;
            else
                section = Section::None;
            in_strategy_def = false;
            continue;
        }
        std::string t = trim(line);
        if (t.empty()) continue;
        if (section == Section::Directive) {
            // skip preamble lines like "Imperative principle ...:"
            if (directive_lines.empty() && t.back() == ':' && t.find('{') == std::string::npos)
                continue;
            directive_lines.push_back(t);
        } else if (section == Section::Strategy) {
            if (text::starts_with_ci(t, "strategy name")) {
                auto colon = t.find(':');
                if (colon != std::string::npos) strategy_name = trim(t.substr(colon + 1));
                in_strategy_def = false;
            } else if (text::starts_with_ci(t, "strategy definition")) {
                auto colon = t.find(':');
                if (colon != std::string::npos) strategy_def = trim(t.substr(colon + 1));
                in_strategy_def = true;
            } else if (in_strategy_def) {
                strategy_def += " " + t;
            }
        }
    }

    if (!directive_lines.empty()) {
        std::string d;
        for (const auto& l : directive_lines) {
            if (!d.empty()) d += "\n";
            d += l;
        }
        bundle.solver_directive = d;
    }
    if (!strategy_def.empty()) {
        ErrorStrategy strat;
        strat.name = strategy_name;
        strat.definition = strategy_def;
        strat.evolved = true;
        strat.evolved_round = round;
        bundle.next_strategy = strat;
    }

    const bool has_directive = bundle.solver_directive.has_value();
    const bool has_strategy = bundle.next_strategy.has_value();
    if (has_directive && has_strategy)
        bundle.status = BundleStatus::Ok;
    else if (has_directive || has_strategy)
        bundle.status = BundleStatus::Partial;
    else
        bundle.status = BundleStatus::Unparseable;
    return bundle;
}

std::string serialize_feedback(const FeedbackBundle& bundle) {
    std::ostringstream ss;
    ss << "[Step 1: Comparative Logic Analysis]\n";
    for (const auto& item : bundle.items) {
        ss << "{Chain: " << (item.chain == Role::Solver ? "C_S" : "C_C")
           << "; Step: " << item.step << "; Issue type: "
           << (item.issue == IssueType::Other ? item.issue_text : to_string(item.issue))
           << "; Suggestion: " << item.suggestion << "}\n";
    }
    ss << "\n[Step 1 Output: Logical Enhancement Directive for G_S]\n";
    if (bundle.solver_directive) ss << *bundle.solver_directive << "\n";
    ss << "\n[Step 2: Strategic Rationale]\n"
       << "Evolutionary Direction: derived from the latest contrast.\n";
    ss << "\n[Step 2 Output: Next-Step Adversarial Strategy for G_C]\n";
    if (bundle.next_strategy) {
        ss << "Strategy Name: " << bundle.next_strategy->name << "\n"
           << "Strategy Definition: " << bundle.next_strategy->definition << "\n";
    }
    return ss.str();
}

} // namespace capcot
