#include "capcot/json_io.hpp"

#include <set>

namespace capcot {

OJson to_json(const CanonicalAnswer& a) {
    OJson j;
    j["kind"] = to_string(a.kind);
    switch (a.kind) {
        case AnswerKind::Numeric: j["number"] = a.number; break;
        case AnswerKind::ExpressionSet: j["values"] = a.values; break;
        case AnswerKind::MultipleChoice: j["choice"] = std::string(1, a.choice); break;
        case AnswerKind::FreeText: j["string_value"] = a.string_value; break;
    }
    return j;
}

CanonicalAnswer canonical_answer_from_json(const OJson& j) {
    CanonicalAnswer a;
    a.kind = answer_kind_from_string(j.at("kind").get<std::string>());
    switch (a.kind) {
        case AnswerKind::Numeric: a.number = j.at("number").get<double>(); break;
        case AnswerKind::ExpressionSet:
            a.values = j.at("values").get<std::vector<double>>();
            break;
        case AnswerKind::MultipleChoice:
            a.choice = j.at("choice").get<std::string>().at(0);
            break;
        case AnswerKind::FreeText:
            a.string_value = j.at("string_value").get<std::string>();
            break;
    }
    return a;
}

OJson to_json(const Query& q) {
    OJson j;
    j["id"] = q.id;
    j["text"] = q.text;
    j["answer_kind"] = to_string(q.answer_kind);
    if (q.gold) j["gold"] = to_json(q.gold->canonical);
    return j;
}

Query query_from_json(const OJson& j) {
    Query q;
    q.id = j.at("id").get<std::string>();
    q.text = j.at("text").get<std::string>();
    q.answer_kind = answer_kind_from_string(j.at("answer_kind").get<std::string>());
    if (j.contains("gold") && !j["gold"].is_null())
        q.gold = GoldAnswer{canonical_answer_from_json(j["gold"])};
    return q;
}

OJson to_json(const ErrorStrategy& s) {
    OJson j;
    j["name"] = s.name;
    j["families"] = OJson::array();
    for (ErrorFamily f : s.families) j["families"].push_back(to_string(f));
    j["definition"] = s.definition;
    j["origin"] = s.evolved ? "evolved" : "cold-start";
    if (s.evolved) j["round"] = s.evolved_round;
    return j;
}

ErrorStrategy strategy_from_json(const OJson& j) {
    ErrorStrategy s;
    s.name = j.at("name").get<std::string>();
    for (const auto& f : j.at("families"))
        s.families.insert(error_family_from_string(f.get<std::string>()));
    s.definition = j.at("definition").get<std::string>();
    s.evolved = j.at("origin").get<std::string>() == "evolved";
    if (s.evolved) s.evolved_round = j.at("round").get<int>();
    return s;
}

OJson to_json(const RolePrompt& p) {
    OJson j;
    j["role"] = to_string(p.role);
    j["version"] = p.version;
    j["base_instructions"] = p.base_blocks;
    j["dynamic_guidelines"] = p.dynamic_guidelines;
    if (p.strategy_slot) j["strategy_slot"] = to_json(*p.strategy_slot);
    return j;
}

RolePrompt role_prompt_from_json(const OJson& j) {
    RolePrompt p;
    p.role = role_from_string(j.at("role").get<std::string>());
    p.version = j.at("version").get<int>();
    p.base_blocks = j.at("base_instructions").get<std::vector<std::string>>();
    p.dynamic_guidelines = j.at("dynamic_guidelines").get<std::vector<std::string>>();
    if (j.contains("strategy_slot") && !j["strategy_slot"].is_null())
        p.strategy_slot = strategy_from_json(j["strategy_slot"]);
    return p;
}

OJson to_json(const ReasoningChain& c) {
    OJson j;
    j["source"] = to_string(c.source);
    j["steps"] = OJson::array();
    for (const auto& st : c.steps)
        j["steps"].push_back({{"index", st.index}, {"text", st.text}});
    j["final_answer"] = c.final_answer;
    j["raw_text"] = c.raw_text;
    j["status"] = to_string(c.status);
    j["scheme"] = to_string(c.scheme);
    return j;
}

ReasoningChain chain_from_json(const OJson& j) {
    ReasoningChain c;
    c.source = role_from_string(j.at("source").get<std::string>());
    for (const auto& s : j.at("steps"))
        c.steps.push_back({s.at("index").get<int>(), s.at("text").get<std::string>()});
    c.final_answer = j.at("final_answer").get<std::string>();
    c.raw_text = j.at("raw_text").get<std::string>();
    const std::string status = j.at("status").get<std::string>();
    c.status = status == "ok"        ? ChainStatus::Ok
               : status == "partial" ? ChainStatus::Partial
                                     : ChainStatus::Malformed;
    const std::string scheme = j.at("scheme").get<std::string>();
    c.scheme = scheme == "paren" ? StepScheme::Paren
               : scheme == "dot" ? StepScheme::Dot
                                 : StepScheme::StepColon;
    return c;
}

OJson to_json(const FeedbackItem& item) {
    OJson j;
    j["chain"] = to_string(item.chain);
    j["step"] = item.step;
    j["issue_type"] = item.issue == IssueType::Other ? item.issue_text : to_string(item.issue);
    j["suggestion"] = item.suggestion;
    return j;
}

FeedbackItem feedback_item_from_json(const OJson& j) {
    FeedbackItem item;
    item.chain = role_from_string(j.at("chain").get<std::string>());
    item.step = j.at("step").get<int>();
    const std::string issue = j.at("issue_type").get<std::string>();
    if (issue == "missing assumption") {
        item.issue = IssueType::MissingAssumption;
    } else if (issue == "incorrect inference") {
        item.issue = IssueType::IncorrectInference;
    } else if (issue == "unclear step") {
        item.issue = IssueType::UnclearStep;
    } else {
        item.issue = IssueType::Other;
        item.issue_text = issue;
    }
    item.suggestion = j.at("suggestion").get<std::string>();
    return item;
}

OJson to_json(const FeedbackBundle& b) {
    OJson j;
    j["items"] = OJson::array();
    for (const auto& item : b.items) j["items"].push_back(to_json(item));
    if (b.solver_directive) j["solver_directive"] = *b.solver_directive;
    if (b.next_strategy) j["next_strategy"] = to_json(*b.next_strategy);
    j["raw_text"] = b.raw_text;
    j["status"] = to_string(b.status);
    return j;
}

FeedbackBundle bundle_from_json(const OJson& j) {
    FeedbackBundle b;
    for (const auto& item : j.at("items")) b.items.push_back(feedback_item_from_json(item));
    if (j.contains("solver_directive")) b.solver_directive = j["solver_directive"].get<std::string>();
    if (j.contains("next_strategy")) b.next_strategy = strategy_from_json(j["next_strategy"]);
    b.raw_text = j.at("raw_text").get<std::string>();
    const std::string status = j.at("status").get<std::string>();
    b.status = status == "ok"        ? BundleStatus::Ok
               : status == "partial" ? BundleStatus::Partial
                                     : BundleStatus::Unparseable;
    return b;
}

OJson to_json(const FeedbackLedger& l) {
    OJson j;
    j["round"] = l.round;
    j["entries"] = OJson::array();
    for (const auto& e : l.entries)
        j["entries"].push_back({{"query_id", e.query_id}, {"bundle", to_json(e.bundle)}});
    j["notes"] = l.notes;
    return j;
}

FeedbackLedger ledger_from_json(const OJson& j) {
    FeedbackLedger l;
    l.round = j.at("round").get<int>();
    for (const auto& e : j.at("entries"))
        l.entries.push_back(
            {e.at("query_id").get<std::string>(), bundle_from_json(e.at("bundle"))});
    l.notes = j.at("notes").get<std::vector<std::string>>();
    return l;
}

OJson to_json(const DecodingConfig& d) {
    OJson j;
    j["temperature"] = d.temperature;
    j["max_tokens"] = d.max_tokens;
    j["frequency_penalty"] = d.frequency_penalty;
    j["presence_penalty"] = d.presence_penalty;
    j["nucleus_sampling"] = d.nucleus_sampling;
    return j;
}

DecodingConfig decoding_from_json(const OJson& j) {
    DecodingConfig d;
    d.temperature = j.value("temperature", 0.0);
    d.max_tokens = j.value("max_tokens", 2048);
    d.frequency_penalty = j.value("frequency_penalty", 0.0);
    d.presence_penalty = j.value("presence_penalty", 0.0);
    d.nucleus_sampling = j.value("nucleus_sampling", false);
    return d;
}

OJson to_json(const TokenRecord& r) {
    OJson j;
    j["run_id"] = r.run_id;
    j["round"] = r.round;
    j["role"] = to_string(r.role);
    j["query_id"] = r.query_id;
    j["prompt_tokens"] = r.prompt_tokens;
    j["completion_tokens"] = r.completion_tokens;
    return j;
}

TokenRecord token_record_from_json(const OJson& j) {
    TokenRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.round = j.at("round").get<int>();
    r.role = role_from_string(j.at("role").get<std::string>());
    r.query_id = j.at("query_id").get<std::string>();
    r.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
    r.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
    return r;
}

} // namespace capcot
