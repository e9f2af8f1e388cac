#include "capcot/types.hpp"

#include "capcot/errors.hpp"
#include "capcot/textutil.hpp"

namespace capcot {

const char* to_string(Role r) {
    switch (r) {
        case Role::Solver: return "solver";
        case Role::Challenger: return "challenger";
        case Role::Feedback: return "feedback";
    }
    return "?";
}

const char* to_string(AnswerKind k) {
    switch (k) {
        case AnswerKind::Numeric: return "numeric";
        case AnswerKind::ExpressionSet: return "expression-set";
        case AnswerKind::MultipleChoice: return "multiple-choice";
        case AnswerKind::FreeText: return "free-text";
    }
    return "?";
}

const char* to_string(ErrorFamily f) {
    switch (f) {
        case ErrorFamily::Jump: return "jump";
        case ErrorFamily::Confusion: return "confusion";
        case ErrorFamily::Fuzzy: return "fuzzy";
        case ErrorFamily::Wrapper: return "wrapper";
    }
    return "?";
}

const char* to_string(ChainStatus s) {
    switch (s) {
        case ChainStatus::Ok: return "ok";
        case ChainStatus::Partial: return "partial";
        case ChainStatus::Malformed: return "malformed";
    }
    return "?";
}

const char* to_string(StepScheme s) {
    switch (s) {
        case StepScheme::Paren: return "paren";
        case StepScheme::Dot: return "dot";
        case StepScheme::StepColon: return "step-colon";
    }
    return "?";
}

const char* to_string(IssueType t) {
    switch (t) {
        case IssueType::MissingAssumption: return "missing assumption";
        case IssueType::IncorrectInference: return "incorrect inference";
        case IssueType::UnclearStep: return "unclear step";
        case IssueType::Other: return "other";
    }
    return "?";
}

const char* to_string(BundleStatus s) {
    switch (s) {
        case BundleStatus::Ok: return "ok";
        case BundleStatus::Partial: return "partial";
        case BundleStatus::Unparseable: return "unparseable";
    }
    return "?";
}

Role role_from_string(const std::string& s) {
    std::string t = text::to_lower(s);
    if (t == "solver") return Role::Solver;
    if (t == "challenger") return Role::Challenger;
    if (t == "feedback") return Role::Feedback;
    throw ConfigError("unknown role: " + s);
}

AnswerKind answer_kind_from_string(const std::string& s) {
    std::string t = text::to_lower(s);
    if (t == "numeric") return AnswerKind::Numeric;
    if (t == "expression-set") return AnswerKind::ExpressionSet;
    if (t == "multiple-choice") return AnswerKind::MultipleChoice;
    if (t == "free-text") return AnswerKind::FreeText;
    throw ConfigError("unknown answer kind: " + s);
}

ErrorFamily error_family_from_string(const std::string& s) {
    std::string t = text::to_lower(s);
    if (t == "jump") return ErrorFamily::Jump;
    if (t == "confusion") return ErrorFamily::Confusion;
    if (t == "fuzzy") return ErrorFamily::Fuzzy;
    if (t == "wrapper") return ErrorFamily::Wrapper;
    throw ConfigError("unknown error family: " + s);
}

const char* family_definition(ErrorFamily f) {
    switch (f) {
        case ErrorFamily::Jump: return "omits key steps";
        case ErrorFamily::Confusion: return "mixes related concepts";
        case ErrorFamily::Fuzzy: return "hides gaps behind vague language";
        case ErrorFamily::Wrapper: return "embeds a wrong core step in a fluent explanation";
    }
    return "";
}

ErrorStrategy cold_start_strategy(const std::set<ErrorFamily>& families) {
    ErrorStrategy s;
    s.families = families;
    std::string name;
    std::string def;
    for (ErrorFamily f : families) {
        if (!name.empty()) name += "+";
        name += to_string(f);
        if (!def.empty()) def += "; ";
        def += std::string(to_string(f)) + ": " + family_definition(f);
    }
    s.name = name;
    s.definition = def;
    s.evolved = false;
    s.evolved_round = 0;
    return s;
}

} // namespace capcot
