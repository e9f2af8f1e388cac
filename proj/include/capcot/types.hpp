#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace capcot {

enum class Role { Solver, Challenger, Feedback };

enum class AnswerKind { Numeric, ExpressionSet, MultipleChoice, FreeText };

enum class ErrorFamily { Jump, Confusion, Fuzzy, Wrapper };

const char* to_string(Role r);
const char* to_string(AnswerKind k);
const char* to_string(ErrorFamily f);

Role role_from_string(const std::string& s);
AnswerKind answer_kind_from_string(const std::string& s);
ErrorFamily error_family_from_string(const std::string& s);

/// Canonical text of a cold-start error family, injected verbatim into the
/// challenger's strategy definition.
const char* family_definition(ErrorFamily f);

// ---------------------------------------------------------------------------

/// Normalized gold/candidate answer. The active alternative matches the kind.
struct CanonicalAnswer {
    AnswerKind kind = AnswerKind::FreeText;
    double number = 0.0;                  // Numeric
    std::vector<double> values;           // ExpressionSet, sorted ascending
    char choice = '?';                    // MultipleChoice, uppercase
    std::string string_value;             // FreeText

    bool operator==(const CanonicalAnswer&) const = default;
};

struct GoldAnswer {
    CanonicalAnswer canonical;
    bool operator==(const GoldAnswer&) const = default;
};

struct Query {
    std::string id;
    std::string text;
    AnswerKind answer_kind = AnswerKind::FreeText;
    std::optional<GoldAnswer> gold;

    bool operator==(const Query&) const = default;
};

// ---------------------------------------------------------------------------

struct ErrorStrategy {
    std::string name;
    std::set<ErrorFamily> families;   // empty for evolved strategies
    std::string definition;
    bool evolved = false;             // false = cold-start
    int evolved_round = 0;            // valid when evolved

    bool operator==(const ErrorStrategy&) const = default;
};

/// Builds the cold-start strategy for a chosen family subset.
ErrorStrategy cold_start_strategy(const std::set<ErrorFamily>& families);

// ---------------------------------------------------------------------------

struct RolePrompt {
    Role role = Role::Solver;
    int version = 0;
    /// Immutable blocks: role definition first, then the base instructions.
    std::vector<std::string> base_blocks;
    std::vector<std::string> dynamic_guidelines;
    std::optional<ErrorStrategy> strategy_slot;  // Challenger only

    bool operator==(const RolePrompt&) const = default;
};

// ---------------------------------------------------------------------------

enum class ChainStatus { Ok, Partial, Malformed };
enum class StepScheme { Paren, Dot, StepColon };

const char* to_string(ChainStatus s);
const char* to_string(StepScheme s);

struct Step {
    int index = 0;  // 1-based
    std::string text;
    bool operator==(const Step&) const = default;
};

struct ReasoningChain {
    Role source = Role::Solver;  // Solver or Challenger
    std::vector<Step> steps;
    std::string final_answer;
    std::string raw_text;
    ChainStatus status = ChainStatus::Ok;
    StepScheme scheme = StepScheme::Paren;

    bool operator==(const ReasoningChain&) const = default;
};

// ---------------------------------------------------------------------------

enum class IssueType { MissingAssumption, IncorrectInference, UnclearStep, Other };

const char* to_string(IssueType t);

struct FeedbackItem {
    Role chain = Role::Solver;  // Solver or Challenger
    int step = 1;
    IssueType issue = IssueType::Other;
    std::string issue_text;  // original wording, used when issue == Other
    std::string suggestion;

    bool operator==(const FeedbackItem&) const = default;
};

enum class BundleStatus { Ok, Partial, Unparseable };

const char* to_string(BundleStatus s);

struct FeedbackBundle {
    std::vector<FeedbackItem> items;
    std::optional<std::string> solver_directive;
    std::optional<ErrorStrategy> next_strategy;
    std::string raw_text;
    BundleStatus status = BundleStatus::Ok;

    bool operator==(const FeedbackBundle&) const = default;
};

// ---------------------------------------------------------------------------

struct FeedbackLedgerEntry {
    std::string query_id;
    FeedbackBundle bundle;
    bool operator==(const FeedbackLedgerEntry&) const = default;
};

struct FeedbackLedger {
    int round = 1;
    std::vector<FeedbackLedgerEntry> entries;
    std::vector<std::string> notes;

    bool operator==(const FeedbackLedger&) const = default;
};

} // namespace capcot
