#include "capcot/parse.hpp"

#include "capcot/errors.hpp"
#include "capcot/textutil.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>

namespace capcot {

namespace {

using text::trim;

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

/// Matches a scheme marker at the start of a trimmed line; returns the text
/// after the marker, or nullopt.
std::optional<std::string> match_marker(const std::string& line, StepScheme scheme) {
    const std::string t = trim(line);
    std::size_t i = 0;
    switch (scheme) {
        case StepScheme::Paren: {
            if (t.empty() || t[0] != '(') return std::nullopt;
            i = 1;
            std::size_t d = i;
            while (d < t.size() && is_digit(t[d])) ++d;
            if (d == i || d >= t.size() || t[d] != ')') return std::nullopt;
            return trim(t.substr(d + 1));
        }
        case StepScheme::Dot: {
            std::size_t d = 0;
            while (d < t.size() && is_digit(t[d])) ++d;
            if (d == 0 || d >= t.size() || t[d] != '.') return std::nullopt;
            // require whitespace after the dot so "3.5" is not a marker
            if (d + 1 < t.size() && !std::isspace(static_cast<unsigned char>(t[d + 1])))
                return std::nullopt;
            return trim(t.substr(d + 1));
        }
        case StepScheme::StepColon: {
            if (!text::starts_with_ci(t, "step ")) return std::nullopt;
            std::size_t d = 5;
            std::size_t e = d;
            while (e < t.size() && is_digit(t[e])) ++e;
            if (e == d) return std::nullopt;
            while (e < t.size() && std::isspace(static_cast<unsigned char>(t[e]))) ++e;
            if (e >= t.size() || t[e] != ':') return std::nullopt;
            return trim(t.substr(e + 1));
        }
    }
    return std::nullopt;
}

/// Position just after the last answer marker ("Final answer:" or "Answer:"),
/// or npos.
std::size_t find_last_answer_marker(std::string_view s) {
    std::size_t best = std::string::npos;
    for (std::size_t i = 0; i + 7 <= s.size(); ++i) {
        if (!text::starts_with_ci(s.substr(i), "answer")) continue;
        // word boundary on the left ("final answer" still lands here)
        if (i > 0 && std::isalnum(static_cast<unsigned char>(s[i - 1]))) continue;
        std::size_t j = i + 6;
        while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
        if (j < s.size() && s[j] == ':') best = j + 1;
    }
    return best;
}

std::string clean_answer(std::string_view s) {
    std::string t = trim(s);
    // answers are plain text; drop math-mode dollar signs
    std::erase(t, '$');
    t = trim(t);
    while (!t.empty() && t.back() == '.') t.pop_back();
    return trim(t);
}

bool token_starts_numeric(const std::string& tok) {
    std::size_t i = 0;
    if (i < tok.size() && (tok[i] == '-' || tok[i] == '+')) ++i;
    return i < tok.size() && is_digit(tok[i]);
}

std::string format_double(double v) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

/// First number or simple rational "a/b" in the string. Commas acting as
/// thousands separators are removed first.
std::optional<double> scan_number(std::string_view raw) {
    std::string s;
    s.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (c == ',' && i > 0 && i + 3 < raw.size() && is_digit(raw[i - 1]) &&
            is_digit(raw[i + 1]) && is_digit(raw[i + 2]) && is_digit(raw[i + 3])) {
            continue;  // 1,234 -> 1234
        }
        s.push_back(c);
    }
    auto read_num = [&](std::size_t& i) -> std::optional<double> {
        std::size_t start = i;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
        std::size_t d0 = i;
        while (i < s.size() && is_digit(s[i])) ++i;
        if (i == d0) {
            i = start;
            return std::nullopt;
        }
        if (i < s.size() && s[i] == '.' && i + 1 < s.size() && is_digit(s[i + 1])) {
            ++i;
            while (i < s.size() && is_digit(s[i])) ++i;
        }
        return std::stod(s.substr(start, i - start));
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!is_digit(s[i]) &&
            !((s[i] == '-' || s[i] == '+') && i + 1 < s.size() && is_digit(s[i + 1])))
            continue;
        std::size_t j = i;
        auto num = read_num(j);
        if (!num) continue;
        std::size_t k = j;
        while (k < s.size() && (s[k] == ' ')) ++k;
        if (k < s.size() && s[k] == '/') {
            ++k;
            while (k < s.size() && s[k] == ' ') ++k;
            auto den = read_num(k);
            if (den && *den != 0.0) return *num / *den;
        }
        return *num;
    }
    return std::nullopt;
}

} // namespace

ReasoningChain parse_chain(std::string_view raw, Role source) {
    ReasoningChain chain;
    chain.source = source;
    chain.raw_text = std::string(raw);

    const auto lines = text::split_lines(raw);
    const StepScheme order[] = {StepScheme::Paren, StepScheme::Dot, StepScheme::StepColon};
    std::optional<StepScheme> scheme;
    for (StepScheme s : order) {
        for (const auto& line : lines) {
            if (match_marker(line, s)) {
                scheme = s;
                break;
            }
        }
        if (scheme) break;
    }

    if (scheme) {
        chain.scheme = *scheme;
        std::string current;
        bool open = false;
        auto flush = [&] {
            if (open) {
                Step st;
                st.index = static_cast<int>(chain.steps.size()) + 1;
                st.text = text::collapse_whitespace(current);
                chain.steps.push_back(std::move(st));
            }
            current.clear();
        };
        for (const auto& line : lines) {
            if (auto rest = match_marker(line, *scheme)) {
                flush();
                open = true;
                current = *rest;
            } else if (open && !trim(line).empty()) {
                current += " " + trim(line);
            }
        }
        flush();
    }

    const bool has_marker = find_last_answer_marker(raw) != std::string::npos;
    if (chain.steps.empty() && !has_marker) {
        chain.status = ChainStatus::Malformed;
        return chain;
    }
    chain.status = has_marker ? ChainStatus::Ok : ChainStatus::Partial;
    chain.final_answer = extract_final_answer(raw, AnswerKind::FreeText);
    return chain;
}

std::string render_chain(const ReasoningChain& chain) {
    std::string out;
    for (const auto& st : chain.steps) {
        if (!out.empty()) out += "\n";
        switch (chain.scheme) {
            case StepScheme::Paren:
                out += "(" + std::to_string(st.index) + ") ";
                break;
            case StepScheme::Dot:
                out += std::to_string(st.index) + ". ";
                break;
            case StepScheme::StepColon:
                out += "Step " + std::to_string(st.index) + ": ";
                break;
        }
        out += st.text;
    }
    return out;
}

std::string extract_final_answer(std::string_view chain_text, AnswerKind /*kind*/) {
    if (trim(chain_text).empty()) throw NoAnswerFound();

    std::size_t pos = find_last_answer_marker(chain_text);
    if (pos != std::string::npos) {
        std::size_t end = chain_text.find('\n', pos);
        if (end == std::string::npos) end = chain_text.size();
        return clean_answer(chain_text.substr(pos, end - pos));
    }

    // Trailing-token fallback: last numeric token (plus trailing unit words)
    // of the last non-empty line.
    const auto lines = text::split_lines(chain_text);
    std::string last;
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        if (!trim(*it).empty()) {
            last = trim(*it);
            break;
        }
    }
    auto tokens = text::tokenize(last);
    for (std::size_t i = tokens.size(); i-- > 0;) {
        if (token_starts_numeric(tokens[i])) {
            std::string out;
            for (std::size_t j = i; j < tokens.size(); ++j) {
                if (!out.empty()) out += " ";
                out += tokens[j];
            }
            return clean_answer(out);
        }
    }
    return clean_answer(last);
}

CanonicalAnswer normalize_answer(std::string_view raw, AnswerKind kind) {
    const std::string raw_str(raw);
    CanonicalAnswer out;
    out.kind = kind;
    switch (kind) {
        case AnswerKind::Numeric: {
            std::string s = raw_str;
            std::erase(s, '$');
            auto v = scan_number(s);
            if (!v) throw UnparseableAnswer(raw_str);
            out.number = *v;
            return out;
        }
        case AnswerKind::ExpressionSet: {
            std::string s = raw_str;
            std::erase(s, '$');
            std::erase(s, '{');
            std::erase(s, '}');
            std::vector<double> values;
            std::string part;
            auto flush = [&] {
                if (trim(part).empty()) return;
                auto v = scan_number(part);
                if (!v) throw UnparseableAnswer(raw_str);
                values.push_back(*v);
                part.clear();
            };
            for (char c : s) {
                if (c == ',')
                    flush();
                else
                    part.push_back(c);
            }
            flush();
            if (values.empty()) throw UnparseableAnswer(raw_str);
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
            out.values = std::move(values);
            return out;
        }
        case AnswerKind::MultipleChoice: {
            for (const auto& tok : text::tokenize(raw_str)) {
                std::string letters;
                for (char c : tok)
                    if (std::isalnum(static_cast<unsigned char>(c))) letters.push_back(c);
                if (letters.size() == 1 && std::isalpha(static_cast<unsigned char>(letters[0]))) {
                    out.choice = static_cast<char>(std::toupper(static_cast<unsigned char>(letters[0])));
                    return out;
                }
            }
            throw UnparseableAnswer(raw_str);
        }
        case AnswerKind::FreeText: {
            std::string s = text::strip_terminal_punct(
                text::collapse_whitespace(text::to_lower(raw_str)));
            if (s.empty()) throw UnparseableAnswer(raw_str);
            out.string_value = std::move(s);
            return out;
        }
    }
    throw UnparseableAnswer(raw_str);
}

std::string canonical_to_string(const CanonicalAnswer& a) {
    switch (a.kind) {
        case AnswerKind::Numeric:
            return format_double(a.number);
        case AnswerKind::ExpressionSet: {
            std::string out = "{";
            for (std::size_t i = 0; i < a.values.size(); ++i) {
                if (i) out += ",";
                out += format_double(a.values[i]);
            }
            return out + "}";
        }
        case AnswerKind::MultipleChoice:
            return std::string(1, a.choice);
        case AnswerKind::FreeText:
            return a.string_value;
    }
    return "";
}

bool answers_equal(const CanonicalAnswer& a, const CanonicalAnswer& b, double tol) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case AnswerKind::Numeric:
            return std::fabs(a.number - b.number) <= tol;
        case AnswerKind::ExpressionSet: {
            if (a.values.size() != b.values.size()) return false;
            for (std::size_t i = 0; i < a.values.size(); ++i)
                if (std::fabs(a.values[i] - b.values[i]) > tol) return false;
            return true;
        }
        case AnswerKind::MultipleChoice:
            return a.choice == b.choice;
        case AnswerKind::FreeText:
            return a.string_value == b.string_value;
    }
    return false;
}

std::string normalize_guideline(std::string_view g) {
    auto tokens = text::word_tokens(g);
    std::sort(tokens.begin(), tokens.end());
    std::string key;
    for (const auto& t : tokens) {
        if (!key.empty()) key += " ";
        key += t;
    }
    return key;
}

} // namespace capcot
