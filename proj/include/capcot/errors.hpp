#pragma once

#include <stdexcept>
#include <string>

namespace capcot {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoAnswerFound : Error {
    NoAnswerFound() : Error("no answer found in empty text") {}
};

struct UnparseableAnswer : Error {
    explicit UnparseableAnswer(const std::string& raw)
        : Error("unparseable answer: \"" + raw + "\"") {}
};

struct EmptyTaxonomy : Error {
    EmptyTaxonomy() : Error("error-strategy taxonomy is empty") {}
};

struct ScriptMiss : Error {
    explicit ScriptMiss(const std::string& key)
        : Error("scripted backend has no entry for " + key), key(key) {}
    std::string key;
};

struct BackendUnavailable : Error {
    explicit BackendUnavailable(const std::string& why)
        : Error("backend unavailable: " + why) {}
};

struct InvalidResponse : Error {
    explicit InvalidResponse(const std::string& why)
        : Error("invalid backend response: " + why) {}
};

struct ResumeMismatch : Error {
    explicit ResumeMismatch(const std::string& why)
        : Error("lineage resume mismatch: " + why) {}
};

struct UnreadableFile : Error {
    explicit UnreadableFile(const std::string& path)
        : Error("cannot read file: " + path) {}
};

struct EmptyDataset : Error {
    explicit EmptyDataset(const std::string& path)
        : Error("dataset has no usable records: " + path) {}
};

struct MissingLineage : Error {
    explicit MissingLineage(const std::string& path)
        : Error("no lineage found at: " + path) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& why)
        : Error("config error: " + why) {}
};

} // namespace capcot
