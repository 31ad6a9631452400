#pragma once

#include <stdexcept>
#include <string>

namespace biasaudit {

// Base class for all validation failures raised by this library. I/O
// problems get their own branch so the CLI can map them to exit code 2.
struct AuditError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoFailure : AuditError {
    using AuditError::AuditError;
};

// corpus loading
struct MalformedRecord : AuditError {
    MalformedRecord(std::size_t line, const std::string& what_field)
        : AuditError("malformed record at line " + std::to_string(line) + ": " + what_field),
          line_no(line), field(what_field) {}
    std::size_t line_no;
    std::string field;
};

struct DuplicateImageId : AuditError {
    explicit DuplicateImageId(const std::string& id)
        : AuditError("duplicate image_id: " + id), image_id(id) {}
    std::string image_id;
};

struct EmptyCorpus : AuditError {
    EmptyCorpus() : AuditError("corpus contains no records") {}
};

// spec/lexicon loading
struct MissingTermSet : AuditError {
    using AuditError::AuditError;
};

struct UnknownClassName : AuditError {
    using AuditError::AuditError;
};

struct EmptyTermList : AuditError {
    using AuditError::AuditError;
};

struct InvalidSpec : AuditError {
    using AuditError::AuditError;
};

// corpus queries
struct UnknownModel : AuditError {
    explicit UnknownModel(const std::string& id)
        : AuditError("unknown model id: " + id), model_id(id) {}
    std::string model_id;
};

struct UnknownPrompt : AuditError {
    explicit UnknownPrompt(const std::string& id)
        : AuditError("unknown prompt id: " + id), prompt_id(id) {}
    std::string prompt_id;
};

// extraction
struct SpecMismatch : AuditError {
    using AuditError::AuditError;
};

struct EmptySlice : AuditError {
    EmptySlice() : AuditError("slice contains no records") {}
};

// metrics
struct InvalidCardinality : AuditError {
    explicit InvalidCardinality(int k)
        : AuditError("class cardinality must be >= 2, got " + std::to_string(k)) {}
};

struct EmptyDistribution : AuditError {
    EmptyDistribution() : AuditError("distribution has no observations") {}
};

struct OutOfRange : AuditError {
    using AuditError::AuditError;
};

struct EmptyInput : AuditError {
    using AuditError::AuditError;
};

struct EmptyTermSet : AuditError {
    using AuditError::AuditError;
};

struct NotApplicable : AuditError {
    using AuditError::AuditError;
};

// report
struct MissingBaseline : AuditError {
    explicit MissingBaseline(const std::string& id)
        : AuditError("baseline model not present in corpus: " + id), model_id(id) {}
    std::string model_id;
};

// harness
struct PlanMismatch : AuditError {
    using AuditError::AuditError;
};

struct TooLarge : AuditError {
    using AuditError::AuditError;
};

} // namespace biasaudit
