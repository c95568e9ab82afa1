#pragma once

#include <stdexcept>
#include <string>

namespace ragkit {

// Base class for all ragkit errors. Subclasses map onto the CLI's
// exit-code classes (see tools/ragkit_main.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters or run configuration (bad k values, malformed flags,
// inconsistent chunker settings).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Filesystem and input-artifact problems: missing corpus directory,
// unreadable files, malformed chunk/question files.
class IngestError : public Error {
public:
    using Error::Error;
};

// Violated internal contracts: dimension mismatches, duplicate chunk ids,
// NaN scores from a backend, empty chunk text reaching the prompt builder.
class ContractError : public Error {
public:
    using Error::Error;
};

// Mathematically undefined requests: zero-vector normalization, cosine of
// mismatched dimensions.
class DomainError : public Error {
public:
    using Error::Error;
};

// Failure talking to a remote backend. `stage` names the pipeline stage
// ("embed", "score", "generate") and `kind` the failure class.
class TransportError : public Error {
public:
    enum class Kind { connect_failed, timeout, http_status, malformed_response };

    TransportError(Kind kind, std::string stage, const std::string& message,
                   bool retryable)
        : Error(message), kind_(kind), stage_(std::move(stage)),
          retryable_(retryable) {}

    Kind kind() const { return kind_; }
    const std::string& stage() const { return stage_; }
    bool retryable() const { return retryable_; }

private:
    Kind kind_;
    std::string stage_;
    bool retryable_;
};

// Errors loading a persisted vector index. Each corruption class is
// distinguishable by category.
class IndexLoadError : public Error {
public:
    enum class Category { bad_magic, bad_version, truncated, checksum_mismatch, malformed_table };

    IndexLoadError(Category category, const std::string& message)
        : Error(message), category_(category) {}

    Category category() const { return category_; }

private:
    Category category_;
};

} // namespace ragkit
