#pragma once

#include <stdexcept>
#include <string>

namespace evorank {

// Base class for all library errors. Subclasses map onto CLI exit codes:
// validation/parse -> 2, backend/operator -> 3, io/checkpoint -> 4.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

enum class validation_code {
    empty_pool,
    no_positive,
    duplicate_candidate_id,
    cutoff_out_of_range,
    empty_query_set,
    unspecified_negative_type,
    not_single_positive,
    population_too_small,
    invalid_config,
};

class validation_error : public error {
public:
    validation_error(validation_code code, const std::string& what)
        : error(what), code_(code) {}

    validation_code code() const { return code_; }

private:
    validation_code code_;
};

// Malformed input text: bad timestamp string, bad JSONL line, etc.
class parse_error : public error {
public:
    explicit parse_error(const std::string& what, long line = -1)
        : error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    // 1-based line number within the offending file, or -1 when not applicable.
    long line() const { return line_; }

private:
    long line_;
};

enum class backend_code {
    timeout,
    bad_response,
    retries_exhausted,
};

class backend_error : public error {
public:
    backend_error(backend_code code, const std::string& what)
        : error(what), code_(code) {}

    backend_code code() const { return code_; }

private:
    backend_code code_;
};

enum class operator_code {
    call_failed,
    no_parsable_output,
};

class operator_error : public error {
public:
    operator_error(operator_code code, const std::string& what)
        : error(what), code_(code) {}

    operator_code code() const { return code_; }

private:
    operator_code code_;
};

class io_error : public error {
public:
    explicit io_error(const std::string& what) : error(what) {}
};

class corrupt_checkpoint_error : public error {
public:
    explicit corrupt_checkpoint_error(const std::string& what) : error(what) {}
};

} // namespace evorank
