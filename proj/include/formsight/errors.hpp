#pragma once

#include <stdexcept>
#include <string>

namespace formsight {

// CLI exit codes. Every error the tool can raise belongs to exactly one class.
enum class ExitCode : int {
    ok = 0,
    config = 1,    // bad flags, malformed schema/manifest, missing credential
    io = 2,        // unreadable/unwritable files, undecodable images
    provider = 3,  // transport, auth rejection, retry exhaustion, missing fixture
    parse = 4,     // no/malformed JSON in a model response
    coverage = 5,  // key or sample sets that do not line up with the schema/manifest
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ExitCode::io, what) {}
};

struct ProviderError : Error {
    explicit ProviderError(const std::string& what) : Error(ExitCode::provider, what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ExitCode::parse, what) {}
};

struct CoverageError : Error {
    explicit CoverageError(const std::string& what) : Error(ExitCode::coverage, what) {}
};

}  // namespace formsight
