#pragma once

#include <stdexcept>
#include <string>

namespace wgsim {

// Process exit codes used by the command-line front end.
enum class ExitCode : int { ok = 0, validation = 2, numerical = 3, io = 4 };

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

// Bad input: out-of-domain arguments, malformed scenarios, unclosed design constraints.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ExitCode::validation, what) {}
};

// Root bracketing or convergence failure.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ExitCode::numerical, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ExitCode::io, what) {}
};

}  // namespace wgsim
