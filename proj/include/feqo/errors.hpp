#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace feqo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical input outside the domain of a formula (non-positive energy, etc.).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numerical setup that cannot represent the requested state (grid too narrow,
/// overlapping windows, missing peaks).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The time integrator gave up: norm drift above tolerance or a singular system.
class SolverAbort : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration text. Carries the 1-based line number.
class SyntaxError : public Error {
public:
    SyntaxError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Configuration that parsed but failed validation. Every problem found is kept.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> problems)
        : Error(join(problems)), problems_(std::move(problems)) {}
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& s : items) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> problems_;
};

}  // namespace feqo
