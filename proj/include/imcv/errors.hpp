#pragma once

#include <stdexcept>
#include <string>

namespace imcv {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define IMCV_DEFINE_ERROR(name)                 \
    class name : public error {                 \
    public:                                     \
        using error::error;                     \
    }

IMCV_DEFINE_ERROR(domain_error);          // singular evaluation (division by zero, bad power)
IMCV_DEFINE_ERROR(budget_error);          // subdivision cap exceeded
IMCV_DEFINE_ERROR(misaligned_labels);     // grid cell straddles label regions
IMCV_DEFINE_ERROR(infeasible);            // IMC row admits no distribution
IMCV_DEFINE_ERROR(combinatorial_cap);     // vertex enumeration too large
IMCV_DEFINE_ERROR(non_convergence);       // value iteration cap reached
IMCV_DEFINE_ERROR(alphabet_mismatch);     // DFA incomplete over a used label
IMCV_DEFINE_ERROR(no_feasible_eta);       // no grid size meets the completeness inequality
IMCV_DEFINE_ERROR(validation_error);      // semantically invalid input

#undef IMCV_DEFINE_ERROR

/// Syntax error with a 1-based source position.
class parse_error : public error {
public:
    parse_error(const std::string& what, int line, int column)
        : error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          message_(what), line_(line), column_(column) {}

    /// Message without the position suffix.
    [[nodiscard]] const std::string& message() const { return message_; }
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    std::string message_;
    int line_;
    int column_;
};

} // namespace imcv
