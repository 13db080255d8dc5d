#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cdbc {

/// Base class for every error raised by the library. `code()` is a stable
/// kebab-case identifier suitable for tests and machine-readable output.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

struct Violation {
  std::string code;
  std::string detail;
  bool structural = false;
};

/// Every clause a candidate object failed, in a fixed checking order.
class ValidationReport {
public:
  void add(std::string code, std::string detail, bool structural = false) {
    items_.push_back({std::move(code), std::move(detail), structural});
  }

  bool ok() const noexcept { return items_.empty(); }
  bool has_structural() const noexcept {
    for (const auto& v : items_)
      if (v.structural) return true;
    return false;
  }
  bool contains(const std::string& code) const noexcept {
    for (const auto& v : items_)
      if (v.code == code) return true;
    return false;
  }
  const std::vector<Violation>& items() const noexcept { return items_; }

  std::string summary() const {
    std::string out;
    for (const auto& v : items_) {
      if (!out.empty()) out += "; ";
      out += v.code;
      if (!v.detail.empty()) out += " (" + v.detail + ")";
    }
    return out;
  }

private:
  std::vector<Violation> items_;
};

class ValidationError : public Error {
public:
  explicit ValidationError(ValidationReport report)
      : Error(report.items().empty() ? "invalid" : report.items().front().code,
              "validation failed: " + report.summary()),
        report_(std::move(report)) {}

  const ValidationReport& report() const noexcept { return report_; }

private:
  ValidationReport report_;
};

/// Raised by the composition operators when their preconditions fail.
class CompositionError : public Error {
public:
  using Error::Error;
};

/// Operand interfaces cannot be put in the bijection an operator requires.
class InterfaceMismatchError : public CompositionError {
public:
  using CompositionError::CompositionError;
};

class ExecutionError : public Error {
public:
  using Error::Error;
};

class FormatError : public Error {
public:
  using Error::Error;
};

/// Either a sealed value or the report explaining why it could not be built.
template <class T>
class Validated {
public:
  Validated(T value) : state_(std::move(value)) {}
  Validated(ValidationReport report) : state_(std::move(report)) {}

  bool ok() const noexcept { return std::holds_alternative<T>(state_); }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const {
    if (!ok()) throw ValidationError(std::get<ValidationReport>(state_));
    return std::get<T>(state_);
  }
  T take() && {
    if (!ok()) throw ValidationError(std::get<ValidationReport>(state_));
    return std::move(std::get<T>(state_));
  }
  const ValidationReport& report() const {
    static const ValidationReport empty;
    return ok() ? empty : std::get<ValidationReport>(state_);
  }

private:
  std::variant<T, ValidationReport> state_;
};

}  // namespace cdbc
