// Lightweight value-or-error carrier for recoverable failures (parsing,
// backend transport, planning). Contract violations throw instead.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace navfuse {

template <typename T>
class Result {
 public:
  static Result ok(T value) {
    Result r;
    r.has_value_ = true;
    r.value_ = std::move(value);
    return r;
  }

  static Result fail(std::string message) {
    Result r;
    r.has_value_ = false;
    r.error_ = std::move(message);
    return r;
  }

  bool has_value() const { return has_value_; }
  explicit operator bool() const { return has_value_; }

  const T& value() const {
    if (!has_value_) throw std::logic_error("Result::value on error: " + error_);
    return value_;
  }
  T& value() {
    if (!has_value_) throw std::logic_error("Result::value on error: " + error_);
    return value_;
  }

  const std::string& error() const { return error_; }

 private:
  Result() = default;
  bool has_value_ = false;
  T value_{};
  std::string error_;
};

}  // namespace navfuse
