#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace busyq {

enum class ErrorKind { Validation, Numerical };

/// Error carrying a stable machine-readable code and, for model/schema
/// problems, a JSON-pointer-style path to the offending field.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, std::string path, const std::string& message)
        : std::runtime_error(message), kind_(kind), code_(std::move(code)), path_(std::move(path)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& code() const { return code_; }
    const std::string& path() const { return path_; }

private:
    ErrorKind kind_;
    std::string code_;
    std::string path_;
};

[[noreturn]] inline void fail_validation(const std::string& code, const std::string& path,
                                         const std::string& message) {
    throw Error(ErrorKind::Validation, code, path, message);
}

[[noreturn]] inline void fail_numerical(const std::string& code, const std::string& message) {
    throw Error(ErrorKind::Numerical, code, "", message);
}

}  // namespace busyq
