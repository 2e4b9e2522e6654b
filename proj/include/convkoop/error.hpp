// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace convkoop {

// Values match the CLI exit codes.
enum class ErrorKind { config = 1, numeric = 2, contract = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Bad user input: unknown keys, missing files, unparsable numbers.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

// Non-finite data, solver failure, blow-up, ill-conditioning.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

// Violated precondition of an operation (shapes, ranks, mismatched inputs).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(ErrorKind::contract, what) {}
};

// Soft diagnostics. Kept per thread; callers drain them when convenient.
void warn(const std::string& message);
std::vector<std::string> take_warnings();

}  // namespace convkoop
