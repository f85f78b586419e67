#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace nn2rules {

/// Bad input: malformed files, mismatched widths, invalid arguments.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant (prefix-freeness, coverage, lookup uniqueness) was broken.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

using WarningHandler = std::function<void(const std::string&)>;

/// Installs a handler for non-fatal diagnostics and returns the previous one.
/// The default handler writes to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

} // namespace nn2rules
