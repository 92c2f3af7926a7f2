#pragma once

#include <stdexcept>
#include <string>

namespace lmcma {

/// Raised when a caller breaks a documented precondition (dimension
/// mismatch, out-of-range index, invalid parameter set).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised when input data is rejected at runtime (non-finite vectors,
/// unreadable files).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool condition, const char* message) {
    if (!condition) throw ContractError(message);
}
inline void require(bool condition, const std::string& message) {
    if (!condition) throw ContractError(message);
}
}  // namespace detail

}  // namespace lmcma
