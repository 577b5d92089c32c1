#pragma once

#include <stdexcept>
#include <string>

namespace meanbounds {

/// Thrown when an argument violates an operation's precondition.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown when an iteration exhausts its cap without meeting its tolerance.
class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok)
        throw domain_error(what);
}

} // namespace detail
} // namespace meanbounds
