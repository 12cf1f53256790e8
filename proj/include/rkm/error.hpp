#ifndef RKM_ERROR_HPP
#define RKM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rkm {

/// Input that violates a precondition (shapes, ranges, configuration).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string &what) : std::invalid_argument(what) {}
};

/// Data for which the requested quantity is undefined, e.g. a constant column.
class DegenerateData : public std::runtime_error {
public:
    explicit DegenerateData(const std::string &what) : std::runtime_error(what) {}
};

/// Broken internal invariant. Seeing one of these is a bug.
class LogicError : public std::logic_error {
public:
    explicit LogicError(const std::string &what) : std::logic_error(what) {}
};

namespace detail {

inline void require(bool condition, const std::string &message) {
    if (!condition) {
        throw InvalidInput(message);
    }
}

} // namespace detail
} // namespace rkm

#endif
