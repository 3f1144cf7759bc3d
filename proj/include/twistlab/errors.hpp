#pragma once

#include <stdexcept>
#include <string>

namespace twistlab {

/// Bad or inconsistent input data: malformed records, corrupt caches,
/// residue-class mismatches. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure could not reach the requested accuracy within its
/// budget. The CLI maps this to exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (poles, composite where a prime
/// is required, gcd conditions).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace twistlab
