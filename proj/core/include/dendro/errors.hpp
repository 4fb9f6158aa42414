#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dendro {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: wrong sizes, nonpositive distances, unparsable files.
class InvalidInput : public Error {
  public:
    using Error::Error;
};

/// An argument lies outside the domain of a function (e.g. a nonpositive distance).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A triangle inequality d_ij <= d_ik + d_kj fails. Indices are 0-based.
class TriangleViolation : public Error {
  public:
    TriangleViolation(std::size_t i, std::size_t j, std::size_t k, double slack);

    std::size_t i, j, k;
    /// d_ij - (d_ik + d_kj); positive when violated.
    double slack;
};

/// A strong triangle inequality u_ij <= max(u_ik, u_kj) fails. Indices are 0-based.
class UltrametricViolation : public Error {
  public:
    UltrametricViolation(std::size_t i, std::size_t j, std::size_t k, double slack);

    std::size_t i, j, k;
    double slack;
};

class SizeLimit : public Error {
  public:
    using Error::Error;
};

class CountOverflow : public Error {
  public:
    using Error::Error;
};

/// The number of minimum spanning trees exceeds the configured cap. `bound` is
/// a lower bound on that number (enumeration stops once it passes the cap).
class KMaxExceeded : public Error {
  public:
    KMaxExceeded(std::size_t bound, std::size_t cap);

    std::size_t bound, cap;
};

/// Rejection sampling did not produce enough accepted samples.
class InsufficientSamples : public Error {
  public:
    using Error::Error;
};

/// The Metropolis-Hastings proposal loop failed to land inside the normalized metric space.
class ProposalStuck : public Error {
  public:
    explicit ProposalStuck(std::size_t attempts);

    std::size_t attempts;
};

}  // namespace dendro
