#pragma once

#include <stdexcept>
#include <string>

namespace gnopt {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parameters or arguments outside the admissible range.
class DomainError : public Error {
public:
  using Error::Error;
};

/// An improper radial integral whose integrand does not decay fast enough.
class TailDivergence : public Error {
public:
  using Error::Error;
};

/// Panel refinement stopped improving before the requested tolerance.
class AccuracyNotMet : public Error {
public:
  using Error::Error;
};

class ZeroProfile : public Error {
public:
  using Error::Error;
};

class ZeroField : public Error {
public:
  using Error::Error;
};

} // namespace gnopt
