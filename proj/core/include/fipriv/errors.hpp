#pragma once

#include <stdexcept>
#include <string>

namespace fipriv {

// Base class for everything this library throws on contract violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

// matcore
class NonSymmetricError : public Error {
 public:
  using Error::Error;
};
class NotPsdError : public Error {
 public:
  using Error::Error;
};
class SingularError : public Error {
 public:
  using Error::Error;
};
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

// densities
class NotScalarError : public Error {
 public:
  using Error::Error;
};
class QuadratureFailureError : public Error {
 public:
  using Error::Error;
};

// fisher
class SingularDensityError : public Error {
 public:
  using Error::Error;
};
class SingularFisherError : public Error {
 public:
  using Error::Error;
};
class ZeroTraceError : public Error {
 public:
  using Error::Error;
};

// mechanisms
class ZeroQueryError : public Error {
 public:
  using Error::Error;
};
class DomainViolationError : public Error {
 public:
  using Error::Error;
};

// dynamic
class SingularGramianError : public Error {
 public:
  using Error::Error;
};
class HorizonTooShortError : public Error {
 public:
  using Error::Error;
};

// privacy_analysis
class DeltaOutOfRangeError : public Error {
 public:
  using Error::Error;
};

// server / io
class ParseError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class BindError : public Error {
 public:
  using Error::Error;
};

}  // namespace fipriv
