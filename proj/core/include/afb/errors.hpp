#pragma once

#include <stdexcept>
#include <string>

namespace afb {

// Base class for every error this library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input bytes claim a supported format but cannot be decoded.
class MalformedFile : public Error {
 public:
  using Error::Error;
};

// Input is decodable but not one of the formats the pipeline accepts
// (8-bit RGB PNG or binary PPM).
class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

// Two rasters that must share dimensions do not.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Second-moment ellipse is degenerate (zero major eigenvalue).
class DegenerateMoments : public Error {
 public:
  using Error::Error;
};

// Record log could not be locked or written.
class StoreUnavailable : public Error {
 public:
  using Error::Error;
};

// Synthetic scene placement exceeded the rejection-sampling budget.
class PlacementFailure : public Error {
 public:
  using Error::Error;
};

// Configuration file is syntactically or semantically invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace afb
