#ifndef V2ICALIB_ERRORS_HPP
#define V2ICALIB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace v2icalib {

/// Base class for every error the library throws.
class CalibError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyScene : public CalibError {
 public:
  using CalibError::CalibError;
};

class InsufficientBoxes : public CalibError {
 public:
  using CalibError::CalibError;
};

class DimensionMismatch : public CalibError {
 public:
  using CalibError::CalibError;
};

class NoMatches : public CalibError {
 public:
  using CalibError::CalibError;
};

class DegenerateGeometry : public CalibError {
 public:
  using CalibError::CalibError;
};

class InvalidStatus : public CalibError {
 public:
  using CalibError::CalibError;
};

class ParseError : public CalibError {
 public:
  using CalibError::CalibError;
};

class SchemaError : public CalibError {
 public:
  using CalibError::CalibError;
};

class NotRigid : public CalibError {
 public:
  using CalibError::CalibError;
};

class MissingGroundTruth : public CalibError {
 public:
  using CalibError::CalibError;
};

class EmptyDataset : public CalibError {
 public:
  using CalibError::CalibError;
};

class PlacementFailure : public CalibError {
 public:
  using CalibError::CalibError;
};

class IoError : public CalibError {
 public:
  using CalibError::CalibError;
};

}  // namespace v2icalib

#endif  // V2ICALIB_ERRORS_HPP
