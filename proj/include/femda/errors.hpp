#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace femda {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct InvalidRange : Error {
  using Error::Error;
};

struct InvalidShape : Error {
  using Error::Error;
};

struct ConfigInvalid : Error {
  using Error::Error;
};

struct TooFewPoints : Error {
  using Error::Error;
};

struct NumericalBreakdown : Error {
  using Error::Error;
};

struct ClassTooSmall : Error {
  explicit ClassTooSmall(int label_, const std::string& what)
      : Error(what), label(label_) {}
  int label;
};

struct EstimationFailed : Error {
  explicit EstimationFailed(int label_, const std::string& what)
      : Error(what), label(label_) {}
  int label;
};

struct MissingThreshold : Error {
  using Error::Error;
};

struct EmptyDataset : Error {
  using Error::Error;
};

struct MissingCenter : Error {
  explicit MissingCenter(int label_, const std::string& what)
      : Error(what), label(label_) {}
  int label;
};

struct ParseError : Error {
  ParseError(std::size_t line_, std::size_t column_, const std::string& what)
      : Error(what), line(line_), column(column_) {}
  std::size_t line;
  std::size_t column;
};

struct EmptyFile : Error {
  using Error::Error;
};

struct AllRowsDropped : Error {
  using Error::Error;
};

struct AllClassesDropped : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace femda
