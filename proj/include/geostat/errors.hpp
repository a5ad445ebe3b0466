#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geostat {

// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind { Config, Data, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define GEOSTAT_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  }

GEOSTAT_DEFINE_ERROR(InvalidArgument, Config);
GEOSTAT_DEFINE_ERROR(UnknownPreset, Config);

GEOSTAT_DEFINE_ERROR(InvalidPointSet, Data);
GEOSTAT_DEFINE_ERROR(FileNotFound, Data);
GEOSTAT_DEFINE_ERROR(MissingColumn, Data);
GEOSTAT_DEFINE_ERROR(TooFewRows, Data);
GEOSTAT_DEFINE_ERROR(LengthMismatch, Data);
GEOSTAT_DEFINE_ERROR(IoError, Data);
GEOSTAT_DEFINE_ERROR(InsufficientCalibration, Data);
GEOSTAT_DEFINE_ERROR(InvalidBounds, Data);

GEOSTAT_DEFINE_ERROR(AllBinsEmpty, Numerical);
GEOSTAT_DEFINE_ERROR(FitFailed, Numerical);
GEOSTAT_DEFINE_ERROR(DegenerateVariogram, Numerical);
GEOSTAT_DEFINE_ERROR(SingularSystem, Numerical);
GEOSTAT_DEFINE_ERROR(NonPositiveAfterOffset, Numerical);
GEOSTAT_DEFINE_ERROR(CovarianceNotPD, Numerical);

#undef GEOSTAT_DEFINE_ERROR

// A CSV cell that is missing or not a number. Rows count data lines from 1.
class BadCell : public Error {
 public:
  BadCell(std::size_t row, std::string column)
      : Error(ErrorKind::Data,
              "bad cell at row " + std::to_string(row) + ", column '" + column + "'"),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

}  // namespace geostat
