#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace grfl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

// Pointwise metric is not symmetric positive definite, or det g fell below the floor.
class NonSPDMetric : public Error {
 public:
  NonSPDMetric(std::size_t point, double det)
      : Error("metric not SPD at point " + std::to_string(point) + " (det=" + std::to_string(det) + ")"),
        point_(point),
        det_(det) {}
  std::size_t point() const { return point_; }
  double det() const { return det_; }

 private:
  std::size_t point_;
  double det_;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class StepRejected : public Error {
 public:
  StepRejected(double t, const std::string& reason)
      : Error("step rejected at t=" + std::to_string(t) + ": " + reason), t_(t) {}
  double t() const { return t_; }

 private:
  double t_;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string key, const std::string& reason)
      : Error(key + ": " + reason), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class TruncatedFile : public Error {
 public:
  using Error::Error;
};

}  // namespace grfl
