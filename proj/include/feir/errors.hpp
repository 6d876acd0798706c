// Copyright 2026 The FEIR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace feir {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed matrix file (empty, ragged rows).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Non-numeric token in a matrix file. row() and column() are zero-based; the
// message uses one-based positions.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int row, int column)
      : Error(what), row_(row), column_(column) {}
  int row() const { return row_; }
  int column() const { return column_; }

 private:
  int row_;
  int column_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Iterative solver ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Schema violation in a configuration or results file.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace feir
