// Copyright 2026 The wedgekit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace wedge {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor dimensions do not line up (wrong channel count, size mismatch, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Data violates a value-level contract (non-finite entries, bad simplex,
/// out-of-range label, duplicate manifest path, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration: invalid option values, malformed config files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numeric routine failed (SVD non-convergence, orthogonality loss).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The affinity matrix sums to zero; the alignment problem is undefined.
class DegenerateAffinityError : public NumericError {
 public:
  using Error::Error;
};

/// A loss was requested over a label map with no supervised pixels.
class EmptySupervisionError : public Error {
 public:
  using Error::Error;
};

/// Metric evaluation over an empty accumulator.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / decoding / network failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wedge
