// Copyright 2026 The beliefplan Authors
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

#ifndef BELIEFPLAN_ERRORS_HPP_
#define BELIEFPLAN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace bp {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// A covariance has an eigenvalue below the PSD tolerance.
class NotPsdError : public Error {
 public:
  using Error::Error;
};

class ControlOutOfBoundsError : public Error {
 public:
  using Error::Error;
};

/// Kalman innovation matrix too ill-conditioned to invert.
class SingularInnovationError : public Error {
 public:
  using Error::Error;
};

/// Riccati iteration failed to reach a fixed point.
class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

/// No eigenvalue below the search cap violates the chance constraint
/// everywhere; a covariance cap must be supplied explicitly.
class UnboundedError : public Error {
 public:
  using Error::Error;
};

/// Direction with (numerically) zero variance in a half-plane query.
class DegenerateDirectionError : public Error {
 public:
  using Error::Error;
};

/// Re-propagating a tree path did not reproduce the stored belief.
class InconsistentTreeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bp

#endif  // BELIEFPLAN_ERRORS_HPP_
