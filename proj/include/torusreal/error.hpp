// Copyright 2026 The torusreal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <stdexcept>
#include <string>

namespace torusreal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of matrices or vectors do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its domain (e.g. d != 1 for a d = 1 test).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent user input; carries a location when known.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what, std::string where = {})
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Input data contradicts an identity it must satisfy (e.g. A1^2 != I).
class InconsistentDataError : public Error {
 public:
  using Error::Error;
};

/// Sampling asked for points of an empty solution set.
class EmptySolutionSetError : public Error {
 public:
  using Error::Error;
};

}  // namespace torusreal
