// Copyright 2026 The boolrule Authors
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

#ifndef BOOLRULE_ERROR_HPP_
#define BOOLRULE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace boolrule {

// Error hierarchy. The CLI maps each family onto a process exit code:
// UsageError -> 2, DataError -> 3, SolverLimitError -> 4.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or knob combinations.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed input data, out-of-range feature indices, single-class labels.
class DataError : public Error {
 public:
  using Error::Error;
};

// Formula text that does not conform to the grammar.
class ParseError : public UsageError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : UsageError(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Enumeration caps and timeouts.
class SolverLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace boolrule

#endif  // BOOLRULE_ERROR_HPP_
