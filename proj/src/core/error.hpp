// Copyright 2026 The Sonify Authors. All Rights Reserved.
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

namespace sonify {

// Mirrors the C API status codes in sonify.h; keep the values in sync.
enum class ErrorCode : int {
  kOk = 0,
  kDomain = 1,        // non-finite or otherwise invalid numeric input
  kOutOfRange = 2,    // value outside the accepted interval
  kInvalidArgument = 3,
  kState = 4,         // operation not valid in the current state
  kConfig = 5,        // configuration cannot be satisfied
  kIo = 6,
  kParse = 7,
  kSchema = 8,        // session log schema/version mismatch
  kDegenerate = 9,    // statistically degenerate input
  kInsufficient = 10, // not enough data / dynamic range
  kNetwork = 11,
  kInternal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sonify
