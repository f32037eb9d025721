/*
 * Copyright 2026 The oodx Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oodx {

enum class ErrorKind {
  kInvalidInput,
  kDimensionMismatch,
  kSingularMatrix,
  kDegenerateCalibration,
  kAlignmentError,
  kCorruptFile,
  kUnsupportedKind,
  kMalformedContainer,
  kIoError,
};

// Stable names used in structured (JSON) error output.
std::string_view ErrorKindName(ErrorKind kind);

// Every failure raised by the engine. `path` is filled in when the error
// relates to a file on disk.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string path = {})
      : std::runtime_error(message), kind_(kind), path_(std::move(path)) {}

  ErrorKind kind() const { return kind_; }
  std::string_view name() const { return ErrorKindName(kind_); }
  const std::string& path() const { return path_; }
  void set_path(std::string path) { path_ = std::move(path); }

 private:
  ErrorKind kind_;
  std::string path_;
};

inline Error InvalidInput(const std::string& msg) {
  return Error(ErrorKind::kInvalidInput, msg);
}
inline Error DimensionMismatch(const std::string& msg) {
  return Error(ErrorKind::kDimensionMismatch, msg);
}
inline Error AlignmentError(const std::string& msg) {
  return Error(ErrorKind::kAlignmentError, msg);
}

}  // namespace oodx
