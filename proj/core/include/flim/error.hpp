/* Copyright 2026 The FLIM Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flim {

/// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on shapes, indices or parameters was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

enum class ValidationCode {
  kMalformedJson,
  kOutOfBounds,
  kDanglingImage,
  kDuplicateMarker,
  kEmptyMarker,
  kDuplicatePixel,
  kInvalidBox,
  kUnreadableImage,
  kMissingFile,
};

const char* to_string(ValidationCode code);

struct Diagnostic {
  std::string file;
  ValidationCode code;
  std::string message;
};

/// Raised when on-disk project content fails validation. Carries one
/// diagnostic per offending file so callers can report all of them at once.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }
  // Code of the first diagnostic.
  ValidationCode code() const noexcept { return diagnostics_.front().code; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

enum class FormatCode {
  kIo,
  kMalformed,
  kVersionMismatch,
  kChecksum,
  kTruncated,
};

/// Serialized model or image data could not be decoded.
class FormatError : public Error {
 public:
  FormatError(FormatCode code, const std::string& what) : Error(what), code_(code) {}
  FormatCode code() const noexcept { return code_; }

 private:
  FormatCode code_;
};

}  // namespace flim
