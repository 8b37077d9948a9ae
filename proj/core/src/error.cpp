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
#include "flim/error.hpp"

namespace flim {
namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  if (diagnostics.empty()) return "validation failed";
  std::string text = diagnostics.front().file + ": " + diagnostics.front().message;
  if (diagnostics.size() > 1) {
    text += " (and " + std::to_string(diagnostics.size() - 1) + " more)";
  }
  return text;
}

}  // namespace

const char* to_string(ValidationCode code) {
  switch (code) {
    case ValidationCode::kMalformedJson: return "malformed_json";
    case ValidationCode::kOutOfBounds: return "out_of_bounds";
    case ValidationCode::kDanglingImage: return "dangling_image";
    case ValidationCode::kDuplicateMarker: return "duplicate_marker";
    case ValidationCode::kEmptyMarker: return "empty_marker";
    case ValidationCode::kDuplicatePixel: return "duplicate_pixel";
    case ValidationCode::kInvalidBox: return "invalid_box";
    case ValidationCode::kUnreadableImage: return "unreadable_image";
    case ValidationCode::kMissingFile: return "missing_file";
  }
  return "unknown";
}

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {
  if (diagnostics_.empty()) {
    diagnostics_.push_back({"", ValidationCode::kMalformedJson, "validation failed"});
  }
}

}  // namespace flim
