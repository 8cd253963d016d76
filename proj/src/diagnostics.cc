// Copyright 2026 The forestfw Authors
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

#include "forestfw/diagnostics.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"

namespace forestfw {

std::string_view SeverityName(Severity severity) {
  switch (severity) {
    case Severity::kError:
      return "error";
    case Severity::kWarning:
      return "warning";
    case Severity::kNote:
      return "note";
  }
  return "error";
}

std::string Diagnostic::ToString() const {
  std::string file = location.file.empty() ? "forestfw" : location.file;
  if (location.line > 0) {
    return absl::StrCat(file, ":", location.line, ":", location.column, ": ",
                        std::string(SeverityName(severity)), ": ", message);
  }
  return absl::StrCat(file, ": ", std::string(SeverityName(severity)), ": ", message);
}

Diagnostic MakeError(SourceLocation location, std::string message) {
  return {Severity::kError, std::move(location), std::move(message)};
}

Diagnostic MakeWarning(SourceLocation location, std::string message) {
  return {Severity::kWarning, std::move(location), std::move(message)};
}

bool HasErrors(std::span<const Diagnostic> diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) {
                       return d.severity == Severity::kError;
                     });
}

}  // namespace forestfw
