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

#ifndef FORESTFW_DIAGNOSTICS_H_
#define FORESTFW_DIAGNOSTICS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forestfw {

struct SourceLocation {
  std::string file;
  int line = 0;
  int column = 0;
};

enum class Severity { kError, kWarning, kNote };

std::string_view SeverityName(Severity severity);

struct Diagnostic {
  Severity severity = Severity::kError;
  SourceLocation location;
  std::string message;

  // "<file>:<line>:<col>: <severity>: <message>". The line/column part is
  // omitted when the location carries no line.
  std::string ToString() const;
};

Diagnostic MakeError(SourceLocation location, std::string message);
Diagnostic MakeWarning(SourceLocation location, std::string message);

bool HasErrors(std::span<const Diagnostic> diagnostics);

}  // namespace forestfw

#endif  // FORESTFW_DIAGNOSTICS_H_
