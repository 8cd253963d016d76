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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_replace.h"
#include "forestfw/policy_lang.h"

namespace forestfw {
namespace {

const std::map<std::string_view, std::string_view>& Builtins() {
  static const auto* const kLibraries =
      new std::map<std::string_view, std::string_view>{
#include "builtin_library.inc"
      };
  return *kLibraries;
}

}  // namespace

std::optional<std::string_view> BuiltinLibrarySource(std::string_view name) {
  auto it = Builtins().find(name);
  if (it == Builtins().end()) return std::nullopt;
  return it->second;
}

Importer BuiltinImporter() { return MakeImporter({}); }

Importer MakeImporter(std::vector<std::string> search_dirs) {
  return [dirs = std::move(search_dirs)](
             std::string_view dotted) -> absl::StatusOr<std::string> {
    std::string rel =
        absl::StrCat(absl::StrReplaceAll(std::string(dotted), {{".", "/"}}), ".policyml");
    for (const std::string& dir : dirs) {
      std::filesystem::path path = std::filesystem::path(dir) / rel;
      std::ifstream in(path, std::ios::binary);
      if (!in) continue;
      std::ostringstream text;
      text << in.rdbuf();
      return text.str();
    }
    if (std::optional<std::string_view> builtin =
            BuiltinLibrarySource(dotted)) {
      return std::string(*builtin);
    }
    return absl::NotFoundError(absl::StrCat("no library named '", std::string(dotted), "'"));
  };
}

}  // namespace forestfw
