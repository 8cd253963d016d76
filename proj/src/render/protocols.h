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

#ifndef FORESTFW_SRC_RENDER_PROTOCOLS_H_
#define FORESTFW_SRC_RENDER_PROTOCOLS_H_

#include <optional>
#include <string>
#include <string_view>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "forestfw/acl.h"

namespace forestfw {

inline std::string ProtocolKeyword(int protocol) {
  switch (protocol) {
    case kIpWildcard:
      return "ip";
    case kProtoIcmp:
      return "icmp";
    case kProtoTcp:
      return "tcp";
    case kProtoUdp:
      return "udp";
    case kProtoOspf:
      return "ospf";
    default:
      return absl::StrCat(protocol);
  }
}

inline std::optional<int> ParseProtocolKeyword(std::string_view word) {
  if (word == "ip" || word == "all") return kIpWildcard;
  if (word == "icmp") return kProtoIcmp;
  if (word == "tcp") return kProtoTcp;
  if (word == "udp") return kProtoUdp;
  if (word == "ospf") return kProtoOspf;
  int value = 0;
  if (absl::SimpleAtoi(std::string(word), &value) && value >= 0 &&
      value <= 255) {
    return value;
  }
  return std::nullopt;
}

}  // namespace forestfw

#endif  // FORESTFW_SRC_RENDER_PROTOCOLS_H_
