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

// Text renderings of a compiled policy.

#ifndef FORESTFW_RENDER_H_
#define FORESTFW_RENDER_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "forestfw/acl.h"
#include "forestfw/netgen.h"

namespace forestfw {

// "[443]", "['0-65535']", "[21, '24500-24600']".
std::string FormatPortList(const IntervalSet& ports);

// One ACL in the vendor-neutral format. A remark precedes each run of
// rules sharing a comment.
std::string RenderNeutral(const Acl& acl);
// All ACLs of a firewall, in order.
std::string RenderNeutralFile(const FirewallConfig& firewall);

// Inverse of RenderNeutralFile.
absl::StatusOr<std::vector<Acl>> ParseNeutral(std::string_view text);

// A device template: named sections with {slot} placeholders.
class DeviceTemplate {
 public:
  static absl::StatusOr<DeviceTemplate> Parse(std::string_view vendor,
                                              std::string_view text);
  // Built-in template for `vendor`, or one read from `<dir>/<vendor>.tmpl`
  // when `dir` is given and the file exists.
  static absl::StatusOr<DeviceTemplate> Load(
      std::string_view vendor, const std::optional<std::string>& dir);

  const std::string& vendor() const { return vendor_; }
  std::string Fill(std::string_view section,
                   const std::map<std::string, std::string>& slots) const;

 private:
  std::string vendor_;
  std::map<std::string, std::string> sections_;
};

inline constexpr std::string_view kIptablesLike = "iptables_like";
inline constexpr std::string_view kAsaLike = "asa_like";

absl::StatusOr<std::string> RenderDevice(const FirewallConfig& firewall,
                                         const DeviceTemplate& tmpl);

// ACLs recovered from an iptables_like rendering, with their bindings.
struct LoadedFirewall {
  std::vector<Acl> acls;
  std::vector<InterfaceAssignment> assignments;
};

absl::StatusOr<LoadedFirewall> LoadIptables(std::string_view firewall,
                                            std::string_view text);

struct LocMetrics {
  int high_level_loc = 0;
  int device_loc = 0;
  double ratio = 0;
};

// Counts non-blank lines that are not comments ("//" for policy source,
// "#" or "!" for device configurations).
int CountPolicyLoc(std::string_view policy_text);
int CountDeviceLoc(std::string_view device_text);
LocMetrics ComputeLocMetrics(std::string_view policy_text,
                             const std::vector<std::string>& device_texts);

// Machine-readable description of a compile run: model, flows, firewall
// bindings and output files.
std::string WriteManifest(const NetworkPolicy& policy,
                          const std::map<std::string, std::string>& inputs,
                          const LocMetrics& loc);

// Rebuilds a NetworkPolicy from a manifest and the neutral ACL files it
// lists, read through `read_file` (path relative to the manifest).
absl::StatusOr<NetworkPolicy> ReadManifest(
    std::string_view manifest,
    const std::function<absl::StatusOr<std::string>(const std::string&)>&
        read_file);

}  // namespace forestfw

#endif  // FORESTFW_RENDER_H_
