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

#include "forestfw/canonical.h"

#include <algorithm>
#include <map>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace forestfw {
namespace {

// (protocol, icmp type or -1)
using SliceKey = std::pair<int, int>;

struct Rect {
  Interval dport;
  IntervalSet sport;
};

using RectMap = std::map<SliceKey, std::vector<Rect>>;

void AddProtocol(int protocol, const IntervalSet& sport,
                 const IntervalSet& dport, const IntervalSet& icmp,
                 RectMap& out) {
  if (HasPorts(protocol)) {
    for (const Interval& d : dport) {
      out[{protocol, -1}].push_back({d, sport});
    }
  } else if (protocol == kProtoIcmp) {
    for (const Interval& t : icmp) {
      for (int64_t type = t.lo; type <= t.hi; ++type) {
        out[{protocol, static_cast<int>(type)}].push_back(
            {{kSentinel, kSentinel}, IntervalSet::Point(kSentinel)});
      }
    }
  } else {
    out[{protocol, -1}].push_back(
        {{kSentinel, kSentinel}, IntervalSet::Point(kSentinel)});
  }
}

void AddService(const Service& s, RectMap& out) {
  if (s.protocol == kAnyProtocol) {
    for (int p = 0; p <= kMaxProtocol; ++p) {
      AddProtocol(p, IntervalSet::Of(0, kMaxPort), IntervalSet::Of(0, kMaxPort),
                  IntervalSet::Of(0, kMaxIcmpType), out);
    }
    return;
  }
  AddProtocol(s.protocol, s.source_ports, s.dest_ports, s.icmp_types, out);
}

// Cuts at every dport boundary, evaluates `sport_at` on each elementary
// strip and merges equal neighbours.
template <typename SportAt>
std::vector<Strip> Sweep(std::vector<int64_t> cuts, SportAt sport_at) {
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Strip> strips;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    Interval segment{cuts[i], cuts[i + 1] - 1};
    IntervalSet sport = sport_at(segment.lo);
    if (sport.empty()) continue;
    if (!strips.empty() && strips.back().dport.hi + 1 == segment.lo &&
        strips.back().sport == sport) {
      strips.back().dport.hi = segment.hi;
    } else {
      strips.push_back({segment, std::move(sport)});
    }
  }
  return strips;
}

std::vector<Strip> BuildStrips(const std::vector<Rect>& rects) {
  std::vector<int64_t> cuts;
  for (const Rect& r : rects) {
    cuts.push_back(r.dport.lo);
    cuts.push_back(r.dport.hi + 1);
  }
  return Sweep(std::move(cuts), [&](int64_t x) {
    IntervalSet sport;
    for (const Rect& r : rects) {
      if (r.dport.Contains(x)) sport = sport.Union(r.sport);
    }
    return sport;
  });
}

CanonicalPolicy FromRects(const RectMap& rects) {
  CanonicalPolicy out;
  for (const auto& [key, list] : rects) {
    std::vector<Strip> strips = BuildStrips(list);
    if (strips.empty()) continue;
    CanonicalSlice slice;
    slice.protocol = key.first;
    if (key.second >= 0) slice.icmp_type = key.second;
    slice.strips = std::move(strips);
    out.slices.push_back(std::move(slice));
  }
  return out;
}

SliceKey KeyOf(const CanonicalSlice& s) {
  return {s.protocol, s.icmp_type.value_or(-1)};
}

IntervalSet SportAt(const std::vector<Strip>& strips, int64_t dport) {
  for (const Strip& s : strips) {
    if (s.dport.Contains(dport)) return s.sport;
  }
  return {};
}

const CanonicalSlice* FindSlice(const CanonicalPolicy& p, SliceKey key) {
  for (const CanonicalSlice& s : p.slices) {
    if (KeyOf(s) == key) return &s;
  }
  return nullptr;
}

bool SliceIncluded(const CanonicalSlice& p, const CanonicalSlice* q) {
  if (q == nullptr) return p.strips.empty();
  for (const Strip& strip : p.strips) {
    int64_t cursor = strip.dport.lo;
    for (const Strip& cover : q->strips) {
      if (cover.dport.hi < cursor) continue;
      if (cover.dport.lo > cursor) return false;
      if (!cover.sport.Contains(strip.sport)) return false;
      cursor = cover.dport.hi + 1;
      if (cursor > strip.dport.hi) break;
    }
    if (cursor <= strip.dport.hi) return false;
  }
  return true;
}

std::string SliceName(const CanonicalSlice& s) {
  if (s.icmp_type) return absl::StrCat("icmp type ", *s.icmp_type);
  if (HasPorts(s.protocol) || s.protocol == kProtoOspf) {
    return ProtocolName(s.protocol);
  }
  return absl::StrCat("protocol ", s.protocol);
}

}  // namespace

bool CanonicalPolicy::Accepts(int protocol, int icmp_type, int sport,
                              int dport) const {
  const CanonicalSlice* slice =
      FindSlice(*this, {protocol, protocol == kProtoIcmp ? icmp_type : -1});
  if (slice == nullptr) return false;
  if (!HasPorts(protocol)) return true;
  return SportAt(slice->strips, dport).Contains(sport);
}

std::string CanonicalPolicy::ToString() const {
  std::vector<std::string> parts;
  for (const CanonicalSlice& slice : slices) {
    if (!HasPorts(slice.protocol)) {
      parts.push_back(SliceName(slice));
      continue;
    }
    for (const Strip& strip : slice.strips) {
      parts.push_back(absl::StrCat(
          SliceName(slice), " dport ", IntervalSet({strip.dport}).ToString(),
          " sport ", strip.sport.ToString()));
    }
  }
  return absl::StrJoin(parts, "; ");
}

CanonicalPolicy Canonicalize(std::span<const Service> services) {
  RectMap rects;
  for (const Service& s : services) AddService(s, rects);
  return FromRects(rects);
}

absl::StatusOr<CanonicalPolicy> CanonicalizeRules(
    std::span<const MatchRule> rules) {
  RectMap rects;
  for (const MatchRule& rule : rules) {
    if (rule.action != Action::kAccept) {
      return absl::InvalidArgumentError(absl::StrCat(
          "canonical form is defined for accept rules only; got deny rule ",
          rule.origin));
    }
    const Predicate& p = rule.predicate;
    if (p.IsEmpty()) continue;
    for (const Interval& range : p.protocol) {
      for (int64_t proto = range.lo; proto <= std::min(range.hi, kMaxProtocol);
           ++proto) {
        AddProtocol(static_cast<int>(proto), p.sport, p.dport, p.icmp, rects);
      }
    }
  }
  return FromRects(rects);
}

bool Equivalent(std::span<const Service> p, std::span<const Service> q) {
  return Canonicalize(p) == Canonicalize(q);
}

bool Includes(const CanonicalPolicy& p, const CanonicalPolicy& q) {
  for (const CanonicalSlice& slice : p.slices) {
    if (!SliceIncluded(slice, FindSlice(q, KeyOf(slice)))) return false;
  }
  return true;
}

bool Includes(std::span<const Service> p, std::span<const Service> q) {
  return Includes(Canonicalize(p), Canonicalize(q));
}

CanonicalPolicy Difference(const CanonicalPolicy& p,
                           const CanonicalPolicy& q) {
  CanonicalPolicy out;
  for (const CanonicalSlice& slice : p.slices) {
    const CanonicalSlice* other = FindSlice(q, KeyOf(slice));
    std::vector<Strip> strips = slice.strips;
    if (other != nullptr) {
      std::vector<int64_t> cuts;
      for (const auto* list : {&slice.strips, &other->strips}) {
        for (const Strip& s : *list) {
          cuts.push_back(s.dport.lo);
          cuts.push_back(s.dport.hi + 1);
        }
      }
      strips = Sweep(std::move(cuts), [&](int64_t x) {
        return SportAt(slice.strips, x).Subtract(SportAt(other->strips, x));
      });
    }
    if (strips.empty()) continue;
    CanonicalSlice diff = slice;
    diff.strips = std::move(strips);
    out.slices.push_back(std::move(diff));
  }
  return out;
}

absl::StatusOr<BestPractice> LoadBestPractice(const PolicySpec& spec) {
  auto zones = spec.zone_groups.find("protected_zones");
  if (zones == spec.zone_groups.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat(spec.file,
                     ": error: best-practice document declares no "
                     "'protected_zones' zone group"));
  }
  BestPractice bp;
  bp.file = spec.file;
  bp.protected_zones = zones->second.zones;
  if (spec.rule_groups.contains("best_practice")) {
    absl::StatusOr<std::vector<FlowRule>> flows =
        ExpandRuleGroup(spec, "best_practice");
    if (!flows.ok()) return flows.status();
    bp.upper_bound = *std::move(flows);
  }
  return bp;
}

std::string BestPracticeViolation::Message() const {
  std::string out = absl::StrCat("conduit ", src_zone, " -> ", dst_zone,
                                 " exceeds best practice for protected zone ",
                                 protected_zone, ": ", excess.ToString());
  if (!rules.empty()) {
    absl::StrAppend(&out, " (rules: ", absl::StrJoin(rules, ", "), ")");
  }
  return out;
}

absl::StatusOr<std::vector<BestPracticeViolation>> CheckBestPractice(
    std::span<const FlowRule> policy, const std::set<std::string>& known_zones,
    const BestPractice& bp) {
  auto check_zone = [&](const std::string& zone) -> absl::Status {
    if (known_zones.contains(zone)) return absl::OkStatus();
    return absl::NotFoundError(absl::StrCat(
        bp.file, ": error: best-practice document references unknown zone '",
        zone, "'"));
  };
  for (const std::string& zone : bp.protected_zones) {
    if (absl::Status s = check_zone(zone); !s.ok()) return s;
  }
  using Pair = std::pair<std::string, std::string>;
  std::map<Pair, std::vector<Service>> bound;
  for (const FlowRule& f : bp.upper_bound) {
    if (absl::Status s = check_zone(f.src_zone); !s.ok()) return s;
    if (absl::Status s = check_zone(f.dst_zone); !s.ok()) return s;
    bound[{f.src_zone, f.dst_zone}].push_back(f.service);
  }
  auto is_protected = [&](const std::string& zone) {
    return std::find(bp.protected_zones.begin(), bp.protected_zones.end(),
                     zone) != bp.protected_zones.end();
  };
  std::map<Pair, std::vector<const FlowRule*>> input;
  for (const FlowRule& f : policy) {
    if (is_protected(f.src_zone) || is_protected(f.dst_zone)) {
      input[{f.src_zone, f.dst_zone}].push_back(&f);
    }
  }

  std::vector<BestPracticeViolation> out;
  for (const auto& [pair, flows] : input) {
    std::vector<Service> services;
    for (const FlowRule* f : flows) services.push_back(f->service);
    CanonicalPolicy p = Canonicalize(services);
    CanonicalPolicy q = Canonicalize(bound[pair]);
    if (Includes(p, q)) continue;
    BestPracticeViolation v;
    v.src_zone = pair.first;
    v.dst_zone = pair.second;
    v.protected_zone = is_protected(pair.second) ? pair.second : pair.first;
    v.excess = Difference(p, q);
    for (const FlowRule* f : flows) {
      std::vector<Service> one = {f->service};
      if (!Includes(Canonicalize(one), q) &&
          std::find(v.rules.begin(), v.rules.end(), f->rule_name) ==
              v.rules.end()) {
        v.rules.push_back(f->rule_name);
      }
    }
    std::sort(v.rules.begin(), v.rules.end());
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace forestfw
