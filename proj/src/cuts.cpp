// Copyright 2026 The hybnb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hybnb/cuts.hpp"

#include <cmath>

namespace hybnb {

namespace {
constexpr size_t kMaxProbes = 32;
constexpr Scalar kDominationSlack = 1e-12;
}  // namespace

void CutStore::mark_unreachable(ModeId q) {
  if (kind_ != Kind::Cuts) throw UsageError("cannot flag modes on a MinusInfinity store");
  entry(q).unreachable = true;
  entry(q).cuts.clear();
}

Scalar CutStore::value(ModeId q, const Vector& x) const {
  if (kind_ == Kind::MinusInfinity) return -kInf;
  const ModeEntry& e = entry(q);
  if (e.unreachable) return kInf;
  Scalar best = -kInf;
  for (const Cut& c : e.cuts) best = std::max(best, c.eval(x));
  return best;
}

bool CutStore::constant_only(ModeId q) const {
  if (kind_ == Kind::MinusInfinity) return true;
  for (const Cut& c : entry(q).cuts)
    if (c.slope.lpNorm<Eigen::Infinity>() > 0) return false;
  return true;
}

bool CutStore::add_cut(ModeId q, Cut cut) {
  if (kind_ != Kind::Cuts) throw UsageError("add_cut on a MinusInfinity store");
  if (!cut.slope.allFinite() || !std::isfinite(cut.intercept))
    throw UsageError("add_cut: non-finite cut");
  ModeEntry& e = entry(q);
  if (e.unreachable) return false;  // already +inf everywhere

  for (const Cut& c : e.cuts) {
    const bool same_slope =
        (c.slope - cut.slope).lpNorm<Eigen::Infinity>() <= kDominationSlack;
    if (same_slope && cut.intercept <= c.intercept + kDominationSlack) return false;
  }
  if (!e.cuts.empty() && !e.probes.empty()) {
    bool dominated = true;
    for (const Vector& p : e.probes) {
      if (cut.eval(p) > value(q, p) + kDominationSlack) {
        dominated = false;
        break;
      }
    }
    if (dominated) return false;
  }
  e.cuts.push_back(std::move(cut));
  return true;
}

void CutStore::note_probe(ModeId q, const Vector& x) {
  ModeEntry& e = entry(q);
  e.probes.push_back(x);
  if (e.probes.size() > kMaxProbes) e.probes.pop_front();
}

long CutStore::total_cuts() const {
  long n = 0;
  for (const ModeEntry& e : modes_) n += static_cast<long>(e.cuts.size());
  return n;
}

}  // namespace hybnb
