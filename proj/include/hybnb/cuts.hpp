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

#pragma once

#include <deque>
#include <vector>

#include "hybnb/types.hpp"

namespace hybnb {

enum class CutOrigin { Abstraction, Learned, Manual };

/// Affine lower bound a'x + b on a per-mode value function.
struct Cut {
  Vector slope;
  Scalar intercept = 0;
  CutOrigin origin = CutOrigin::Manual;

  Scalar eval(const Vector& x) const { return slope.dot(x) + intercept; }
};

/// Per-mode collections of cuts realizing a value function as a pointwise
/// maximum. Two kinds: MinusInfinity (the trivial no-bound function) and
/// Cuts. In a Cuts store, a mode with an empty list evaluates to -inf and a
/// mode flagged unreachable evaluates to +inf (no feasible continuation).
///
/// The store is a plain value type: copying it yields an independent
/// snapshot; add_cut requires exclusive access to the copy being grown.
class CutStore {
 public:
  enum class Kind { MinusInfinity, Cuts };

  CutStore(Kind kind, int num_modes) : kind_(kind), modes_(num_modes) {}

  Kind kind() const { return kind_; }
  int num_modes() const { return static_cast<int>(modes_.size()); }

  bool unreachable(ModeId q) const { return entry(q).unreachable; }
  void mark_unreachable(ModeId q);

  const std::vector<Cut>& cuts(ModeId q) const { return entry(q).cuts; }

  /// Pointwise-maximum evaluation; -inf for MinusInfinity stores and empty
  /// lists, +inf for unreachable modes.
  Scalar value(ModeId q, const Vector& x) const;

  /// True when every cut at q has (numerically) zero slope. Lets callers
  /// fold the terminal value into a constant instead of an epigraph block.
  bool constant_only(ModeId q) const;

  /// Adds a cut unless it is dominated by the current function at the
  /// recorded probe points (or pointwise by a single existing cut). Returns
  /// whether the cut was kept. Monotone: value() never decreases.
  bool add_cut(ModeId q, Cut cut);

  /// Records a probe point for domination checks (ring of 32 per mode).
  void note_probe(ModeId q, const Vector& x);

  long total_cuts() const;

 private:
  struct ModeEntry {
    bool unreachable = false;
    std::vector<Cut> cuts;
    std::deque<Vector> probes;
  };

  const ModeEntry& entry(ModeId q) const {
    if (q < 0 || q >= num_modes()) throw UsageError("cut store: unknown mode id");
    return modes_[q];
  }
  ModeEntry& entry(ModeId q) {
    if (q < 0 || q >= num_modes()) throw UsageError("cut store: unknown mode id");
    return modes_[q];
  }

  Kind kind_;
  std::vector<ModeEntry> modes_;
};

}  // namespace hybnb
