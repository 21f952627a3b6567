// Copyright 2026 The sprace Authors
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

#ifndef SPRACE_VCLOCK_HPP_
#define SPRACE_VCLOCK_HPP_

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace sprace {

// Thread-indexed counters. Width is fixed at construction; counters are
// 64-bit so billion-event traces cannot overflow them.
class VectorTimestamp {
 public:
  VectorTimestamp() = default;
  explicit VectorTimestamp(uint32_t width) : c_(width, 0) {}

  uint32_t width() const { return static_cast<uint32_t>(c_.size()); }
  uint64_t operator[](uint32_t t) const { return c_[t]; }

  bool is_bottom() const {
    return std::all_of(c_.begin(), c_.end(), [](uint64_t v) { return v == 0; });
  }

  VectorTimestamp join(const VectorTimestamp& o) const {
    check_width(o);
    VectorTimestamp r(*this);
    for (uint32_t t = 0; t < width(); ++t) r.c_[t] = std::max(r.c_[t], o.c_[t]);
    return r;
  }

  // In-place join; returns true if any entry grew.
  bool join_with(const VectorTimestamp& o) {
    check_width(o);
    bool grew = false;
    for (uint32_t t = 0; t < width(); ++t) {
      if (o.c_[t] > c_[t]) {
        c_[t] = o.c_[t];
        grew = true;
      }
    }
    return grew;
  }

  bool leq(const VectorTimestamp& o) const {
    check_width(o);
    for (uint32_t t = 0; t < width(); ++t)
      if (c_[t] > o.c_[t]) return false;
    return true;
  }

  VectorTimestamp with(uint32_t t, uint64_t v) const {
    assert(t < width());
    VectorTimestamp r(*this);
    r.c_[t] = v;
    return r;
  }

  VectorTimestamp bump(uint32_t t) const { return with(t, c_[t] + 1); }

  void bump_inplace(uint32_t t) {
    assert(t < width());
    ++c_[t];
  }

  bool operator==(const VectorTimestamp& o) const { return c_ == o.c_; }

  std::span<const uint64_t> data() const { return c_; }
  std::span<uint64_t> data() { return c_; }

 private:
  void check_width(const VectorTimestamp& o) const {
    if (c_.size() != o.c_.size())
      throw std::invalid_argument("vector timestamp width mismatch");
  }

  std::vector<uint64_t> c_;
};

// Raw-array forms used by the streaming detector, which keeps its clocks in
// flat storage to avoid per-entry allocation.
namespace vc {

inline void clear(uint64_t* v, uint32_t w) { std::fill(v, v + w, 0); }

inline bool leq(const uint64_t* a, const uint64_t* b, uint32_t w) {
  for (uint32_t t = 0; t < w; ++t)
    if (a[t] > b[t]) return false;
  return true;
}

inline bool join_into(uint64_t* dst, const uint64_t* src, uint32_t w) {
  bool grew = false;
  for (uint32_t t = 0; t < w; ++t) {
    if (src[t] > dst[t]) {
      dst[t] = src[t];
      grew = true;
    }
  }
  return grew;
}

inline void copy(uint64_t* dst, const uint64_t* src, uint32_t w) {
  std::copy(src, src + w, dst);
}

inline bool is_zero(const uint64_t* v, uint32_t w) {
  for (uint32_t t = 0; t < w; ++t)
    if (v[t]) return false;
  return true;
}

}  // namespace vc

}  // namespace sprace

#endif  // SPRACE_VCLOCK_HPP_
