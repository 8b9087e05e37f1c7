// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>

namespace latebind {

using Duration = std::chrono::milliseconds;
using TimePoint = std::chrono::sys_time<Duration>;

/// Time source consulted by every time-dependent operation. Tests substitute
/// a ManualClock so that multi-day policies run in milliseconds.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual TimePoint now() const = 0;
};

class SystemClock final : public Clock {
 public:
  TimePoint now() const override;
};

class ManualClock final : public Clock {
 public:
  explicit ManualClock(TimePoint start = TimePoint{Duration{1'700'000'000'000}})
      : now_ms_(start.time_since_epoch().count()) {}

  TimePoint now() const override { return TimePoint{Duration{now_ms_.load()}}; }
  void set(TimePoint t) { now_ms_.store(t.time_since_epoch().count()); }
  void advance(Duration d) { now_ms_.fetch_add(d.count()); }

 private:
  std::atomic<Duration::rep> now_ms_;
};

}  // namespace latebind
