// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "latebind/common/clock.hpp"

namespace latebind::bindings {

struct SchedulerOptions {
  std::size_t workers = 2;
  /// Each interval is scaled by a uniform factor in [1 - jitter, 1 + jitter].
  double jitter = 0.1;
  std::uint64_t seed = 0x6c62;
};

/// Periodic jobs keyed by name. Time comes from the injected clock. A job is
/// never run concurrently with itself; a run that overlaps its next due time
/// delays that run instead of stacking.
///
/// Jobs run either through run_due(now) on the caller's thread, or on the
/// worker pool after start(). The background loop sleeps until the next due
/// time and blocks indefinitely when there are no jobs.
class Scheduler {
 public:
  using Task = std::function<void(TimePoint now)>;

  explicit Scheduler(const Clock& clock, SchedulerOptions options = {});
  ~Scheduler();
  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  /// Adds or replaces a job. The first run is due now when `immediate`,
  /// otherwise one (jittered) interval from now.
  void upsert(const std::string& key, Duration interval, Task task, bool immediate = true);
  bool remove(const std::string& key);
  bool contains(const std::string& key) const;
  std::size_t size() const;
  std::optional<TimePoint> next_due(const std::string& key) const;
  std::uint64_t run_count(const std::string& key) const;

  std::size_t run_due(TimePoint now);

  void start();
  void stop();
  bool running() const;

 private:
  struct Job {
    Duration interval{};
    Task task;
    TimePoint due{};
    bool in_flight = false;
    std::uint64_t generation = 0;
    std::uint64_t runs = 0;
  };
  struct Claim {
    std::string key;
    std::uint64_t generation;
    Task task;
  };

  Duration jittered(Duration interval);
  std::vector<Claim> claim_due(TimePoint now);
  void finish(const Claim& claim, TimePoint now);
  void execute(const Claim& claim, TimePoint now);
  void loop();
  void worker();

  const Clock& clock_;
  SchedulerOptions options_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable work_cv_;
  std::map<std::string, Job> jobs_;
  std::deque<Claim> queue_;
  std::mt19937_64 rng_;
  std::uint64_t next_generation_ = 1;
  bool running_ = false;
  bool stopping_ = false;
  std::thread loop_thread_;
  std::vector<std::thread> workers_;
};

}  // namespace latebind::bindings
