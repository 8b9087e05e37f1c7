// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/bindings/scheduler.hpp"

#include <cmath>
#include <cstdio>
#include <exception>

#include "latebind/common/error.hpp"

namespace latebind::bindings {

Scheduler::Scheduler(const Clock& clock, SchedulerOptions options)
    : clock_(clock), options_(options), rng_(options.seed) {
  if (options_.jitter < 0 || options_.jitter >= 1) {
    throw Error(ErrorCode::invalid_argument, "jitter must be in [0, 1)");
  }
  if (options_.workers == 0) options_.workers = 1;
}

Scheduler::~Scheduler() { stop(); }

Duration Scheduler::jittered(Duration interval) {
  if (options_.jitter == 0) return interval;
  std::uniform_real_distribution<double> dist(1.0 - options_.jitter, 1.0 + options_.jitter);
  const auto ms = static_cast<Duration::rep>(std::llround(interval.count() * dist(rng_)));
  return Duration{std::max<Duration::rep>(1, ms)};
}

void Scheduler::upsert(const std::string& key, Duration interval, Task task, bool immediate) {
  if (interval.count() <= 0) throw Error(ErrorCode::invalid_argument, "interval must be positive");
  {
    std::lock_guard lock(mu_);
    Job& job = jobs_[key];
    job.interval = interval;
    job.task = std::move(task);
    job.generation = next_generation_++;
    const TimePoint now = clock_.now();
    job.due = immediate ? now : now + jittered(interval);
  }
  cv_.notify_all();
}

bool Scheduler::remove(const std::string& key) {
  std::lock_guard lock(mu_);
  return jobs_.erase(key) != 0;
}

bool Scheduler::contains(const std::string& key) const {
  std::lock_guard lock(mu_);
  return jobs_.count(key) != 0;
}

std::size_t Scheduler::size() const {
  std::lock_guard lock(mu_);
  return jobs_.size();
}

std::optional<TimePoint> Scheduler::next_due(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(key);
  if (it == jobs_.end()) return std::nullopt;
  return it->second.due;
}

std::uint64_t Scheduler::run_count(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(key);
  return it == jobs_.end() ? 0 : it->second.runs;
}

std::vector<Scheduler::Claim> Scheduler::claim_due(TimePoint now) {
  std::vector<Claim> out;
  for (auto& [key, job] : jobs_) {
    if (job.in_flight || job.due > now) continue;
    job.in_flight = true;
    out.push_back({key, job.generation, job.task});
  }
  return out;
}

void Scheduler::finish(const Claim& claim, TimePoint now) {
  {
    std::lock_guard lock(mu_);
    auto it = jobs_.find(claim.key);
    if (it == jobs_.end()) return;
    Job& job = it->second;
    job.in_flight = false;
    if (job.generation != claim.generation) return;  // replaced while running
    ++job.runs;
    TimePoint next = job.due + jittered(job.interval);
    if (next <= now) next = now + jittered(job.interval);
    job.due = next;
  }
  cv_.notify_all();
}

void Scheduler::execute(const Claim& claim, TimePoint now) {
  try {
    claim.task(now);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "latebind: job %s failed: %s\n", claim.key.c_str(), e.what());
  } catch (...) {
    std::fprintf(stderr, "latebind: job %s failed\n", claim.key.c_str());
  }
}

std::size_t Scheduler::run_due(TimePoint now) {
  std::vector<Claim> claims;
  {
    std::lock_guard lock(mu_);
    claims = claim_due(now);
  }
  for (const auto& c : claims) {
    execute(c, now);
    finish(c, now);
  }
  return claims.size();
}

void Scheduler::start() {
  std::lock_guard lock(mu_);
  if (running_) return;
  running_ = true;
  stopping_ = false;
  loop_thread_ = std::thread([this] { loop(); });
  for (std::size_t i = 0; i < options_.workers; ++i) workers_.emplace_back([this] { worker(); });
}

void Scheduler::stop() {
  {
    std::lock_guard lock(mu_);
    if (!running_) return;
    stopping_ = true;
  }
  cv_.notify_all();
  work_cv_.notify_all();
  if (loop_thread_.joinable()) loop_thread_.join();
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  workers_.clear();
  std::lock_guard lock(mu_);
  for (const auto& c : queue_) {
    auto it = jobs_.find(c.key);
    if (it != jobs_.end()) it->second.in_flight = false;
  }
  queue_.clear();
  running_ = false;
}

bool Scheduler::running() const {
  std::lock_guard lock(mu_);
  return running_;
}

void Scheduler::loop() {
  std::unique_lock lock(mu_);
  while (!stopping_) {
    const TimePoint now = clock_.now();
    auto claims = claim_due(now);
    if (!claims.empty()) {
      for (auto& c : claims) queue_.push_back(std::move(c));
      work_cv_.notify_all();
    }
    std::optional<TimePoint> earliest;
    for (const auto& [key, job] : jobs_) {
      if (job.in_flight) continue;
      if (!earliest || job.due < *earliest) earliest = job.due;
    }
    if (!earliest) {
      cv_.wait(lock);
    } else {
      const auto wait = *earliest - clock_.now();
      if (wait.count() > 0) cv_.wait_for(lock, wait);
    }
  }
}

void Scheduler::worker() {
  for (;;) {
    Claim claim;
    {
      std::unique_lock lock(mu_);
      work_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      claim = std::move(queue_.front());
      queue_.pop_front();
    }
    execute(claim, clock_.now());
    finish(claim, clock_.now());
  }
}

}  // namespace latebind::bindings
