#include "reqintel/scheduler.hpp"

#include <spdlog/spdlog.h>

#include "reqintel/timeutil.hpp"

namespace reqintel {

Scheduler::Scheduler(Clock& clock, std::chrono::seconds interval, RunFn run)
    : clock_(clock), interval_(interval), run_(std::move(run)) {
  if (interval < kMinScheduleInterval) {
    throw Error(ErrorCode::bad_interval, "schedule interval must be at least 60 seconds, got " +
                                             std::to_string(interval.count()));
  }
}

Scheduler::~Scheduler() { stop(); }

void Scheduler::start() {
  std::lock_guard lock(mu_);
  if (stopped_ || timer_.joinable()) return;
  timer_ = std::jthread([this](std::stop_token st) { loop(st); });
}

void Scheduler::loop(std::stop_token stop) {
  Timestamp next = clock_.now();
  while (clock_.sleep_until(next, stop)) {
    tick(next);
    next += interval_;
  }
}

Scheduler::TickOutcome Scheduler::tick(Timestamp at) {
  std::unique_lock lock(mu_);
  ++stats_.ticks;
  if (stopped_) return TickOutcome::stopped;
  if (in_flight_) {
    ++stats_.skipped;
    spdlog::info("pipeline tick at {} skipped: previous run still in progress", format_rfc3339(at));
    return TickOutcome::skipped;
  }
  in_flight_ = true;
  ++stats_.started;
  // The previous worker has already cleared in_flight_; reap it first.
  std::jthread previous = std::move(worker_);
  lock.unlock();
  if (previous.joinable()) previous.join();
  lock.lock();
  if (stopped_) {
    in_flight_ = false;
    --stats_.started;
    return TickOutcome::stopped;
  }
  worker_ = std::jthread([this, at] {
    try {
      run_(at);
    } catch (const std::exception& e) {
      spdlog::error("scheduled pipeline run failed: {}", e.what());
    }
    std::lock_guard done(mu_);
    in_flight_ = false;
    ++stats_.completed;
    cv_.notify_all();
  });
  return TickOutcome::started;
}

void Scheduler::stop() {
  {
    std::lock_guard lock(mu_);
    stopped_ = true;
  }
  if (timer_.joinable()) {
    timer_.request_stop();
    timer_.join();
  }
  std::jthread worker;
  {
    std::lock_guard lock(mu_);
    worker = std::move(worker_);
  }
  if (worker.joinable()) worker.join();
}

bool Scheduler::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

Scheduler::Stats Scheduler::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

std::unique_ptr<Scheduler> schedule(Clock& clock, std::chrono::seconds interval, Scheduler::RunFn run) {
  auto s = std::make_unique<Scheduler>(clock, interval, std::move(run));
  s->start();
  return s;
}

}  // namespace reqintel
