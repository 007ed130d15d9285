#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>

#include "reqintel/clock.hpp"

namespace reqintel {

inline constexpr std::chrono::seconds kMinScheduleInterval{60};

/// Fires `run` every `interval`, measured start to start. A tick that
/// arrives while the previous run is still going is skipped and logged,
/// never queued.
class Scheduler {
 public:
  using RunFn = std::function<void(Timestamp tick)>;

  struct Stats {
    std::int64_t ticks = 0;
    std::int64_t started = 0;
    std::int64_t completed = 0;
    std::int64_t skipped = 0;
  };

  enum class TickOutcome { started, skipped, stopped };

  /// Throws BadInterval for intervals under one minute.
  Scheduler(Clock& clock, std::chrono::seconds interval, RunFn run);
  ~Scheduler();

  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  /// Starts the timer thread; the first tick fires at the current time.
  void start();

  /// Prevents further ticks and waits for an in-flight run to finish.
  void stop();

  /// Handles one tick; the timer thread calls this, tests may too.
  TickOutcome tick(Timestamp at);

  std::chrono::seconds interval() const { return interval_; }
  bool in_flight() const;
  Stats stats() const;

 private:
  void loop(std::stop_token stop);

  Clock& clock_;
  std::chrono::seconds interval_;
  RunFn run_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool in_flight_ = false;
  bool stopped_ = false;
  Stats stats_;
  std::jthread worker_;
  std::jthread timer_;
};

/// Builds and starts a scheduler; stop() through the returned handle.
std::unique_ptr<Scheduler> schedule(Clock& clock, std::chrono::seconds interval, Scheduler::RunFn run);

}  // namespace reqintel
