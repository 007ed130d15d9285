#pragma once

#include <condition_variable>
#include <mutex>
#include <stop_token>
#include <vector>

#include "reqintel/core.hpp"

namespace reqintel {

/// Injectable time source. sleep_until returns false when the stop token
/// fires before the deadline.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
  virtual bool sleep_until(Timestamp deadline, std::stop_token stop) = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override;
  bool sleep_until(Timestamp deadline, std::stop_token stop) override;

 private:
  std::mutex mu_;
  std::condition_variable_any cv_;
};

/// A clock that only moves when told to. Sleepers block until advance()
/// reaches their deadline, so schedules can be driven without real waiting.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start) : now_(start) {}

  Timestamp now() const override;
  bool sleep_until(Timestamp deadline, std::stop_token stop) override;

  void advance(std::chrono::seconds by);
  void set(Timestamp t);

  /// Blocks until exactly `n` threads are asleep with deadlines still in
  /// the future, i.e. every thread woken by the last advance has settled.
  void wait_for_sleepers(std::size_t n) const;

 private:
  std::size_t pending_sleepers_locked() const;

  mutable std::mutex mu_;
  mutable std::condition_variable_any cv_;
  Timestamp now_;
  std::vector<Timestamp> deadlines_;
};

}  // namespace reqintel
