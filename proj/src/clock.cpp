#include "reqintel/clock.hpp"

#include <algorithm>

namespace reqintel {

Timestamp SystemClock::now() const {
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

bool SystemClock::sleep_until(Timestamp deadline, std::stop_token stop) {
  std::unique_lock lock(mu_);
  cv_.wait_until(lock, stop, deadline, [] { return false; });
  return !stop.stop_requested();
}

Timestamp ManualClock::now() const {
  std::lock_guard lock(mu_);
  return now_;
}

bool ManualClock::sleep_until(Timestamp deadline, std::stop_token stop) {
  std::unique_lock lock(mu_);
  deadlines_.push_back(deadline);
  cv_.notify_all();
  const bool reached = cv_.wait(lock, stop, [&] { return now_ >= deadline; });
  deadlines_.erase(std::find(deadlines_.begin(), deadlines_.end(), deadline));
  cv_.notify_all();
  return reached;
}

void ManualClock::advance(std::chrono::seconds by) {
  std::lock_guard lock(mu_);
  now_ += by;
  cv_.notify_all();
}

void ManualClock::set(Timestamp t) {
  std::lock_guard lock(mu_);
  now_ = t;
  cv_.notify_all();
}

std::size_t ManualClock::pending_sleepers_locked() const {
  return static_cast<std::size_t>(
      std::count_if(deadlines_.begin(), deadlines_.end(), [&](Timestamp d) { return d > now_; }));
}

void ManualClock::wait_for_sleepers(std::size_t n) const {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] {
    // Sleepers whose deadline has passed are still on their way out.
    return pending_sleepers_locked() == n && pending_sleepers_locked() == deadlines_.size();
  });
}

}  // namespace reqintel
