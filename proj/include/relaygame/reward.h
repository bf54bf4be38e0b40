#ifndef RELAYGAME_REWARD_H_
#define RELAYGAME_REWARD_H_

#include <compare>
#include <stdexcept>

namespace relaygame {

// A relay reward, or the INFEASIBLE marker for relays that cannot be reached
// (out of range or above the power budget). INFEASIBLE orders strictly below
// every finite reward and is never represented as an IEEE infinity.
class Reward {
 public:
  static constexpr Reward Infeasible() { return Reward(); }
  static constexpr Reward Of(double value) { return Reward(value); }

  constexpr bool feasible() const { return feasible_; }

  double value() const {
    if (!feasible_) throw std::logic_error("value() of an INFEASIBLE reward");
    return value_;
  }

  friend constexpr bool operator==(const Reward& a, const Reward& b) {
    return a.feasible_ == b.feasible_ && (!a.feasible_ || a.value_ == b.value_);
  }

  friend constexpr std::partial_ordering operator<=>(const Reward& a,
                                                     const Reward& b) {
    if (!a.feasible_ && !b.feasible_) return std::partial_ordering::equivalent;
    if (!a.feasible_) return std::partial_ordering::less;
    if (!b.feasible_) return std::partial_ordering::greater;
    return a.value_ <=> b.value_;
  }

  // Comparisons against plain thresholds; INFEASIBLE is below any threshold.
  constexpr bool below(double threshold) const {
    return !feasible_ || value_ < threshold;
  }
  constexpr bool above(double threshold) const {
    return feasible_ && value_ > threshold;
  }

 private:
  constexpr Reward() = default;
  constexpr explicit Reward(double v) : value_(v), feasible_(true) {}

  double value_ = 0.0;
  bool feasible_ = false;
};

enum class Forwarder { kFirst = 0, kSecond = 1 };

constexpr int index_of(Forwarder f) { return static_cast<int>(f); }
constexpr Forwarder other(Forwarder f) {
  return f == Forwarder::kFirst ? Forwarder::kSecond : Forwarder::kFirst;
}

}  // namespace relaygame

#endif  // RELAYGAME_REWARD_H_
