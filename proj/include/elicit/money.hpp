#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace elicit {

/// Exact currency amount stored as integer cents.
class Money {
 public:
  constexpr Money() = default;
  static constexpr Money cents(std::int64_t c) { return Money(c); }
  static constexpr Money dollars(std::int64_t d) { return Money(d * 100); }
  /// Rounds to the nearest cent.
  static Money from_double(double dollars);
  /// Parses "14", "14.5" or "14.05". Throws Error(Parse) on malformed input.
  static Money parse(std::string_view text);

  constexpr std::int64_t in_cents() const { return cents_; }
  constexpr double to_double() const { return static_cast<double>(cents_) / 100.0; }
  std::string to_string() const;

  constexpr auto operator<=>(const Money&) const = default;
  constexpr Money operator+(Money o) const { return Money(cents_ + o.cents_); }
  constexpr Money operator-(Money o) const { return Money(cents_ - o.cents_); }

 private:
  constexpr explicit Money(std::int64_t c) : cents_(c) {}
  std::int64_t cents_ = 0;
};

enum class EventState { NotVerb, Verb };

std::string_view to_string(EventState s);
EventState parse_event_state(std::string_view text);

/// Binary-state lottery (nv, v): payoff if the event does not occur, payoff if it does.
struct Lottery {
  Money nv;
  Money v;

  constexpr auto operator<=>(const Lottery&) const = default;

  Money payoff(EventState s) const { return s == EventState::Verb ? v : nv; }
  std::string to_string() const;
};

constexpr Lottery lottery(std::int64_t nv_dollars, std::int64_t v_dollars) {
  return Lottery{Money::dollars(nv_dollars), Money::dollars(v_dollars)};
}

/// Upper bound of the algorithm lottery space [0, 20]^2.
inline constexpr Money kMaxPayoff = Money::dollars(20);

bool in_lottery_space(const Lottery& p);

enum class Dominance { StrictBoth, WeakOneStrict, None };

/// Whether `p` pays at least as much as `q` in every state.
Dominance dominates(const Lottery& p, const Lottery& q);

double euclidean_distance(const Lottery& a, const Lottery& b);

}  // namespace elicit
