#include "elicit/money.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "elicit/error.hpp"

namespace elicit {

Money Money::from_double(double dollars) {
  if (!std::isfinite(dollars)) throw Error(ErrorCode::Domain, "non-finite money amount");
  return Money(static_cast<std::int64_t>(std::llround(dollars * 100.0)));
}

Money Money::parse(std::string_view text) {
  auto fail = [&] { return Error(ErrorCode::Parse, "malformed money amount '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();
  bool negative = false;
  if (text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() || frac.size() > 2 || (dot != std::string_view::npos && frac.empty())) throw fail();
  std::int64_t w = 0;
  auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
  if (ec != std::errc{} || p != whole.data() + whole.size()) throw fail();
  std::int64_t f = 0;
  if (!frac.empty()) {
    auto [q, ec2] = std::from_chars(frac.data(), frac.data() + frac.size(), f);
    if (ec2 != std::errc{} || q != frac.data() + frac.size()) throw fail();
    if (frac.size() == 1) f *= 10;
  }
  std::int64_t c = w * 100 + f;
  return Money(negative ? -c : c);
}

std::string Money::to_string() const {
  std::int64_t a = cents_ < 0 ? -cents_ : cents_;
  char buf[48];
  if (a % 100 == 0)
    std::snprintf(buf, sizeof buf, "%s%lld", cents_ < 0 ? "-" : "", static_cast<long long>(a / 100));
  else
    std::snprintf(buf, sizeof buf, "%s%lld.%02lld", cents_ < 0 ? "-" : "", static_cast<long long>(a / 100),
                  static_cast<long long>(a % 100));
  return buf;
}

std::string_view to_string(EventState s) { return s == EventState::Verb ? "verb" : "not_verb"; }

EventState parse_event_state(std::string_view text) {
  if (text == "verb") return EventState::Verb;
  if (text == "not_verb") return EventState::NotVerb;
  throw Error(ErrorCode::Parse, "unknown event state '" + std::string(text) + "'");
}

std::string Lottery::to_string() const { return "(" + nv.to_string() + ", " + v.to_string() + ")"; }

bool in_lottery_space(const Lottery& p) {
  return p.nv >= Money{} && p.v >= Money{} && p.nv <= kMaxPayoff && p.v <= kMaxPayoff;
}

Dominance dominates(const Lottery& p, const Lottery& q) {
  if (p.nv > q.nv && p.v > q.v) return Dominance::StrictBoth;
  if (p.nv >= q.nv && p.v >= q.v && p != q) return Dominance::WeakOneStrict;
  return Dominance::None;
}

double euclidean_distance(const Lottery& a, const Lottery& b) {
  return std::hypot(a.nv.to_double() - b.nv.to_double(), a.v.to_double() - b.v.to_double());
}

}  // namespace elicit
