#include "elicit/symbolic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "elicit/error.hpp"

namespace elicit {

using Node = SymbolicPayoff::Node;
using Op = SymbolicPayoff::Op;

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Node parse() {
    Node n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) {
    throw Error(ErrorCode::Parse, "symbolic payoff '" + std::string(s_) + "': " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  static bool is_var(char c) { return c == 'x' || c == 'X' || c == 'y' || c == 'Y' || c == '%' || c == '#'; }

  Node expr() {
    std::vector<Node> terms;
    terms.push_back(term());
    for (;;) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        terms.push_back(term());
      } else if (c == '-') {
        ++pos_;
        terms.push_back(Node{Op::Neg, 0, {term()}});
      } else {
        break;
      }
    }
    if (terms.size() == 1) return std::move(terms.front());
    return Node{Op::Add, 0, std::move(terms)};
  }

  Node term() {
    std::vector<Node> factors;
    factors.push_back(unary());
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        factors.push_back(unary());
      } else if (std::isdigit(static_cast<unsigned char>(c)) || is_var(c) || c == '(') {
        factors.push_back(unary());
      } else {
        break;
      }
    }
    if (factors.size() == 1) return std::move(factors.front());
    return Node{Op::Mul, 0, std::move(factors)};
  }

  Node unary() {
    char c = peek();
    if (c == '-') {
      ++pos_;
      return Node{Op::Neg, 0, {unary()}};
    }
    if (c == '+') {
      ++pos_;
      return unary();
    }
    return primary();
  }

  Node primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Node n = expr();
      if (peek() != ')') fail("missing ')'");
      ++pos_;
      return n;
    }
    if (c == 'x' || c == 'X' || c == '%') {
      ++pos_;
      return Node{Op::VarX, 0, {}};
    }
    if (c == 'y' || c == 'Y' || c == '#') {
      ++pos_;
      return Node{Op::VarY, 0, {}};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      long long v = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        v = v * 10 + (s_[pos_] - '0');
        if (v > 1'000'000'000LL) fail("constant too large");
        ++pos_;
      }
      return Node{Op::Const, v, {}};
    }
    if (c == '\0') fail("unexpected end of input");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string key(const Node& n);

Node canonicalize(const Node& n) {
  switch (n.op) {
    case Op::Const:
    case Op::VarX:
    case Op::VarY:
      return n;
    case Op::Neg: {
      Node inner = canonicalize(n.kids.front());
      if (inner.op == Op::Neg) return std::move(inner.kids.front());
      if (inner.op == Op::Const) return Node{Op::Const, -inner.value, {}};
      return Node{Op::Neg, 0, {std::move(inner)}};
    }
    case Op::Add:
    case Op::Mul: {
      std::vector<Node> flat;
      for (const auto& k : n.kids) {
        Node c = canonicalize(k);
        if (c.op == n.op) {
          for (auto& g : c.kids) flat.push_back(std::move(g));
        } else {
          flat.push_back(std::move(c));
        }
      }
      std::sort(flat.begin(), flat.end(), [](const Node& a, const Node& b) { return key(a) < key(b); });
      if (flat.size() == 1) return std::move(flat.front());
      return Node{n.op, 0, std::move(flat)};
    }
  }
  return n;
}

std::string key(const Node& n) {
  switch (n.op) {
    case Op::Const: return std::to_string(n.value);
    case Op::VarX: return "x";
    case Op::VarY: return "y";
    case Op::Neg: return "-(" + key(n.kids.front()) + ")";
    case Op::Add:
    case Op::Mul: {
      std::string s = n.op == Op::Add ? "+(" : "*(";
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) s += ",";
        s += key(n.kids[i]);
      }
      return s + ")";
    }
  }
  return {};
}

double eval(const Node& n, double x, double y) {
  switch (n.op) {
    case Op::Const: return static_cast<double>(n.value);
    case Op::VarX: return x;
    case Op::VarY: return y;
    case Op::Neg: return -eval(n.kids.front(), x, y);
    case Op::Add: {
      double s = 0;
      for (const auto& k : n.kids) s += eval(k, x, y);
      return s;
    }
    case Op::Mul: {
      double s = 1;
      for (const auto& k : n.kids) s *= eval(k, x, y);
      return s;
    }
  }
  return 0;
}

using Poly = SymbolicPayoff::Polynomial;

void prune(Poly& p) {
  for (auto it = p.begin(); it != p.end();) {
    if (it->second == 0) it = p.erase(it);
    else ++it;
  }
}

Poly expand(const Node& n) {
  switch (n.op) {
    case Op::Const: {
      Poly p{{{0, 0}, n.value}};
      prune(p);
      return p;
    }
    case Op::VarX: return Poly{{{1, 0}, 1}};
    case Op::VarY: return Poly{{{0, 1}, 1}};
    case Op::Neg: {
      Poly p = expand(n.kids.front());
      for (auto& [_, c] : p) c = -c;
      return p;
    }
    case Op::Add: {
      Poly sum;
      for (const auto& k : n.kids)
        for (const auto& [m, c] : expand(k)) sum[m] += c;
      prune(sum);
      return sum;
    }
    case Op::Mul: {
      Poly prod{{{0, 0}, 1}};
      for (const auto& k : n.kids) {
        Poly f = expand(k), next;
        for (const auto& [ma, ca] : prod)
          for (const auto& [mb, cb] : f) next[{ma.first + mb.first, ma.second + mb.second}] += ca * cb;
        prune(next);
        prod = std::move(next);
      }
      return prod;
    }
  }
  return {};
}

bool mentions(const Node& n) {
  if (n.op == Op::VarX || n.op == Op::VarY) return true;
  return std::any_of(n.kids.begin(), n.kids.end(), mentions);
}

}  // namespace

SymbolicPayoff SymbolicPayoff::parse(std::string_view text) {
  return SymbolicPayoff(std::string(text), Parser(text).parse());
}

SymbolicPayoff SymbolicPayoff::constant(long long c) {
  Node n = c < 0 ? Node{Op::Neg, 0, {Node{Op::Const, -c, {}}}} : Node{Op::Const, c, {}};
  return SymbolicPayoff(std::to_string(c), std::move(n));
}

std::string SymbolicPayoff::display_text() const {
  std::string out = text_;
  for (char& c : out) {
    if (c == 'x' || c == 'X') c = '%';
    else if (c == 'y' || c == 'Y') c = '#';
  }
  return out;
}

std::string SymbolicPayoff::canonical() const { return key(canonicalize(root_)); }

bool SymbolicPayoff::mentions_unknowns() const { return mentions(root_); }

Money SymbolicPayoff::evaluate(Money x, Money y) const {
  return Money::from_double(eval(root_, x.to_double(), y.to_double()));
}

SymbolicPayoff::Polynomial SymbolicPayoff::expand() const { return elicit::expand(root_); }

bool symbolic_identical(const SymbolicPayoff& a, const SymbolicPayoff& b) { return a.canonical() == b.canonical(); }

Money symbolic_eval(const SymbolicPayoff& a, Money x, Money y) { return a.evaluate(x, y); }

Lottery SymbolicLottery::resolve(Money x, Money y) const {
  Lottery l{nv.evaluate(x, y), v.evaluate(x, y)};
  if (l.nv < Money{} || l.v < Money{})
    throw Error(ErrorCode::Domain, "symbolic lottery " + display_text() + " resolves to a negative payment");
  return l;
}

Relation symbolic_relation(const SymbolicLottery& first, const SymbolicLottery& second) {
  if (symbolic_identical(first.nv, second.nv) && symbolic_identical(first.v, second.v)) return Relation::Indifferent;
  bool pos = false, neg = false;
  for (auto [a, b] : {std::pair{&first.nv, &second.nv}, std::pair{&first.v, &second.v}}) {
    if (symbolic_identical(*a, *b)) continue;
    Poly d = a->expand();
    for (const auto& [m, c] : b->expand()) d[m] -= c;
    prune(d);
    if (d.empty()) return Relation::Incomparable;  // equal only after simplification
    if (d.size() != 1 || d.begin()->first != std::pair{0, 0}) return Relation::Incomparable;
    (d.begin()->second > 0 ? pos : neg) = true;
  }
  if (pos && !neg) return Relation::FirstPreferred;
  if (neg && !pos) return Relation::SecondPreferred;
  return Relation::Incomparable;
}

}  // namespace elicit
