#pragma once

// Parse trees for the expression grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative, binds tighter than '*'
//   primary := number | ident | ident '(' expr ')' | '(' expr ')'
//
// Identifiers are [A-Za-z_][A-Za-z0-9_]*. Numbers are integer literals; decimal
// literals are accepted only when the caller opts in (numeric blocks).

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "jetcalc/error.hpp"

namespace jetcalc::syntax {

enum class Kind { Number, Symbol, Sum, Sub, Prod, Div, Pow, Neg, Call };

struct Node {
  Kind kind = Kind::Number;
  std::string text;  // literal digits, identifier, or function name
  std::vector<Node> children;

  friend bool operator==(const Node&, const Node&) = default;
};

inline bool is_function_name(std::string_view name) {
  return name == "sin" || name == "cos" || name == "exp" || name == "log" || name == "sqrt";
}

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, bool allow_decimals) : text_(text), decimals_(allow_decimals) {}

  Node parse() {
    skip_space();
    if (pos_ >= text_.size()) fail("empty expression", pos_);
    Node n = expr();
    skip_space();
    if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError("syntax error at " + std::to_string(line) + ":" + std::to_string(col) +
                          ": " + msg,
                      at, line, col, msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Node expr() {
    Node lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Node{Kind::Sum, {}, {std::move(lhs), term()}};
      } else if (accept('-')) {
        lhs = Node{Kind::Sub, {}, {std::move(lhs), term()}};
      } else {
        return lhs;
      }
    }
  }

  Node term() {
    Node lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Node{Kind::Prod, {}, {std::move(lhs), unary()}};
      } else if (accept('/')) {
        lhs = Node{Kind::Div, {}, {std::move(lhs), unary()}};
      } else {
        return lhs;
      }
    }
  }

  Node unary() {
    if (accept('-')) return Node{Kind::Neg, {}, {unary()}};
    return power();
  }

  Node power() {
    Node base = primary();
    if (accept('^')) return Node{Kind::Pow, {}, {std::move(base), unary()}};
    return base;
  }

  Node primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected operand, found end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && decimals_)) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        if (!is_function_name(name)) fail("unknown function '" + name + "'", start);
        ++pos_;
        Node arg = expr();
        if (!accept(')')) fail("expected ')'", pos_);
        return Node{Kind::Call, std::move(name), {std::move(arg)}};
      }
      return Node{Kind::Symbol, std::move(name), {}};
    }
    if (c == '(') {
      ++pos_;
      Node inner = expr();
      if (!accept(')')) fail("expected ')'", pos_);
      return inner;
    }
    fail(std::string("unexpected '") + c + "'", pos_);
  }

  Node number() {
    const std::size_t start = pos_;
    bool dot = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '.' && !dot) {
        if (!decimals_) fail("decimal literals are not allowed in symbolic fields", pos_);
        dot = true;
        ++pos_;
      } else {
        break;
      }
    }
    std::string lit(text_.substr(start, pos_ - start));
    if (lit == ".") fail("malformed number", start);
    return Node{Kind::Number, std::move(lit), {}};
  }

  std::string_view text_;
  bool decimals_;
  std::size_t pos_ = 0;
};

inline int precedence(Kind k) {
  switch (k) {
    case Kind::Sum:
    case Kind::Sub:
      return 1;
    case Kind::Prod:
    case Kind::Div:
      return 2;
    case Kind::Neg:
      return 3;
    case Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

}  // namespace detail

/// Parses `text`. Throws SyntaxError on malformed or empty input.
inline Node parse(std::string_view text, bool allow_decimals = false) {
  return detail::Parser(text, allow_decimals).parse();
}

/// Renders with the minimal parentheses needed for `parse` to rebuild the
/// same tree.
inline std::string render(const Node& n) {
  using detail::precedence;
  auto wrap = [](const Node& c, bool paren) {
    return paren ? "(" + render(c) + ")" : render(c);
  };
  switch (n.kind) {
    case Kind::Number:
    case Kind::Symbol:
      return n.text;
    case Kind::Call:
      return n.text + "(" + render(n.children[0]) + ")";
    case Kind::Neg: {
      const Node& c = n.children[0];
      return "-" + wrap(c, precedence(c.kind) < precedence(Kind::Neg));
    }
    case Kind::Pow: {
      const Node& b = n.children[0];
      const Node& e = n.children[1];
      // The exponent is parsed as a unary, so only sums and products need parens.
      return wrap(b, precedence(b.kind) <= precedence(Kind::Pow)) + "^" +
             wrap(e, precedence(e.kind) < precedence(Kind::Neg));
    }
    default: {
      const int p = precedence(n.kind);
      const char* op = n.kind == Kind::Sum ? " + " : n.kind == Kind::Sub ? " - "
                       : n.kind == Kind::Prod ? "*" : "/";
      const Node& l = n.children[0];
      const Node& r = n.children[1];
      return wrap(l, precedence(l.kind) < p) + op + wrap(r, precedence(r.kind) <= p);
    }
  }
}

/// Compact structural dump, e.g. `Sum(Pow(x,2),Prod(3,y))`.
inline std::string to_sexpr(const Node& n) {
  auto two = [&](const char* name) {
    return std::string(name) + "(" + to_sexpr(n.children[0]) + "," + to_sexpr(n.children[1]) + ")";
  };
  switch (n.kind) {
    case Kind::Number:
    case Kind::Symbol:
      return n.text;
    case Kind::Sum:
      return two("Sum");
    case Kind::Sub:
      return two("Sub");
    case Kind::Prod:
      return two("Prod");
    case Kind::Div:
      return two("Div");
    case Kind::Pow:
      return two("Pow");
    case Kind::Neg:
      return "Neg(" + to_sexpr(n.children[0]) + ")";
    case Kind::Call:
      return "Fun(" + n.text + "," + to_sexpr(n.children[0]) + ")";
  }
  return {};
}

}  // namespace jetcalc::syntax
