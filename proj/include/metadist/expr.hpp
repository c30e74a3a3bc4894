#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "metadist/error.hpp"
#include "metadist/value.hpp"

namespace metadist {

// Arithmetic expressions for value-dependent bounds. The grammar covers
// numbers, named references (parent variables or graph constants), + - * /,
// min(a,b), max(a,b) and sum(v1,...,vk) where excluded members of the family
// contribute nothing to the sum.

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Op { number, reference, add, sub, mul, div, neg, min, max, sum };
  Op op = Op::number;
  double number = 0.0;
  std::string name;               // reference
  std::vector<std::string> family;  // sum members
  ExprPtr lhs, rhs;
};

/// Closed interval used when bounding expressions over a set of inputs.
struct NumInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Evaluation environment: value per visible name. EXC entries are legal only
/// inside sum(...) families; a plain reference to an EXC name throws.
struct ExprEnv {
  std::map<std::string, Value> values;
  const std::map<std::string, double>* constants = nullptr;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    ExprPtr e = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return e;
  }

 private:
  ExprPtr expression() {
    ExprPtr e = term();
    for (;;) {
      skip_ws();
      if (consume('+')) {
        e = binary(ExprNode::Op::add, e, term());
      } else if (consume('-')) {
        e = binary(ExprNode::Op::sub, e, term());
      } else {
        return e;
      }
    }
  }

  ExprPtr term() {
    ExprPtr e = unary();
    for (;;) {
      skip_ws();
      if (consume('*')) {
        e = binary(ExprNode::Op::mul, e, unary());
      } else if (consume('/')) {
        e = binary(ExprNode::Op::div, e, unary());
      } else {
        return e;
      }
    }
  }

  ExprPtr unary() {
    skip_ws();
    if (consume('-')) {
      auto node = std::make_shared<ExprNode>();
      node->op = ExprNode::Op::neg;
      node->lhs = unary();
      return node;
    }
    return primary();
  }

  ExprPtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      ExprPtr e = expression();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
    return nullptr;
  }

  ExprPtr number() {
    std::size_t end = pos_;
    while (end < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
            text_[end] == 'e' || text_[end] == 'E' ||
            ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
             (text_[end - 1] == 'e' || text_[end - 1] == 'E')))) {
      ++end;
    }
    auto node = std::make_shared<ExprNode>();
    node->op = ExprNode::Op::number;
    try {
      node->number = std::stod(std::string(text_.substr(pos_, end - pos_)));
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ = end;
    return node;
  }

  ExprPtr identifier() {
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                                  text_[end] == '_')) {
      ++end;
    }
    std::string name(text_.substr(pos_, end - pos_));
    pos_ = end;
    skip_ws();
    if (name == "min" || name == "max") {
      expect('(');
      ExprPtr a = expression();
      expect(',');
      ExprPtr b = expression();
      expect(')');
      auto node = std::make_shared<ExprNode>();
      node->op = name == "min" ? ExprNode::Op::min : ExprNode::Op::max;
      node->lhs = a;
      node->rhs = b;
      return node;
    }
    if (name == "sum") {
      expect('(');
      auto node = std::make_shared<ExprNode>();
      node->op = ExprNode::Op::sum;
      for (;;) {
        skip_ws();
        std::size_t member_end = pos_;
        while (member_end < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[member_end])) ||
                text_[member_end] == '_')) {
          ++member_end;
        }
        if (member_end == pos_) fail("sum() expects variable names");
        node->family.emplace_back(text_.substr(pos_, member_end - pos_));
        pos_ = member_end;
        skip_ws();
        if (consume(',')) continue;
        expect(')');
        break;
      }
      return node;
    }
    auto node = std::make_shared<ExprNode>();
    node->op = ExprNode::Op::reference;
    node->name = std::move(name);
    return node;
  }

  static ExprPtr binary(ExprNode::Op op, ExprPtr a, ExprPtr b) {
    auto node = std::make_shared<ExprNode>();
    node->op = op;
    node->lhs = std::move(a);
    node->rhs = std::move(b);
    return node;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    skip_ws();
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("expression '" + std::string(text_) + "': " + message);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ExprPtr parse_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

/// Names referenced by the expression, including sum members.
inline void collect_references(const ExprPtr& expr, std::set<std::string>& out) {
  if (!expr) return;
  if (expr->op == ExprNode::Op::reference) out.insert(expr->name);
  for (const auto& member : expr->family) out.insert(member);
  collect_references(expr->lhs, out);
  collect_references(expr->rhs, out);
}

inline double eval_expr(const ExprPtr& expr, const ExprEnv& env) {
  using Op = ExprNode::Op;
  switch (expr->op) {
    case Op::number: return expr->number;
    case Op::reference: {
      if (env.constants) {
        auto c = env.constants->find(expr->name);
        if (c != env.constants->end()) return c->second;
      }
      auto it = env.values.find(expr->name);
      if (it == env.values.end())
        throw ValidationError("expression references unknown name '" + expr->name + "'");
      if (it->second.is_exc())
        throw ValidationError("expression references excluded variable '" + expr->name + "'");
      return it->second.numeric();
    }
    case Op::add: return eval_expr(expr->lhs, env) + eval_expr(expr->rhs, env);
    case Op::sub: return eval_expr(expr->lhs, env) - eval_expr(expr->rhs, env);
    case Op::mul: return eval_expr(expr->lhs, env) * eval_expr(expr->rhs, env);
    case Op::div: {
      const double denom = eval_expr(expr->rhs, env);
      if (denom == 0.0) throw ValidationError("expression divides by zero");
      return eval_expr(expr->lhs, env) / denom;
    }
    case Op::neg: return -eval_expr(expr->lhs, env);
    case Op::min: return std::min(eval_expr(expr->lhs, env), eval_expr(expr->rhs, env));
    case Op::max: return std::max(eval_expr(expr->lhs, env), eval_expr(expr->rhs, env));
    case Op::sum: {
      double total = 0.0;
      for (const auto& member : expr->family) {
        auto it = env.values.find(member);
        if (it == env.values.end())
          throw ValidationError("sum() references unknown name '" + member + "'");
        if (it->second.is_exc()) continue;  // excluded members drop out of the family
        total += it->second.numeric();
      }
      return total;
    }
  }
  throw ValidationError("corrupt expression node");
}

/// Interval environment: a range per name, or no entry for excluded members.
struct IntervalEnv {
  std::map<std::string, NumInterval> ranges;
  const std::map<std::string, double>* constants = nullptr;
};

/// Bounds the expression over the environment with interval arithmetic.
/// Exact for the supported grammar as long as each name occurs once.
inline NumInterval eval_expr_interval(const ExprPtr& expr, const IntervalEnv& env) {
  using Op = ExprNode::Op;
  switch (expr->op) {
    case Op::number: return {expr->number, expr->number};
    case Op::reference: {
      if (env.constants) {
        auto c = env.constants->find(expr->name);
        if (c != env.constants->end()) return {c->second, c->second};
      }
      auto it = env.ranges.find(expr->name);
      if (it == env.ranges.end())
        throw ValidationError("expression references excluded or unknown name '" + expr->name +
                              "'");
      return it->second;
    }
    case Op::add: {
      const auto a = eval_expr_interval(expr->lhs, env);
      const auto b = eval_expr_interval(expr->rhs, env);
      return {a.lo + b.lo, a.hi + b.hi};
    }
    case Op::sub: {
      const auto a = eval_expr_interval(expr->lhs, env);
      const auto b = eval_expr_interval(expr->rhs, env);
      return {a.lo - b.hi, a.hi - b.lo};
    }
    case Op::mul: {
      const auto a = eval_expr_interval(expr->lhs, env);
      const auto b = eval_expr_interval(expr->rhs, env);
      const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
      return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
    }
    case Op::div: {
      const auto a = eval_expr_interval(expr->lhs, env);
      const auto b = eval_expr_interval(expr->rhs, env);
      if (b.lo <= 0.0 && b.hi >= 0.0)
        throw ValidationError("expression divides by an interval containing zero");
      const double p[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
      return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
    }
    case Op::neg: {
      const auto a = eval_expr_interval(expr->lhs, env);
      return {-a.hi, -a.lo};
    }
    case Op::min: {
      const auto a = eval_expr_interval(expr->lhs, env);
      const auto b = eval_expr_interval(expr->rhs, env);
      return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
    }
    case Op::max: {
      const auto a = eval_expr_interval(expr->lhs, env);
      const auto b = eval_expr_interval(expr->rhs, env);
      return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
    }
    case Op::sum: {
      NumInterval total{0.0, 0.0};
      for (const auto& member : expr->family) {
        auto it = env.ranges.find(member);
        if (it == env.ranges.end()) continue;  // member excluded in this configuration
        total.lo += it->second.lo;
        total.hi += it->second.hi;
      }
      return total;
    }
  }
  throw ValidationError("corrupt expression node");
}

}  // namespace metadist
