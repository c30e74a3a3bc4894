#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metadist/expr.hpp"
#include "metadist/rng.hpp"
#include "metadist/value.hpp"

namespace metadist {

/// Admissible values of one variable: a real interval with open/closed
/// endpoints, an integer range or enumeration, a set of category indices,
/// the singleton {EXC}, or an interval whose endpoints are expressions over
/// parent values.
class ValueSet {
 public:
  enum class Tag { real_interval, int_range, int_enum, cat_set, exc, expr_interval };

  static ValueSet real_interval(double lo, double hi, bool open_lo = false, bool open_hi = false) {
    ValueSet s;
    s.tag_ = Tag::real_interval;
    s.lo_ = lo;
    s.hi_ = hi;
    s.open_lo_ = open_lo;
    s.open_hi_ = open_hi;
    if (!(lo <= hi)) throw ValidationError("interval requires lo <= hi");
    return s;
  }
  static ValueSet int_range(std::int64_t lo, std::int64_t hi) {
    ValueSet s;
    s.tag_ = Tag::int_range;
    s.int_lo_ = lo;
    s.int_hi_ = hi;
    if (lo > hi) throw ValidationError("integer range requires lo <= hi");
    return s;
  }
  static ValueSet int_enum(std::vector<std::int64_t> values) {
    ValueSet s;
    s.tag_ = Tag::int_enum;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.empty()) throw ValidationError("integer enumeration must be non-empty");
    s.int_values_ = std::move(values);
    return s;
  }
  static ValueSet cat_set(std::vector<std::int32_t> indices) {
    ValueSet s;
    s.tag_ = Tag::cat_set;
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    if (indices.empty()) throw ValidationError("category set must be non-empty");
    s.cat_values_ = std::move(indices);
    return s;
  }
  static ValueSet exc() {
    ValueSet s;
    s.tag_ = Tag::exc;
    return s;
  }
  static ValueSet expr_interval(std::string lo_text, std::string hi_text) {
    ValueSet s;
    s.tag_ = Tag::expr_interval;
    s.lo_text_ = std::move(lo_text);
    s.hi_text_ = std::move(hi_text);
    s.lo_expr_ = parse_expr(s.lo_text_);
    s.hi_expr_ = parse_expr(s.hi_text_);
    return s;
  }

  Tag tag() const { return tag_; }
  bool is_exc_singleton() const { return tag_ == Tag::exc; }
  bool has_expr() const { return tag_ == Tag::expr_interval; }

  double real_lo() const { return lo_; }
  double real_hi() const { return hi_; }
  bool open_lo() const { return open_lo_; }
  bool open_hi() const { return open_hi_; }
  std::int64_t int_lo() const { return tag_ == Tag::int_range ? int_lo_ : int_values_.front(); }
  std::int64_t int_hi() const { return tag_ == Tag::int_range ? int_hi_ : int_values_.back(); }
  const std::vector<std::int64_t>& int_values() const { return int_values_; }
  const std::vector<std::int32_t>& cat_values() const { return cat_values_; }
  const std::string& lo_text() const { return lo_text_; }
  const std::string& hi_text() const { return hi_text_; }
  const ExprPtr& lo_expr() const { return lo_expr_; }
  const ExprPtr& hi_expr() const { return hi_expr_; }

  /// Instantiates expression endpoints against parent values; identity otherwise.
  ValueSet evaluate(const ExprEnv& env) const {
    if (tag_ != Tag::expr_interval) return *this;
    const double lo = eval_expr(lo_expr_, env);
    const double hi = eval_expr(hi_expr_, env);
    if (!(lo <= hi))
      throw ValidationError("expression bounds [" + lo_text_ + ", " + hi_text_ +
                            "] evaluate to an empty interval");
    return real_interval(lo, hi);
  }

  /// Same, bounding the endpoints over interval-valued parents.
  ValueSet evaluate_interval(const IntervalEnv& env) const {
    if (tag_ != Tag::expr_interval) return *this;
    const NumInterval lo = eval_expr_interval(lo_expr_, env);
    const NumInterval hi = eval_expr_interval(hi_expr_, env);
    return real_interval(lo.lo, hi.hi);
  }

  bool contains(const Value& v) const {
    switch (tag_) {
      case Tag::exc: return v.is_exc();
      case Tag::real_interval: {
        if (!v.is_real()) return false;
        const double x = v.as_real();
        if (open_lo_ ? !(x > lo_) : !(x >= lo_)) return false;
        if (open_hi_ ? !(x < hi_) : !(x <= hi_)) return false;
        return true;
      }
      case Tag::int_range:
        return v.is_integer() && v.as_integer() >= int_lo_ && v.as_integer() <= int_hi_;
      case Tag::int_enum:
        return v.is_integer() &&
               std::binary_search(int_values_.begin(), int_values_.end(), v.as_integer());
      case Tag::cat_set:
        return v.is_category() &&
               std::binary_search(cat_values_.begin(), cat_values_.end(), v.as_category());
      case Tag::expr_interval:
        throw ValidationError("cannot test membership against unevaluated expression bounds");
    }
    return false;
  }

  bool is_enumerable() const {
    switch (tag_) {
      case Tag::exc:
      case Tag::int_range:
      case Tag::int_enum:
      case Tag::cat_set: return true;
      default: return false;
    }
  }

  std::vector<Value> enumerate() const {
    std::vector<Value> out;
    switch (tag_) {
      case Tag::exc: out.push_back(Value::exc()); break;
      case Tag::int_range:
        out.reserve(static_cast<std::size_t>(int_hi_ - int_lo_ + 1));
        for (std::int64_t i = int_lo_; i <= int_hi_; ++i) out.push_back(Value::integer(i));
        break;
      case Tag::int_enum:
        for (const auto i : int_values_) out.push_back(Value::integer(i));
        break;
      case Tag::cat_set:
        for (const auto c : cat_values_) out.push_back(Value::category(c));
        break;
      default: throw ValidationError("set is not enumerable");
    }
    return out;
  }

  std::size_t cardinality() const {
    switch (tag_) {
      case Tag::exc: return 1;
      case Tag::int_range: return static_cast<std::size_t>(int_hi_ - int_lo_ + 1);
      case Tag::int_enum: return int_values_.size();
      case Tag::cat_set: return cat_values_.size();
      default: return std::numeric_limits<std::size_t>::max();
    }
  }

  /// Supremum of |u - w| over the set (closure); categories are handled by
  /// the categorical distance spec, not here.
  double numeric_diameter() const {
    switch (tag_) {
      case Tag::real_interval:
        if (std::isinf(lo_) || std::isinf(hi_)) return std::numeric_limits<double>::infinity();
        return hi_ - lo_;
      case Tag::int_range: return static_cast<double>(int_hi_ - int_lo_);
      case Tag::int_enum: return static_cast<double>(int_values_.back() - int_values_.front());
      default: throw ValidationError("set has no numeric diameter");
    }
  }

  Value sample(Rng& rng) const {
    switch (tag_) {
      case Tag::exc: return Value::exc();
      case Tag::int_range: return Value::integer(rng.uniform_int(int_lo_, int_hi_));
      case Tag::int_enum:
        return Value::integer(
            int_values_[static_cast<std::size_t>(rng.uniform_int(0, int_values_.size() - 1))]);
      case Tag::cat_set:
        return Value::category(
            cat_values_[static_cast<std::size_t>(rng.uniform_int(0, cat_values_.size() - 1))]);
      case Tag::real_interval: {
        if (std::isinf(lo_) || std::isinf(hi_))
          throw ValidationError("cannot sample from an unbounded interval");
        if (lo_ == hi_) {
          if (open_lo_ || open_hi_) throw ValidationError("empty open interval");
          return Value::real(lo_);
        }
        for (;;) {
          const double x = rng.uniform(lo_, hi_);
          if (open_lo_ && x == lo_) continue;  // measure-zero edge
          return Value::real(x);
        }
      }
      case Tag::expr_interval:
        throw ValidationError("cannot sample from unevaluated expression bounds");
    }
    throw ValidationError("corrupt value set");
  }

  /// Subset test against a declared (non-expression) set of the same variable.
  bool subset_of(const ValueSet& outer) const {
    switch (tag_) {
      case Tag::exc: return outer.tag_ == Tag::exc;  // EXC membership handled by the graph
      case Tag::real_interval: {
        if (outer.tag_ != Tag::real_interval) return false;
        const bool lo_ok =
            lo_ > outer.lo_ || (lo_ == outer.lo_ && (open_lo_ || !outer.open_lo_));
        const bool hi_ok =
            hi_ < outer.hi_ || (hi_ == outer.hi_ && (open_hi_ || !outer.open_hi_));
        return lo_ok && hi_ok;
      }
      case Tag::int_range:
      case Tag::int_enum: {
        if (!outer.is_enumerable()) return false;
        for (const auto& v : enumerate())
          if (!outer.contains(v)) return false;
        return true;
      }
      case Tag::cat_set: {
        for (const auto c : cat_values_)
          if (!outer.contains(Value::category(c))) return false;
        return true;
      }
      case Tag::expr_interval:
        throw ValidationError("cannot test subset for unevaluated expression bounds");
    }
    return false;
  }

 private:
  Tag tag_ = Tag::exc;
  double lo_ = 0.0, hi_ = 0.0;
  bool open_lo_ = false, open_hi_ = false;
  std::int64_t int_lo_ = 0, int_hi_ = 0;
  std::vector<std::int64_t> int_values_;
  std::vector<std::int32_t> cat_values_;
  std::string lo_text_, hi_text_;
  ExprPtr lo_expr_, hi_expr_;
};

/// Accumulates the union of restricted sets across ancestor configurations,
/// for auditing a declared universal set.
class SetUnion {
 public:
  void add(const ValueSet& set) {
    switch (set.tag()) {
      case ValueSet::Tag::exc: has_exc_ = true; break;
      case ValueSet::Tag::int_range:
      case ValueSet::Tag::int_enum:
        for (const auto& v : set.enumerate()) ints_.insert(v.as_integer());
        break;
      case ValueSet::Tag::cat_set:
        for (const auto c : set.cat_values()) cats_.insert(c);
        break;
      case ValueSet::Tag::real_interval: intervals_.push_back(set); break;
      case ValueSet::Tag::expr_interval:
        throw ValidationError("union over unevaluated expression bounds");
    }
  }

  bool has_exc() const { return has_exc_; }

  /// True when the accumulated union is exactly the declared non-EXC set.
  bool equals(const ValueSet& declared) const {
    switch (declared.tag()) {
      case ValueSet::Tag::int_range: {
        if (!cats_.empty() || !intervals_.empty()) return false;
        if (ints_.empty()) return false;
        const auto lo = *ints_.begin();
        const auto hi = *ints_.rbegin();
        return lo == declared.int_lo() && hi == declared.int_hi() &&
               static_cast<std::int64_t>(ints_.size()) == hi - lo + 1;
      }
      case ValueSet::Tag::int_enum: {
        if (!cats_.empty() || !intervals_.empty()) return false;
        const auto& values = declared.int_values();
        return ints_.size() == values.size() && std::equal(ints_.begin(), ints_.end(),
                                                           values.begin());
      }
      case ValueSet::Tag::cat_set: {
        if (!ints_.empty() || !intervals_.empty()) return false;
        const auto& values = declared.cat_values();
        return cats_.size() == values.size() && std::equal(cats_.begin(), cats_.end(),
                                                           values.begin());
      }
      case ValueSet::Tag::real_interval: {
        if (!ints_.empty() || !cats_.empty()) return false;
        const auto merged = merge_intervals(intervals_);
        if (merged.size() != 1) return false;
        const auto& m = merged.front();
        return m.real_lo() == declared.real_lo() && m.real_hi() == declared.real_hi() &&
               m.open_lo() == declared.open_lo() && m.open_hi() == declared.open_hi();
      }
      default: return false;
    }
  }

  static std::vector<ValueSet> merge_intervals(std::vector<ValueSet> intervals) {
    if (intervals.empty()) return intervals;
    std::sort(intervals.begin(), intervals.end(), [](const ValueSet& a, const ValueSet& b) {
      if (a.real_lo() != b.real_lo()) return a.real_lo() < b.real_lo();
      return a.open_lo() < b.open_lo();  // closed endpoint first
    });
    std::vector<ValueSet> merged;
    for (const auto& next : intervals) {
      if (!merged.empty()) {
        auto& last = merged.back();
        const bool touches = next.real_lo() < last.real_hi() ||
                             (next.real_lo() == last.real_hi() &&
                              !(last.open_hi() && next.open_lo()));
        if (touches) {
          double hi = last.real_hi();
          bool open_hi = last.open_hi();
          if (next.real_hi() > hi || (next.real_hi() == hi && !next.open_hi())) {
            hi = next.real_hi();
            open_hi = next.open_hi();
          }
          last = ValueSet::real_interval(last.real_lo(), hi, last.open_lo(), open_hi);
          continue;
        }
      }
      merged.push_back(next);
    }
    return merged;
  }

 private:
  bool has_exc_ = false;
  std::set<std::int64_t> ints_;
  std::set<std::int32_t> cats_;
  std::vector<ValueSet> intervals_;
};

}  // namespace metadist
