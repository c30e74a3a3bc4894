#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include "metadist/error.hpp"

namespace metadist {

enum class VariableKind { continuous, integer, categorical };

inline const char* to_string(VariableKind kind) {
  switch (kind) {
    case VariableKind::continuous: return "cont";
    case VariableKind::integer: return "int";
    case VariableKind::categorical: return "cat";
  }
  return "?";
}

enum class Role { meta, meta_decreed, decreed, neutral };

inline const char* to_string(Role role) {
  switch (role) {
    case Role::meta: return "meta";
    case Role::meta_decreed: return "meta-decreed";
    case Role::decreed: return "decreed";
    case Role::neutral: return "neutral";
  }
  return "?";
}

/// One assignment slot of an extended point. EXC is a first-class state so a
/// Value is either the exclusion sentinel or a payload matching the variable
/// kind (real, integer, or an index into the variable's category labels).
class Value {
 public:
  static Value exc() { return Value(Tag::exc, 0.0, 0, 0); }
  static Value real(double x) { return Value(Tag::real, x, 0, 0); }
  static Value integer(std::int64_t i) { return Value(Tag::integer, 0.0, i, 0); }
  static Value category(std::int32_t index) { return Value(Tag::category, 0.0, 0, index); }

  bool is_exc() const { return tag_ == Tag::exc; }
  bool is_real() const { return tag_ == Tag::real; }
  bool is_integer() const { return tag_ == Tag::integer; }
  bool is_category() const { return tag_ == Tag::category; }

  double as_real() const {
    require(Tag::real, "real");
    return real_;
  }
  std::int64_t as_integer() const {
    require(Tag::integer, "integer");
    return int_;
  }
  std::int32_t as_category() const {
    require(Tag::category, "category");
    return cat_;
  }

  /// Numeric view for bound expressions and distances (EXC and categories have none).
  double numeric() const {
    if (tag_ == Tag::real) return real_;
    if (tag_ == Tag::integer) return static_cast<double>(int_);
    throw ValidationError("value has no numeric interpretation");
  }

  friend bool operator==(const Value& a, const Value& b) {
    if (a.tag_ != b.tag_) return false;
    switch (a.tag_) {
      case Tag::exc: return true;
      case Tag::real: return a.real_ == b.real_;
      case Tag::integer: return a.int_ == b.int_;
      case Tag::category: return a.cat_ == b.cat_;
    }
    return false;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  enum class Tag { exc, real, integer, category };
  Value(Tag tag, double r, std::int64_t i, std::int32_t c)
      : tag_(tag), real_(r), int_(i), cat_(c) {}
  void require(Tag tag, const char* name) const {
    if (tag_ != tag) throw ValidationError(std::string("value is not ") + name);
  }

  Tag tag_;
  double real_;
  std::int64_t int_;
  std::int32_t cat_;
};

/// Token used for excluded variables in every file format.
inline constexpr const char* kExcToken = "EXC";

/// Shortest decimal form that round-trips the double (17 significant digits).
inline std::string format_real(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

}  // namespace metadist
