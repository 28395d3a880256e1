#pragma once

#include <string>
#include <variant>
#include <vector>

namespace stepgraph::step {

struct Argument;
using ArgumentList = std::vector<Argument>;

/// Number keeps the source spelling so files re-serialize byte-identically.
struct NumberArg {
  std::string text;
  double value = 0.0;
  bool operator==(const NumberArg&) const = default;
};

struct TextArg {
  std::string value;
  bool operator==(const TextArg&) const = default;
};

/// Enumeration literal, stored with its dots (".T.").
struct EnumArg {
  std::string name;
  bool operator==(const EnumArg&) const = default;
};

struct ReferenceArg {
  long long target = 0;
  bool operator==(const ReferenceArg&) const = default;
};

struct UnsetArg {  // $
  bool operator==(const UnsetArg&) const = default;
};

struct InheritedArg {  // *
  bool operator==(const InheritedArg&) const = default;
};

struct ListArg {
  ArgumentList items;
  bool operator==(const ListArg&) const = default;
};

/// Typed wrapper, e.g. LENGTH_MEASURE(2.5). inner always holds one element;
/// a vector keeps the type copyable without a heap box per node.
struct TypedArg {
  std::string type_name;
  ArgumentList inner;
  bool operator==(const TypedArg&) const = default;
};

struct Argument {
  std::variant<NumberArg, TextArg, EnumArg, ReferenceArg, UnsetArg,
               InheritedArg, ListArg, TypedArg>
      value;
  bool operator==(const Argument&) const = default;

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(value);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(value);
  }
};

inline Argument make_number(std::string text, double value) {
  return Argument{NumberArg{std::move(text), value}};
}
inline Argument make_text(std::string value) {
  return Argument{TextArg{std::move(value)}};
}
inline Argument make_enum(std::string name) {
  return Argument{EnumArg{std::move(name)}};
}
inline Argument make_reference(long long target) {
  return Argument{ReferenceArg{target}};
}
inline Argument make_unset() { return Argument{UnsetArg{}}; }
inline Argument make_inherited() { return Argument{InheritedArg{}}; }
inline Argument make_list(ArgumentList items) {
  return Argument{ListArg{std::move(items)}};
}
inline Argument make_typed(std::string type_name, Argument inner) {
  TypedArg t{std::move(type_name), {}};
  t.inner.push_back(std::move(inner));
  return Argument{std::move(t)};
}

}  // namespace stepgraph::step
