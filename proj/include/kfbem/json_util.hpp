#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kfbem/error.hpp"

namespace kfbem {

[[noreturn]] inline void schema_error(const std::string& pointer, const std::string& what) {
  throw Error(ErrorCode::Schema, (pointer.empty() ? std::string("/") : pointer) + ": " + what);
}

/// Rejects keys of `obj` not in `allowed`; `pointer` is the JSON pointer of obj.
inline void reject_unknown(const nlohmann::json& obj, const std::string& pointer,
                           std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) schema_error(pointer, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || item.key() == a;
    if (!known) schema_error(pointer + "/" + item.key(), "unknown key");
  }
}

inline double require_number(const nlohmann::json& j, const std::string& pointer) {
  if (!j.is_number()) schema_error(pointer, "expected a number");
  return j.get<double>();
}

inline double require_positive(const nlohmann::json& j, const std::string& pointer) {
  const double v = require_number(j, pointer);
  if (!(v > 0.0)) schema_error(pointer, "must be positive");
  return v;
}

}  // namespace kfbem
