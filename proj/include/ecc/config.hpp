#pragma once

#include <string>
#include <string_view>
#include <type_traits>

#include <json.hpp>

#include "ecc/errors.hpp"

// Typed access to JSON config objects. Every failure is a ConfigError that
// names the dotted field path, e.g. "plan.dataset.samples".
namespace ecc::config {

using Json = nlohmann::json;

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

template <class T>
T as(const Json& value, const std::string& path) {
  bool ok = false;
  if constexpr (std::is_same_v<T, bool>) {
    ok = value.is_boolean();
  } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
    ok = value.is_number_unsigned() || (value.is_number_integer() && value.get<long long>() >= 0);
  } else if constexpr (std::is_integral_v<T>) {
    ok = value.is_number_integer();
  } else if constexpr (std::is_floating_point_v<T>) {
    ok = value.is_number();
  } else if constexpr (std::is_same_v<T, std::string>) {
    ok = value.is_string();
  } else {
    ok = true;
  }
  if (!ok) throw ConfigError(path + ": unexpected type " + std::string(value.type_name()));
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline const Json& child(const Json& obj, std::string_view key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  auto it = obj.find(std::string(key));
  if (it == obj.end()) throw ConfigError(join(path, key) + ": missing required field");
  return *it;
}

template <class T>
T get(const Json& obj, std::string_view key, const std::string& path) {
  return as<T>(child(obj, key, path), join(path, key));
}

template <class T>
T get_or(const Json& obj, std::string_view key, const std::string& path, T fallback) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  auto it = obj.find(std::string(key));
  if (it == obj.end()) return fallback;
  return as<T>(*it, join(path, key));
}

}  // namespace ecc::config
