#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "polreg/errors.hpp"

namespace polreg {

/// Typed access to one JSON object that remembers which keys were read, so
/// leftovers can be rejected with their full path.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) const {
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <typename T>
  T required(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw ConfigError("missing required key '" + sub(key) + "'");
    return convert<T>(j_.at(key), sub(key));
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    return has(key) ? convert<T>(j_.at(key), sub(key)) : fallback;
  }

  template <typename T>
  std::optional<T> optional(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return convert<T>(j_.at(key), sub(key));
  }

  const nlohmann::json* raw(const std::string& key) {
    seen_.insert(key);
    return has(key) ? &j_.at(key) : nullptr;
  }

  void ignore(const std::string& key) { seen_.insert(key); }

  /// Throws on the first key that was never asked for.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + sub(it.key()) + "'");
    }
  }

  std::string sub(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  template <typename T>
  static T convert(const nlohmann::json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return v.get<T>();
        if (v.get<std::int64_t>() < 0) throw ConfigError(path + ": expected a non-negative integer");
      }
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path + ": expected a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path + ": expected a string");
      return v.get<std::string>();
    } else {
      // std::vector<E>
      if (!v.is_array()) throw ConfigError(path + ": expected an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(convert<typename T::value_type>(v[i], path + "[" + std::to_string(i) + "]"));
      }
      return out;
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace polreg
