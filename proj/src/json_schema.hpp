#pragma once

// Small helpers for reading JSON documents with path-qualified errors.

#include <string>
#include <vector>

#include <json.hpp>

#include "uavbs/errors.hpp"

namespace uavbs::detail {

inline std::string child_path(const std::string& parent, const std::string& key) {
  return parent + "/" + key;
}

inline std::string child_path(const std::string& parent, std::size_t index) {
  return parent + "/" + std::to_string(index);
}

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key,
                                     const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(child_path(path, key), "missing required field");
  return *it;
}

inline double as_number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

inline long long as_integer(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<long long>();
}

inline const nlohmann::json& as_array(const nlohmann::json& j, const std::string& path,
                                      std::size_t expected_size = 0) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  if (expected_size != 0 && j.size() != expected_size) {
    throw SchemaError(path, "expected an array of length " + std::to_string(expected_size));
  }
  return j;
}

inline std::vector<double> as_number_array(const nlohmann::json& j, const std::string& path,
                                           std::size_t expected_size = 0) {
  const auto& arr = as_array(j, path, expected_size);
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(as_number(arr[i], child_path(path, i)));
  }
  return out;
}

inline double number_field(const nlohmann::json& j, const std::string& key,
                           const std::string& path) {
  return as_number(require(j, key, path), child_path(path, key));
}

inline double number_field_or(const nlohmann::json& j, const std::string& key,
                              const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  return as_number(j.at(key), child_path(path, key));
}

}  // namespace uavbs::detail
