#pragma once

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cfcli {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Strict view of one config object: every key must be read, and every value read
/// (including defaults) is copied into resolved.
class Section {
  template <class F>
  auto take(const std::string& key, const json& def, F&& conv) {
    seen_.insert(key);
    const std::string p = path_ + "." + key;
    if (!has(key)) {
      if (def.is_null()) throw ConfigError("missing required key " + p);
      resolved[key] = def;
      return conv(def, p);
    }
    auto v = conv(j_.at(key), p);
    resolved[key] = j_.at(key);
    return v;
  }

  static double as_number(const json& v, const std::string& p) {
    if (!v.is_number()) throw ConfigError(p + " must be a number");
    return v.get<double>();
  }
  static long as_integer(const json& v, const std::string& p) {
    if (!v.is_number_integer()) throw ConfigError(p + " must be an integer");
    return v.get<long>();
  }
  static std::string as_text(const json& v, const std::string& p) {
    if (!v.is_string()) throw ConfigError(p + " must be a string");
    return v.get<std::string>();
  }


 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_null() && !j_.is_object()) throw ConfigError(path_ + " must be an object");
    resolved = json::object();
  }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  double number(const std::string& key, double def) { return take(key, json(def), &Section::as_number); }
  double number(const std::string& key) { return take(key, json(), &Section::as_number); }

  long integer(const std::string& key, long def) { return take(key, json(def), &Section::as_integer); }
  long integer(const std::string& key) { return take(key, json(), &Section::as_integer); }

  bool flag(const std::string& key, bool def) {
    return take(key, json(def), [](const json& v, const std::string& p) {
      if (!v.is_boolean()) throw ConfigError(p + " must be true or false");
      return v.get<bool>();
    });
  }

  std::string text(const std::string& key, const std::string& def) { return take(key, json(def), &Section::as_text); }
  std::string text(const std::string& key) { return take(key, json(), &Section::as_text); }

  std::string choice(const std::string& key, const std::string& def, const std::vector<std::string>& options) {
    std::string v = text(key, def);
    for (const auto& o : options)
      if (o == v) return v;
    std::string all;
    for (const auto& o : options) all += (all.empty() ? "" : ", ") + o;
    throw ConfigError(path_ + "." + key + " must be one of: " + all);
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& def) {
    return take(key, json(def), [](const json& v, const std::string& p) {
      if (!v.is_array()) throw ConfigError(p + " must be an array of numbers");
      std::vector<double> out;
      for (const auto& x : v) out.push_back(as_number(x, p));
      return out;
    });
  }

  /// Pair [re, im].
  std::vector<double> complex(const std::string& key, std::vector<double> def) {
    auto v = numbers(key, def);
    if (v.size() != 2) throw ConfigError(path_ + "." + key + " must be [re, im]");
    return v;
  }

  /// Array of [re, im] pairs.
  std::vector<std::vector<double>> pairs(const std::string& key, const std::vector<std::vector<double>>& def) {
    return take(key, json(def), [](const json& v, const std::string& p) {
      if (!v.is_array()) throw ConfigError(p + " must be an array of [re, im] pairs");
      std::vector<std::vector<double>> out;
      for (const auto& x : v) {
        if (!x.is_array() || x.size() != 2) throw ConfigError(p + " must be an array of [re, im] pairs");
        out.push_back({as_number(x[0], p), as_number(x[1], p)});
      }
      return out;
    });
  }

  void section(const std::string& key, const std::function<void(Section&)>& fn) {
    seen_.insert(key);
    Section s(has(key) ? j_.at(key) : json(), path_ + "." + key);
    fn(s);
    s.finish();
    resolved[key] = s.resolved;
  }

  /// Array of objects, each read strictly.
  void list(const std::string& key, const std::function<void(Section&)>& fn) {
    seen_.insert(key);
    json arr = has(key) ? j_.at(key) : json::array();
    if (!arr.is_array()) throw ConfigError(path_ + "." + key + " must be an array");
    resolved[key] = json::array();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section s(arr[i], path_ + "." + key + "[" + std::to_string(i) + "]");
      if (!arr[i].is_object()) throw ConfigError(path_ + "." + key + "[" + std::to_string(i) + "] must be an object");
      fn(s);
      s.finish();
      resolved[key].push_back(s.resolved);
    }
  }

  void forbid(const std::string& key, const std::string& why) {
    if (has(key)) throw ConfigError(path_ + "." + key + " is not allowed " + why);
    seen_.insert(key);
  }

  void finish() const {
    if (!j_.is_object()) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key " + path_ + "." + it.key());
  }

  const std::string& path() const { return path_; }

  json resolved;

 private:
  json j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace cfcli
