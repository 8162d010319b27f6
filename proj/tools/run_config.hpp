#pragma once

// Config files for the command-line tool. Two formats are accepted:
//   key = value lines (# or ; comments, [section] headers ignored)
//   a JSON object, either flat or a run manifest with a "config" member.
// Keys are long flag names without the leading dashes. Entries are expanded
// into --key=value tokens that precede the user's own flags, so any flag given
// on the command line wins.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "l1csvd/csv.hpp"
#include "l1csvd/errors.hpp"

namespace l1csvd::cli {

using Json = nlohmann::ordered_json;

/// Ordered key -> textual value. Booleans are "true"/"false".
using ConfigMap = std::map<std::string, std::string>;

inline std::string json_scalar_text(const Json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number_float()) return format_double(v.get<double>());
  throw IngestionError("config key '" + key + "': unsupported value type");
}

inline ConfigMap parse_json_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw IngestionError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw IngestionError("config: JSON root must be an object");
  const Json& body = doc.contains("config") && doc["config"].is_object() ? doc["config"] : doc;
  ConfigMap out;
  for (const auto& [key, value] : body.items()) {
    if (value.is_null()) continue;
    if (value.is_array()) {
      std::string joined;
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) joined += ',';
        joined += json_scalar_text(value[i], key);
      }
      out[key] = joined;
    } else if (value.is_object()) {
      throw IngestionError("config key '" + key + "': nested objects are not supported");
    } else {
      out[key] = json_scalar_text(value, key);
    }
  }
  return out;
}

inline ConfigMap parse_kv_config(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';' || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw IngestionError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw IngestionError("config line " + std::to_string(line_no) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out[key] = value;
  }
  return out;
}

inline ConfigMap parse_config_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json_config(text);
  return parse_kv_config(text);
}

inline ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// True if argv already sets --key (as "--key", "--key=..." ).
inline bool flag_present(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

/// Tokens for config entries not overridden on the command line. Boolean
/// entries map to bare flags; "false" drops the entry.
inline std::vector<std::string> config_tokens(const ConfigMap& cfg, const std::vector<std::string>& user_args,
                                              const std::vector<std::string>& flag_keys) {
  std::vector<std::string> tokens;
  for (const auto& [key, value] : cfg) {
    if (key == "config" || flag_present(user_args, key)) continue;
    const bool is_flag = std::find(flag_keys.begin(), flag_keys.end(), key) != flag_keys.end();
    if (is_flag) {
      if (value == "true" || value == "1") tokens.push_back("--" + key);
      else if (value != "false" && value != "0") throw IngestionError("config key '" + key + "': expected true/false");
    } else {
      tokens.push_back("--" + key + "=" + value);
    }
  }
  return tokens;
}

/// JSON value for an echoed parameter; non-finite doubles become strings so
/// the manifest stays valid JSON and re-parses to the same value.
inline Json echo_value(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}
inline Json echo_value(const std::vector<double>& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(echo_value(x));
  return arr;
}
template <class T>
Json echo_value(const T& v) {
  return Json(v);
}

}  // namespace l1csvd::cli
