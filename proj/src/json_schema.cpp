#include "fgdm/json_schema.hpp"

#include <algorithm>

namespace fgdm {

namespace {

bool has_type(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  return false;
}

std::string where(const std::string& pointer) { return pointer.empty() ? "/" : pointer; }

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

void check(const nlohmann::json& schema, const nlohmann::json& v, const std::string& pointer,
           std::vector<std::string>& out) {
  if (!schema.is_object()) return;

  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    std::string names;
    if (it->is_string()) {
      ok = has_type(v, it->get<std::string>());
      names = it->get<std::string>();
    } else if (it->is_array()) {
      for (const auto& t : *it) {
        ok = ok || has_type(v, t.get<std::string>());
        names += (names.empty() ? "" : " or ") + t.get<std::string>();
      }
    }
    if (!ok) {
      out.push_back(where(pointer) + ": expected " + names + ", got " + v.type_name());
      return;
    }
  }

  if (auto it = schema.find("enum"); it != schema.end() && it->is_array()) {
    if (std::find(it->begin(), it->end(), v) == it->end()) {
      out.push_back(where(pointer) + ": " + v.dump() + " is not one of " + it->dump());
    }
  }

  if (v.is_number()) {
    if (auto it = schema.find("minimum"); it != schema.end() && it->is_number()) {
      if (v.get<double>() < it->get<double>()) {
        out.push_back(where(pointer) + ": " + v.dump() + " is below the minimum " + it->dump());
      }
    }
  }

  if (v.is_string()) {
    if (auto it = schema.find("minLength"); it != schema.end() && it->is_number_integer()) {
      if (v.get_ref<const std::string&>().size() < it->get<std::size_t>()) {
        out.push_back(where(pointer) + ": string shorter than " + it->dump());
      }
    }
  }

  if (v.is_object()) {
    if (auto it = schema.find("required"); it != schema.end() && it->is_array()) {
      for (const auto& key : *it) {
        if (!v.contains(key.get<std::string>())) {
          out.push_back(where(pointer) + ": missing required property '" + key.get<std::string>() + "'");
        }
      }
    }
    const auto props = schema.find("properties");
    for (const auto& [key, value] : v.items()) {
      const std::string child = pointer + "/" + escape_token(key);
      if (props != schema.end() && props->contains(key)) {
        check((*props)[key], value, child, out);
      } else if (schema.value("additionalProperties", true) == false) {
        out.push_back(where(pointer) + ": unexpected property '" + key + "'");
      }
    }
  }

  if (v.is_array()) {
    if (auto it = schema.find("minItems"); it != schema.end() && it->is_number_integer()) {
      if (v.size() < it->get<std::size_t>()) {
        out.push_back(where(pointer) + ": fewer than " + it->dump() + " items");
      }
    }
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) check(*it, v[i], pointer + "/" + std::to_string(i), out);
    }
  }
}

}  // namespace

std::vector<std::string> schema_violations(const nlohmann::json& schema,
                                           const nlohmann::json& instance) {
  std::vector<std::string> out;
  check(schema, instance, "", out);
  return out;
}

}  // namespace fgdm
