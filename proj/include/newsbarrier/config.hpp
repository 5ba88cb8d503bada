#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "newsbarrier/error.hpp"
#include "newsbarrier/text_util.hpp"

namespace newsbarrier {

/// Flat view of a TOML-style key/value file. Keys inside a `[section]` are
/// stored as `section.key`. Values are strings; quoting is stripped.
class KeyValueConfig {
public:
  static KeyValueConfig parse(std::string_view text,
                              const std::string &origin = "<config>") {
    KeyValueConfig cfg;
    std::string section;
    std::size_t line_no = 0;
    for (std::string_view raw : split_lines(text)) {
      ++line_no;
      std::string_view line = trim(strip_comment(raw));
      if (line.empty())
        continue;
      auto where = [&] { return origin + ":" + std::to_string(line_no); };
      if (line.front() == '[') {
        if (line.back() != ']')
          throw Error(ErrorCode::ConfigError, where() + ": unterminated section");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw Error(ErrorCode::ConfigError, where() + ": expected key = value");
      std::string key(trim(line.substr(0, eq)));
      if (key.size() >= 2 && key.front() == '"' && key.back() == '"')
        key = key.substr(1, key.size() - 2);
      std::string_view value = trim(line.substr(eq + 1));
      if (key.empty())
        throw Error(ErrorCode::ConfigError, where() + ": empty key");
      if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'')) {
        if (value.back() != value.front())
          throw Error(ErrorCode::ConfigError, where() + ": unterminated string");
        value = value.substr(1, value.size() - 2);
      }
      cfg.values_[section.empty() ? key : section + "." + key] = std::string(value);
    }
    return cfg;
  }

  static KeyValueConfig load(const std::string &path) {
    return parse(read_file(path), path);
  }

  std::optional<std::string> get(const std::string &key) const {
    auto it = values_.find(key);
    if (it == values_.end())
      return std::nullopt;
    return it->second;
  }

  std::string get_or(const std::string &key, std::string fallback) const {
    return get(key).value_or(std::move(fallback));
  }

  std::string require(const std::string &key) const {
    auto v = get(key);
    if (!v)
      throw Error(ErrorCode::ConfigError, "missing key '" + key + "'");
    return *v;
  }

  /// All keys of one section, with the `section.` prefix removed.
  std::map<std::string, std::string> section(const std::string &name) const {
    std::map<std::string, std::string> out;
    const std::string prefix = name + ".";
    for (const auto &[k, v] : values_)
      if (k.rfind(prefix, 0) == 0)
        out[k.substr(prefix.size())] = v;
    return out;
  }

  const std::map<std::string, std::string> &values() const { return values_; }

private:
  static std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (in_string) {
        if (c == quote)
          in_string = false;
      } else if (c == '"' || c == '\'') {
        in_string = true;
        quote = c;
      } else if (c == '#') {
        return line.substr(0, i);
      }
    }
    return line;
  }

  std::map<std::string, std::string> values_;
};

} // namespace newsbarrier
