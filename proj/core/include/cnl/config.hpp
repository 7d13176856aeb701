#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cnl {

struct KeySpec {
    std::string_view key;
    std::string_view default_value;
    std::string_view description;
};

/// Every configuration key with its built-in default. SI units throughout.
const std::vector<KeySpec>& known_keys();
bool is_known_key(std::string_view key);

/// Flat key -> value document. Keys use dotted paths ("particle1.mass").
class ParameterSet {
public:
    /// Throws ConfigError listing the valid keys if `key` is unknown.
    void set(std::string_view key, std::string value);
    std::optional<std::string> get(std::string_view key) const;
    bool contains(std::string_view key) const { return values_.contains(std::string(key)); }

    std::string text(std::string_view key) const;
    double number(std::string_view key) const;
    std::uint64_t integer(std::string_view key) const;
    bool flag(std::string_view key) const;

    /// Entries of `over` replace entries of this set.
    void merge(const ParameterSet& over);

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Built-in defaults for every key.
ParameterSet default_parameters();

/// Parses "key=value" pairs.
ParameterSet parse_overrides(const std::vector<std::string>& assignments);

/// Parses a JSON document; nested objects flatten into dotted keys.
ParameterSet parse_config_text(std::string_view json_text);
ParameterSet load_config_file(const std::filesystem::path& path);

/// Shortest decimal text that round-trips the double.
std::string format_number(double value);

}  // namespace cnl
