#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tvopt/common.hpp"

namespace tvopt::cli {

/// Key-value text with [section] headers. Order is preserved so a resolved
/// config can be echoed verbatim into the run manifest.
struct ConfigFile {
  struct Entry {
    std::string section;  // "" for top-level keys
    std::string key;
    std::string value;
  };
  std::vector<Entry> entries;

  static ConfigFile parse(const std::string& text);
  static ConfigFile parse_file(const std::string& path);
  std::string serialize() const;

  std::vector<std::string> sections() const;  // in first-appearance order
  bool has(const std::string& section, const std::string& key) const;
  /// Sets (or appends) section.key = value.
  void set(const std::string& section, const std::string& key,
           const std::string& value);
};

/// Strict reader over one section: every key must be consumed exactly once,
/// leftovers are configuration errors naming the offending key.
class SectionReader {
 public:
  SectionReader(const ConfigFile& file, std::string section);

  bool contains(const std::string& key) const;
  std::string require(const std::string& key);
  std::string get(const std::string& key, const std::string& fallback);
  double number(const std::string& key, double fallback);
  double require_number(const std::string& key);
  long integer(const std::string& key, long fallback);
  bool flag(const std::string& key, bool fallback);
  std::vector<double> number_list(const std::string& key,
                                  std::vector<double> fallback);
  std::vector<long> integer_list(const std::string& key,
                                 std::vector<long> fallback);
  std::vector<std::string> string_list(const std::string& key,
                                       std::vector<std::string> fallback);

  /// Throws ConfigError on the first unconsumed key.
  void finish() const;

 private:
  std::string section_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

double parse_number(const std::string& section_key, const std::string& text);
long parse_integer(const std::string& section_key, const std::string& text);
std::vector<std::string> split_list(const std::string& text);

}  // namespace tvopt::cli
