#include "tvopt/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tvopt::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": empty section name");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    for (const auto& e : cfg.entries)
      if (e.section == section && e.key == key)
        throw ConfigError("config: duplicate key " +
                          (section.empty() ? key : section + "." + key));
    cfg.entries.push_back({section, key, value});
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ConfigFile::serialize() const {
  std::ostringstream out;
  std::string current;
  bool first = true;
  for (const auto& e : entries) {
    if (e.section != current || (first && !e.section.empty())) {
      if (!first) out << '\n';
      if (!e.section.empty()) out << '[' << e.section << "]\n";
      current = e.section;
    }
    out << e.key << " = " << e.value << '\n';
    first = false;
  }
  return out.str();
}

std::vector<std::string> ConfigFile::sections() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (std::find(out.begin(), out.end(), e.section) == out.end())
      out.push_back(e.section);
  return out;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  for (const auto& e : entries)
    if (e.section == section && e.key == key) return true;
  return false;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
  for (auto& e : entries) {
    if (e.section == section && e.key == key) {
      e.value = value;
      return;
    }
  }
  // Insert after the last entry of the section to keep the echo grouped.
  auto pos = entries.end();
  for (auto it = entries.begin(); it != entries.end(); ++it)
    if (it->section == section) pos = it + 1;
  entries.insert(pos, {section, key, value});
}

SectionReader::SectionReader(const ConfigFile& file, std::string section)
    : section_(std::move(section)) {
  for (const auto& e : file.entries)
    if (e.section == section_) values_[e.key] = e.value;
}

bool SectionReader::contains(const std::string& key) const {
  return values_.count(key) != 0;
}

std::string SectionReader::require(const std::string& key) {
  auto it = values_.find(key);
  if (it == values_.end())
    throw ConfigError("missing required key " +
                      (section_.empty() ? key : section_ + "." + key));
  used_.insert(key);
  return it->second;
}

std::string SectionReader::get(const std::string& key,
                               const std::string& fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_.insert(key);
  return it->second;
}

double SectionReader::number(const std::string& key, double fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_.insert(key);
  return parse_number(section_ + "." + key, it->second);
}

double SectionReader::require_number(const std::string& key) {
  return parse_number(section_ + "." + key, require(key));
}

long SectionReader::integer(const std::string& key, long fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_.insert(key);
  return parse_integer(section_ + "." + key, it->second);
}

bool SectionReader::flag(const std::string& key, bool fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_.insert(key);
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean for " + section_ + "." + key + ": " + v);
}

std::vector<double> SectionReader::number_list(const std::string& key,
                                               std::vector<double> fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_.insert(key);
  std::vector<double> out;
  for (const auto& item : split_list(it->second))
    out.push_back(parse_number(section_ + "." + key, item));
  return out;
}

std::vector<long> SectionReader::integer_list(const std::string& key,
                                              std::vector<long> fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_.insert(key);
  std::vector<long> out;
  for (const auto& item : split_list(it->second))
    out.push_back(parse_integer(section_ + "." + key, item));
  return out;
}

std::vector<std::string> SectionReader::string_list(
    const std::string& key, std::vector<std::string> fallback) {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_.insert(key);
  return split_list(it->second);
}

void SectionReader::finish() const {
  for (const auto& [key, value] : values_) {
    if (!used_.count(key))
      throw ConfigError("unknown key " +
                        (section_.empty() ? key : section_ + "." + key));
  }
}

double parse_number(const std::string& section_key, const std::string& text) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw ConfigError("bad number for " + section_key + ": " + text);
  return v;
}

long parse_integer(const std::string& section_key, const std::string& text) {
  char* end = nullptr;
  long v = std::strtol(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0')
    throw ConfigError("bad integer for " + section_key + ": " + text);
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace tvopt::cli
