#pragma once

// Private helpers for reading JSON with field-path diagnostics.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hyfleet/errors.hpp"
#include "json.hpp"

namespace hyfleet::detail {

using nlohmann::json;

inline json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t limit = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(what + ": line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                     e.what());
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

// Field reader that reports the JSON path of whatever is missing or mistyped.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  const json& node() const { return node_; }
  const std::string& path() const { return path_; }

  bool has(const char* key) const { return node_.is_object() && node_.contains(key); }

  Reader at(const char* key) const {
    if (!node_.is_object()) fail(path_, "expected an object");
    auto it = node_.find(key);
    if (it == node_.end()) fail(join(key), "missing field");
    return Reader(*it, join(key));
  }

  Reader at(std::size_t i) const { return Reader(node_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  std::size_t array_size() const {
    if (!node_.is_array()) fail(path_, "expected an array");
    return node_.size();
  }

  double number() const {
    if (!node_.is_number()) fail(path_, "expected a number");
    return node_.get<double>();
  }

  std::uint64_t unsigned_int() const {
    if (!node_.is_number_unsigned() && !(node_.is_number_integer() && node_.get<std::int64_t>() >= 0)) {
      fail(path_, "expected a non-negative integer");
    }
    return node_.get<std::uint64_t>();
  }

  std::uint32_t u32() const {
    const std::uint64_t v = unsigned_int();
    if (v > 0xffffffffULL) fail(path_, "integer out of range");
    return static_cast<std::uint32_t>(v);
  }

  bool boolean() const {
    if (!node_.is_boolean()) fail(path_, "expected a boolean");
    return node_.get<bool>();
  }

  std::string string() const {
    if (!node_.is_string()) fail(path_, "expected a string");
    return node_.get<std::string>();
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
    throw ParseError(path + ": " + msg);
  }

 private:
  std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& node_;
  std::string path_;
};

}  // namespace hyfleet::detail
