// Copyright 2026 The exprb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal line-oriented CSV reading shared by the loaders. No quoting; id
// fields must not contain commas.

#pragma once

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace exprb::csv {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
    --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_fields(std::string_view line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

template <typename T>
T parse_number(const std::string& field, const std::string& what,
               std::size_t line_no) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad " +
                             what + " '" + field + "'");
  }
  return value;
}

double parse_real(const std::string& field, const std::string& what,
                  std::size_t line_no);

class Reader {
 public:
  Reader(const std::string& path, const std::string& expected_header)
      : path_(path), stream_(path) {
    if (!stream_) throw std::runtime_error("cannot open " + path);
    std::string header;
    if (!std::getline(stream_, header)) {
      throw std::runtime_error(path + ": empty file, expected header '" +
                               expected_header + "'");
    }
    if (trim(header) != expected_header) {
      throw std::runtime_error(path + ": expected header '" + expected_header +
                               "', got '" + trim(header) + "'");
    }
    line_no_ = 1;
  }

  // Reads the next non-empty row; returns false at end of file.
  bool next(std::vector<std::string>& fields, std::size_t num_fields) {
    std::string line;
    while (std::getline(stream_, line)) {
      ++line_no_;
      if (trim(line).empty()) continue;
      fields = split_fields(line, ',');
      if (fields.size() != num_fields) {
        throw std::runtime_error(path_ + ": line " + std::to_string(line_no_) +
                                 ": expected " + std::to_string(num_fields) +
                                 " fields, got " +
                                 std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  std::size_t line_no() const { return line_no_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream stream_;
  std::size_t line_no_ = 0;
};

// Shortest round-trip-exact decimal encoding of a double.
std::string format_double(double value);

}  // namespace exprb::csv
