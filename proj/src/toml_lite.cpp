// Copyright 2026 The Meshfinish Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "meshfinish/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <string>

#include "meshfinish/error.hpp"

namespace meshfinish {

namespace {

class LineParser {
 public:
  LineParser(std::string_view s, int line) : s_(s), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("toml line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string key() {
    skip_ws();
    if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'')) return string_value();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-'))
      ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string string_value() {
    const char q = s_[pos_++];
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated string");
      const char c = s_[pos_++];
      if (c == q) break;
      if (q == '"' && c == '\\') {
        if (pos_ >= s_.size()) fail("dangling escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  nlohmann::json value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"' || c == '\'') return string_value();
    if (c == '[') {
      ++pos_;
      nlohmann::json arr = nlohmann::json::array();
      if (eat(']')) return arr;
      while (true) {
        arr.push_back(value());
        if (eat(']')) break;
        expect(',');
        if (eat(']')) break;  // trailing comma
      }
      return arr;
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' && s_[pos_] != ' ' &&
           s_[pos_] != '\t')
      ++pos_;
    std::string tok(s_.substr(start, pos_ - start));
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string digits;
    for (char ch : tok)
      if (ch != '_') digits += ch;
    const bool is_float = digits.find_first_of(".eE") != std::string::npos || digits == "inf" ||
                          digits == "+inf" || digits == "-inf" || digits == "nan";
    const char* b = digits.data() + (digits.size() > 0 && digits[0] == '+' ? 1 : 0);
    const char* e = digits.data() + digits.size();
    if (!is_float) {
      long long v = 0;
      auto [p, ec] = std::from_chars(b, e, v);
      if (ec == std::errc() && p == e && b != e) return v;
    } else {
      double v = 0;
      auto [p, ec] = std::from_chars(b, e, v);
      if (ec == std::errc() && p == e && b != e) return v;
    }
    fail("cannot parse value '" + tok + "'");
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

nlohmann::json* descend(nlohmann::json& root, const std::vector<std::string>& path, const LineParser& lp) {
  nlohmann::json* node = &root;
  for (const auto& part : path) {
    if (!node->contains(part)) (*node)[part] = nlohmann::json::object();
    node = &(*node)[part];
    if (!node->is_object()) lp.fail("'" + part + "' is not a table");
  }
  return node;
}

}  // namespace

nlohmann::json parse_toml_lite(std::string_view text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    LineParser lp(line, line_no);
    if (lp.at_end_or_comment()) continue;
    if (lp.eat('[')) {
      if (lp.eat('[')) lp.fail("arrays of tables are not supported");
      std::vector<std::string> path{lp.key()};
      while (lp.eat('.')) path.push_back(lp.key());
      lp.expect(']');
      if (!lp.at_end_or_comment()) lp.fail("trailing characters after table header");
      table = descend(root, path, lp);
      continue;
    }
    std::vector<std::string> path{lp.key()};
    while (lp.eat('.')) path.push_back(lp.key());
    lp.expect('=');
    nlohmann::json v = lp.value();
    if (!lp.at_end_or_comment()) lp.fail("trailing characters after value");
    const std::string leaf = path.back();
    path.pop_back();
    nlohmann::json* target = descend(*table, path, lp);
    if (target->contains(leaf)) lp.fail("duplicate key '" + leaf + "'");
    (*target)[leaf] = std::move(v);
  }
  return root;
}

}  // namespace meshfinish
