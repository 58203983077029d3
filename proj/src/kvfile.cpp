// Copyright 2026 the voxal authors
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

#include "voxal/kvfile.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace voxal {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    KeyValueFile kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::size_t colon = t.find(':');
        if (colon == std::string::npos) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 'key: value'");
        }
        kv.entries_.emplace_back(trim(t.substr(0, colon)), trim(t.substr(colon + 1)));
    }
    return kv;
}

void KeyValueFile::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    for (const auto& [k, v] : entries_) out << k << ": " << v << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

bool KeyValueFile::has(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return true;
    return false;
}

const std::string& KeyValueFile::get(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    throw std::runtime_error("missing key: " + key);
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    return fallback;
}

void KeyValueFile::set(const std::string& key, std::string value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(key, std::move(value));
}

std::vector<std::int64_t> parse_ints(const std::string& text, std::size_t expected_count) {
    std::istringstream ss(text);
    std::vector<std::int64_t> out;
    std::string tok;
    while (ss >> tok) out.push_back(parse_int(tok));
    if (expected_count != 0 && out.size() != expected_count) {
        throw std::runtime_error("expected " + std::to_string(expected_count) +
                                 " integers in: " + text);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& text, std::size_t expected_count) {
    std::istringstream ss(text);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) out.push_back(parse_double(tok));
    if (expected_count != 0 && out.size() != expected_count) {
        throw std::runtime_error("expected " + std::to_string(expected_count) +
                                 " numbers in: " + text);
    }
    return out;
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw std::runtime_error("not a number: " + text);
    return v;
}

std::int64_t parse_int(const std::string& text) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::runtime_error("not an integer: " + text);
    return v;
}

std::uint64_t parse_uint(const std::string& text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::runtime_error("not an unsigned integer: " + text);
    return v;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

}  // namespace voxal
