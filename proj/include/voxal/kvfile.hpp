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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace voxal {

/// Line-oriented `key: value` text container used for dataset headers,
/// partition headers and experiment specs. Lines starting with '#' and blank
/// lines are ignored on load; key order is preserved on save.
class KeyValueFile {
public:
    KeyValueFile() = default;

    static KeyValueFile load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    bool has(const std::string& key) const;
    /// Throws std::runtime_error if the key is absent.
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    void set(const std::string& key, std::string value);

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// Value parsing helpers; all throw std::runtime_error on malformed input.
std::vector<std::int64_t> parse_ints(const std::string& text, std::size_t expected_count);
std::vector<double> parse_doubles(const std::string& text, std::size_t expected_count);
double parse_double(const std::string& text);
std::int64_t parse_int(const std::string& text);
std::uint64_t parse_uint(const std::string& text);

/// Shortest round-trip decimal representation of a double (locale independent).
std::string format_double(double value);

}  // namespace voxal
