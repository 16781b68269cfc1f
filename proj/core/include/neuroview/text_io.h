// Copyright 2026 The NeuroView Authors.
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

// Text helpers shared by the file formats.

#ifndef NEUROVIEW_TEXT_IO_H_
#define NEUROVIEW_TEXT_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nv {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Whole-string parse; nullopt on junk, empty input or trailing characters.
std::optional<double> parse_double(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

std::string read_file(const std::filesystem::path& path);
// Throws std::runtime_error naming the path on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace nv

#endif  // NEUROVIEW_TEXT_IO_H_
