// Copyright 2026 The echo-lab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "echolab/montecarlo.hpp"

namespace echolab {

inline constexpr std::uint16_t kTagFormatVersion = 1;

// Binary stream: 16-byte header ("ETAG", u16 version, u16 channel count,
// 8 reserved zero bytes) followed by 9-byte records (u8 channel, u64 LE time_ps).
void write_tags_binary(std::ostream& out, const std::vector<TimeTag>& tags,
                       std::uint16_t channel_count);
void write_tags_binary(const std::filesystem::path& path, const std::vector<TimeTag>& tags,
                       std::uint16_t channel_count);

struct TagFile {
    std::uint16_t version = kTagFormatVersion;
    std::uint16_t channel_count = 0;
    std::vector<TimeTag> tags;
};

TagFile read_tags_binary(std::istream& in);
TagFile read_tags_binary(const std::filesystem::path& path);

// CSV with header "channel,time_ps". Lines starting with '#' are comments.
void write_tags_csv(std::ostream& out, const std::vector<TimeTag>& tags);
void write_tags_csv(const std::filesystem::path& path, const std::vector<TimeTag>& tags);
std::vector<TimeTag> read_tags_csv(std::istream& in);
std::vector<TimeTag> read_tags_csv(const std::filesystem::path& path);

// Picks the reader from the file contents (binary magic or text).
std::vector<TimeTag> read_tags(const std::filesystem::path& path);

} // namespace echolab
