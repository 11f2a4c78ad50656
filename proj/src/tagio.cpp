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

#include "echolab/tagio.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "echolab/error.hpp"

namespace echolab {

namespace {

constexpr std::array<char, 4> kMagic = {'E', 'T', 'A', 'G'};
constexpr std::size_t kHeaderSize = 16;
constexpr std::size_t kRecordSize = 9;

void put_le(char* dst, std::uint64_t v, int bytes)
{
    for (int k = 0; k < bytes; ++k) {
        dst[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
    }
}

std::uint64_t get_le(const char* src, int bytes)
{
    std::uint64_t v = 0;
    for (int k = 0; k < bytes; ++k) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(src[k])) << (8 * k);
    }
    return v;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode)
{
    std::ofstream out(path, mode);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode)
{
    std::ifstream in(path, mode);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return in;
}

} // namespace

void write_tags_binary(std::ostream& out, const std::vector<TimeTag>& tags,
                       std::uint16_t channel_count)
{
    std::array<char, kHeaderSize> header{};
    std::memcpy(header.data(), kMagic.data(), kMagic.size());
    put_le(header.data() + 4, kTagFormatVersion, 2);
    put_le(header.data() + 6, channel_count, 2);
    out.write(header.data(), header.size());
    std::array<char, kRecordSize> rec{};
    for (const auto& t : tags) {
        if (t.time_ps < 0) {
            throw IoError("negative time stamp cannot be stored");
        }
        rec[0] = static_cast<char>(t.channel);
        put_le(rec.data() + 1, static_cast<std::uint64_t>(t.time_ps), 8);
        out.write(rec.data(), rec.size());
    }
    if (!out) {
        throw IoError("write failed");
    }
}

void write_tags_binary(const std::filesystem::path& path, const std::vector<TimeTag>& tags,
                       std::uint16_t channel_count)
{
    auto out = open_out(path, std::ios::binary | std::ios::trunc);
    write_tags_binary(out, tags, channel_count);
}

TagFile read_tags_binary(std::istream& in)
{
    std::array<char, kHeaderSize> header{};
    if (!in.read(header.data(), header.size())) {
        throw IoError("truncated tag file header");
    }
    if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
        throw IoError("not a tag file (bad magic)");
    }
    TagFile f;
    f.version = static_cast<std::uint16_t>(get_le(header.data() + 4, 2));
    f.channel_count = static_cast<std::uint16_t>(get_le(header.data() + 6, 2));
    if (f.version != kTagFormatVersion) {
        throw IoError("unsupported tag file version " + std::to_string(f.version));
    }
    std::array<char, kRecordSize> rec{};
    while (in.read(rec.data(), rec.size())) {
        const std::uint64_t t = get_le(rec.data() + 1, 8);
        f.tags.push_back({static_cast<Picoseconds>(t), static_cast<std::uint8_t>(rec[0])});
    }
    if (in.gcount() != 0) {
        throw IoError("truncated tag record");
    }
    return f;
}

TagFile read_tags_binary(const std::filesystem::path& path)
{
    auto in = open_in(path, std::ios::binary);
    return read_tags_binary(in);
}

void write_tags_csv(std::ostream& out, const std::vector<TimeTag>& tags)
{
    out << "channel,time_ps\n";
    for (const auto& t : tags) {
        out << static_cast<int>(t.channel) << ',' << t.time_ps << '\n';
    }
    if (!out) {
        throw IoError("write failed");
    }
}

void write_tags_csv(const std::filesystem::path& path, const std::vector<TimeTag>& tags)
{
    auto out = open_out(path, std::ios::trunc);
    write_tags_csv(out, tags);
}

std::vector<TimeTag> read_tags_csv(std::istream& in)
{
    std::vector<TimeTag> tags;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (line == "channel,time_ps") {
                continue;
            }
        }
        std::istringstream fields(line);
        long channel = -1;
        char comma = 0;
        long long time = -1;
        if (!(fields >> channel >> comma >> time) || comma != ',' || channel < 0 ||
            channel > 255 || time < 0) {
            throw IoError("malformed tag CSV at line " + std::to_string(lineno));
        }
        tags.push_back({static_cast<Picoseconds>(time), static_cast<std::uint8_t>(channel)});
    }
    return tags;
}

std::vector<TimeTag> read_tags_csv(const std::filesystem::path& path)
{
    auto in = open_in(path, std::ios::in);
    return read_tags_csv(in);
}

std::vector<TimeTag> read_tags(const std::filesystem::path& path)
{
    auto in = open_in(path, std::ios::binary);
    std::array<char, 4> head{};
    in.read(head.data(), head.size());
    const bool binary = in.gcount() == 4 && head == kMagic;
    in.clear();
    in.seekg(0);
    if (binary) {
        return read_tags_binary(in).tags;
    }
    return read_tags_csv(in);
}

} // namespace echolab
