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


#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "echolab/error.hpp"
#include "echolab/tagio.hpp"

namespace echolab {
namespace {

std::vector<TimeTag> sample_tags()
{
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<Picoseconds> when(0, Picoseconds{1} << 50);
    std::vector<TimeTag> tags;
    for (int k = 0; k < 1000; ++k) {
        tags.push_back({when(rng), static_cast<std::uint8_t>(k % 3)});
    }
    tags.push_back({0, 0});
    return tags;
}

std::filesystem::path temp_file(const std::string& name)
{
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    return std::filesystem::temp_directory_path() /
           (std::string("echolab_") + info->test_suite_name() + "_" + info->name() + "_" + name);
}

TEST(TagBinary, HeaderLayout)
{
    std::ostringstream os;
    write_tags_binary(os, {{0x0102030405060708LL, 2}}, 3);
    const std::string b = os.str();
    ASSERT_EQ(b.size(), 16u + 9u);
    EXPECT_EQ(b.substr(0, 4), "ETAG");
    EXPECT_EQ(static_cast<unsigned char>(b[4]), kTagFormatVersion);
    EXPECT_EQ(static_cast<unsigned char>(b[5]), 0);
    EXPECT_EQ(static_cast<unsigned char>(b[6]), 3);
    EXPECT_EQ(static_cast<unsigned char>(b[7]), 0);
    for (int k = 8; k < 16; ++k) {
        EXPECT_EQ(b[k], 0);
    }
    EXPECT_EQ(static_cast<unsigned char>(b[16]), 2);
    // Little-endian time.
    for (int k = 0; k < 8; ++k) {
        EXPECT_EQ(static_cast<unsigned char>(b[17 + k]), 8 - k);
    }
}

TEST(TagBinary, RoundTrip)
{
    const auto tags = sample_tags();
    std::stringstream ss;
    write_tags_binary(ss, tags, 3);
    const auto file = read_tags_binary(ss);
    EXPECT_EQ(file.version, kTagFormatVersion);
    EXPECT_EQ(file.channel_count, 3);
    EXPECT_EQ(file.tags, tags);
}

TEST(TagBinary, RejectsBadInput)
{
    std::istringstream magic(std::string("NOPE") + std::string(12, '\0'));
    EXPECT_THROW(read_tags_binary(magic), IoError);

    std::ostringstream os;
    write_tags_binary(os, {{5, 1}, {6, 1}}, 2);
    std::string bytes = os.str();
    bytes.pop_back();
    std::istringstream truncated(bytes);
    EXPECT_THROW(read_tags_binary(truncated), IoError);

    std::istringstream short_header("ETAG");
    EXPECT_THROW(read_tags_binary(short_header), IoError);

    EXPECT_THROW(read_tags_binary(std::filesystem::path("/nonexistent/tags.etag")), IoError);
}

TEST(TagCsv, RoundTrip)
{
    const auto tags = sample_tags();
    std::stringstream ss;
    write_tags_csv(ss, tags);
    EXPECT_EQ(ss.str().substr(0, 15), "channel,time_ps");
    EXPECT_EQ(read_tags_csv(ss), tags);
}

TEST(TagCsv, CommentsAndErrors)
{
    std::istringstream ok("# produced elsewhere\nchannel,time_ps\n1,100\n# mid\n0,50\n");
    const std::vector<TimeTag> expect = {{100, 1}, {50, 0}};
    EXPECT_EQ(read_tags_csv(ok), expect);

    std::istringstream bad("channel,time_ps\n1,abc\n");
    EXPECT_THROW(read_tags_csv(bad), IoError);
    std::istringstream negative("channel,time_ps\n1,-4\n");
    EXPECT_THROW(read_tags_csv(negative), IoError);
}

TEST(ReadTags, DetectsFormat)
{
    const auto tags = sample_tags();
    const auto bin = temp_file("tags.etag");
    const auto csv = temp_file("tags.csv");
    write_tags_binary(bin, tags, 3);
    write_tags_csv(csv, tags);
    EXPECT_EQ(read_tags(bin), tags);
    EXPECT_EQ(read_tags(csv), tags);
    std::filesystem::remove(bin);
    std::filesystem::remove(csv);
    EXPECT_THROW(read_tags(bin), IoError);
}

} // namespace
} // namespace echolab
