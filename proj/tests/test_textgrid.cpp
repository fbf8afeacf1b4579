// Copyright 2026 The prondiff Authors
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

#include <doctest.h>

#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "prondiff/errors.hpp"
#include "prondiff/textgrid.hpp"

using namespace prondiff;
using textgrid::TextGrid;

namespace {

// Hand-built against the published Praat long-format grammar.
const char* kMinimalGrid = R"(File type = "ooTextFile"
Object class = "TextGrid"

xmin = 0
xmax = 0.6
tiers? <exists>
size = 1
item []:
    item [1]:
        class = "IntervalTier"
        name = "words"
        xmin = 0
        xmax = 0.6
        intervals: size = 2
        intervals [1]:
            xmin = 0
            xmax = 0.5
            text = "robbery"
        intervals [2]:
            xmin = 0.5
            xmax = 0.6
            text = ""
)";

std::string make_words_grid(const std::vector<std::tuple<double, double, std::string>>& words,
                            double xmax) {
  TextGrid g;
  g.xmin = 0.0;
  g.xmax = xmax;
  textgrid::IntervalTier tier;
  tier.name = "words";
  for (const auto& [s, e, label] : words) tier.intervals.push_back({s, e, label});
  g.tiers.push_back(tier);
  return textgrid::serialize_textgrid(g);
}

std::string to_utf16(const std::string& ascii, bool big_endian) {
  std::string out;
  out.push_back(static_cast<char>(big_endian ? 0xFE : 0xFF));
  out.push_back(static_cast<char>(big_endian ? 0xFF : 0xFE));
  for (char c : ascii) {
    if (big_endian) {
      out.push_back('\0');
      out.push_back(c);
    } else {
      out.push_back(c);
      out.push_back('\0');
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("textgrid") {

TEST_CASE("parses a minimal long-format grid") {
  const TextGrid g = textgrid::parse_textgrid(kMinimalGrid);
  CHECK(g.xmin == 0.0);
  CHECK(g.xmax == doctest::Approx(0.6));
  REQUIRE(g.tiers.size() == 1);
  CHECK(g.tiers[0].name == "words");
  REQUIRE(g.tiers[0].intervals.size() == 2);
  CHECK(g.tiers[0].intervals[0].label == "robbery");
  CHECK(g.tiers[0].intervals[0].start == 0.0);
  CHECK(g.tiers[0].intervals[0].end == doctest::Approx(0.5));
  CHECK(g.tiers[0].intervals[1].label == "");
}

TEST_CASE("empty tier list parses to zero tiers") {
  const char* header_only =
      "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n"
      "xmin = 0\nxmax = 1\ntiers? <exists>\nsize = 0\nitem []:\n";
  const TextGrid g = textgrid::parse_textgrid(header_only);
  CHECK(g.tiers.empty());
  CHECK(g.xmax == 1.0);
}

TEST_CASE("tiers? <absent> means no tiers") {
  const char* absent =
      "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n"
      "xmin = 0\nxmax = 1\ntiers? <absent>\n";
  CHECK(textgrid::parse_textgrid(absent).tiers.empty());
}

TEST_CASE("header with xmax < xmin is malformed") {
  const char* bad =
      "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n"
      "xmin = 2\nxmax = 1\ntiers? <exists>\nsize = 0\n";
  CHECK_THROWS_AS(textgrid::parse_textgrid(bad), MalformedTextGrid);
}

TEST_CASE("rejects short format, binary, and junk") {
  // Short format has bare values with no '=' keys.
  const char* short_format =
      "\"ooTextFile\"\n\"TextGrid\"\n0\n0.6\n<exists>\n1\n\"IntervalTier\"\n\"words\"\n";
  CHECK_THROWS_AS(textgrid::parse_textgrid(short_format), MalformedTextGrid);
  CHECK_THROWS_AS(textgrid::parse_textgrid("ooBinaryFile..."), MalformedTextGrid);
  CHECK_THROWS_AS(textgrid::parse_textgrid(""), MalformedTextGrid);
  const char* wrong_class =
      "File type = \"ooTextFile\"\nObject class = \"Pitch\"\n\nxmin = 0\nxmax = 1\n";
  CHECK_THROWS_AS(textgrid::parse_textgrid(wrong_class), MalformedTextGrid);
}

TEST_CASE("non-numeric times and truncated blocks are malformed") {
  std::string bad = kMinimalGrid;
  const auto pos = bad.find("xmax = 0.5");
  bad.replace(pos, 10, "xmax = oops");
  CHECK_THROWS_AS(textgrid::parse_textgrid(bad), MalformedTextGrid);

  // Tier promises 2 intervals but the file ends after one.
  std::string truncated(kMinimalGrid);
  truncated.resize(truncated.find("intervals [2]:"));
  CHECK_THROWS_AS(textgrid::parse_textgrid(truncated), MalformedTextGrid);
}

TEST_CASE("point tiers are skipped") {
  const char* with_points =
      "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n"
      "xmin = 0\nxmax = 1\ntiers? <exists>\nsize = 2\nitem []:\n"
      "    item [1]:\n        class = \"TextTier\"\n        name = \"events\"\n"
      "        xmin = 0\n        xmax = 1\n        points: size = 1\n"
      "        points [1]:\n            number = 0.5\n            mark = \"click\"\n"
      "    item [2]:\n        class = \"IntervalTier\"\n        name = \"words\"\n"
      "        xmin = 0\n        xmax = 1\n        intervals: size = 1\n"
      "        intervals [1]:\n            xmin = 0\n            xmax = 1\n"
      "            text = \"fraud\"\n";
  const TextGrid g = textgrid::parse_textgrid(with_points);
  REQUIRE(g.tiers.size() == 1);
  CHECK(g.tiers[0].name == "words");
}

TEST_CASE("doubled quotes decode to literal quotes") {
  std::string grid(kMinimalGrid);
  grid.replace(grid.find("\"robbery\""), 9, "\"say \"\"hi\"\"\"");
  const TextGrid g = textgrid::parse_textgrid(grid);
  CHECK(g.tiers[0].intervals[0].label == "say \"hi\"");
}

TEST_CASE("UTF-16 and UTF-8 BOMs are handled") {
  const TextGrid expected = textgrid::parse_textgrid(kMinimalGrid);
  CHECK(textgrid::parse_textgrid(to_utf16(kMinimalGrid, true)) == expected);
  CHECK(textgrid::parse_textgrid(to_utf16(kMinimalGrid, false)) == expected);
  std::string bom8 = "\xEF\xBB\xBF";
  bom8 += kMinimalGrid;
  CHECK(textgrid::parse_textgrid(bom8) == expected);
}

TEST_CASE("serialize/parse round-trip is exact") {
  std::mt19937 rng(11);
  for (int iter = 0; iter < 25; ++iter) {
    TextGrid g;
    g.xmin = 0.0;
    const int n = 1 + static_cast<int>(rng() % 6);
    textgrid::IntervalTier tier;
    tier.name = iter % 2 ? "words" : "with \"quotes\" and spaces";
    double t = 0.0;
    for (int k = 0; k < n; ++k) {
      const double dur = 0.05 + static_cast<double>(rng() % 1000) / 997.0;
      tier.intervals.push_back({t, t + dur, k % 3 ? "word" + std::to_string(k) : ""});
      t += dur;
    }
    g.xmax = t;
    g.tiers.push_back(tier);
    const std::string text = textgrid::serialize_textgrid(g);
    CHECK(textgrid::parse_textgrid(text) == g);
  }
}

TEST_CASE("round-trips the on-disk fixture") {
  const TextGrid g = textgrid::load_textgrid(std::string(PRONDIFF_TEST_DATA_DIR) +
                                             "/robbery_bribery_fraud.TextGrid");
  REQUIRE(g.tiers.size() == 2);
  const std::string text = textgrid::serialize_textgrid(g);
  CHECK(textgrid::parse_textgrid(text) == g);
}

TEST_CASE("extract_word_alignments pairs single words") {
  const auto real = textgrid::parse_textgrid(make_words_grid({{0.1, 0.6, "fraud"}}, 1.0));
  const auto clone = textgrid::parse_textgrid(make_words_grid({{0.2, 0.8, "fraud"}}, 1.0));
  const auto out = textgrid::extract_word_alignments(real, clone, "words");
  REQUIRE(out.size() == 1);
  CHECK(out[0].word == "fraud");
  CHECK(out[0].real_start == doctest::Approx(0.1));
  CHECK(out[0].real_end == doctest::Approx(0.6));
  CHECK(out[0].clone_start == doctest::Approx(0.2));
  CHECK(out[0].clone_end == doctest::Approx(0.8));
  CHECK(out[0].index == 0);
}

TEST_CASE("pairs the three-word robbery/bribery/fraud sequence in order") {
  const auto real = textgrid::parse_textgrid(make_words_grid(
      {{0.0, 0.5, "Robbery,"}, {0.5, 0.6, ""}, {0.6, 1.1, "Bribery,"}, {1.1, 1.6, "Fraud"}},
      1.6));
  const auto clone = textgrid::parse_textgrid(make_words_grid(
      {{0.0, 0.4, "robbery"}, {0.4, 0.9, "bribery"}, {0.9, 1.0, "sp"}, {1.0, 1.5, "fraud"}},
      1.5));
  const auto out = textgrid::extract_word_alignments(real, clone, "words");
  REQUIRE(out.size() == 3);
  CHECK(out[0].word == "Robbery");
  CHECK(out[1].word == "Bribery");
  CHECK(out[2].word == "Fraud");
  for (std::size_t k = 0; k < out.size(); ++k) CHECK(out[k].index == k);
  // Alignment order preserves real-tier temporal order.
  for (std::size_t k = 1; k < out.size(); ++k)
    CHECK(out[k].real_start > out[k - 1].real_start);
}

TEST_CASE("label mismatch and count mismatch are rejected") {
  const auto cat = textgrid::parse_textgrid(make_words_grid({{0.0, 0.5, "cat"}}, 1.0));
  const auto cot = textgrid::parse_textgrid(make_words_grid({{0.0, 0.5, "cot"}}, 1.0));
  CHECK_THROWS_AS(textgrid::extract_word_alignments(cat, cot, "words"), WordSequenceMismatch);

  const auto two =
      textgrid::parse_textgrid(make_words_grid({{0.0, 0.4, "cat"}, {0.5, 0.9, "cat"}}, 1.0));
  CHECK_THROWS_AS(textgrid::extract_word_alignments(cat, two, "words"), WordSequenceMismatch);
}

TEST_CASE("tier lookup is case-insensitive and TierNotFound otherwise") {
  auto grid = textgrid::parse_textgrid(make_words_grid({{0.0, 0.5, "cat"}}, 1.0));
  TextGrid upper = grid;
  upper.tiers[0].name = "Words";
  CHECK(textgrid::extract_word_alignments(upper, grid, "WORDS").size() == 1);
  CHECK_THROWS_AS(textgrid::extract_word_alignments(grid, grid, "phones"), TierNotFound);
}

TEST_CASE("silence labels are filtered on both sides") {
  const auto real = textgrid::parse_textgrid(make_words_grid(
      {{0.0, 0.1, "sil"}, {0.1, 0.5, "cat"}, {0.5, 0.6, "SP"}, {0.6, 0.9, "<unk>"}}, 1.0));
  const auto clone = textgrid::parse_textgrid(
      make_words_grid({{0.0, 0.2, "spn"}, {0.2, 0.7, "CAT"}}, 1.0));
  const auto out = textgrid::extract_word_alignments(real, clone, "words");
  REQUIRE(out.size() == 1);  // equals the non-silence real-interval count
  CHECK(out[0].word == "cat");
}

TEST_CASE("words_overlapping_errors uses the >50% of error-interval rule") {
  std::vector<textgrid::WordAlignment> words;
  textgrid::WordAlignment w;
  w.word = "fraud";
  w.real_start = 1.0;
  w.real_end = 1.5;
  w.index = 0;
  words.push_back(w);

  textgrid::IntervalTier errors;
  errors.name = "errors";
  SUBCASE("error interval mostly inside the word flags it") {
    errors.intervals.push_back({1.2, 1.4, "s"});
    CHECK(textgrid::words_overlapping_errors(words, errors) == std::vector<std::size_t>{0});
  }
  SUBCASE("half-or-less overlap does not flag") {
    errors.intervals.push_back({0.6, 1.4, "s"});  // overlap 0.4 of 0.8 = exactly half
    CHECK(textgrid::words_overlapping_errors(words, errors).empty());
  }
  SUBCASE("empty-label error intervals are ignored") {
    errors.intervals.push_back({1.2, 1.4, ""});
    CHECK(textgrid::words_overlapping_errors(words, errors).empty());
  }
}

}  // TEST_SUITE
