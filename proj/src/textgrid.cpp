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

#include "prondiff/textgrid.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "prondiff/errors.hpp"

namespace prondiff::textgrid {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string strip_punct(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_utf16(std::string_view bytes, bool big_endian) {
  if (bytes.size() % 2 != 0) throw MalformedTextGrid("odd UTF-16 byte count");
  std::string out;
  out.reserve(bytes.size() / 2);
  auto unit = [&](std::size_t i) -> std::uint16_t {
    auto a = static_cast<std::uint8_t>(bytes[i]);
    auto b = static_cast<std::uint8_t>(bytes[i + 1]);
    return big_endian ? static_cast<std::uint16_t>((a << 8) | b)
                      : static_cast<std::uint16_t>((b << 8) | a);
  };
  for (std::size_t i = 0; i < bytes.size(); i += 2) {
    std::uint16_t u = unit(i);
    if (u >= 0xD800 && u <= 0xDBFF) {
      if (i + 3 >= bytes.size()) throw MalformedTextGrid("truncated UTF-16 surrogate pair");
      std::uint16_t lo = unit(i + 2);
      if (lo < 0xDC00 || lo > 0xDFFF) throw MalformedTextGrid("invalid UTF-16 surrogate pair");
      std::uint32_t cp = 0x10000 + ((static_cast<std::uint32_t>(u - 0xD800) << 10) | (lo - 0xDC00));
      append_utf8(out, cp);
      i += 2;
    } else if (u >= 0xDC00 && u <= 0xDFFF) {
      throw MalformedTextGrid("unpaired UTF-16 low surrogate");
    } else {
      append_utf8(out, u);
    }
  }
  return out;
}

// Praat headers and keys are fixed-order, so the parser walks the stream
// sequentially: find the next '=', check the key text just before it, then
// read one value. Quoted values are consumed immediately, which keeps the
// '=' scan from ever entering a label.
class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  void expect_key(std::string_view key) {
    std::size_t eq = text_.find('=', pos_);
    if (eq == std::string_view::npos)
      throw MalformedTextGrid("expected '" + std::string(key) + " =' near line " +
                              std::to_string(line()));
    std::string before = trim(text_.substr(pos_, eq - pos_));
    if (before.size() < key.size() ||
        before.compare(before.size() - key.size(), key.size(), key) != 0)
      throw MalformedTextGrid("expected key '" + std::string(key) + "' but found '" + before +
                              "' near line " + std::to_string(line()));
    pos_ = eq + 1;
  }

  double number() {
    skip_ws();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin)
      throw MalformedTextGrid("expected a number near line " + std::to_string(line()));
    pos_ += static_cast<std::size_t>(ptr - begin);
    if (!std::isfinite(value))
      throw MalformedTextGrid("non-finite number near line " + std::to_string(line()));
    return value;
  }

  long integer() {
    double v = number();
    long n = std::lround(v);
    if (std::abs(v - static_cast<double>(n)) > 1e-9 || n < 0)
      throw MalformedTextGrid("expected a non-negative integer near line " +
                              std::to_string(line()));
    return n;
  }

  // Quoted string; a doubled quote inside is a literal quote. May span lines.
  std::string quoted() {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '"')
      throw MalformedTextGrid("expected a quoted string near line " + std::to_string(line()));
    ++pos_;
    std::string out;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (c == '"') {
        if (pos_ < text_.size() && text_[pos_] == '"') {
          out.push_back('"');
          ++pos_;
        } else {
          return out;
        }
      } else {
        out.push_back(c);
      }
    }
    throw MalformedTextGrid("unterminated string near line " + std::to_string(line()));
  }

  // `tiers? <exists>` style flag; returns the text inside the angle brackets.
  std::string flag(std::string_view key) {
    skip_ws();
    if (text_.compare(pos_, key.size(), key) != 0)
      throw MalformedTextGrid("expected '" + std::string(key) + "' near line " +
                              std::to_string(line()));
    pos_ += key.size();
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '<')
      throw MalformedTextGrid("expected '<exists>' or '<absent>' near line " +
                              std::to_string(line()));
    std::size_t close = text_.find('>', pos_);
    if (close == std::string_view::npos)
      throw MalformedTextGrid("unterminated flag near line " + std::to_string(line()));
    std::string out(text_.substr(pos_ + 1, close - pos_ - 1));
    pos_ = close + 1;
    return out;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::size_t line() const {
    return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(std::min(pos_, text_.size())), '\n'));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void format_number(std::string& out, double v) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
}

void format_quoted(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

void validate_tier(const IntervalTier& tier, double grid_min, double grid_max) {
  double prev_end = grid_min - 1e-6;
  for (const Interval& iv : tier.intervals) {
    const bool empty_label = trim(iv.label).empty();
    if (empty_label ? iv.start > iv.end : iv.start >= iv.end)
      throw MalformedTextGrid("tier '" + tier.name + "': interval with non-positive duration at " +
                              std::to_string(iv.start));
    if (iv.start < prev_end - 1e-6)
      throw MalformedTextGrid("tier '" + tier.name + "': overlapping intervals at " +
                              std::to_string(iv.start));
    if (iv.start < grid_min - 1e-6 || iv.end > grid_max + 1e-6)
      throw MalformedTextGrid("tier '" + tier.name + "': interval outside grid range");
    prev_end = iv.end;
  }
}

const IntervalTier& find_tier(const TextGrid& g, std::string_view tier_name,
                              std::string_view which) {
  const std::string wanted = to_lower(tier_name);
  for (const IntervalTier& t : g.tiers) {
    if (to_lower(t.name) == wanted) return t;
  }
  throw TierNotFound("tier '" + std::string(tier_name) + "' not found in " + std::string(which) +
                     " TextGrid");
}

}  // namespace

bool is_silence_label(std::string_view label) {
  static const std::array<std::string_view, 5> kSilence = {"", "sp", "sil", "spn", "<unk>"};
  const std::string t = to_lower(trim(label));
  return std::find(kSilence.begin(), kSilence.end(), t) != kSilence.end();
}

TextGrid parse_textgrid(std::string_view content) {
  std::string decoded;
  if (content.size() >= 2 && static_cast<std::uint8_t>(content[0]) == 0xFE &&
      static_cast<std::uint8_t>(content[1]) == 0xFF) {
    decoded = decode_utf16(content.substr(2), /*big_endian=*/true);
    content = decoded;
  } else if (content.size() >= 2 && static_cast<std::uint8_t>(content[0]) == 0xFF &&
             static_cast<std::uint8_t>(content[1]) == 0xFE) {
    decoded = decode_utf16(content.substr(2), /*big_endian=*/false);
    content = decoded;
  } else if (content.size() >= 3 && static_cast<std::uint8_t>(content[0]) == 0xEF &&
             static_cast<std::uint8_t>(content[1]) == 0xBB &&
             static_cast<std::uint8_t>(content[2]) == 0xBF) {
    content = content.substr(3);
  }

  Scanner sc(content);
  sc.expect_key("File type");
  if (sc.quoted() != "ooTextFile")
    throw MalformedTextGrid("not a Praat text file (binary and short formats are rejected)");
  sc.expect_key("Object class");
  if (sc.quoted() != "TextGrid") throw MalformedTextGrid("object class is not TextGrid");

  TextGrid grid;
  sc.expect_key("xmin");
  grid.xmin = sc.number();
  sc.expect_key("xmax");
  grid.xmax = sc.number();
  if (grid.xmax < grid.xmin) throw MalformedTextGrid("grid xmax < xmin");

  const std::string tiers_flag = sc.flag("tiers?");
  if (tiers_flag == "absent") return grid;
  if (tiers_flag != "exists") throw MalformedTextGrid("unrecognized tiers flag <" + tiers_flag + ">");

  sc.expect_key("size");
  const long tier_count = sc.integer();
  for (long i = 0; i < tier_count; ++i) {
    sc.expect_key("class");
    const std::string tier_class = sc.quoted();
    sc.expect_key("name");
    std::string tier_name = sc.quoted();
    sc.expect_key("xmin");
    sc.number();
    sc.expect_key("xmax");
    sc.number();
    sc.expect_key("size");
    const long item_count = sc.integer();

    if (tier_class == "IntervalTier") {
      IntervalTier tier;
      tier.name = std::move(tier_name);
      tier.intervals.reserve(static_cast<std::size_t>(item_count));
      for (long k = 0; k < item_count; ++k) {
        Interval iv;
        sc.expect_key("xmin");
        iv.start = sc.number();
        sc.expect_key("xmax");
        iv.end = sc.number();
        sc.expect_key("text");
        iv.label = sc.quoted();
        tier.intervals.push_back(std::move(iv));
      }
      validate_tier(tier, grid.xmin, grid.xmax);
      grid.tiers.push_back(std::move(tier));
    } else if (tier_class == "TextTier") {
      // Point tiers carry no word spans; consume and drop.
      for (long k = 0; k < item_count; ++k) {
        sc.expect_key("number");
        sc.number();
        sc.expect_key("mark");
        sc.quoted();
      }
    } else {
      throw MalformedTextGrid("unknown tier class '" + tier_class + "'");
    }
  }
  return grid;
}

TextGrid load_textgrid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedTextGrid("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_textgrid(ss.str());
}

std::string serialize_textgrid(const TextGrid& g) {
  std::string out;
  out += "File type = \"ooTextFile\"\n";
  out += "Object class = \"TextGrid\"\n\n";
  out += "xmin = ";
  format_number(out, g.xmin);
  out += "\nxmax = ";
  format_number(out, g.xmax);
  out += "\ntiers? <exists>\nsize = " + std::to_string(g.tiers.size()) + "\nitem []:\n";
  for (std::size_t i = 0; i < g.tiers.size(); ++i) {
    const IntervalTier& tier = g.tiers[i];
    out += "    item [" + std::to_string(i + 1) + "]:\n";
    out += "        class = \"IntervalTier\"\n";
    out += "        name = ";
    format_quoted(out, tier.name);
    out += "\n        xmin = ";
    format_number(out, g.xmin);
    out += "\n        xmax = ";
    format_number(out, g.xmax);
    out += "\n        intervals: size = " + std::to_string(tier.intervals.size()) + "\n";
    for (std::size_t k = 0; k < tier.intervals.size(); ++k) {
      const Interval& iv = tier.intervals[k];
      out += "        intervals [" + std::to_string(k + 1) + "]:\n";
      out += "            xmin = ";
      format_number(out, iv.start);
      out += "\n            xmax = ";
      format_number(out, iv.end);
      out += "\n            text = ";
      format_quoted(out, iv.label);
      out += "\n";
    }
  }
  return out;
}

std::vector<Interval> word_intervals(const TextGrid& g, std::string_view tier_name) {
  const IntervalTier& tier = find_tier(g, tier_name, "the");
  std::vector<Interval> out;
  for (const Interval& iv : tier.intervals) {
    if (is_silence_label(iv.label)) continue;
    std::string word = strip_punct(trim(iv.label));
    if (word.empty()) continue;
    out.push_back({iv.start, iv.end, std::move(word)});
  }
  return out;
}

std::vector<WordAlignment> extract_word_alignments(const TextGrid& real, const TextGrid& clone,
                                                   std::string_view tier_name) {
  const IntervalTier& real_tier = find_tier(real, tier_name, "real");
  const IntervalTier& clone_tier = find_tier(clone, tier_name, "clone");

  auto collect = [](const IntervalTier& tier) {
    std::vector<Interval> words;
    for (const Interval& iv : tier.intervals) {
      if (is_silence_label(iv.label)) continue;
      std::string word = strip_punct(trim(iv.label));
      if (word.empty()) continue;
      words.push_back({iv.start, iv.end, std::move(word)});
    }
    return words;
  };

  const std::vector<Interval> real_words = collect(real_tier);
  const std::vector<Interval> clone_words = collect(clone_tier);
  if (real_words.size() != clone_words.size())
    throw WordSequenceMismatch("real grid has " + std::to_string(real_words.size()) +
                               " words but clone grid has " + std::to_string(clone_words.size()));

  std::vector<WordAlignment> out;
  out.reserve(real_words.size());
  for (std::size_t k = 0; k < real_words.size(); ++k) {
    if (to_lower(real_words[k].label) != to_lower(clone_words[k].label))
      throw WordSequenceMismatch("word " + std::to_string(k) + ": real '" + real_words[k].label +
                                 "' does not match clone '" + clone_words[k].label + "'");
    WordAlignment wa;
    wa.word = real_words[k].label;
    wa.real_start = real_words[k].start;
    wa.real_end = real_words[k].end;
    wa.clone_start = clone_words[k].start;
    wa.clone_end = clone_words[k].end;
    wa.index = k;
    out.push_back(std::move(wa));
  }
  return out;
}

std::vector<std::size_t> words_overlapping_errors(const std::vector<WordAlignment>& words,
                                                  const IntervalTier& error_tier) {
  std::vector<std::size_t> flagged;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (const Interval& err : error_tier.intervals) {
      if (trim(err.label).empty()) continue;
      const double err_dur = err.end - err.start;
      const double overlap =
          std::min(err.end, words[i].real_end) - std::max(err.start, words[i].real_start);
      if (overlap > 0.5 * err_dur) {
        flagged.push_back(i);
        break;
      }
    }
  }
  return flagged;
}

}  // namespace prondiff::textgrid
