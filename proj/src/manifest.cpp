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

#include "prondiff/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "prondiff/errors.hpp"

namespace prondiff::manifest {

namespace {

using nlohmann::json;

json entry_to_json(const ManifestEntry& e) {
  json j;
  j["utterance_id"] = e.utterance_id;
  j["real_wav"] = e.real_wav.generic_string();
  j["real_textgrid"] = e.real_textgrid.generic_string();
  if (e.clone_wav) j["clone_wav"] = e.clone_wav->generic_string();
  if (e.clone_textgrid) j["clone_textgrid"] = e.clone_textgrid->generic_string();
  if (!e.word_labels.empty()) {
    json labels = json::array();
    for (const auto& wl : e.word_labels)
      labels.push_back(json{{"index", wl.index}, {"label", std::string(to_string(wl.label))}});
    j["word_labels"] = std::move(labels);
  }
  return j;
}

ManifestEntry entry_from_json(const json& j) {
  ManifestEntry e;
  e.utterance_id = j.at("utterance_id").get<std::string>();
  e.real_wav = j.at("real_wav").get<std::string>();
  e.real_textgrid = j.at("real_textgrid").get<std::string>();
  if (j.contains("clone_wav") && !j["clone_wav"].is_null())
    e.clone_wav = std::filesystem::path(j["clone_wav"].get<std::string>());
  if (j.contains("clone_textgrid") && !j["clone_textgrid"].is_null())
    e.clone_textgrid = std::filesystem::path(j["clone_textgrid"].get<std::string>());
  if (j.contains("word_labels")) {
    for (const auto& wl : j.at("word_labels")) {
      WordLabelEntry entry;
      entry.index = wl.at("index").get<int>();
      entry.label = pool_label_from_string(wl.at("label").get<std::string>());
      if (entry.index < 0) throw MalformedManifest("negative word label index");
      e.word_labels.push_back(entry);
    }
  }
  return e;
}

}  // namespace

std::optional<PoolLabel> ManifestEntry::label_for(int word_index) const {
  for (const auto& wl : word_labels)
    if (wl.index == word_index) return wl.label;
  return std::nullopt;
}

std::string manifest_to_json(const Manifest& m) {
  json j;
  j["version"] = m.version;
  j["speaker"] = m.speaker;
  json entries = json::array();
  for (const auto& e : m.entries) entries.push_back(entry_to_json(e));
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw MalformedManifest(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    Manifest m;
    if (!j.contains("version")) throw MalformedManifest("manifest lacks a version field");
    m.version = j.at("version").get<int>();
    if (m.version != 1)
      throw MalformedManifest("unsupported manifest version " + std::to_string(m.version));
    m.speaker = j.value("speaker", std::string{});
    std::unordered_set<std::string> seen;
    for (const auto& e : j.at("entries")) {
      ManifestEntry entry = entry_from_json(e);
      if (!seen.insert(entry.utterance_id).second)
        throw MalformedManifest("duplicate utterance_id '" + entry.utterance_id + "'");
      m.entries.push_back(std::move(entry));
    }
    return m;
  } catch (const json::exception& e) {
    throw MalformedManifest(std::string("manifest missing or mistyped field: ") + e.what());
  }
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedManifest("cannot open manifest " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Manifest m = manifest_from_json(ss.str());

  // Resolve relative paths against the manifest's directory.
  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](std::filesystem::path& p) {
    if (p.is_relative()) p = base / p;
  };
  for (auto& e : m.entries) {
    resolve(e.real_wav);
    resolve(e.real_textgrid);
    if (e.clone_wav) resolve(*e.clone_wav);
    if (e.clone_textgrid) resolve(*e.clone_textgrid);
  }
  return m;
}

void save_manifest(const Manifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedManifest("cannot write manifest " + path.string());
  out << manifest_to_json(m);
}

}  // namespace prondiff::manifest
