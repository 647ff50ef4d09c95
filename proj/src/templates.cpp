// Copyright 2026 The roleeval Authors.
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

#include "roleeval/templates.hpp"

#include <mutex>

#include "roleeval/error.hpp"
#include "roleeval/text.hpp"

namespace roleeval {

namespace {

// "name.v3.txt" -> {"name", "v3"}; files without a version are "v0".
std::pair<std::string, std::string> split_file_name(std::string_view file_name) {
  std::string_view stem = file_name.substr(0, file_name.rfind('.'));
  std::size_t dot = stem.rfind('.');
  if (dot != std::string_view::npos && dot + 1 < stem.size() && stem[dot + 1] == 'v') {
    return {std::string(stem.substr(0, dot)), std::string(stem.substr(dot + 1))};
  }
  return {std::string(stem), "v0"};
}

int version_number(const std::string& version) { return std::stoi(version.substr(1)); }

const std::map<std::string, PromptTemplate>& latest_templates() {
  static const std::map<std::string, PromptTemplate> latest = [] {
    std::map<std::string, PromptTemplate> out;
    for (const auto& [file_name, text] : detail::embedded_template_files()) {
      auto [name, version] = split_file_name(file_name);
      PromptTemplate t{name, version, std::string(file_name), text};
      auto it = out.find(name);
      if (it == out.end() || version_number(it->second.version) < version_number(version)) {
        out[name] = t;
      }
    }
    return out;
  }();
  return latest;
}

}  // namespace

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  return fill_placeholders(text, values);
}

const PromptTemplate& prompt_template(std::string_view name) {
  const auto& latest = latest_templates();
  auto it = latest.find(std::string(name));
  if (it == latest.end()) {
    throw Error(ErrorKind::kConfigError, "unknown prompt template " + std::string(name));
  }
  return it->second;
}

std::vector<PromptTemplate> all_templates() {
  std::vector<PromptTemplate> out;
  for (const auto& [name, t] : latest_templates()) out.push_back(t);
  return out;
}

std::map<std::string, std::string> template_fingerprints() {
  std::map<std::string, std::string> out;
  for (const auto& [name, t] : latest_templates()) {
    out[t.versioned_name()] = sha256_hex(t.text);
  }
  return out;
}

}  // namespace roleeval
