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

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace roleeval {

// Prompt templates ship as versioned files under templates/ (for example
// "rpp_role_setting.v1.txt") and are compiled into the library.
struct PromptTemplate {
  std::string name;     // "rpp_role_setting"
  std::string version;  // "v1"
  std::string file_name;
  std::string_view text;

  std::string versioned_name() const { return name + "." + version; }
  std::string render(const std::map<std::string, std::string>& values) const;
};

// Latest version of the named template. Throws Error(kConfigError) if absent.
const PromptTemplate& prompt_template(std::string_view name);

std::vector<PromptTemplate> all_templates();

// versioned name -> sha256 of the text, for run manifests.
std::map<std::string, std::string> template_fingerprints();

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_template_files();
}  // namespace detail

}  // namespace roleeval
