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

#include "roleeval/profile.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "roleeval/error.hpp"
#include "roleeval/text.hpp"

namespace roleeval {

namespace {

using PC = ProfileCategory;

constexpr std::array<CanonicalItem, 10> kItems = {{
    {"education_professional_background", "Education and Professional Background",
     "Can you provide some background information about your education and professional "
     "background? What field are you currently working or studying in?",
     PC::kBackgroundInterests},
    {"interests_hobbies", "Interests and Hobbies",
     "What are your primary interests and hobbies? How do you typically spend your leisure time?",
     PC::kBackgroundInterests},
    {"personality", "Personality",
     "How would you describe your personality in a few words? How do you think your friends or "
     "colleagues would likely describe you?",
     PC::kPersonalIdentity},
    {"favorite_books_movies_music", "Favorite Books, Movies, and Music",
     "What are some of your favorite books, movies, or music? Are there any particular genres or "
     "artists that resonate with you?",
     PC::kCulturalPreferences},
    {"values_beliefs", "Values and Beliefs",
     "In terms of your values and beliefs, are there any principles or philosophies that you hold "
     "dear?",
     PC::kPersonalIdentity},
    {"problem_solving_style", "Problem-Solving Style",
     "How do you usually approach challenges or problems? What's your problem-solving style?",
     PC::kCognitionSocial},
    {"thoughts_current_events", "Thoughts on Current Events",
     "What are your thoughts on current events or societal issues that matter to you? Are there "
     "any causes you feel strongly about?",
     PC::kPersonalIdentity},
    {"communication_social_styles", "Communication and Social Styles",
     "How do you typically communicate with others? Are you more reserved or outgoing in social "
     "situations?",
     PC::kCognitionSocial},
    {"memorable_life_experience", "Memorable Life Experience",
     "Can you share a memorable experience or event from your life that had a significant impact "
     "on you?",
     PC::kPersonalIdentity},
    {"writing_speaking_style", "Writing and Speaking Style",
     "Is there a particular writing or speaking style that you find appealing? Do you have any "
     "favorite expressions or phrases you often use?",
     PC::kCognitionSocial},
}};

constexpr std::array<ProfileCategory, 4> kCategories = {
    PC::kBackgroundInterests, PC::kPersonalIdentity, PC::kCulturalPreferences, PC::kCognitionSocial};

std::size_t canonical_rank(std::string_view key) {
  for (std::size_t i = 0; i < kItems.size(); ++i) {
    if (kItems[i].key == key) return i;
  }
  return kItems.size();
}

std::string describe(std::string_view key) {
  const CanonicalItem* item = find_canonical_item(key);
  if (item == nullptr) return std::string(key);
  return std::string(key) + " (" + std::string(item->title) + ")";
}

}  // namespace

std::string_view category_code(ProfileCategory category) {
  switch (category) {
    case PC::kBackgroundInterests: return "BackgroundInterests";
    case PC::kPersonalIdentity: return "PersonalIdentity";
    case PC::kCulturalPreferences: return "CulturalPreferences";
    case PC::kCognitionSocial: return "CognitionSocial";
  }
  return "BackgroundInterests";
}

ProfileCategory profile_category_from_code(std::string_view code) {
  for (auto c : kCategories) {
    if (category_code(c) == code) return c;
  }
  throw Error(ErrorKind::kParseError, "unknown profile category '" + std::string(code) + "'");
}

std::span<const CanonicalItem> canonical_items() { return kItems; }

const CanonicalItem* find_canonical_item(std::string_view key) {
  auto it = std::find_if(kItems.begin(), kItems.end(), [&](const auto& i) { return i.key == key; });
  return it == kItems.end() ? nullptr : &*it;
}

ValidationReport validate_profile(const PersonProfile& candidate) {
  ValidationReport report;
  if (is_blank(candidate.person_id)) {
    report.push_back({"person_id", "empty_person_id", "person_id is empty"});
  }
  if (is_blank(candidate.display_name)) {
    report.push_back({"display_name", "empty_display_name", "display_name is empty"});
  }
  if (candidate.items.size() != kItems.size()) {
    report.push_back({"items", "item_count",
                      "expected " + std::to_string(kItems.size()) + " items, found " +
                          std::to_string(candidate.items.size())});
  }

  std::set<std::string> seen;
  std::set<ProfileCategory> categories;
  for (const auto& item : candidate.items) {
    const CanonicalItem* canonical = find_canonical_item(item.key);
    if (canonical == nullptr) {
      report.push_back({item.key, "unknown_key", "'" + item.key + "' is not a questionnaire item"});
    } else if (canonical->category != item.category) {
      report.push_back({item.key, "category_mismatch",
                        describe(item.key) + " belongs to " + std::string(category_code(canonical->category)) +
                            ", not " + std::string(category_code(item.category))});
    }
    if (!seen.insert(item.key).second) {
      report.push_back({item.key, "duplicate_key", describe(item.key) + " appears more than once"});
    }
    if (is_blank(item.answer_text)) {
      report.push_back({item.key, "empty_answer", describe(item.key) + " has an empty answer_text"});
    }
    categories.insert(item.category);
  }
  for (const auto& canonical : kItems) {
    if (!seen.count(std::string(canonical.key))) {
      report.push_back({std::string(canonical.key), "missing_item",
                        "missing item " + describe(canonical.key)});
    }
  }
  for (auto c : kCategories) {
    if (!categories.count(c)) {
      report.push_back({std::string(category_code(c)), "missing_category",
                        "no item covers category " + std::string(category_code(c))});
    }
  }
  return report;
}

nlohmann::json to_json(const PersonProfile& profile) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : profile.items) {
    items.push_back({{"key", item.key},
                     {"category", category_code(item.category)},
                     {"question_text", item.question_text},
                     {"answer_text", item.answer_text}});
  }
  return {{"person_id", profile.person_id},
          {"display_name", profile.display_name},
          {"one_line_description", profile.one_line_description},
          {"items", items}};
}

PersonProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kParseError, "profile record is not an object");
  PersonProfile p;
  try {
    p.person_id = j.value("person_id", "");
    p.display_name = j.value("display_name", "");
    p.one_line_description = j.value("one_line_description", "");
    if (!j.contains("items") || !j["items"].is_array()) {
      throw Error(ErrorKind::kParseError, "profile has no items array");
    }
    for (const auto& ji : j["items"]) {
      BackgroundItem item;
      item.key = ji.at("key").get<std::string>();
      const CanonicalItem* canonical = find_canonical_item(item.key);
      if (ji.contains("category")) {
        item.category = profile_category_from_code(ji["category"].get<std::string>());
      } else if (canonical != nullptr) {
        item.category = canonical->category;
      }
      item.question_text = ji.value("question_text", "");
      if (item.question_text.empty() && canonical != nullptr) {
        item.question_text = std::string(canonical->question_text);
      }
      item.answer_text = ji.value("answer_text", "");
      p.items.push_back(std::move(item));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("malformed profile record: ") + e.what());
  }
  return p;
}

LoadedProfiles parse_profiles(std::string_view json_text) {
  if (is_blank(json_text)) throw Error(ErrorKind::kParseError, "profile file is empty");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParseError, e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::kParseError, "profile file must hold a JSON array");

  LoadedProfiles out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    PersonProfile p;
    ValidationReport report;
    try {
      p = profile_from_json(doc[i]);
      report = validate_profile(p);
    } catch (const Error& e) {
      if (doc[i].is_object()) p.person_id = doc[i].value("person_id", "");
      report.push_back({"record", "malformed", e.what()});
    }
    if (report.empty()) {
      out.profiles.push_back(std::move(p));
    } else {
      out.rejects.push_back({i, p.person_id, std::move(report)});
    }
  }
  return out;
}

LoadedProfiles load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_profiles(buf.str());
}

void save_profiles(const std::filesystem::path& path, std::span<const PersonProfile> profiles) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& p : profiles) doc.push_back(to_json(p));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

PersonProfile canonicalize(const PersonProfile& profile) {
  PersonProfile out = profile;
  std::stable_sort(out.items.begin(), out.items.end(), [](const auto& a, const auto& b) {
    auto ra = canonical_rank(a.key), rb = canonical_rank(b.key);
    if (ra != rb) return ra < rb;
    return a.key < b.key;
  });
  return out;
}

std::string render_background(const PersonProfile& profile) {
  ValidationReport report = validate_profile(profile);
  if (!report.empty()) {
    std::vector<std::string> keys;
    for (const auto& v : report) keys.push_back(v.key);
    throw Error(ErrorKind::kInvalidProfile,
                "profile '" + profile.person_id + "' is invalid: " + report.front().message, keys);
  }
  PersonProfile canonical = canonicalize(profile);
  std::string out;
  for (std::size_t i = 0; i < canonical.items.size(); ++i) {
    if (i > 0) out += '\n';
    out += "Q: " + trim(canonical.items[i].question_text) + "\n";
    out += "A: " + trim(canonical.items[i].answer_text) + "\n";
  }
  return out;
}

std::vector<AnswerLength> answer_lengths(const PersonProfile& profile) {
  std::vector<AnswerLength> out;
  for (const auto& item : canonicalize(profile).items) {
    out.push_back({item.key, word_count(item.answer_text), utf8_length(trim(item.answer_text))});
  }
  return out;
}

const PersonProfile& find_profile(std::span<const PersonProfile> profiles, std::string_view person_id) {
  for (const auto& p : profiles) {
    if (p.person_id == person_id) return p;
  }
  throw Error(ErrorKind::kInvalidArgument, "no profile for person '" + std::string(person_id) + "'");
}

}  // namespace roleeval
