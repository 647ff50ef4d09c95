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

#include "roleeval/collection.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "roleeval/error.hpp"
#include "roleeval/rng.hpp"
#include "roleeval/text.hpp"

namespace roleeval {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
// Token characters: ASCII letters and digits, apostrophes, and any UTF-8 byte.
bool is_token_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == '\'' || u >= 0x80;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : trim_view(s)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

// A sentence starts at the beginning of the text and after a terminator that
// is followed by whitespace.
std::string sentence_case(std::string s) {
  bool at_start = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (at_start && is_alpha(c)) {
      s[i] = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      at_start = false;
    } else if (is_terminator(c) && (i + 1 == s.size() || is_space(s[i + 1]))) {
      at_start = true;
    }
  }
  return s;
}

std::string apply_dictionary(const std::string& s, const MisspellingDictionary& dictionary) {
  if (dictionary.empty()) return s;
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_token_char(s[i])) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_token_char(s[j])) ++j;
    std::string_view token(s.data() + i, j - i);
    // Quotes wrapping a word are not part of it.
    std::size_t lead = 0, tail = 0;
    while (lead < token.size() && token[lead] == '\'') ++lead;
    while (tail < token.size() - lead && token[token.size() - 1 - tail] == '\'') ++tail;
    std::string_view core = token.substr(lead, token.size() - lead - tail);
    const std::string* fix = core.empty() ? nullptr : dictionary.lookup(core);
    if (fix == nullptr) {
      out.append(token);
    } else {
      std::string replacement = *fix;
      if (std::isupper(static_cast<unsigned char>(core.front())) && !replacement.empty()) {
        replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
      }
      out.append(token.substr(0, lead));
      out.append(replacement);
      out.append(token.substr(token.size() - tail));
    }
    i = j;
  }
  return out;
}

std::string normalize_once(std::string_view raw, const MisspellingDictionary& dictionary) {
  return apply_dictionary(sentence_case(collapse_whitespace(raw)), dictionary);
}

std::string slot_key(std::string_view person, std::string_view question, std::string_view source) {
  return std::string(person) + '\x1f' + std::string(question) + '\x1f' + std::string(source);
}

}  // namespace

MisspellingDictionary::MisspellingDictionary(const std::map<std::string, std::string>& entries) {
  for (const auto& [wrong, right] : entries) {
    std::string key = to_lower_ascii(trim(wrong));
    if (key.empty() || !std::all_of(key.begin(), key.end(), is_token_char)) {
      throw Error(ErrorKind::kConfigError, "dictionary key '" + wrong + "' is not a single token");
    }
    if (is_blank(right) || right != trim(right)) {
      throw Error(ErrorKind::kConfigError, "correction for '" + wrong + "' is blank or padded");
    }
    entries_[key] = right;
  }
  for (const auto& [key, right] : entries_) {
    std::string lowered = to_lower_ascii(right);
    std::size_t i = 0;
    while (i < lowered.size()) {
      if (!is_token_char(lowered[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < lowered.size() && is_token_char(lowered[j])) ++j;
      std::string token = lowered.substr(i, j - i);
      token.erase(0, token.find_first_not_of('\''));
      while (!token.empty() && token.back() == '\'') token.pop_back();
      if (entries_.count(token)) {
        throw Error(ErrorKind::kConfigError,
                    "correction '" + right + "' for '" + key + "' contains dictionary key '" + token + "'");
      }
      i = j;
    }
  }
}

MisspellingDictionary MisspellingDictionary::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kConfigError, "dictionary must be a JSON object");
  return MisspellingDictionary(j.get<std::map<std::string, std::string>>());
}

MisspellingDictionary MisspellingDictionary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfigError, path.string() + ": " + e.what());
  }
}

const std::string* MisspellingDictionary::lookup(std::string_view token) const {
  auto it = entries_.find(to_lower_ascii(token));
  return it == entries_.end() ? nullptr : &it->second;
}

std::string normalize_response(std::string_view raw, const MisspellingDictionary& dictionary) {
  if (is_blank(raw)) throw Error(ErrorKind::kEmptyInput, "response text is blank");
  // A correction can end a sentence or start one, so the steps are repeated
  // until nothing changes. Two passes settle any validated dictionary.
  std::string current = normalize_once(raw, dictionary);
  for (int pass = 0; pass < 4; ++pass) {
    std::string next = normalize_once(current, dictionary);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

ResponseRecord make_response(std::string_view person_id, std::string_view question_id,
                             std::string_view source, std::string_view raw,
                             const MisspellingDictionary& dictionary, std::int64_t created_at) {
  ResponseRecord r;
  r.person_id = std::string(person_id);
  r.question_id = std::string(question_id);
  r.source = std::string(source);
  r.raw = std::string(raw);
  r.normalized = normalize_response(raw, dictionary);
  r.created_at = created_at;
  r.response_id = short_id("r", {r.person_id, r.question_id, r.source}, 16);
  return r;
}

nlohmann::json to_json(const ResponseRecord& r) {
  return {{"response_id", r.response_id}, {"person_id", r.person_id}, {"question_id", r.question_id},
          {"source", r.source},           {"raw", r.raw},             {"normalized", r.normalized},
          {"created_at", r.created_at}};
}

ResponseRecord response_from_json(const nlohmann::json& j) {
  try {
    ResponseRecord r;
    r.response_id = j.at("response_id").get<std::string>();
    r.person_id = j.at("person_id").get<std::string>();
    r.question_id = j.at("question_id").get<std::string>();
    r.source = j.at("source").get<std::string>();
    r.raw = j.at("raw").get<std::string>();
    r.normalized = j.at("normalized").get<std::string>();
    r.created_at = j.value("created_at", std::int64_t{0});
    if (is_blank(r.raw)) throw Error(ErrorKind::kParseError, "response " + r.response_id + " is blank");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("malformed response record: ") + e.what());
  }
}

void ResponseStore::add(ResponseRecord record) {
  std::string key = slot_key(record.person_id, record.question_id, record.source);
  if (by_slot_.count(key)) {
    throw Error(ErrorKind::kConflict, "a " + record.source + " answer to " + record.question_id + " for " +
                                          record.person_id + " is already stored");
  }
  if (by_id_.count(record.response_id)) {
    throw Error(ErrorKind::kConflict, "duplicate response_id " + record.response_id);
  }
  by_slot_[key] = records_.size();
  by_id_[record.response_id] = records_.size();
  records_.push_back(std::move(record));
}

const ResponseRecord* ResponseStore::find(std::string_view person_id, std::string_view question_id,
                                          std::string_view source) const {
  auto it = by_slot_.find(slot_key(person_id, question_id, source));
  return it == by_slot_.end() ? nullptr : &records_[it->second];
}

const ResponseRecord& ResponseStore::by_id(std::string_view response_id) const {
  auto it = by_id_.find(std::string(response_id));
  if (it == by_id_.end()) {
    throw Error(ErrorKind::kMissingResponse, "unknown response " + std::string(response_id));
  }
  return records_[it->second];
}

std::vector<std::string> ResponseStore::baselines_for(std::string_view person_id) const {
  std::set<std::string> out;
  for (const auto& r : records_) {
    if (r.person_id == person_id && r.source != kHumanSource) out.insert(r.source);
  }
  return {out.begin(), out.end()};
}

nlohmann::json ResponseStore::to_json() const {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : records_) doc.push_back(roleeval::to_json(r));
  return doc;
}

ResponseStore ResponseStore::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorKind::kParseError, "response store must be a JSON array");
  ResponseStore store;
  for (const auto& jr : j) store.add(response_from_json(jr));
  return store;
}

void ResponseStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

ResponseStore ResponseStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
}

std::vector<ResponseRecord> import_human_responses(const nlohmann::json& answers, const Exam& exam,
                                                   const MisspellingDictionary& dictionary,
                                                   std::int64_t created_at) {
  if (!answers.is_array()) throw Error(ErrorKind::kParseError, "human answers must be a JSON array");
  std::map<std::string, std::string> by_question;
  for (const auto& a : answers) {
    std::string qid, text;
    try {
      qid = a.at("question_id").get<std::string>();
      text = a.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kParseError, std::string("malformed human answer: ") + e.what());
    }
    if (!exam.contains(qid)) {
      throw Error(ErrorKind::kUnknownQuestion,
                  "answer references " + qid + ", which is not in exam " + exam.exam_id, {qid});
    }
    if (by_question.count(qid)) throw Error(ErrorKind::kParseError, "two answers for " + qid);
    if (is_blank(text)) throw Error(ErrorKind::kEmptyInput, "answer to " + qid + " is blank", {qid});
    by_question[qid] = text;
  }
  std::vector<std::string> missing;
  for (const auto& q : exam.questions) {
    if (!by_question.count(q.question_id)) missing.push_back(q.question_id);
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::kMissingAnswers, "no answer for: " + names, missing);
  }
  std::vector<ResponseRecord> out;
  for (const auto& q : exam.questions) {
    out.push_back(make_response(exam.person_id, q.question_id, kHumanSource, by_question[q.question_id],
                                dictionary, created_at));
  }
  return out;
}

std::vector<ResponseRecord> import_human_responses(const std::filesystem::path& path, const Exam& exam,
                                                   const MisspellingDictionary& dictionary,
                                                   std::int64_t created_at) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
  return import_human_responses(doc, exam, dictionary, created_at);
}

nlohmann::json to_json(const EvaluationPair& p) {
  return {{"pair_id", p.pair_id},         {"question_id", p.question_id}, {"person_id", p.person_id},
          {"slot0", p.slot0},             {"slot1", p.slot1},             {"truth_slot", p.truth_slot},
          {"baseline_id", p.baseline_id}};
}

EvaluationPair pair_from_json(const nlohmann::json& j) {
  try {
    EvaluationPair p;
    p.pair_id = j.at("pair_id").get<std::string>();
    p.question_id = j.at("question_id").get<std::string>();
    p.person_id = j.at("person_id").get<std::string>();
    p.slot0 = j.at("slot0").get<std::string>();
    p.slot1 = j.at("slot1").get<std::string>();
    p.truth_slot = j.at("truth_slot").get<int>();
    p.baseline_id = j.at("baseline_id").get<std::string>();
    if (p.truth_slot != 0 && p.truth_slot != 1) throw Error(ErrorKind::kParseError, "truth_slot must be 0 or 1");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("malformed pair: ") + e.what());
  }
}

std::vector<EvaluationPair> make_pairs(const ResponseStore& store, const Exam& exam,
                                       std::span<const std::string> baselines,
                                       const std::optional<std::map<std::string, std::string>>& assignment,
                                       std::uint64_t seed) {
  std::vector<std::string> pool(baselines.begin(), baselines.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (!assignment && pool.empty()) {
    throw Error(ErrorKind::kMissingResponse, "no baselines to pair with for " + exam.person_id);
  }

  SeededRng rng(derive_seed(seed, "pairs:" + exam.person_id));
  std::vector<EvaluationPair> pairs;
  for (std::size_t i = 0; i < exam.questions.size(); ++i) {
    const Question& q = exam.questions[i];
    std::string baseline;
    if (assignment) {
      auto it = assignment->find(q.question_id);
      if (it == assignment->end()) {
        throw Error(ErrorKind::kMissingResponse, "no baseline assigned to " + q.question_id,
                    {q.question_id, ""});
      }
      baseline = it->second;
    } else {
      baseline = pool[rng.uniform_index(pool.size())];
    }
    const ResponseRecord* human = store.find(exam.person_id, q.question_id, kHumanSource);
    if (human == nullptr) {
      throw Error(ErrorKind::kMissingResponse, "no human answer to " + q.question_id,
                  {q.question_id, std::string(kHumanSource)});
    }
    const ResponseRecord* machine = store.find(exam.person_id, q.question_id, baseline);
    if (machine == nullptr) {
      throw Error(ErrorKind::kMissingResponse, "no " + baseline + " answer to " + q.question_id,
                  {q.question_id, baseline});
    }
    EvaluationPair p;
    p.question_id = q.question_id;
    p.person_id = exam.person_id;
    p.baseline_id = baseline;
    p.truth_slot = rng.coin();
    p.slot0 = p.truth_slot == 0 ? human->response_id : machine->response_id;
    p.slot1 = p.truth_slot == 0 ? machine->response_id : human->response_id;
    p.pair_id = short_id("p", {std::to_string(seed), exam.exam_id, q.question_id, std::to_string(i)}, 12);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

nlohmann::json blinded_pairs_json(std::span<const EvaluationPair> pairs, const ResponseStore& store,
                                  const Exam& exam) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : pairs) {
    out.push_back({{"pair_id", p.pair_id},
                   {"question_text", exam.question(p.question_id).text},
                   {"answer_a", store.by_id(p.slot0).normalized},
                   {"answer_b", store.by_id(p.slot1).normalized}});
  }
  return out;
}

}  // namespace roleeval
