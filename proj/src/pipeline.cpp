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

#include "roleeval/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "roleeval/analytics.hpp"
#include "roleeval/error.hpp"
#include "roleeval/evalservice.hpp"
#include "roleeval/judge.hpp"
#include "roleeval/profile.hpp"
#include "roleeval/rng.hpp"
#include "roleeval/templates.hpp"
#include "roleeval/text.hpp"

namespace roleeval {

namespace {

constexpr const char* kJudgeLog = "judge_verdicts.jsonl";
constexpr const char* kHumanLog = "human_verdicts.jsonl";
constexpr const char* kControlLabel = "control";

std::string simulated_human_answer(const PersonProfile& profile, const Question& q) {
  std::uint64_t pick = derive_seed(0, profile.person_id + "/" + q.question_id);
  const auto& item = profile.items[pick % profile.items.size()];
  std::istringstream words(item.answer_text);
  std::string word, out;
  int n = 0;
  while (words >> word && n < 60) {
    out += (out.empty() ? "" : " ") + word;
    ++n;
  }
  return out;
}

void append_jsonl(std::string& buffer, const nlohmann::json& record) { buffer += record.dump() + "\n"; }

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

ModelSpec judge_spec(const std::string& provider, const std::string& model) {
  ModelSpec spec;
  spec.provider_id = provider;
  spec.model_id = model;
  return spec;
}

ModelSpec question_spec(const std::string& provider) {
  ModelSpec spec = judge_spec(provider, "gpt-4");
  spec.temperature = 0.7;
  return spec;
}

}  // namespace

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
}

std::vector<BaselineSpec> default_baselines(const std::string& provider_id) {
  return {
      make_baseline("RPP-gpt-3.5", StrategyKind::kRPP, provider_id, "gpt-3.5-turbo"),
      make_baseline("RoleGPT-gpt-3.5", StrategyKind::kRoleGPT, provider_id, "gpt-3.5-turbo"),
      make_baseline("Juliet-gpt-3.5", StrategyKind::kJuliet, provider_id, "gpt-3.5-turbo"),
      make_baseline("RPP-gpt-4", StrategyKind::kRPP, provider_id, "gpt-4"),
      make_baseline("RoleGPT-gpt-4", StrategyKind::kRoleGPT, provider_id, "gpt-4"),
      make_baseline("Juliet-gpt-4", StrategyKind::kJuliet, provider_id, "gpt-4"),
      make_baseline("GPTs", StrategyKind::kGPTsBuilder, provider_id, "gpt-4"),
  };
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  try {
    c.profiles_path = resolve(base_dir, j.at("profiles").get<std::string>());
    c.output_dir = resolve(base_dir, j.value("output_dir", std::string("run")));
    c.seed = j.value("seed", std::uint64_t{0});
    c.timestamp = j.value("timestamp", std::int64_t{0});
    c.iterations = j.value("iterations", 3);
    c.general_candidates = j.value("general_candidates", 6);
    c.specific_candidates = j.value("specific_candidates", 4);
    c.simulated_evaluators = j.value("simulated_evaluators", 0);
    const std::string provider = j.value("provider", std::string("synthetic"));
    if (j.contains("baselines")) {
      for (const auto& b : j.at("baselines")) c.baselines.push_back(baseline_from_json(b));
    } else {
      c.baselines = default_baselines(provider);
    }
    if (j.contains("judges")) {
      for (const auto& m : j.at("judges")) c.judges.push_back(model_spec_from_json(m));
    } else {
      c.judges = {judge_spec(provider, "gpt-4"), judge_spec(provider, "gpt-4-turbo"), judge_spec(provider, "gemini-pro")};
    }
    c.question_model = j.contains("question_model") ? model_spec_from_json(j.at("question_model"))
                                                    : question_spec(provider);
    if (j.contains("filter")) c.filter = FilterConfig::from_json(j.at("filter"));
    if (j.contains("dictionary")) {
      const auto& d = j.at("dictionary");
      c.dictionary = d.is_string() ? MisspellingDictionary::load(resolve(base_dir, d.get<std::string>()))
                                   : MisspellingDictionary::from_json(d);
    }
    if (j.contains("human_answers")) c.human_answers_path = resolve(base_dir, j.at("human_answers").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfigError, std::string("bad pipeline config: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  return from_json(read_json(path), path.parent_path());
}

PipelineSummary run_pipeline(ChatClient& client, const PipelineConfig& config) {
  if (config.baselines.empty()) throw Error(ErrorKind::kInvalidArgument, "no baselines configured");
  for (const auto& b : config.baselines) validate_baseline(b);
  const std::filesystem::path out = config.output_dir;
  std::filesystem::create_directories(out);
  PipelineSummary summary;

  // Profiles.
  LoadedProfiles loaded = load_profiles(config.profiles_path);
  std::vector<PersonProfile> profiles = loaded.profiles;
  summary.persons = profiles.size();
  summary.rejected_profiles = loaded.rejects.size();
  if (profiles.empty()) throw Error(ErrorKind::kInvalidProfile, "no valid profiles in " + config.profiles_path.string());
  save_profiles(out / "profiles.json", profiles);
  nlohmann::json rejects = nlohmann::json::array();
  for (const auto& r : loaded.rejects) {
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : r.report) violations.push_back({{"key", v.key}, {"code", v.code}, {"message", v.message}});
    rejects.push_back({{"index", r.index}, {"person_id", r.person_id}, {"violations", violations}});
  }
  write_json_file(out / "profile_rejects.json", rejects);

  // Question pool and exams.
  std::vector<Question> candidates;
  for (auto category : all_question_categories()) {
    if (scope_of(category) != QuestionScope::kGeneral) continue;
    auto qs = generate_general_questions(client, config.question_model, category, config.general_candidates);
    candidates.insert(candidates.end(), qs.begin(), qs.end());
  }
  for (const auto& profile : profiles) {
    for (auto category : all_question_categories()) {
      if (scope_of(category) != QuestionScope::kSpecific) continue;
      auto qs = generate_specific_questions(client, config.question_model, profile, category,
                                            config.specific_candidates);
      candidates.insert(candidates.end(), qs.begin(), qs.end());
    }
  }
  std::vector<Question> pool = filter_questions(std::move(candidates), config.filter);
  save_question_pool(out / "questions.json", pool);
  std::vector<Exam> exams;
  nlohmann::json exams_json = nlohmann::json::array();
  for (const auto& profile : profiles) {
    exams.push_back(assemble_exam(profile.person_id, pool, config.seed));
    exams_json.push_back(to_json(exams.back()));
  }
  write_json_file(out / "exams.json", exams_json);

  // Human answers.
  ResponseStore store;
  std::optional<nlohmann::json> human_file;
  if (config.human_answers_path) human_file = read_json(*config.human_answers_path);
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    std::vector<ResponseRecord> records;
    if (human_file) {
      if (!human_file->contains(profiles[p].person_id)) {
        throw Error(ErrorKind::kMissingAnswers, "no human answers for " + profiles[p].person_id);
      }
      records = import_human_responses(human_file->at(profiles[p].person_id), exams[p], config.dictionary,
                                       config.timestamp);
    } else {
      for (const auto& q : exams[p].questions) {
        records.push_back(make_response(profiles[p].person_id, q.question_id, kHumanSource,
                                        simulated_human_answer(profiles[p], q), config.dictionary,
                                        config.timestamp));
      }
    }
    for (auto& r : records) store.add(std::move(r));
  }

  // Personas and machine answers.
  nlohmann::json personas = nlohmann::json::array();
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    for (const auto& baseline : config.baselines) {
      PersonaSession persona = build_session(client, baseline, profiles[p]);
      for (const auto& q : exams[p].questions) {
        store.add(answer_question(client, persona, q, config.dictionary, config.timestamp));
      }
      personas.push_back(to_json(persona));
    }
  }
  write_json_file(out / "personas.json", personas);
  store.save(out / "responses.json");
  summary.responses = store.records().size();

  std::vector<std::string> baseline_ids;
  for (const auto& b : config.baselines) baseline_ids.push_back(b.baseline_id);
  write_json_file(out / "baselines.json", baseline_ids);

  // Simulated evaluator cohort through the session service.
  std::string human_log;
  if (config.simulated_evaluators > 0) {
    std::filesystem::path log = out / "evalservice" / "sessions.jsonl";
    std::filesystem::remove(log);
    EvalService service(store, exams, log, [&] { return config.timestamp; });
    for (const auto& profile : profiles) {
      for (int e = 0; e < config.simulated_evaluators; ++e) {
        std::string token = "evaluator-" + std::to_string(e);
        EvaluatorSession s = service.create_session(profile.person_id, token, config.seed);
        SeededRng rng(derive_seed(config.seed, "evaluator:" + s.session_id));
        for (const auto& pair : s.pairs) service.submit_verdict(s.session_id, pair.pair_id, rng.coin());
        ++summary.evaluator_sessions;
      }
    }
    for (const auto& rec : service.verdict_records()) append_jsonl(human_log, rec);
  }
  write_text_file(out / kHumanLog, human_log);

  // Judge forms, LLM judges and the length control.
  std::string judge_log;
  nlohmann::json forms_json = nlohmann::json::array();
  nlohmann::json failures = nlohmann::json::array();
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const std::string background = render_background(profiles[p]);
    std::vector<JudgeForm> forms = build_judge_forms(store, exams[p], baseline_ids, config.seed);
    for (const auto& form : forms) {
      forms_json.push_back(to_json(form));
      for (JudgeMode mode : {JudgeMode::kIdentifyHuman, JudgeMode::kIdentifyNonhuman}) {
        for (const auto& judge_model : config.judges) {
          JudgeRunConfig rc;
          rc.n_persons = static_cast<int>(profiles.size());
          rc.m_baselines = static_cast<int>(baseline_ids.size());
          rc.l_questions = static_cast<int>(form.items.size());
          rc.iterations = config.iterations;
          rc.mode = mode;
          rc.judge_model = judge_model;
          rc.seed = config.seed;
          JudgeRunResult result;
          try {
            result = run_judge(client, rc, form, background);
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::kJudgeParseError) throw;
            failures.push_back({{"judge", judge_model.model_id}, {"form_id", form.form_id},
                                {"mode", mode_name(mode)}, {"message", e.what()}});
            summary.judge_failed_iterations += static_cast<std::size_t>(config.iterations);
            continue;
          }
          for (const auto& f : result.failures) {
            failures.push_back({{"judge", judge_model.model_id}, {"form_id", form.form_id},
                                {"mode", mode_name(mode)}, {"message", f}});
          }
          summary.judge_failed_iterations += static_cast<std::size_t>(result.failed_iterations);
          for (const auto& v : result.verdicts) {
            append_jsonl(judge_log, verdict_log_record(form, v, judge_model.model_id));
            ++summary.judge_verdict_sets;
          }
        }
        append_jsonl(judge_log, verdict_log_record(form, run_control(form, mode), kControlLabel));
      }
    }
  }
  write_json_file(out / "judge_forms.json", forms_json);
  write_text_file(out / kJudgeLog, judge_log);
  write_json_file(out / "judge_failures.json", failures);

  nlohmann::json judges = nlohmann::json::array();
  for (const auto& j : config.judges) judges.push_back(to_json(j));
  nlohmann::json baselines = nlohmann::json::array();
  for (const auto& b : config.baselines) baselines.push_back(to_json(b));
  write_json_file(out / "run_manifest.json",
                  {{"timestamp", config.timestamp},
                   {"seed", config.seed},
                   {"iterations", config.iterations},
                   {"baselines", baselines},
                   {"judges", judges},
                   {"templates", template_fingerprints()},
                   {"simulated_human_answers", !config.human_answers_path.has_value()},
                   {"simulated_evaluators", config.simulated_evaluators},
                   {"assumptions", {"human and machine answers are normalized with the same procedure"}},
                   {"judge_failed_iterations", summary.judge_failed_iterations}});

  write_reports(out);

  for (const auto& entry : std::filesystem::recursive_directory_iterator(out)) {
    if (entry.is_regular_file()) summary.files.push_back(std::filesystem::relative(entry.path(), out));
  }
  std::sort(summary.files.begin(), summary.files.end());
  return summary;
}

std::vector<std::filesystem::path> write_reports(const std::filesystem::path& run_dir) {
  std::vector<std::string> baselines;
  if (std::filesystem::exists(run_dir / "baselines.json")) {
    baselines = read_json(run_dir / "baselines.json").get<std::vector<std::string>>();
  }
  std::vector<Observation> observations;
  for (const char* log : {kHumanLog, kJudgeLog}) {
    if (!std::filesystem::exists(run_dir / log)) continue;
    auto obs = load_observations(run_dir / log);
    observations.insert(observations.end(), obs.begin(), obs.end());
  }
  if (observations.empty()) throw Error(ErrorKind::kEmptyGroup, "no verdicts in " + run_dir.string());

  // (judge, mode) -> observations
  std::map<std::pair<std::string, JudgeMode>, std::vector<Observation>> groups;
  for (const auto& o : observations) groups[{o.judge, o.mode}].push_back(o);

  const std::filesystem::path reports = run_dir / "reports";
  std::vector<std::filesystem::path> written;
  std::map<std::string, JudgeModeRates> rates;
  nlohmann::json radar = nlohmann::json::object();
  for (const auto& [key, obs] : groups) {
    const auto& [judge, mode] = key;
    SuccessRateTable table = success_rate(obs, GroupBy::kBaselineCategory, baselines);
    const std::string stem = judge + "." + std::string(mode_name(mode));
    write_text_file(reports / (stem + ".csv"), table_csv(table));
    write_text_file(reports / (stem + ".txt"), table_text(table));
    write_json_file(reports / (stem + ".json"), to_json(table));
    written.insert(written.end(), {reports / (stem + ".csv"), reports / (stem + ".txt"), reports / (stem + ".json")});
    radar[stem] = radar_json(table);

    JudgeModeRates& r = rates[judge];
    r.judge = judge;
    const auto& overall_row = table.cells.back();
    std::vector<double> per_baseline;
    for (std::size_t b = 0; b + 1 < overall_row.size(); ++b) {
      per_baseline.push_back(overall_row[b] ? overall_row[b]->percent : 0.0);
    }
    double overall = overall_row.back() ? overall_row.back()->percent : 0.0;
    if (mode == JudgeMode::kIdentifyHuman) {
      r.rate_identify_human = overall;
      r.per_baseline_human = per_baseline;
    } else {
      r.rate_identify_nonhuman = overall;
      r.per_baseline_nonhuman = per_baseline;
    }
  }
  write_json_file(reports / "radar.json", radar);
  written.push_back(reports / "radar.json");

  if (rates.contains(kControlLabel)) {
    std::vector<JudgeModeRates> judges;
    for (const auto& [name, r] : rates) {
      if (name != kControlLabel && name != std::string(kHumanSource)) judges.push_back(r);
    }
    BiasReport bias = make_bias_report(judges, rates.at(kControlLabel), baselines);
    write_json_file(reports / "bias.json", to_json(bias));
    written.push_back(reports / "bias.json");
  }
  return written;
}

}  // namespace roleeval
