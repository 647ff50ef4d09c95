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

// roleeval command-line tool. Commands operate on a run directory holding
// profiles.json, questions.json, exams.json, responses.json, baselines.json,
// personas.json and the verdict logs.

#include <chrono>
#include <fstream>
#include <memory>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "roleeval/analytics.hpp"
#include "roleeval/collection.hpp"
#include "roleeval/error.hpp"
#include "roleeval/evalservice.hpp"
#include "roleeval/judge.hpp"
#include "roleeval/llmclient.hpp"
#include "roleeval/pipeline.hpp"
#include "roleeval/profile.hpp"
#include "roleeval/providers.hpp"
#include "roleeval/questionbank.hpp"
#include "roleeval/roleplay.hpp"

namespace fs = std::filesystem;
using namespace roleeval;

namespace {

struct Globals {
  fs::path run = ".";
  std::string cache_dir;
  std::string provider = "synthetic";
  std::optional<std::int64_t> timestamp;
};

std::int64_t now_or(const Globals& g) {
  if (g.timestamp) return *g.timestamp;
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::unique_ptr<ChatClient> make_client(const Globals& g) {
  ClientOptions options;
  if (!g.cache_dir.empty()) options.cache_dir = g.cache_dir;
  auto client = std::make_unique<ChatClient>(options);
  for (const char* id : {"openai", "gemini", "synthetic"}) client->register_provider(id, make_provider(id));
  return client;
}

ModelSpec model_arg(const Globals& g, const std::string& model, double temperature) {
  ModelSpec spec;
  spec.provider_id = g.provider;
  spec.model_id = model;
  spec.temperature = temperature;
  return spec;
}

std::vector<PersonProfile> load_valid_profiles(const fs::path& path) {
  LoadedProfiles loaded = load_profiles(path);
  for (const auto& r : loaded.rejects) {
    std::cerr << "skipping profile #" << r.index << " (" << r.person_id << "): " << r.report.size()
              << " violation(s)\n";
  }
  return loaded.profiles;
}

std::vector<Exam> load_exams(const fs::path& path) {
  std::vector<Exam> exams;
  if (!fs::exists(path)) return exams;
  for (const auto& j : read_json(path)) exams.push_back(exam_from_json(j));
  return exams;
}

void save_exams(const fs::path& path, const std::vector<Exam>& exams) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : exams) out.push_back(to_json(e));
  write_json_file(path, out);
}

const Exam& exam_for(const std::vector<Exam>& exams, const std::string& person) {
  for (const auto& e : exams) {
    if (e.person_id == person) return e;
  }
  throw Error(ErrorKind::kInvalidArgument, "no exam for person " + person);
}

ResponseStore load_store(const fs::path& path) {
  return fs::exists(path) ? ResponseStore::load(path) : ResponseStore{};
}

std::vector<BaselineSpec> load_baselines(const fs::path& path, const std::string& provider) {
  if (path.empty()) return default_baselines(provider);
  std::vector<BaselineSpec> out;
  for (const auto& j : read_json(path)) out.push_back(baseline_from_json(j));
  return out;
}

std::vector<std::string> run_baselines(const fs::path& run) {
  return read_json(run / "baselines.json").get<std::vector<std::string>>();
}

void append_lines(const fs::path& path, const std::string& lines) {
  std::string existing;
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    existing.assign(std::istreambuf_iterator<char>(in), {});
  }
  write_text_file(path, existing + lines);
}

MisspellingDictionary dictionary_arg(const std::string& path) {
  return path.empty() ? MisspellingDictionary{} : MisspellingDictionary::load(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turing-test harness for role-playing persona models"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--run", g.run, "Run directory")->capture_default_str();
  app.add_option("--cache-dir", g.cache_dir, "Completion cache directory");
  app.add_option("--provider", g.provider, "Provider for question generation and judges (openai, gemini, synthetic)")
      ->capture_default_str();
  app.add_option("--timestamp", g.timestamp, "Fixed unix time stamped on new records");

  // profile
  auto* profile = app.add_subcommand("profile", "Validate or render background profiles");
  profile->require_subcommand(1);
  std::string profiles_file;
  auto* p_validate = profile->add_subcommand("validate", "Check profiles against the 10-item schema");
  p_validate->add_option("file", profiles_file, "Profiles JSON")->required();
  auto* p_render = profile->add_subcommand("render", "Print the background block for one person");
  std::string person;
  p_render->add_option("file", profiles_file, "Profiles JSON")->required();
  p_render->add_option("--person", person)->required();

  // questions
  auto* questions = app.add_subcommand("questions", "Generate, filter and assemble exam questions");
  questions->require_subcommand(1);
  int general_count = 6, specific_count = 4;
  std::string question_model = "gpt-4";
  auto* q_gen = questions->add_subcommand("gen", "Generate candidate questions into questions.json");
  q_gen->add_option("--general", general_count, "Candidates per general category")->capture_default_str();
  q_gen->add_option("--specific", specific_count, "Candidates per person and specific category")->capture_default_str();
  q_gen->add_option("--model", question_model)->capture_default_str();
  auto* q_filter = questions->add_subcommand("filter", "Apply screening rules to questions.json");
  std::string rules_file;
  q_filter->add_option("--rules", rules_file, "Filter rules JSON");
  auto* q_exam = questions->add_subcommand("exam", "Assemble one exam per person into exams.json");
  std::uint64_t seed = 0;
  q_exam->add_option("--seed", seed)->required();
  q_exam->add_option("--person", person, "Only this person");

  // roleplay
  auto* roleplay = app.add_subcommand("roleplay", "Build persona sessions and collect their answers");
  roleplay->require_subcommand(1);
  auto* r_build = roleplay->add_subcommand("build", "Construct persona sessions into personas.json");
  std::string baselines_file;
  r_build->add_option("--baselines", baselines_file, "Baseline specs JSON (default: the seven standard baselines)");
  auto* r_answer = roleplay->add_subcommand("answer", "Answer every exam question with every persona");
  std::string dictionary_file;
  r_answer->add_option("--dictionary", dictionary_file, "Misspelling dictionary JSON");

  // collect
  auto* collect = app.add_subcommand("collect", "Human answers and evaluation pairs");
  collect->require_subcommand(1);
  auto* c_import = collect->add_subcommand("import-human", "Import a person's answers into responses.json");
  std::string answers_file;
  c_import->add_option("--person", person)->required();
  c_import->add_option("answers", answers_file, "JSON array of {question_id, text}")->required();
  c_import->add_option("--dictionary", dictionary_file);
  auto* c_pair = collect->add_subcommand("pair", "Print evaluation pairs for a person");
  bool blinded = false;
  c_pair->add_option("--person", person)->required();
  c_pair->add_option("--seed", seed)->required();
  c_pair->add_flag("--blinded", blinded, "Print the evaluator-facing payload");
  auto* c_verdicts = collect->add_subcommand("verdicts", "Export complete evaluator sessions to human_verdicts.jsonl");
  std::string data_dir;
  c_verdicts->add_option("--data-dir", data_dir, "Evaluation service data directory (default: <run>/evalservice)");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the evaluation session service");
  std::string config_file, bind_address = "127.0.0.1";
  int port = 8080;
  serve->add_option("--config", config_file, "Server config JSON {bind_address, port, data_dir}");
  serve->add_option("--bind", bind_address)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--data-dir", data_dir, "Directory for the session log (default: <run>/evalservice)");

  // judge
  auto* judge = app.add_subcommand("judge", "LLM judges and the length control");
  judge->require_subcommand(1);
  std::string mode_text = "identify-human", judge_model = "gpt-4";
  int iterations = 3;
  auto* j_run = judge->add_subcommand("run", "Run an LLM judge over every person's forms");
  j_run->add_option("--mode", mode_text)->check(CLI::IsMember({"identify-human", "identify-nonhuman"}))->capture_default_str();
  j_run->add_option("--judge", judge_model)->capture_default_str();
  j_run->add_option("--seed", seed)->required();
  j_run->add_option("--iterations", iterations)->capture_default_str();
  auto* j_control = judge->add_subcommand("control", "Apply the always-longer control model");
  j_control->add_option("--mode", mode_text)->check(CLI::IsMember({"identify-human", "identify-nonhuman"}))->capture_default_str();
  j_control->add_option("--seed", seed)->required();

  // report
  auto* report = app.add_subcommand("report", "Tables, radar data and bias metrics");
  report->require_subcommand(1);
  auto* rep_tables = report->add_subcommand("tables", "Write success-rate tables and print them");
  auto* rep_radar = report->add_subcommand("radar", "Write and print radar data");
  auto* rep_bias = report->add_subcommand("bias", "Write and print the bias report");

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage from a config file");
  pipeline->add_option("--config", config_file)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path run = g.run;
    if (p_validate->parsed()) {
      LoadedProfiles loaded = load_profiles(profiles_file);
      for (const auto& r : loaded.rejects) {
        std::cout << "REJECT #" << r.index << " " << r.person_id << "\n";
        for (const auto& v : r.report) std::cout << "  " << v.code << " " << v.key << ": " << v.message << "\n";
      }
      std::cout << loaded.profiles.size() << " valid, " << loaded.rejects.size() << " rejected\n";
      return loaded.rejects.empty() ? 0 : 1;
    }
    if (p_render->parsed()) {
      auto profiles = load_valid_profiles(profiles_file);
      std::cout << render_background(find_profile(profiles, person));
      return 0;
    }
    if (q_gen->parsed()) {
      auto client_ptr = make_client(g);
      ChatClient& client = *client_ptr;
      ModelSpec model = model_arg(g, question_model, 0.7);
      auto profiles = load_valid_profiles(run / "profiles.json");
      std::vector<Question> pool;
      for (auto category : all_question_categories()) {
        std::vector<Question> qs;
        if (scope_of(category) == QuestionScope::kGeneral) {
          qs = generate_general_questions(client, model, category, general_count);
        } else {
          for (const auto& p : profiles) {
            auto more = generate_specific_questions(client, model, p, category, specific_count);
            qs.insert(qs.end(), more.begin(), more.end());
          }
        }
        pool.insert(pool.end(), qs.begin(), qs.end());
      }
      save_question_pool(run / "questions.json", pool);
      std::cout << pool.size() << " candidates written\n";
      return 0;
    }
    if (q_filter->parsed()) {
      FilterConfig rules = rules_file.empty() ? FilterConfig{} : FilterConfig::load(rules_file);
      auto pool = filter_questions(load_question_pool(run / "questions.json"), rules);
      save_question_pool(run / "questions.json", pool);
      std::size_t accepted = 0;
      for (const auto& q : pool) accepted += q.status == QuestionStatus::kAccepted ? 1 : 0;
      std::cout << accepted << " accepted, " << pool.size() - accepted << " excluded\n";
      return 0;
    }
    if (q_exam->parsed()) {
      auto pool = load_question_pool(run / "questions.json");
      auto exams = load_exams(run / "exams.json");
      std::vector<std::string> persons;
      if (!person.empty()) {
        persons.push_back(person);
      } else {
        for (const auto& p : load_valid_profiles(run / "profiles.json")) persons.push_back(p.person_id);
      }
      for (const auto& id : persons) {
        std::erase_if(exams, [&](const Exam& e) { return e.person_id == id; });
        exams.push_back(assemble_exam(id, pool, seed));
        std::cout << exams.back().exam_id << "\n";
      }
      save_exams(run / "exams.json", exams);
      return 0;
    }
    if (r_build->parsed()) {
      auto client_ptr = make_client(g);
      ChatClient& client = *client_ptr;
      auto baselines = load_baselines(baselines_file, g.provider);
      nlohmann::json ids = nlohmann::json::array();
      for (const auto& b : baselines) {
        validate_baseline(b);
        ids.push_back(b.baseline_id);
      }
      nlohmann::json personas = nlohmann::json::array();
      for (const auto& p : load_valid_profiles(run / "profiles.json")) {
        for (const auto& b : baselines) personas.push_back(to_json(build_session(client, b, p)));
      }
      write_json_file(run / "personas.json", personas);
      write_json_file(run / "baselines.json", ids);
      std::cout << personas.size() << " persona sessions written\n";
      return 0;
    }
    if (r_answer->parsed()) {
      auto client_ptr = make_client(g);
      ChatClient& client = *client_ptr;
      auto exams = load_exams(run / "exams.json");
      ResponseStore store = load_store(run / "responses.json");
      MisspellingDictionary dictionary = dictionary_arg(dictionary_file);
      std::size_t added = 0;
      for (const auto& j : read_json(run / "personas.json")) {
        PersonaSession persona = session_from_json(j);
        const Exam& exam = exam_for(exams, persona.person_id);
        for (const auto& q : exam.questions) {
          if (store.find(persona.person_id, q.question_id, persona.baseline_id)) continue;
          store.add(answer_question(client, persona, q, dictionary, now_or(g)));
          ++added;
        }
      }
      store.save(run / "responses.json");
      std::cout << added << " answers added\n";
      return 0;
    }
    if (c_import->parsed()) {
      auto exams = load_exams(run / "exams.json");
      ResponseStore store = load_store(run / "responses.json");
      auto records = import_human_responses(fs::path(answers_file), exam_for(exams, person), dictionary_arg(dictionary_file),
                                            now_or(g));
      for (auto& r : records) store.add(std::move(r));
      store.save(run / "responses.json");
      std::cout << records.size() << " human answers imported\n";
      return 0;
    }
    if (c_pair->parsed()) {
      auto exams = load_exams(run / "exams.json");
      const Exam& exam = exam_for(exams, person);
      ResponseStore store = ResponseStore::load(run / "responses.json");
      auto baselines = store.baselines_for(person);
      auto pairs = make_pairs(store, exam, baselines, std::nullopt, seed);
      if (blinded) {
        std::cout << blinded_pairs_json(pairs, store, exam).dump(2) << "\n";
      } else {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& p : pairs) out.push_back(to_json(p));
        std::cout << out.dump(2) << "\n";
      }
      return 0;
    }
    if (c_verdicts->parsed()) {
      fs::path dir = data_dir.empty() ? run / "evalservice" : fs::path(data_dir);
      EvalService service(ResponseStore::load(run / "responses.json"), load_exams(run / "exams.json"),
                          dir / "sessions.jsonl");
      std::string lines;
      nlohmann::json records = service.verdict_records();
      for (const auto& r : records) lines += r.dump() + "\n";
      write_text_file(run / "human_verdicts.jsonl", lines);
      std::cout << records.size() << " complete sessions exported\n";
      return 0;
    }
    if (serve->parsed()) {
      EvalServerConfig cfg;
      if (!config_file.empty()) {
        cfg = EvalServerConfig::load(config_file);
      } else {
        cfg.bind_address = bind_address;
        cfg.port = port;
        cfg.data_dir = data_dir.empty() ? run / "evalservice" : fs::path(data_dir);
      }
      EvalService service(ResponseStore::load(run / "responses.json"), load_exams(run / "exams.json"),
                          cfg.data_dir / "sessions.jsonl");
      EvalHttpServer server(service);
      if (!server.bind(cfg.bind_address, cfg.port)) {
        std::cerr << "cannot bind " << cfg.bind_address << ":" << cfg.port << "\n";
        return 1;
      }
      std::cerr << "serving on http://" << cfg.bind_address << ":" << cfg.port << "\n";
      return server.listen_after_bind() ? 0 : 1;
    }
    if (j_run->parsed() || j_control->parsed()) {
      JudgeMode mode = mode_from_name(mode_text);
      auto exams = load_exams(run / "exams.json");
      ResponseStore store = ResponseStore::load(run / "responses.json");
      auto baselines = run_baselines(run);
      auto profiles = load_valid_profiles(run / "profiles.json");
      std::unique_ptr<ChatClient> client;
      if (j_run->parsed()) client = make_client(g);
      std::string lines;
      int failed = 0;
      for (const auto& exam : exams) {
        const PersonProfile& profile = find_profile(profiles, exam.person_id);
        for (const auto& form : build_judge_forms(store, exam, baselines, seed)) {
          if (j_control->parsed()) {
            lines += verdict_log_record(form, run_control(form, mode), "control").dump() + "\n";
            continue;
          }
          JudgeRunConfig rc;
          rc.n_persons = static_cast<int>(exams.size());
          rc.m_baselines = static_cast<int>(baselines.size());
          rc.l_questions = static_cast<int>(form.items.size());
          rc.iterations = iterations;
          rc.mode = mode;
          rc.judge_model = model_arg(g, judge_model, 0.0);
          rc.seed = seed;
          try {
            JudgeRunResult result = run_judge(*client, rc, form, render_background(profile));
            failed += result.failed_iterations;
            for (const auto& v : result.verdicts) lines += verdict_log_record(form, v, judge_model).dump() + "\n";
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::kJudgeParseError) throw;
            failed += iterations;
            std::cerr << e.what() << "\n";
          }
        }
      }
      append_lines(run / "judge_verdicts.jsonl", lines);
      if (failed > 0) std::cerr << failed << " form-iteration(s) failed to parse and were excluded\n";
      return 0;
    }
    if (rep_tables->parsed() || rep_radar->parsed() || rep_bias->parsed()) {
      auto written = write_reports(run);
      for (const auto& path : written) {
        std::string ext = path.extension().string();
        std::string name = path.filename().string();
        bool show = (rep_tables->parsed() && ext == ".txt") || (rep_radar->parsed() && name == "radar.json") ||
                    (rep_bias->parsed() && name == "bias.json");
        if (!show) continue;
        std::ifstream in(path);
        std::cout << "== " << path.string() << "\n" << in.rdbuf() << "\n";
      }
      if (rep_bias->parsed() && !fs::exists(run / "reports" / "bias.json")) {
        std::cerr << "no control verdicts; run `judge control` first\n";
        return 1;
      }
      return 0;
    }
    if (pipeline->parsed()) {
      PipelineConfig cfg = PipelineConfig::load(config_file);
      auto client = make_client(g);
      PipelineSummary s = run_pipeline(*client, cfg);
      std::cout << s.persons << " persons, " << s.rejected_profiles << " rejected, " << s.responses << " responses, "
                << s.evaluator_sessions << " evaluator sessions, " << s.judge_verdict_sets << " judge verdict sets, "
                << s.judge_failed_iterations << " failed iterations\n";
      for (const auto& f : s.files) std::cout << "  " << (cfg.output_dir / f).string() << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << error_kind_name(e.kind()) << ": " << e.what() << "\n";
    for (const auto& d : e.details()) std::cerr << "  " << d << "\n";
    return 2;
  }
  return 0;
}
