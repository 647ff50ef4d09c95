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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "roleeval/analytics.hpp"
#include "roleeval/collection.hpp"
#include "roleeval/error.hpp"
#include "roleeval/judge.hpp"
#include "roleeval/llmclient.hpp"
#include "roleeval/pipeline.hpp"
#include "roleeval/profile.hpp"
#include "roleeval/providers.hpp"

namespace py = pybind11;
using namespace roleeval;

namespace {

std::vector<ChatMessage> to_messages(const std::vector<std::pair<std::string, std::string>>& messages) {
  std::vector<ChatMessage> out;
  for (const auto& [role, content] : messages) out.push_back({role_from_name(role), content});
  return out;
}

}  // namespace

PYBIND11_MODULE(_roleeval, m) {
  m.doc() = "Core operations of the roleeval harness";

  static py::exception<Error> error_type(m, "RoleevalError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::tuple args = py::make_tuple(std::string(error_kind_name(e.kind())), e.what(), e.details());
      PyErr_SetObject(error_type.ptr(), args.ptr());
    }
  });

  m.def(
      "normalize_response",
      [](const std::string& text, const std::map<std::string, std::string>& dictionary) {
        return normalize_response(text, MisspellingDictionary(dictionary));
      },
      py::arg("text"), py::arg("dictionary") = std::map<std::string, std::string>{});

  m.def("aggregate_overall", [](const std::vector<double>& cells) { return aggregate_overall(cells); },
        py::arg("cells"));
  m.def("round_display", &round_display, py::arg("percent"));
  m.def("instruction_bias_disparity", &instruction_bias_disparity, py::arg("rate_identify_human"),
        py::arg("rate_identify_nonhuman"));
  m.def(
      "length_bias_correlation",
      [](const std::vector<double>& judge, const std::vector<double>& control) {
        Correlation c = length_bias_correlation(judge, control);
        return py::make_tuple(c.r, c.points);
      },
      py::arg("judge_rates"), py::arg("control_rates"));
  m.def("wilson_interval", &wilson_interval, py::arg("successes"), py::arg("total"));

  m.def(
      "control_model_select",
      [](const std::string& answer0, const std::string& answer1, const std::string& mode) {
        JudgeItem item;
        item.answer0 = answer0;
        item.answer1 = answer1;
        return control_model_select(item, mode_from_name(mode));
      },
      py::arg("answer0"), py::arg("answer1"), py::arg("mode") = "identify_human");
  m.def(
      "parse_judge_output",
      [](const std::string& text, std::size_t count) { return parse_judge_output(text, count); },
      py::arg("text"), py::arg("question_count"));

  m.def(
      "validate_profile_json",
      [](const std::string& json_text) {
        PersonProfile profile = profile_from_json(nlohmann::json::parse(json_text));
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& v : validate_profile(profile)) out.emplace_back(v.code, v.key, v.message);
        return out;
      },
      py::arg("profile_json"));
  m.def(
      "render_background_json",
      [](const std::string& json_text) { return render_background(profile_from_json(nlohmann::json::parse(json_text))); },
      py::arg("profile_json"));

  m.def(
      "cache_key",
      [](const std::string& spec_json, const std::vector<std::pair<std::string, std::string>>& messages,
         int replicate) {
        std::vector<ChatMessage> msgs = to_messages(messages);
        return CacheKey::of(model_spec_from_json(nlohmann::json::parse(spec_json)), msgs, replicate).digest;
      },
      py::arg("spec_json"), py::arg("messages"), py::arg("replicate") = 0);

  m.def(
      "success_rate_json",
      [](const std::string& records_json, const std::vector<std::string>& baseline_order) {
        auto observations = observations_from_records(nlohmann::json::parse(records_json));
        return to_json(success_rate(observations, GroupBy::kBaselineCategory, baseline_order)).dump();
      },
      py::arg("records_json"), py::arg("baseline_order") = std::vector<std::string>{});

  m.def(
      "run_pipeline",
      [](const std::string& config_path) {
        PipelineConfig config = PipelineConfig::load(config_path);
        ChatClient client;
        for (const char* id : {"openai", "gemini", "synthetic"}) client.register_provider(id, make_provider(id));
        PipelineSummary s;
        {
          py::gil_scoped_release release;
          s = run_pipeline(client, config);
        }
        py::dict out;
        out["persons"] = s.persons;
        out["rejected_profiles"] = s.rejected_profiles;
        out["responses"] = s.responses;
        out["evaluator_sessions"] = s.evaluator_sessions;
        out["judge_verdict_sets"] = s.judge_verdict_sets;
        out["judge_failed_iterations"] = s.judge_failed_iterations;
        std::vector<std::string> files;
        for (const auto& f : s.files) files.push_back(f.string());
        out["files"] = files;
        return out;
      },
      py::arg("config_path"));
}
