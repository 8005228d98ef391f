// Copyright 2026 The wmdrive Authors
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

#include <CLI11.hpp>

#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "wmdrive/cli/commands.hpp"
#include "wmdrive/eval/live_client.hpp"

namespace {

using namespace wmdrive;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> model;
  std::optional<std::string> frames;
  std::optional<std::string> category;
  std::optional<int> jobs;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "run configuration (JSON)");
  app->add_option("--seed", f.seed, "global seed");
  app->add_option("--out", f.out, "output root");
  app->add_option("--model", f.model, "oracle | adversarial | scripted[:tag] | live[:model]");
  app->add_option("--frames", f.frames, "frame counts, e.g. 3,6,9");
  app->add_option("--category", f.category, "comma-separated categories");
  app->add_option("--jobs", f.jobs, "worker threads (0 = all cores)");
}

cli::RunConfig resolve(const CommonFlags& f) {
  cli::RunConfig cfg = f.config.empty() ? cli::RunConfig{} : cli::load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  cfg.suite.seed = cfg.seed;
  if (f.out) cfg.out = *f.out;
  if (f.model) cli::apply_model_flag(cfg, *f.model);
  if (f.frames) cfg.suite.frame_counts = cli::parse_int_list(*f.frames);
  if (f.category) cfg.suite.categories = cli::parse_name_list(*f.category);
  if (f.jobs) cfg.jobs = *f.jobs;
  cli::validate_config(cfg);
  return cfg;
}

std::unique_ptr<eval::ModelClient> make_client(const cli::RunConfig& cfg) {
  const auto& m = cfg.model;
  if (m.kind == "oracle") return std::make_unique<eval::OracleClient>();
  if (m.kind == "adversarial") return std::make_unique<eval::AdversarialClient>();
  if (m.kind == "scripted") {
    if (m.responses.empty()) throw Error(ErrorKind::config, "scripted model needs model.responses");
    return std::make_unique<eval::ScriptedClient>(
        eval::ScriptedClient::from_jsonl(m.responses, m.tag.empty() ? "scripted" : m.tag));
  }
  return std::make_unique<eval::LiveClient>(m.live);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driving scenario generator and multimodal model evaluation harness"};
  app.set_version_flag("--version", std::string(wmdrive::kVersion));
  app.require_subcommand(1);

  CommonFlags gen_f, eval_f, score_f, report_f, probe_f;
  auto* gen = app.add_subcommand("gen", "simulate and render the scenario suite");
  add_common(gen, gen_f);

  auto* ev = app.add_subcommand("eval", "query a model on every manifest record");
  add_common(ev, eval_f);
  bool resume = false;
  std::string responses;
  ev->add_flag("--resume", resume, "skip records already in the response log");
  ev->add_option("--responses", responses, "scripted responses (JSONL)");

  std::string log_path, manifest_path, report_path;
  auto* sc = app.add_subcommand("score", "score the response log and write report files");
  add_common(sc, score_f);
  auto* rp = app.add_subcommand("report", "score and print the accuracy summary tables");
  add_common(rp, report_f);
  for (auto* sub : {sc, rp}) {
    sub->add_option("--log", log_path, "response log (default <out>/eval/responses.jsonl)");
    sub->add_option("--manifest", manifest_path, "manifest (default <out>/dataset/manifest.json)");
    sub->add_option("--report-dir", report_path, "report directory (default <out>/report)");
  }

  auto* pr = app.add_subcommand("probe", "regenerate one scenario with a probe element");
  add_common(pr, probe_f);
  std::string scenario, probe_name;
  pr->add_option("--scenario", scenario, "scenario id")->required();
  pr->add_option("--probe", probe_name, "add_barrier_backward | add_reference_vehicle")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      const auto cfg = resolve(gen_f);
      const auto m = cli::cmd_gen(cfg);
      std::cout << fmt::format("wrote {} records to {}\n", m.records.size(), cfg.manifest_path().string());
      return 0;
    }
    if (ev->parsed()) {
      auto cfg = resolve(eval_f);
      if (!responses.empty()) cfg.model.responses = responses;
      auto client = make_client(cfg);
      const auto s = cli::cmd_eval(cfg, *client, resume, cfg.model.kind == "live", &std::cerr);
      std::cout << fmt::format("queried {} skipped {} failed {} -> {}\n", s.queried, s.skipped, s.failures.size(),
                               cfg.log_path().string());
      return s.failures.empty() ? 0 : cli::exit_code(ErrorKind::transport);
    }
    if (sc->parsed() || rp->parsed()) {
      const auto cfg = resolve(sc->parsed() ? score_f : report_f);
      const std::filesystem::path log = log_path.empty() ? cfg.log_path() : std::filesystem::path(log_path);
      const std::filesystem::path man =
          manifest_path.empty() ? cfg.manifest_path() : std::filesystem::path(manifest_path);
      const std::filesystem::path dir = report_path.empty() ? cfg.report_dir() : std::filesystem::path(report_path);
      const auto report = cli::cmd_score(log, man, dir);
      cli::write_run_meta(cfg, sc->parsed() ? "score" : "report");
      if (rp->parsed()) {
        const auto table = cli::summary_table(report);
        eval::detail::write_text(dir / "summary.md", table);
        std::cout << table;
      } else {
        std::cout << fmt::format("scored {} records ({} unparseable) -> {}\n", report.record_count,
                                 report.unparseable_count, dir.string());
      }
      return 0;
    }
    if (pr->parsed()) {
      const auto cfg = resolve(probe_f);
      scenarios::ProbeVariant probe;
      try {
        probe = nlohmann::json(probe_name).get<scenarios::ProbeVariant>();
      } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::config, "unknown probe " + probe_name);
      }
      if (nlohmann::json(probe).get<std::string>() != probe_name) {
        throw Error(ErrorKind::config, "unknown probe " + probe_name);
      }
      const auto added = cli::cmd_probe(cfg, scenario, probe);
      std::cout << fmt::format("added {} probe records for {}\n", added.records.size(), scenario);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
