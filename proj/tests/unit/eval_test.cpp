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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "prop.hpp"
#include "wmdrive/eval/client.hpp"
#include "wmdrive/eval/live_client.hpp"
#include "wmdrive/eval/parse.hpp"
#include "wmdrive/eval/prompt.hpp"
#include "wmdrive/eval/report.hpp"
#include "wmdrive/eval/score.hpp"
#include "wmdrive/scenarios/manifest.hpp"

namespace fs = std::filesystem;
using namespace wmdrive;
using namespace wmdrive::eval;
using scenarios::Category;

namespace {

const fs::path kFixture = fs::path(WMDRIVE_SOURCE_DIR) / "tests" / "fixtures" / "reference_log";

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("wmdrive_eval_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const MetricsReport& fixture_report() {
  static const MetricsReport report = [] {
    const auto manifest = scenarios::parse_manifest(slurp(kFixture / "manifest.json"));
    return score(join_records(read_log(kFixture / "responses.jsonl"), manifest));
  }();
  return report;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

class ThrowingClient : public ModelClient {
 public:
  ThrowingClient(ErrorKind kind, int failures) : kind_(kind), failures_(failures) {}
  std::string model_tag() const override { return "throwing"; }
  std::string complete(const QueryRequest&) override {
    ++calls;
    if (calls <= failures_) throw Error(kind_, "simulated failure");
    return "ANSWER: forward";
  }
  int calls = 0;

 private:
  ErrorKind kind_;
  int failures_;
};

EvalRecord record(const std::string& model, Category c, const std::string& truth, const std::string& answer) {
  EvalRecord r;
  r.scenario_id = "s";
  r.frame_count = 3;
  r.model = model;
  r.category = c;
  r.truth = truth;
  r.parsed.label = answer;
  r.level = "default";
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Prompts

TEST(Prompt, TrafficQuestionAndAnswerInstruction) {
  const auto p = build_prompt(Category::traffic, 6);
  EXPECT_TRUE(contains(p, "is there traffic causing the car to slow down?"));
  EXPECT_TRUE(contains(p, "grid of 6 video frames"));
  EXPECT_TRUE(contains(p, "Describe what is likely going on in each frame."));
  EXPECT_TRUE(contains(p, "ANSWER: <label>"));
  EXPECT_TRUE(contains(p, "no_traffic"));
}

TEST(Prompt, SpeedingMentionsSpeedLimit) {
  EXPECT_TRUE(contains(build_prompt(Category::speeding, 3), "going at the speed limit."));
  EXPECT_FALSE(contains(build_prompt(Category::forward_backward, 3), "speed limit"));
}

TEST(Prompt, PlanningAvoidObstaclesVariant) {
  const auto plain = build_prompt(Category::planning, 1);
  PromptOverrides o;
  o.avoid_obstacles = true;
  const auto avoid = build_prompt(Category::planning, 1, o);
  EXPECT_FALSE(contains(plain, "avoiding obstacles"));
  EXPECT_TRUE(contains(avoid, "while avoiding obstacles?"));
  EXPECT_TRUE(contains(plain, "single camera frame"));
}

TEST(Prompt, OverridesAndDeterminism) {
  PromptOverrides free;
  free.free_text = "hello";
  EXPECT_EQ(build_prompt(Category::plane, 9, free), "hello");
  PromptOverrides question;
  question.question = "Is it a bird?";
  const auto q = build_prompt(Category::plane, 9, question);
  EXPECT_TRUE(contains(q, "Is it a bird?"));
  EXPECT_FALSE(contains(q, "keep moving along"));
  EXPECT_EQ(build_prompt(Category::left_right, 3), build_prompt(Category::left_right, 3));
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

// ---------------------------------------------------------------------------
// Parsing

TEST(Parse, AnswerLineWins) {
  const auto a = parse_answer("The car seems to be speeding up at first.\nANSWER: decelerate", Category::accel_decel);
  EXPECT_EQ(a.label, "decelerate");
  EXPECT_EQ(a.rationale_text, "The car seems to be speeding up at first.");
}

TEST(Parse, LastMentionWithoutAnswerLine) {
  EXPECT_EQ(parse_answer("the car accelerates then seems to decelerate", Category::accel_decel).label, "decelerate");
  EXPECT_EQ(parse_answer("There is no traffic here.", Category::traffic).label, "no_traffic");
  EXPECT_EQ(parse_answer("Heavy traffic ahead.", Category::traffic).label, "traffic");
  EXPECT_EQ(parse_answer("The other car is not speeding.", Category::speeding).label, "no_speeding");
}

TEST(Parse, UnparseableAndMarkdown) {
  EXPECT_EQ(parse_answer("", Category::left_right).label, kUnparseable);
  EXPECT_FALSE(parse_answer("I cannot tell.", Category::left_right).parsed());
  EXPECT_EQ(parse_answer("**Answer:** right", Category::left_right).label, "right");
  EXPECT_EQ(parse_answer("Follow it.\nAnswer: the blue trajectory", Category::planning).label, "blue");
}

TEST(Parse, FrameDescriptions) {
  const auto a = parse_answer("Frame 1: road.\nFrame 2: a car.\n3. a tree\nANSWER: forward", Category::forward_backward);
  ASSERT_EQ(a.per_frame_descriptions.size(), 3u);
  EXPECT_EQ(a.per_frame_descriptions[0], "road.");
  EXPECT_EQ(a.per_frame_descriptions[2], "a tree");
}

TEST(Parse, TotalOnRandomText) {
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz ANSWER:*_\n\t-.0123456789";
  const std::vector<std::string> words{"answer:", "forward", "no traffic", "left", "yes", "blue", "**", "frame 2:"};
  prop::for_all(2000, [&](prop::Gen& g, int) {
    std::string s;
    const int n = g.integer(0, 80);
    for (int k = 0; k < n; ++k) {
      if (g.coin()) {
        s += words[static_cast<std::size_t>(g.integer(0, static_cast<int>(words.size()) - 1))];
      } else {
        s += alphabet[static_cast<std::size_t>(g.integer(0, static_cast<int>(alphabet.size()) - 1))];
      }
    }
    for (Category c : scenarios::kAllCategories) {
      const auto a = parse_answer(s, c);
      const auto set = scenarios::answer_set(c);
      EXPECT_TRUE(a.label == kUnparseable || std::find(set.begin(), set.end(), a.label) != set.end()) << a.label;
    }
  });
}

TEST(Parse, EverySynonymMapsToItsLabel) {
  for (Category c : scenarios::kAllCategories) {
    for (const auto& s : synonyms(c)) {
      EXPECT_EQ(parse_answer("ANSWER: " + s.phrase, c).label, s.label) << s.phrase;
    }
  }
}

// ---------------------------------------------------------------------------
// Clients

TEST(Client, OracleEchoesLabel) {
  OracleClient oracle;
  QueryRequest req{"x", 3, Category::traffic, "p", "", std::string("no_traffic")};
  const auto text = oracle.complete(req);
  EXPECT_EQ(parse_answer(text, Category::traffic).label, "no_traffic");
  req.label.reset();
  try {
    oracle.complete(req);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
  }
}

TEST(Client, AdversarialAnswersParse) {
  AdversarialClient adv;
  for (Category c : scenarios::kAllCategories) {
    const auto text = adv.complete({"x", 3, c, "p", "", std::nullopt});
    EXPECT_EQ(parse_answer(text, c).label, adversarial_label(c));
  }
  EXPECT_EQ(adversarial_label(Category::forward_backward), "forward");
}

TEST(Client, ScriptedExactAndMissing) {
  ScriptedClient s("m", {{response_key("a", 3), "exact text"}});
  EXPECT_EQ(s.complete({"a", 3, Category::plane, "", "", std::nullopt}), "exact text");
  try {
    s.complete({"a", 6, Category::plane, "", "", std::nullopt});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
  }
}

TEST(Client, ScriptedFromJsonl) {
  TempDir dir;
  const auto path = dir.path / "r.jsonl";
  spit(path,
       "{\"scenario_id\":\"a\",\"frame_count\":3,\"model\":\"m1\",\"raw_response\":\"one\"}\n"
       "\n"
       "{\"scenario_id\":\"a\",\"frame_count\":3,\"model\":\"m2\",\"raw_response\":\"two\"}\n"
       "{\"scenario_id\":\"b\",\"frame_count\":6,\"response\":\"three\"}\n");
  auto s = ScriptedClient::from_jsonl(path.string(), "m2");
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.model_tag(), "m2");
  EXPECT_EQ(s.complete({"a", 3, Category::plane, "", "", std::nullopt}), "two");
  EXPECT_EQ(s.complete({"b", 6, Category::plane, "", "", std::nullopt}), "three");

  try {
    ScriptedClient::from_jsonl((dir.path / "missing.jsonl").string(), "m");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
  spit(path, "{\"scenario_id\":\"a\"\n");
  try {
    ScriptedClient::from_jsonl(path.string(), "m");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
}

TEST(Client, LivePayloadShapes) {
  LiveConfig cfg;
  const auto o = live_payload(cfg, "q", "PNG");
  EXPECT_EQ(o["messages"][0]["content"][0]["text"], "q");
  EXPECT_EQ(o["messages"][0]["content"][1]["image_url"]["url"], "data:image/png;base64,UE5H");
  cfg.payload_style = "anthropic";
  const auto a = live_payload(cfg, "q", "PNG");
  EXPECT_EQ(a["messages"][0]["content"][0]["source"]["data"], "UE5H");
  EXPECT_EQ(live_reply_text(cfg, R"({"content":[{"type":"text","text":"hi"}]})"), "hi");
  cfg.payload_style = "other";
  EXPECT_THROW(live_payload(cfg, "q", ""), Error);
}

TEST(Client, LiveStatusMapping) {
  auto kind_of = [](int status) {
    try {
      check_status(status, "body");
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io;  // sentinel for "no throw"
  };
  EXPECT_EQ(kind_of(200), ErrorKind::io);
  EXPECT_EQ(kind_of(401), ErrorKind::auth);
  EXPECT_EQ(kind_of(403), ErrorKind::auth);
  EXPECT_EQ(kind_of(413), ErrorKind::payload_too_large);
  EXPECT_EQ(kind_of(429), ErrorKind::transport);
  EXPECT_EQ(kind_of(503), ErrorKind::transport);
  EXPECT_EQ(kind_of(400), ErrorKind::invalid_argument);
}

TEST(Client, LiveWithoutCredentialIsAuthErrorWithoutRetry) {
  LiveConfig cfg;
  cfg.api_key_env = "WMDRIVE_TEST_UNSET_KEY_VARIABLE";
  ::unsetenv(cfg.api_key_env.c_str());
  LiveClient live(cfg);
  std::vector<double> sleeps;
  try {
    query_model(live, {"a", 3, Category::plane, "p", "", std::nullopt}, RetryPolicy{}, nullptr,
                [&](double s) { sleeps.push_back(s); }, [] { return 0.0; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::auth);
  }
  EXPECT_TRUE(sleeps.empty());
  cfg.endpoint = "not a url";
  EXPECT_THROW(LiveClient{cfg}, Error);
}

// ---------------------------------------------------------------------------
// Retry and rate limiting

TEST(Retry, BackoffSequenceThenSuccess) {
  ThrowingClient c(ErrorKind::transport, 3);
  std::vector<double> sleeps;
  RetryPolicy policy;
  policy.max_retries = 3;
  policy.initial_backoff = 0.5;
  policy.backoff_factor = 3.0;
  const auto r = query_model(c, {}, policy, nullptr, [&](double s) { sleeps.push_back(s); }, [] { return 1.0; });
  EXPECT_EQ(r.attempts, 4);
  EXPECT_EQ(r.text, "ANSWER: forward");
  EXPECT_EQ(sleeps, (std::vector<double>{0.5, 1.5, 4.5}));
}

TEST(Retry, ExhaustionIsTransportError) {
  ThrowingClient c(ErrorKind::transport, 100);
  RetryPolicy policy;
  policy.max_retries = 2;
  try {
    query_model(c, {}, policy, nullptr, [](double) {}, [] { return 0.0; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::transport);
  }
  EXPECT_EQ(c.calls, 3);
}

TEST(Retry, AuthAndPayloadAreFinal) {
  for (ErrorKind k : {ErrorKind::auth, ErrorKind::payload_too_large}) {
    ThrowingClient c(k, 100);
    EXPECT_THROW(query_model(c, {}, RetryPolicy{}, nullptr, [](double) {}, [] { return 0.0; }), Error);
    EXPECT_EQ(c.calls, 1);
  }
}

TEST(Retry, LatencyFromClock) {
  ThrowingClient c(ErrorKind::transport, 0);
  double now = 10.0;
  const auto r = query_model(c, {}, RetryPolicy{}, nullptr, [](double) {}, [&] {
    const double t = now;
    now += 0.25;
    return t;
  });
  EXPECT_DOUBLE_EQ(r.latency, 0.25);
}

TEST(RateGate, SpacesRequestStarts) {
  double now = 0.0;
  std::vector<double> waits;
  RateGate gate(1.0, 4, [&](double s) { waits.push_back(s); now += s; }, [&] { return now; });
  gate.acquire();
  gate.acquire();
  now += 0.3;
  gate.acquire();
  EXPECT_EQ(gate.in_flight(), 3);
  ASSERT_EQ(waits.size(), 3u);
  EXPECT_DOUBLE_EQ(waits[0], 0.0);
  EXPECT_DOUBLE_EQ(waits[1], 1.0);
  EXPECT_NEAR(waits[2], 0.7, 1e-12);
  gate.release();
  gate.release();
  gate.release();
  EXPECT_EQ(gate.in_flight(), 0);
}

TEST(RateGate, BoundsInFlight) {
  RateGate gate(0.0, 2, [](double) {}, [] { return 0.0; });
  std::atomic<int> peak{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      gate.acquire();
      peak = std::max(peak.load(), gate.in_flight());
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      gate.release();
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(peak.load(), 2);
  EXPECT_EQ(gate.in_flight(), 0);
}

// ---------------------------------------------------------------------------
// Log

TEST(Log, AppendAndRead) {
  TempDir dir;
  const auto path = dir.path / "sub" / "log.jsonl";
  LogRecord a{"s1", 3, "m", "plane", "h", "ANSWER: no", "cannot_keep_moving", 0.5, "t"};
  LogRecord b = a;
  b.frame_count = 6;
  append_log(path, a);
  append_log(path, b);
  EXPECT_EQ(read_log(path), (std::vector<LogRecord>{a, b}));
  EXPECT_EQ(resume_key(a), "s1#3#m");
}

TEST(Log, TornLastLineDropped) {
  TempDir dir;
  const auto path = dir.path / "log.jsonl";
  LogRecord a{"s1", 3, "m", "plane", "h", "x", "no", 0.5, "t"};
  append_log(path, a);
  {
    std::ofstream out(path, std::ios::app);
    out << "{\"scenario_id\":\"s2\",\"fra";
  }
  EXPECT_EQ(read_log(path).size(), 1u);
}

TEST(Log, BadMiddleLineIsConfigError) {
  TempDir dir;
  const auto path = dir.path / "log.jsonl";
  spit(path, "{\"scenario_id\":\"s1\",\"frame_count\":3}\nnot json\n{\"scenario_id\":\"s2\",\"frame_count\":3}\n");
  try {
    read_log(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
  try {
    read_log(dir.path / "missing.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

TEST(Log, JoinRejectsUnknownScenario) {
  scenarios::Manifest m;
  LogRecord l{"ghost", 3, "m", "plane", "", "ANSWER: no", "", 0.0, ""};
  try {
    join_records({l}, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::scoring);
  }
}

// ---------------------------------------------------------------------------
// Scoring

TEST(Score, Errors) {
  EXPECT_THROW(score({}), Error);
  try {
    score({record("m", Category::traffic, "bogus", "traffic")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::scoring);
  }
}

TEST(Score, SmallHandCountedExample) {
  const std::vector<EvalRecord> rs{
      record("m", Category::left_right, "left", "left"),   record("m", Category::left_right, "left", "right"),
      record("m", Category::left_right, "right", "right"), record("m", Category::left_right, "right", kUnparseable),
  };
  const auto rep = score(rs);
  const auto& c = rep.cell("m", Category::left_right);
  EXPECT_EQ(c.accuracy().num, 2);
  EXPECT_EQ(c.accuracy().den, 4);
  EXPECT_EQ(c.share("right").num, 2);
  EXPECT_EQ(c.share(kUnparseable).num, 1);
  EXPECT_EQ(c.recall("left").num, 1);
  EXPECT_EQ(c.recall("left").den, 2);
  EXPECT_EQ(rep.unparseable_count, 1);
  EXPECT_EQ(rep.cells.size(), scenarios::kAllCategories.size());
  EXPECT_EQ(rep.cell("m", Category::plane).total, 0);
  EXPECT_FALSE(rep.cell("m", Category::plane).accuracy().defined());
  EXPECT_THROW(rep.cell("other", Category::plane), Error);
}

TEST(Score, InvariantsOnRandomRecords) {
  prop::for_all(100, [](prop::Gen& g, int) {
    std::vector<EvalRecord> rs;
    std::map<std::pair<std::string, int>, std::map<std::string, int>> truth_counts;
    const int n = g.integer(1, 200);
    for (int k = 0; k < n; ++k) {
      const auto c = scenarios::kAllCategories[static_cast<std::size_t>(g.integer(0, 7))];
      const auto set = scenarios::answer_set(c);
      const std::string model = g.coin() ? "a" : "b";
      const auto& truth = set[static_cast<std::size_t>(g.integer(0, static_cast<int>(set.size()) - 1))];
      const std::string answer =
          g.integer(0, 9) == 0 ? kUnparseable
                               : set[static_cast<std::size_t>(g.integer(0, static_cast<int>(set.size()) - 1))];
      rs.push_back(record(model, c, truth, answer));
      ++truth_counts[{model, static_cast<int>(c)}][truth];
    }
    const auto rep = score(rs);
    std::int64_t total = 0;
    for (const auto& cell : rep.cells) {
      total += cell.total;
      std::int64_t trace = 0;
      for (std::size_t i = 0; i < cell.truth_labels.size(); ++i) {
        trace += cell.confusion[i][i];
        const auto it = truth_counts.find({cell.model, static_cast<int>(cell.category)});
        const int expected = it == truth_counts.end() ? 0 : it->second[cell.truth_labels[i]];
        EXPECT_EQ(cell.row_total(i), expected);
      }
      EXPECT_EQ(cell.accuracy().num, trace);
      EXPECT_EQ(cell.accuracy().den, cell.total);
      if (cell.total > 0) {
        double share_sum = 0.0;
        for (const auto& l : cell.response_labels) share_sum += cell.share(l).value();
        EXPECT_NEAR(share_sum, 1.0, 1e-12);
      }
    }
    EXPECT_EQ(total, n);
    EXPECT_EQ(rep.record_count, n);
  });
}

// ---------------------------------------------------------------------------
// Reference response log

TEST(Fixture, ParserAgreesWithRecordedLabels) {
  const auto log = read_log(kFixture / "responses.jsonl");
  ASSERT_EQ(log.size(), 2200u);
  for (const auto& l : log) {
    EXPECT_EQ(parse_answer(l.raw_response, scenarios::category_from_string(l.category)).label, l.parsed_label)
        << l.model << " " << l.scenario_id << " " << l.frame_count;
  }
}

TEST(Fixture, Gpt4vHeadlineCells) {
  const auto& rep = fixture_report();
  const auto& traffic = rep.cell("GPT-4V", Category::traffic);
  EXPECT_EQ(traffic.accuracy().num, 45);
  EXPECT_EQ(traffic.accuracy().den, 60);
  const auto& speeding = rep.cell("GPT-4V", Category::speeding);
  EXPECT_EQ(speeding.recall("speeding").num, 2);
  EXPECT_EQ(speeding.recall("speeding").den, 30);
  const auto& fb = rep.cell("GPT-4V", Category::forward_backward);
  EXPECT_DOUBLE_EQ(fb.share("forward").value(), 1.0);
  EXPECT_EQ(fb.share("backward").num, 0);
}

TEST(Fixture, Claude3ForwardBackwardSplit) {
  const auto& fb = fixture_report().cell("Claude3", Category::forward_backward);
  EXPECT_NEAR(fb.share("forward").value(), 0.783, 0.0005);
  EXPECT_NEAR(fb.share("backward").value(), 0.217, 0.0005);
}

TEST(Fixture, Gpt4vRowMatchesReferenceRow) {
  const auto& rep = fixture_report();
  const std::vector<std::pair<Category, double>> row{
      {Category::forward_backward, 0.50}, {Category::accel_decel, 0.32}, {Category::left_right, 0.55},
      {Category::traffic, 0.75},          {Category::speeding, 0.53},    {Category::open_set_object, 0.80},
      {Category::plane, 0.53},            {Category::planning, 0.55},
  };
  for (const auto& [c, expected] : row) {
    EXPECT_NEAR(rep.cell("GPT-4V", c).accuracy().value(), expected, 0.005) << scenarios::to_string(c);
  }
  EXPECT_EQ(rep.models().size(), 5u);
}

// ---------------------------------------------------------------------------
// Report

TEST(Report, ByteIdenticalAcrossRuns) {
  TempDir a;
  TempDir b;
  const auto fa = render_report(fixture_report(), a.path);
  const auto fb = render_report(fixture_report(), b.path);
  ASSERT_EQ(fa.size(), fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    EXPECT_EQ(fs::relative(fa[i], a.path), fs::relative(fb[i], b.path));
    EXPECT_EQ(slurp(fa[i]), slurp(fb[i])) << fa[i];
  }
  const auto acc = slurp(a.path / "accuracy.csv");
  EXPECT_TRUE(contains(acc, "GPT-4V,,traffic,45,60,0.750000"));
}

TEST(Report, EmptyCategoryInTablesButNotPlots) {
  TempDir dir;
  const auto rep = score({record("m", Category::left_right, "left", "left")});
  render_report(rep, dir.path);
  const auto acc = slurp(dir.path / "accuracy.csv");
  EXPECT_TRUE(contains(acc, "m,,plane,0,0,\n"));
  EXPECT_TRUE(fs::exists(dir.path / "plots" / "confusion_m_left_right.svg"));
  EXPECT_FALSE(fs::exists(dir.path / "plots" / "confusion_m_plane.svg"));
  EXPECT_TRUE(fs::exists(dir.path / "metrics.json"));
}
