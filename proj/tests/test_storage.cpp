#include <gtest/gtest.h>

#include "recode/engine.hpp"
#include "recode/storage.hpp"
#include "support.hpp"

using namespace recode;
using testing_support::mock_gateway;
using testing_support::TempDir;

namespace {

Transcript cb_c3() { return run_script(Condition::B, ContextTask::C3, mock_gateway()); }

}  // namespace

TEST(Storage, TranscriptRoundTrip) {
  TempDir dir;
  Store store(dir.path());
  const auto t = cb_c3();
  const auto run = store.save_transcript(t, "mock", "provider=mock\n");
  EXPECT_EQ(run.filename(), "CB_C3-0001");
  EXPECT_TRUE(std::filesystem::exists(run / "transcript.json"));
  EXPECT_TRUE(std::filesystem::exists(run / "transcript.txt"));
  EXPECT_EQ(store.load_transcript("CB:C3"), t);
  EXPECT_EQ(store.load_transcript((run / "transcript.json").string()), t);
  EXPECT_EQ(read_file(run / "transcript.txt"), to_plain_text(t));
}

TEST(Storage, ByteStableDocuments) {
  TempDir a;
  TempDir b;
  Store sa(a.path());
  Store sb(b.path());
  sa.save_transcript(cb_c3());
  sb.save_transcript(cb_c3());
  EXPECT_EQ(sa.transcript_document("CB:C3"), sb.transcript_document("CB:C3"));
  const auto reloaded = sa.load_transcript("CB:C3");
  EXPECT_EQ(dump_document(to_json(reloaded)), sa.transcript_document("CB:C3"));
}

TEST(Storage, TranscriptDocumentShape) {
  const auto doc = to_json(cb_c3());
  std::vector<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"code", "condition", "context", "applied_code", "reflection_code", "turns"}));
  EXPECT_EQ(doc["code"], "CB:C3");
  EXPECT_EQ(doc["applied_code"], "{C3; O; T3; R3}");
  EXPECT_EQ(doc["reflection_code"], "{C3; O; T3; R3}");
  const auto& turn = doc["turns"][0];
  std::vector<std::string> turn_keys;
  for (auto it = turn.begin(); it != turn.end(); ++it) turn_keys.push_back(it.key());
  EXPECT_EQ(turn_keys, (std::vector<std::string>{"index", "role", "phase", "text"}));
  EXPECT_EQ(turn["role"], "USER");

  const auto a = to_json(run_script(Condition::A, ContextTask::C1, mock_gateway()));
  EXPECT_TRUE(a["applied_code"].is_null());
  EXPECT_TRUE(a["reflection_code"].is_null());
}

TEST(Storage, PlainTextExport) {
  const auto text = to_plain_text(cb_c3());
  EXPECT_EQ(text.rfind("USER: You are being tasked with learning", 0), 0u);
  EXPECT_NE(text.find("\n\nAGENT: "), std::string::npos);
  EXPECT_NE(text.find("\n\nUSER: Green Light\n\nAGENT: "), std::string::npos);
}

TEST(Storage, RunsAreSequenced) {
  TempDir dir;
  Store store(dir.path());
  const auto t = cb_c3();
  store.save_transcript(t);
  const auto second = store.save_transcript(t);
  EXPECT_EQ(second.filename(), "CB_C3-0002");
  EXPECT_EQ(store.latest_run("CB:C3"), "CB_C3-0002");
  EXPECT_FALSE(store.latest_run("CA:C3"));
  const auto m = store.load_manifest("CB_C3-0002");
  EXPECT_EQ(m.run_id, "CB_C3-0002");
  EXPECT_EQ(m.condition, Condition::B);
  EXPECT_EQ(m.context, ContextTask::C3);
  EXPECT_EQ(m.provider, "mock");
  EXPECT_EQ(manifest_from_json(nlohmann::json::parse(to_json(m).dump())), m);
}

TEST(Storage, ScoresRoundTripAndLatest) {
  TempDir dir;
  Store store(dir.path());
  const ScoreRecord r{RubricScore::make("CB:C3", testing_support::published_scores().at("CB:C3")), "judge"};
  EXPECT_ERROR_KIND(store.save_scores(r), NotFound);
  store.save_transcript(cb_c3());
  const auto path = store.save_scores(r);
  EXPECT_EQ(path.filename(), "scores.json");
  EXPECT_EQ(store.load_scores("CB:C3"), r);
  ASSERT_EQ(store.latest_scores().size(), 1u);
  EXPECT_EQ(store.latest_scores()[0], r);
}

TEST(Storage, NotFoundAndCorrupt) {
  TempDir dir;
  Store store(dir.path());
  EXPECT_ERROR_KIND(store.load_transcript("CA:C1"), NotFound);
  EXPECT_ERROR_KIND(store.load_scores("CA:C1"), NotFound);
  EXPECT_ERROR_KIND(store.load_report(), NotFound);
  EXPECT_ERROR_KIND(store.load_transcript("CA:C9"), CodeShapeError);

  store.save_transcript(cb_c3());
  const ScoreRecord r{RubricScore::make("CB:C3", testing_support::published_scores().at("CB:C3")), "judge"};
  const auto path = store.save_scores(r);
  auto doc = nlohmann::json::parse(read_file(path));
  doc["scores"]["identifying_the_error"] = 0;
  write_file(path, doc.dump());
  try {
    store.load_scores("CB:C3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CorruptRecord);
    EXPECT_NE(std::string(e.what()).find("identifying_the_error"), std::string::npos);
  }
  write_file(path, "{ nope");
  EXPECT_ERROR_KIND(store.load_scores("CB:C3"), CorruptRecord);

  const auto tpath = store.root() / "runs" / "CB_C3-0001" / "transcript.json";
  auto tdoc = nlohmann::json::parse(read_file(tpath));
  tdoc["turns"][0]["role"] = "ROBOT";
  write_file(tpath, tdoc.dump());
  EXPECT_ERROR_KIND(store.load_transcript("CB:C3"), CorruptRecord);
}

TEST(Storage, Reports) {
  TempDir dir;
  Store store(dir.path());
  store.save_report("text\n", "a,b\n");
  EXPECT_EQ(store.load_report(), "text\n");
  EXPECT_EQ(read_file(store.root() / "reports" / "report.csv"), "a,b\n");
}
