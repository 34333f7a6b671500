#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <random>
#include <string>

#include "recode/error.hpp"
#include "recode/evaluation.hpp"
#include "recode/gateway.hpp"

namespace testing_support {

namespace fs = std::filesystem;

// Published per-transcript sub-dimension scores, in sub-dimension order.
inline const std::map<std::string, std::array<int, 9>>& published_scores() {
  static const std::map<std::string, std::array<int, 9>> table = {
      {"CA:C1", {2, 3, 1, 4, 3, 4, 3, 2, 3}}, {"CA:C2", {2, 2, 1, 4, 3, 4, 3, 3, 3}},
      {"CA:C3", {1, 1, 1, 3, 2, 3, 2, 2, 2}}, {"CA:C4", {1, 1, 1, 3, 3, 4, 2, 3, 3}},
      {"CB:C1", {4, 3, 4, 4, 4, 3, 5, 4, 4}}, {"CB:C2", {3, 4, 2, 4, 4, 5, 4, 4, 4}},
      {"CB:C3", {4, 4, 2, 4, 5, 5, 5, 4, 5}}, {"CB:C4", {3, 3, 4, 4, 3, 3, 5, 3, 3}},
  };
  return table;
}

inline std::vector<recode::RubricScore> published_rubric_scores() {
  std::vector<recode::RubricScore> out;
  for (const auto& [code, s] : published_scores()) out.push_back(recode::RubricScore::make(code, s));
  return out;
}

inline fs::path fixture_root() { return RECODE_SOURCE_DIR "/fixtures"; }

inline recode::GatewayConfig mock_gateway() {
  recode::GatewayConfig g;
  g.provider = recode::Provider::Mock;
  g.fixtures = std::make_shared<recode::FixturePack>(recode::FixturePack::load_tree(fixture_root()));
  return g;
}

inline recode::GatewayConfig mock_gateway(recode::FixturePack pack) {
  recode::GatewayConfig g;
  g.provider = recode::Provider::Mock;
  g.fixtures = std::make_shared<recode::FixturePack>(std::move(pack));
  return g;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("recode-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

template <typename F>
recode::ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const recode::Error& e) {
    return e.kind();
  }
  throw std::runtime_error("expected a recode::Error");
}

}  // namespace testing_support

#define EXPECT_ERROR_KIND(expr, kind) \
  EXPECT_EQ(::testing_support::error_kind_of([&] { (void)(expr); }), ::recode::ErrorKind::kind)
