#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "audit/frame.hpp"
#include "audit/text.hpp"

using namespace audit;

namespace {

const std::filesystem::path kFixtures{AUDIT_FIXTURE_DIR};

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("surname normalization basics") {
  CHECK(text::normalize_surname("  Goldberg ") == "GOLDBERG");
  CHECK(text::normalize_surname("Müller-Katz") == "MULLER-KATZ");
  CHECK(text::normalize_surname("Cohen Jr.") == "COHEN");
  CHECK(text::normalize_surname("Cohen, Jr.") == "COHEN");
  CHECK(text::normalize_surname("KATZ.") == "KATZ");
  CHECK(text::normalize_surname("O'Brien") == "O'BRIEN");
  CHECK(text::normalize_surname("van  der  Berg") == "VAN DER BERG");
  CHECK(text::normalize_surname("Smith III") == "SMITH");
  CHECK(text::normalize_surname("Łódź") == "ŁODZ");
  CHECK(text::normalize_surname("Weiß") == "WEISS");
  // decomposed input (u + combining diaeresis) equals precomposed input
  CHECK(text::normalize_surname("Müller") == "MULLER");
  // scripts without our case tables pass through unchanged
  CHECK(text::normalize_surname("山田") == "山田");
}

TEST_CASE("surname normalization rejects empty results") {
  CHECK_FALSE(text::normalize_surname("").has_value());
  CHECK_FALSE(text::normalize_surname("   ").has_value());
  CHECK_FALSE(text::normalize_surname(" Sr. ").has_value());
  CHECK_FALSE(text::normalize_surname("II III").has_value());
  CHECK_FALSE(text::normalize_surname("...").has_value());
}

TEST_CASE("surname normalization is idempotent on random input") {
  std::mt19937_64 rng(20240810);
  std::uniform_int_distribution<int> len(0, 24);
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<int> byte(0, 255);
  const std::vector<std::string> pieces = {"ü",  "ß", "Le ", "Jr.", " ", "-",
                                           "ŁÓ", "漢", "é", "'", "IV"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      switch (kind(rng)) {
        case 0:
          s.push_back(static_cast<char>('a' + (byte(rng) % 26)));
          break;
        case 1:
          s.push_back(static_cast<char>('A' + (byte(rng) % 26)));
          break;
        case 2:
          s += pieces[pick(rng)];
          break;
        case 3:
          s.push_back(' ');
          break;
        case 4:
          s.push_back(static_cast<char>(byte(rng)));  // arbitrary bytes
          break;
        default:
          s.push_back(static_cast<char>('!' + (byte(rng) % 14)));
          break;
      }
    }
    const auto once = text::normalize_surname(s);
    if (!once) continue;
    const auto twice = text::normalize_surname(*once);
    REQUIRE(twice.has_value());
    CHECK(*twice == *once);
  }
}

TEST_CASE("match_surname is exact membership") {
  frame::NameFrame f;
  f.label = "t";
  f.surnames = {"KATZ", "COHEN"};
  f.precision_range = {0.8, 0.9};
  f.coverage_range = {0.09, 0.12};
  CHECK(frame::match_surname(f, "KATZ"));
  CHECK_FALSE(frame::match_surname(f, "KATZMAN"));  // no prefix matching
  CHECK_FALSE(frame::match_surname(f, "KAT"));
  CHECK_THROWS_AS(frame::match_surname(f, "katz"), std::invalid_argument);
  CHECK_THROWS_AS(frame::match_surname(f, " KATZ"), std::invalid_argument);
  // repeated calls agree
  for (int i = 0; i < 5; ++i) CHECK(frame::match_surname(f, "KATZ"));
}

TEST_CASE("match equals brute-force normalize-and-compare") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> pool = {"Katz",   "Cohen", "Smith", "Müller",
                                         "LEVY",   "Stone", "weiß",  "Nguyen",
                                         "O'Hara", "de la Cruz"};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    frame::NameFrame f;
    f.precision_range = {0.5, 0.6};
    f.coverage_range = {0.1, 0.2};
    std::set<std::string> raw_members;
    for (int i = 0; i < 4; ++i) raw_members.insert(pool[pick(rng)]);
    for (const auto& m : raw_members) f.surnames.insert(*text::normalize_surname(m));
    const std::string& candidate = pool[pick(rng)];
    const auto norm = text::normalize_surname(candidate);
    REQUIRE(norm.has_value());
    bool brute = false;
    for (const auto& m : raw_members) {
      if (*text::normalize_surname(m) == *norm) brute = true;
    }
    CHECK(frame::match_surname(f, *norm) == brute);
  }
}

TEST_CASE("load_frame normalizes and validates") {
  const auto f = frame::load_frame(kFixtures / "frame_test.json");
  CHECK(f.label == "test-frame");
  CHECK(f.surnames == std::set<std::string>{"KATZ", "COHEN", "GOLDBERG", "LEVY",
                                            "MULLER-KATZ"});
  CHECK(f.precision_range.lb == 0.80);
  CHECK(f.precision_range.ub == 0.90);
  CHECK(f.coverage_range.lb == 0.0915);
  CHECK(f.coverage_range.ub == 0.1118);
}

TEST_CASE("load_frame failure modes carry location info") {
  CHECK_THROWS_AS(frame::load_frame("/nonexistent/frame.json"), ConfigError);

  const auto bad_json = temp_file("audit_frame_bad.json", "{not json");
  CHECK_THROWS_WITH_AS(frame::load_frame(bad_json),
                       doctest::Contains("audit_frame_bad.json"), ConfigError);

  const auto empty_list = temp_file(
      "audit_frame_empty.json",
      R"({"label":"x","surnames":[],"precision_range":[0.5,0.6],"coverage_range":[0.1,0.2]})");
  CHECK_THROWS_AS(frame::load_frame(empty_list), ConfigError);

  const auto inverted = temp_file(
      "audit_frame_inverted.json",
      R"({"label":"x","surnames":["KATZ"],"precision_range":[0.9,0.8],"coverage_range":[0.1,0.2]})");
  CHECK_THROWS_AS(frame::load_frame(inverted), ConfigError);

  const auto out_of_range = temp_file(
      "audit_frame_range.json",
      R"({"label":"x","surnames":["KATZ"],"precision_range":[0.0,0.8],"coverage_range":[0.1,0.2]})");
  CHECK_THROWS_AS(frame::load_frame(out_of_range), ConfigError);

  const auto reserved = temp_file(
      "audit_frame_reserved.json",
      R"({"label":"x","surnames":["#UNPARSEABLE#"],"precision_range":[0.5,0.8],"coverage_range":[0.1,0.2]})");
  CHECK_THROWS_AS(frame::load_frame(reserved), ConfigError);
}

TEST_CASE("sentinel is a normalization fixed point and never matches") {
  const std::string sentinel(frame::kUnparseableSurname);
  CHECK(text::is_normalized_surname(sentinel));
  const auto f = frame::load_frame(kFixtures / "frame_test.json");
  CHECK_FALSE(frame::match_surname(f, sentinel));
}
