#include <sstream>

#include "doctest.h"
#include "oiekit/bio.h"
#include "oiekit/error.h"
#include "oiekit/triple_codec.h"
#include "test_support.h"

using namespace oiekit;
using oiekit::testing::Rng;

namespace {

BioRow Row(const std::vector<std::string>& tags) {
  BioRow row;
  for (const auto& t : tags) row.tags.push_back(BioTag::Parse(t));
  return row;
}

}  // namespace

TEST_CASE("BioTag parsing") {
  CHECK(BioTag::Parse("O").role == BioTag::Role::kOutside);
  BioTag a2 = BioTag::Parse("A2-I");
  CHECK(a2.role == BioTag::Role::kArgument);
  CHECK(a2.argument == 2);
  CHECK_FALSE(a2.begin);
  CHECK(BioTag::Parse("P-B").role == BioTag::Role::kPredicate);
  for (const char* bad : {"A6-B", "A10-I", "X-B", "P", "A-B", "P-X", "", "o"}) {
    CHECK_THROWS_AS(BioTag::Parse(bad), MalformedBio);
    CHECK(BioTag::ParseLenient(bad).role == BioTag::Role::kInvalid);
  }
  for (const char* t : {"O", "A0-B", "A5-I", "P-B", "P-I"}) {
    CHECK(BioTag::Parse(t).ToString() == t);
  }
}

TEST_CASE("Akerson row gives the generated-label triple") {
  Sentence s("ak", {"Akerson", "will", "relinquish", "his", "chairman", "role"});
  Tuple t = BioRowToTuple(s, Row({"A0-B", "P-B", "P-I", "A1-B", "A1-I", "A1-I"}));
  CHECK(t == MakeTuple("Akerson", "will relinquish", "his chairman role"));
  CHECK(EncodeTriples({"ak", {t}}) ==
        "(Akerson ; will relinquish ; his chairman role)");
}

TEST_CASE("cat sat mat and the missing predicate") {
  Sentence s("c", {"cat", "sat", "mat"});
  CHECK(BioRowToTuple(s, Row({"A0-B", "P-B", "A1-B"})) ==
        MakeTuple("cat", "sat", "mat"));
  Sentence s2("c", {"cat", "sat"});
  CHECK_THROWS_AS(BioRowToTuple(s2, Row({"A0-B", "O"})), MissingPredicate);
}

TEST_CASE("higher arguments fold into the object in ascending order") {
  Sentence s("x", {"a2", "s", "p", "a1", "a3", "a1b"});
  Tuple t = BioRowToTuple(s, Row({"A2-B", "A0-B", "P-B", "A1-B", "A3-B", "A1-B"}));
  CHECK(t.subject == std::vector<std::string>{"s"});
  CHECK(t.object == std::vector<std::string>{"a1", "a1b", "a2", "a3"});
}

TEST_CASE("stray I-tags: repair promotes, strict rejects") {
  Sentence s("x", {"a", "b", "c", "d"});
  BioRow row = Row({"A0-I", "P-B", "A1-I", "A1-I"});
  std::size_t repaired = 0;
  Tuple t = BioRowToTuple(s, row, BioMode::kRepair, &repaired);
  CHECK(repaired == 2);
  CHECK(t == MakeTuple("a", "b", "c d"));
  CHECK_THROWS_AS(BioRowToTuple(s, row, BioMode::kStrict), MalformedBio);
  // An I-tag after a different role is also stray.
  BioRow switched = Row({"A0-B", "P-I", "A1-B", "O"});
  CHECK_THROWS_AS(BioRowToTuple(s, switched, BioMode::kStrict), MalformedBio);
}

TEST_CASE("row length must match the sentence") {
  Sentence s("x", {"a", "b"});
  CHECK_THROWS_AS(BioRowToTuple(s, Row({"P-B"})), MalformedBio);
}

TEST_CASE("partial tuples") {
  Sentence s("x", {"a", "b", "c"});
  Tuple no_subject = BioRowToTuple(s, Row({"O", "P-B", "A1-B"}));
  CHECK(no_subject.partial);
  CHECK(no_subject.IsWellFormed());
  Tuple predicate_only = BioRowToTuple(s, Row({"O", "P-B", "O"}));
  CHECK(predicate_only.partial);
  CHECK_FALSE(BioRowToTuple(s, Row({"A0-B", "P-B", "A1-B"})).partial);
}

TEST_CASE("BioExampleToExtractions aggregates row errors") {
  Sentence s("x", {"cat", "sat", "mat"});
  SUBCASE("two valid rows keep order") {
    BioExample ex{s, {Row({"A0-B", "P-B", "A1-B"}), Row({"A1-B", "P-B", "O"})}};
    BioConversion c = BioExampleToExtractions(ex);
    REQUIRE(c.extractions.tuples.size() == 2);
    CHECK(c.extractions.tuples[0] == MakeTuple("cat", "sat", "mat"));
    CHECK(c.extractions.tuples[1].object == std::vector<std::string>{"cat"});
    CHECK(c.report.partial == 1);
  }
  SUBCASE("one valid and one missing predicate") {
    BioExample ex{s, {Row({"A0-B", "P-B", "A1-B"}), Row({"A0-B", "O", "A1-B"})}};
    BioConversion c = BioExampleToExtractions(ex);
    CHECK(c.extractions.tuples.size() == 1);
    CHECK(c.report.dropped_rows() == 1);
    CHECK(c.report.dropped_missing_predicate == 1);
  }
  SUBCASE("no rows") {
    BioConversion c = BioExampleToExtractions({s, {}});
    CHECK(c.extractions.tuples.empty());
    CHECK(c.extractions.sentence_id == "x");
    CHECK(c.report.rows_in == 0);
  }
}

TEST_CASE("conversion matches the oracle and never invents text") {
  Rng rng(21);
  const std::vector<std::string> labels = {"O",    "A0-B", "A0-I", "A1-B",
                                           "A1-I", "A2-B", "A3-B", "A5-I",
                                           "P-B",  "P-I"};
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> words = testing::RandomWords(rng, 1, 12);
    std::vector<std::string> tags(words.size());
    for (auto& t : tags) t = rng.Pick(labels);
    Sentence s("r", words);
    BioRow row = Row(tags);
    const bool has_p = std::any_of(tags.begin(), tags.end(), [](auto& t) {
      return t[0] == 'P';
    });
    if (!has_p) {
      CHECK_THROWS_AS(BioRowToTuple(s, row), MissingPredicate);
      continue;
    }
    Tuple t = BioRowToTuple(s, row, BioMode::kRepair);
    CHECK(t == testing::OracleBio(words, tags));
    // Each slot is a subsequence of the sentence (order preserved).
    for (const auto* slot : {&t.subject, &t.predicate}) {
      std::size_t pos = 0;
      for (const std::string& w : *slot) {
        while (pos < words.size() && words[pos] != w) ++pos;
        CHECK(pos < words.size());
        ++pos;
      }
    }
  }
}

TEST_CASE("ReadLsoie layout") {
  std::istringstream in(
      "# id = first\n"
      "cat\tA0-B\tA1-B\n"
      "sat\tP-B\tP-B\n"
      "mat\tA1-B\tO\n"
      "\n"
      "#\tX-B\n"
      "dog\tP-B\n"
      "\n");
  std::vector<BioExample> ex = ReadLsoie(in, "f.tsv");
  REQUIRE(ex.size() == 2);
  CHECK(ex[0].sentence.id() == "first");
  CHECK(ex[0].rows.size() == 2);
  CHECK(ex[1].sentence.id() == "s2");
  CHECK(ex[1].sentence.words() == std::vector<std::string>{"#", "dog"});
  // The unknown label only invalidates its own row.
  BioConversion c = BioExampleToExtractions(ex[1]);
  CHECK(c.report.dropped_malformed == 1);
}

TEST_CASE("ReadLsoie column mismatch names the line") {
  std::istringstream in("a\tP-B\tO\nb\tO\n");
  try {
    ReadLsoie(in, "bad.tsv");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
    CHECK(e.source() == "bad.tsv");
  }
}

TEST_CASE("empty LSOIE input") {
  std::istringstream in("");
  CHECK(ReadLsoie(in, "e").empty());
}
