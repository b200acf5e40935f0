#include <sstream>

#include "doctest.h"
#include "oiekit/clausie.h"
#include "oiekit/error.h"
#include "test_support.h"

using namespace oiekit;
using oiekit::testing::Rng;

namespace {

ExtractionSet AkersonTriples() {
  return {"ak",
          {MakeTuple("She", "replaces", "Daniel Akerson"),
           MakeTuple("the company", "has", "bankruptcy"),
           MakeTuple("Daniel Akerson", "was appointed",
                     "by the government as both chief executive and "
                     "chairman in 2009"),
           MakeTuple("Daniel Akerson", "was appointed",
                     "by the government as both chief executive and "
                     "chairman in 2009 during the company 's bankruptcy")}};
}

}  // namespace

TEST_CASE("IsSubsumed examples") {
  ExtractionSet ak = AkersonTriples();
  CHECK(IsSubsumed(ak.tuples[2], ak.tuples[3]));
  CHECK_FALSE(IsSubsumed(ak.tuples[3], ak.tuples[2]));
  CHECK_FALSE(IsSubsumed(ak.tuples[0], ak.tuples[0]));
  CHECK_FALSE(IsSubsumed(MakeTuple("cat", "sat", "mat"),
                         MakeTuple("cat", "sat", "rug")));
  // Scattered tokens are not a contiguous subsequence.
  CHECK_FALSE(IsSubsumed(MakeTuple("a", "p", "x z"),
                         MakeTuple("a", "p", "x y z")));
  CHECK(IsSubsumed(MakeTuple("A", "p", "x"), MakeTuple("a", "p", "x y"), true));
  CHECK_FALSE(IsSubsumed(MakeTuple("A", "p", "x"), MakeTuple("a", "p", "x y")));
}

TEST_CASE("Akerson filter drops the shorter appointed triple") {
  ExtractionSet out = FilterExtractions(AkersonTriples());
  ExtractionSet ak = AkersonTriples();
  REQUIRE(out.tuples.size() == 3);
  CHECK(out.tuples[0] == ak.tuples[0]);
  CHECK(out.tuples[1] == ak.tuples[1]);
  CHECK(out.tuples[2] == ak.tuples[3]);
}

TEST_CASE("filter leaves unrelated tuples and collapses duplicates") {
  ExtractionSet unrelated{"u",
                          {MakeTuple("a", "b", "c"), MakeTuple("d", "e", "f")}};
  CHECK(FilterExtractions(unrelated) == unrelated);
  ExtractionSet dup{"d", {MakeTuple("a", "b", "c"), MakeTuple("a", "b", "c")}};
  CHECK(FilterExtractions(dup).tuples.size() == 1);
  CHECK(FilterExtractions({"e", {}}).tuples.empty());
}

TEST_CASE("IsSubsumed agrees with the string oracle and is a strict order") {
  Rng rng(31);
  const std::vector<std::string> vocab = {"a", "b", "c"};
  auto small = [&] {
    Tuple t;
    for (auto* slot : {&t.subject, &t.predicate, &t.object}) {
      slot->resize(rng.Int(slot == &t.predicate ? 1 : 0, 3));
      for (auto& w : *slot) w = rng.Pick(vocab);
    }
    return t;
  };
  for (int i = 0; i < 3000; ++i) {
    Tuple a = small(), b = small(), c = small();
    CHECK(IsSubsumed(a, b) == testing::OracleSubsumed(a, b));
    CHECK_FALSE(IsSubsumed(a, a));
    if (IsSubsumed(a, b)) CHECK_FALSE(IsSubsumed(b, a));
    if (IsSubsumed(a, b) && IsSubsumed(b, c)) CHECK(IsSubsumed(a, c));
  }
}

TEST_CASE("filter is idempotent, shrinking and content-preserving") {
  Rng rng(32);
  const std::vector<std::string> vocab = {"a", "b", "c", "d"};
  for (int i = 0; i < 1000; ++i) {
    ExtractionSet s{"s", {}};
    const std::size_t n = rng.Int(0, 7);
    for (std::size_t k = 0; k < n; ++k) {
      Tuple t;
      for (auto* slot : {&t.subject, &t.predicate, &t.object}) {
        slot->resize(rng.Int(1, 3));
        for (auto& w : *slot) w = rng.Pick(vocab);
      }
      s.tuples.push_back(t);
    }
    ExtractionSet once = FilterExtractions(s);
    CHECK(FilterExtractions(once) == once);
    CHECK(once.tuples.size() <= s.tuples.size());
    // Survivors appear in the input, in input order.
    std::size_t pos = 0;
    for (const Tuple& t : once.tuples) {
      while (pos < s.tuples.size() && !(s.tuples[pos] == t)) ++pos;
      CHECK(pos < s.tuples.size());
      ++pos;
    }
    // No survivor is subsumed by an input tuple.
    for (const Tuple& t : once.tuples) {
      for (const Tuple& u : s.tuples) CHECK_FALSE(testing::OracleSubsumed(t, u));
    }
  }
}

TEST_CASE("ParseClausieTriple") {
  CHECK(ParseClausieTriple("(She; replaces; Daniel Akerson)") ==
        MakeTuple("She", "replaces", "Daniel Akerson"));
  CHECK(ParseClausieTriple("  ( a ;b;c )  ") == MakeTuple("a", "b", "c"));
  CHECK_THROWS_AS(ParseClausieTriple("(a; b)"), FormatError);
  CHECK_THROWS_AS(ParseClausieTriple("(a; ; c)"), FormatError);
  CHECK_THROWS_AS(ParseClausieTriple("a; b; c"), FormatError);
  CHECK_THROWS_AS(ParseClausieTriple("(a; b; c; d)"), FormatError);
}

TEST_CASE("ingest counts failures and keeps good triples of a bad record") {
  std::ostringstream text;
  for (int i = 0; i < 100; ++i) {
    text << "s" << i << "\tThe cat sat\n";
    if (i == 10 || i == 50) {
      text << "! java.lang.NullPointerException\n";
    } else {
      text << "(The cat; sat; )\n" << "(The; cat; sat)\n";
    }
  }
  std::istringstream in(text.str());
  IngestResult r = IngestCorpus(ReadClausieText(in));
  CHECK(r.report.records == 100);
  CHECK(r.report.kept == 98);
  CHECK(r.report.dropped_failed == 2);
  CHECK(r.report.drop_ratio() == doctest::Approx(0.02));
  // The empty-object line is malformed; the other triple survives.
  CHECK(r.report.format_errors == 98);
  CHECK(r.report.triples_in == 98);
  CHECK(r.dataset.front().tuples.size() == 1);
}

TEST_CASE("ingest of nothing") {
  IngestResult r = IngestCorpus({});
  CHECK(r.dataset.empty());
  CHECK(r.report == IngestReport{});
  CHECK(r.report.drop_ratio() == 0.0);
}

TEST_CASE("text reader edge cases") {
  std::istringstream in(
      "(orphan; triple; here)\n"
      "no tab header\n"
      "s1\tThe cat sat\n"
      "(The cat; sat; down)\n");
  std::vector<RawClausieRecord> raw = ReadClausieText(in);
  IngestResult r = IngestCorpus(raw);
  CHECK(r.report.skipped_records == 2);
  CHECK(r.report.kept == 1);
  CHECK(r.messages.size() == 2);
  CHECK(r.messages[0].starts_with("line 1:"));
}

TEST_CASE("JSON-lines input with a failure flag") {
  std::istringstream in(
      R"({"id":"a","tokens":["x","y"],"tuples":[{"subj":["x"],"pred":["y"],"obj":["z"]}]})"
      "\n"
      R"({"id":"b","tokens":["q"],"failed":true})"
      "\n"
      "not json\n");
  IngestResult r = IngestCorpus(ReadClausieJsonl(in));
  CHECK(r.report.kept == 1);
  CHECK(r.report.dropped_failed == 1);
  CHECK(r.report.skipped_records == 1);
  FilterCorpus(r);
  CHECK(r.report.triples_out == 1);
}
