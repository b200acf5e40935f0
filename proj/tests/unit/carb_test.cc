#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oiekit/carb.h"
#include "oiekit/error.h"
#include "test_support.h"

using namespace oiekit;
using oiekit::testing::Rng;

namespace {

WeightTable RandomTable(Rng& rng, std::size_t golds, std::size_t preds) {
  // Coarse values so that ties and zeros are common.
  WeightTable t(golds, std::vector<double>(preds));
  for (auto& row : t) {
    for (double& v : row) v = rng.Int(0, 8) / 8.0;
  }
  return t;
}

// Tuples over a tiny vocabulary so overlaps are frequent.
ExtractionSet SmallSet(Rng& rng, const std::string& id, std::size_t max) {
  static const std::vector<std::string> vocab = {"a", "b", "c", "A", "d"};
  ExtractionSet s{id, {}};
  for (std::size_t k = rng.Int(0, max); k > 0; --k) {
    Tuple t;
    for (auto* slot : {&t.subject, &t.predicate, &t.object}) {
      slot->resize(rng.Int(1, 3));
      for (auto& w : *slot) w = rng.Pick(vocab);
    }
    s.tuples.push_back(t);
  }
  return s;
}

}  // namespace

TEST_CASE("PairMatch examples") {
  PairScore same = PairMatch(MakeTuple("cat", "sat", "mat"),
                             MakeTuple("cat", "sat", "mat"));
  CHECK(same.precision == 1.0);
  CHECK(same.recall == 1.0);
  PairScore s = PairMatch(MakeTuple("cat", "sat", "mat"),
                          MakeTuple("cat", "sat", "the mat"));
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 0.75);
  PairScore none = PairMatch(MakeTuple("a", "b", "c"), MakeTuple("d", "e", "f"));
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  // Slots are compared positionally: swapped arguments do not match.
  CHECK(PairMatch(MakeTuple("x", "p", "y"), MakeTuple("y", "p", "x")).recall ==
        doctest::Approx(1.0 / 3));
  CHECK(PairMatch(MakeTuple("The Cat", "sat", "x"), MakeTuple("the cat", "sat", "x"))
            .precision == 1.0);
  // An empty-object gold scores with a two-slot denominator.
  CHECK(PairMatch(MakeTuple("cat", "sat", "mat"), MakeTuple("cat", "sat", ""))
            .recall == 1.0);
  Tuple empty;
  CHECK_THROWS_AS(PairMatch(empty, MakeTuple("a", "b", "c")), DegenerateTuple);
  CHECK_THROWS_AS(PairMatch(MakeTuple("a", "b", "c"), empty), DegenerateTuple);
}

TEST_CASE("PairMatch agrees with the counting oracle") {
  Rng rng(81);
  for (int i = 0; i < 2000; ++i) {
    ExtractionSet a = SmallSet(rng, "s", 1), b = SmallSet(rng, "s", 1);
    if (a.tuples.empty() || b.tuples.empty()) continue;
    PairScore got = PairMatch(a.tuples[0], b.tuples[0]);
    auto [p, r] = testing::OraclePairMatch(a.tuples[0], b.tuples[0]);
    CHECK(got.precision == p);
    CHECK(got.recall == r);
    CHECK(got.precision >= 0.0);
    CHECK(got.recall <= 1.0);
  }
}

TEST_CASE("assignment examples") {
  WeightTable one = {{0.4}};
  CHECK(AssignmentOracle(one).pred_of_gold == std::vector<int>{0});
  CHECK(MaxAssignment(one).total == 0.4);

  WeightTable two = {{0.9, 0.2}, {0.8, 0.7}};
  Assignment o = AssignmentOracle(two);
  CHECK(o.pred_of_gold == std::vector<int>{0, 1});
  CHECK(o.total == doctest::Approx(1.6));
  CHECK(MaxAssignment(two).pred_of_gold == std::vector<int>{0, 1});

  // Three golds, two preds: six injective maps, best is g0->p1, g2->p0.
  WeightTable three = {{0.1, 0.9}, {0.2, 0.8}, {0.7, 0.3}};
  Assignment h = MaxAssignment(three);
  CHECK(h.total == doctest::Approx(1.6));
  CHECK(h.pred_of_gold == std::vector<int>{1, -1, 0});
  CHECK(AssignmentOracle(three).total == h.total);

  CHECK(MaxAssignment({}).total == 0.0);
  CHECK(MaxAssignment({{0.0, 0.0}}).pred_of_gold == std::vector<int>{-1});
  CHECK_THROWS_AS(AssignmentOracle(WeightTable(7, std::vector<double>(1))),
                  TooLarge);
}

TEST_CASE("Hungarian and exhaustive oracles agree exactly") {
  Rng rng(82);
  for (int i = 0; i < 1000; ++i) {
    WeightTable t = RandomTable(rng, rng.Int(0, 6), rng.Int(1, 6));
    Assignment h = MaxAssignment(t);
    const double oracle = testing::OraclePermutationTotal(t);
    CHECK(h.total == oracle);
    CHECK(AssignmentOracle(t).total == oracle);
    CHECK(AssignmentTotal(t, h.pred_of_gold) == h.total);
    // Injective and zero-free.
    std::vector<int> used;
    for (std::size_t g = 0; g < h.pred_of_gold.size(); ++g) {
      const int p = h.pred_of_gold[g];
      if (p < 0) continue;
      CHECK(t[g][p] > 0.0);
      used.push_back(p);
    }
    std::sort(used.begin(), used.end());
    CHECK(std::adjacent_find(used.begin(), used.end()) == used.end());
  }
}

TEST_CASE("StableSum ignores order") {
  Rng rng(83);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> v(rng.Int(0, 10));
    for (double& x : v) x = rng.Uniform();
    std::vector<double> w = v;
    std::shuffle(w.begin(), w.end(), rng.engine());
    CHECK(StableSum(v) == StableSum(w));
  }
}

TEST_CASE("ScoreSentence examples") {
  ExtractionSet golds{"s",
                      {MakeTuple("cat", "sat", "the mat"),
                       MakeTuple("dog", "ran", "home")}};
  SentenceScore perfect = ScoreSentence(golds, golds);
  CHECK(perfect.pred_credit == 2.0);
  CHECK(perfect.gold_credit == 2.0);
  CHECK(perfect.num_preds == 2);

  // One pred partially matching both golds.
  ExtractionSet one{"s", {MakeTuple("cat", "sat", "home")}};
  SentenceScore s = ScoreSentence(one, golds);
  CHECK(s.num_preds == 1);
  CHECK(s.pred_credit == doctest::Approx(2.0 / 3));
  CHECK(s.gold_credit == doctest::Approx(0.5));
  CHECK(std::count(s.assignment.begin(), s.assignment.end(), 0) == 1);

  SentenceScore silent = ScoreSentence({"s", {}}, golds);
  CHECK(silent.pred_credit == 0.0);
  CHECK(silent.num_preds == 0);
  CHECK(silent.gold_credit == 0.0);
  CHECK(silent.num_golds == 2);

  CHECK_THROWS_AS(ScoreSentence({"a", {}}, {"b", {}}), std::invalid_argument);
}

TEST_CASE("degenerate tuples are excluded and counted") {
  ExtractionSet preds{"s", {Tuple{}, MakeTuple("a", "b", "c")}};
  ExtractionSet golds{"s", {MakeTuple("a", "b", "c")}};
  SentenceScore s = ScoreSentence(preds, golds);
  CHECK(s.degenerate_preds == 1);
  CHECK(s.num_preds == 1);
  CHECK(s.pred_credit == 1.0);
}

TEST_CASE("one-to-one precision mode") {
  ExtractionSet golds{"s", {MakeTuple("a", "b", "c")}};
  ExtractionSet preds{"s", {MakeTuple("a", "b", "c"), MakeTuple("a", "b", "c")}};
  CHECK(ScoreSentence(preds, golds, PrecisionMode::kManyToOne).pred_credit == 2.0);
  CHECK(ScoreSentence(preds, golds, PrecisionMode::kOneToOne).pred_credit == 1.0);
}

TEST_CASE("F1") {
  CHECK(F1(0, 0) == 0.0);
  CHECK(F1(1, 1) == 1.0);
  CHECK(100 * F1(0.505, 0.261) == doctest::Approx(34.4).epsilon(0.003));
  CHECK(100 * F1(0.546, 0.344) == doctest::Approx(42.2).epsilon(0.003));
}

TEST_CASE("corpus sanity") {
  Rng rng(84);
  std::vector<ExtractionSet> gold;
  for (int i = 0; i < 30; ++i) {
    ExtractionSet s = testing::RandomSet(rng, 4, false);
    s.sentence_id = "s" + std::to_string(i);
    if (s.tuples.empty()) s.tuples.push_back(MakeTuple("a", "b", "c"));
    gold.push_back(s);
  }
  ScoreReport same = ScoreCorpus(gold, gold);
  CHECK(same.precision == 1.0);
  CHECK(same.recall == 1.0);
  CHECK(same.f1 == 1.0);
  CHECK(same.ToText().find("1.000") != std::string::npos);

  std::vector<ExtractionSet> disjoint = gold;
  for (auto& s : disjoint) {
    for (auto& t : s.tuples) t = MakeTuple("zz1", "zz2", "zz3");
  }
  ScoreReport none = ScoreCorpus(disjoint, gold);
  CHECK(none.f1 == 0.0);

  ScoreReport macro = ScoreCorpus(gold, gold, {Averaging::kMacro, {}});
  CHECK(macro.f1 == 1.0);
}

TEST_CASE("corpus id handling") {
  std::vector<ExtractionSet> gold = {{"a", {MakeTuple("x", "y", "z")}},
                                     {"b", {MakeTuple("x", "y", "z")}}};
  std::vector<ExtractionSet> pred = {{"b", {MakeTuple("x", "y", "z")}},
                                     {"c", {MakeTuple("x", "y", "z")}}};
  ScoreReport r = ScoreCorpus(pred, gold);
  CHECK(r.missing_pred == std::vector<std::string>{"a"});
  CHECK(r.missing_gold == std::vector<std::string>{"c"});
  CHECK(r.has_mismatches());
  CHECK(r.sentences.size() == 1);
  CHECK(r.f1 == 1.0);
  std::vector<ExtractionSet> dup = {gold[0], gold[0]};
  CHECK_THROWS_AS(ScoreCorpus(dup, gold), FormatError);
}

TEST_CASE("micro and macro differ as expected") {
  // Sentence 1: 1 pred, credit 1. Sentence 2: 3 preds, credit 0.
  std::vector<ExtractionSet> gold = {{"1", {MakeTuple("a", "b", "c")}},
                                     {"2", {MakeTuple("a", "b", "c")}}};
  std::vector<ExtractionSet> pred = {
      {"1", {MakeTuple("a", "b", "c")}},
      {"2",
       {MakeTuple("x", "y", "z"), MakeTuple("x", "y", "w"),
        MakeTuple("x", "v", "z")}}};
  CHECK(ScoreCorpus(pred, gold).precision == doctest::Approx(0.25));
  CHECK(ScoreCorpus(pred, gold, {Averaging::kMacro, {}}).precision ==
        doctest::Approx(0.5));
}

TEST_CASE("scorer invariants") {
  Rng rng(85);
  for (int i = 0; i < 300; ++i) {
    std::vector<ExtractionSet> gold, pred;
    for (int k = 0; k < 4; ++k) {
      const std::string id = "s" + std::to_string(k);
      gold.push_back(SmallSet(rng, id, 4));
      pred.push_back(SmallSet(rng, id, 4));
    }
    ScoreReport r = ScoreCorpus(pred, gold);
    CHECK(r.precision >= 0.0);
    CHECK(r.precision <= 1.0);
    CHECK(r.recall <= 1.0);
    CHECK(r.f1 <= 2 * std::min(r.precision, r.recall) + 1e-15);

    // Permuting tuples and sentences leaves every score bit-identical.
    std::vector<ExtractionSet> pg = gold, pp = pred;
    for (auto& s : pg) std::shuffle(s.tuples.begin(), s.tuples.end(), rng.engine());
    for (auto& s : pp) std::shuffle(s.tuples.begin(), s.tuples.end(), rng.engine());
    std::shuffle(pp.begin(), pp.end(), rng.engine());
    ScoreReport q = ScoreCorpus(pp, pg);
    CHECK(q.precision == r.precision);
    CHECK(q.recall == r.recall);
    CHECK(q.f1 == r.f1);

    // Recall assignment total matches the permutation oracle.
    for (std::size_t k = 0; k < gold.size(); ++k) {
      MatchTable t = BuildMatchTable(pred[k].tuples, gold[k].tuples);
      if (t.recall.size() > 6 || (t.recall.size() && t.recall[0].size() > 6)) continue;
      if (t.recall.empty() || t.recall[0].empty()) continue;
      CHECK(MaxAssignment(t.recall).total ==
            testing::OraclePermutationTotal(t.recall));
    }

    // Duplicating a correct prediction: P never drops, recall total stays.
    ExtractionSet g = gold[0];
    if (g.tuples.empty()) continue;
    ExtractionSet p = g;
    SentenceScore before = ScoreSentence(p, g);
    p.tuples.push_back(g.tuples[0]);
    SentenceScore after = ScoreSentence(p, g);
    CHECK(after.pred_credit / after.num_preds >=
          before.pred_credit / before.num_preds);
    CHECK(after.gold_credit == before.gold_credit);
  }
}

TEST_CASE("report JSON") {
  std::vector<ExtractionSet> gold = {{"a", {MakeTuple("x", "y", "z")}}};
  const std::string json = ScoreCorpus(gold, gold).ToJson();
  CHECK(json.find("\"f1\":1.0") != std::string::npos);
  CHECK(json.find("\"averaging\":\"micro\"") != std::string::npos);
}
