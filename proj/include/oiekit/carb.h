#ifndef OIEKIT_CARB_H_
#define OIEKIT_CARB_H_

#include <cstddef>
#include <string>
#include <vector>

#include "oiekit/core.h"

namespace oiekit {

// Pairwise token-overlap scores of one predicted tuple against one gold
// tuple. Tokens are lower-cased; overlap is a per-slot multiset intersection,
// subject against subject, predicate against predicate, object against
// object.
struct PairScore {
  double precision = 0.0;  // overlap / pred tokens
  double recall = 0.0;     // overlap / gold tokens
};

// Throws DegenerateTuple when either tuple has no tokens at all.
PairScore PairMatch(const Tuple& pred, const Tuple& gold);

// Weights indexed [gold][pred].
using WeightTable = std::vector<std::vector<double>>;

// A one-to-one assignment of golds to preds.
struct Assignment {
  std::vector<int> pred_of_gold;  // -1 when unassigned
  double total = 0.0;
};

// Order-independent sum: the values are added in ascending order, so the
// same multiset always gives the same bits.
double StableSum(std::vector<double> values);

// Total of `table` under `pred_of_gold`, via StableSum.
double AssignmentTotal(const WeightTable& table,
                       const std::vector<int>& pred_of_gold);

// Maximum-weight one-to-one assignment (Hungarian method on the
// zero-padded square table). Weights must be finite.
Assignment MaxAssignment(const WeightTable& table);

// Exhaustive search over every injective partial map gold -> pred. Throws
// TooLarge when either side exceeds kOracleLimit.
inline constexpr std::size_t kOracleLimit = 6;
Assignment AssignmentOracle(const WeightTable& table);

// How predictions are credited.
enum class PrecisionMode {
  kManyToOne,  // each pred takes its best gold; golds may repeat
  kOneToOne,   // optimal one-to-one assignment on pairwise precision
};

enum class Averaging { kMicro, kMacro };

struct MatchTable {
  WeightTable precision;  // [gold][pred]
  WeightTable recall;     // [gold][pred]
};

struct SentenceScore {
  std::string id;
  double pred_credit = 0.0;
  std::size_t num_preds = 0;
  double gold_credit = 0.0;
  std::size_t num_golds = 0;
  std::vector<int> assignment;  // recall side, per scored gold
  std::size_t degenerate_preds = 0;
  std::size_t degenerate_golds = 0;
};

// Scores the non-degenerate tuples of one sentence. Degenerate tuples are
// left out of both credits and counts and reported.
SentenceScore ScoreSentence(const ExtractionSet& preds,
                            const ExtractionSet& golds,
                            PrecisionMode mode = PrecisionMode::kManyToOne);

// The table ScoreSentence works on, degenerate tuples removed.
MatchTable BuildMatchTable(const std::vector<Tuple>& preds,
                           const std::vector<Tuple>& golds);

// 2PR / (P + R), or 0 when P + R = 0.
double F1(double precision, double recall);

struct ScoreOptions {
  Averaging averaging = Averaging::kMicro;
  PrecisionMode precision_mode = PrecisionMode::kManyToOne;
};

struct ScoreReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ScoreOptions options;
  std::vector<SentenceScore> sentences;  // gold order
  std::vector<std::string> missing_gold;  // pred ids with no gold
  std::vector<std::string> missing_pred;  // gold ids with no pred
  std::size_t degenerate_preds = 0;
  std::size_t degenerate_golds = 0;

  bool has_mismatches() const {
    return !missing_gold.empty() || !missing_pred.empty();
  }
  std::string ToJson() const;
  // P, R and F1 with three decimals, one aligned row under a header.
  std::string ToText(const std::string& label = "system") const;
};

// Joins the two sides on sentence id and scores every matched sentence.
// Unmatched ids are reported and skipped. Micro averaging sums credits and
// counts over the corpus; macro averaging means sentence-level P over
// sentences with predictions and R over sentences with golds. Throws
// FormatError on a repeated id within one side.
ScoreReport ScoreCorpus(const std::vector<ExtractionSet>& preds,
                        const std::vector<ExtractionSet>& golds,
                        const ScoreOptions& options = {});

}  // namespace oiekit

#endif  // OIEKIT_CARB_H_
