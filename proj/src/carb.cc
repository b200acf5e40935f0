#include "oiekit/carb.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "oiekit/error.h"

namespace oiekit {

namespace {

std::size_t Overlap(const std::vector<std::string>& pred,
                    const std::vector<std::string>& gold) {
  std::map<std::string, int> counts;
  for (const std::string& t : gold) ++counts[AsciiLower(t)];
  std::size_t overlap = 0;
  for (const std::string& t : pred) {
    auto it = counts.find(AsciiLower(t));
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return overlap;
}

bool IsDegenerate(const Tuple& t) { return t.TokenCount() == 0; }

}  // namespace

PairScore PairMatch(const Tuple& pred, const Tuple& gold) {
  if (IsDegenerate(pred)) throw DegenerateTuple("predicted tuple has no tokens");
  if (IsDegenerate(gold)) throw DegenerateTuple("gold tuple has no tokens");
  const std::size_t overlap = Overlap(pred.subject, gold.subject) +
                              Overlap(pred.predicate, gold.predicate) +
                              Overlap(pred.object, gold.object);
  return {static_cast<double>(overlap) / static_cast<double>(pred.TokenCount()),
          static_cast<double>(overlap) / static_cast<double>(gold.TokenCount())};
}

double StableSum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

double AssignmentTotal(const WeightTable& table,
                       const std::vector<int>& pred_of_gold) {
  std::vector<double> values;
  for (std::size_t g = 0; g < pred_of_gold.size(); ++g) {
    if (pred_of_gold[g] >= 0) values.push_back(table[g][pred_of_gold[g]]);
  }
  return StableSum(std::move(values));
}

Assignment MaxAssignment(const WeightTable& table) {
  const std::size_t rows = table.size();
  const std::size_t cols = rows == 0 ? 0 : table[0].size();
  Assignment result;
  result.pred_of_gold.assign(rows, -1);
  if (rows == 0 || cols == 0) return result;

  // Minimum-cost assignment on the negated, zero-padded n x n table.
  // Arrays are 1-based; p[j] is the row matched to column j.
  const std::size_t n = std::max(rows, cols);
  auto cost = [&](std::size_t i, std::size_t j) {
    return i <= rows && j <= cols ? -table[i - 1][j - 1] : 0.0;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= cols; ++j) {
    const std::size_t i = p[j];
    // Zero-weight pairs are left unassigned; they add nothing.
    if (i >= 1 && i <= rows && table[i - 1][j - 1] > 0.0) {
      result.pred_of_gold[i - 1] = static_cast<int>(j - 1);
    }
  }
  result.total = AssignmentTotal(table, result.pred_of_gold);
  return result;
}

Assignment AssignmentOracle(const WeightTable& table) {
  const std::size_t rows = table.size();
  const std::size_t cols = rows == 0 ? 0 : table[0].size();
  if (rows > kOracleLimit || cols > kOracleLimit) {
    throw TooLarge("assignment oracle is limited to " +
                   std::to_string(kOracleLimit) + "x" +
                   std::to_string(kOracleLimit) + " tables");
  }
  Assignment best;
  best.pred_of_gold.assign(rows, -1);
  std::vector<int> current(rows, -1);
  std::vector<bool> taken(cols, false);
  auto search = [&](auto&& self, std::size_t g) -> void {
    if (g == rows) {
      const double total = AssignmentTotal(table, current);
      if (total > best.total) {
        best.total = total;
        best.pred_of_gold = current;
      }
      return;
    }
    current[g] = -1;
    self(self, g + 1);
    for (std::size_t p = 0; p < cols; ++p) {
      if (taken[p]) continue;
      taken[p] = true;
      current[g] = static_cast<int>(p);
      self(self, g + 1);
      taken[p] = false;
    }
    current[g] = -1;
  };
  search(search, 0);
  return best;
}

MatchTable BuildMatchTable(const std::vector<Tuple>& preds,
                           const std::vector<Tuple>& golds) {
  MatchTable table;
  for (const Tuple& g : golds) {
    if (IsDegenerate(g)) continue;
    std::vector<double> prec, rec;
    for (const Tuple& p : preds) {
      if (IsDegenerate(p)) continue;
      PairScore s = PairMatch(p, g);
      prec.push_back(s.precision);
      rec.push_back(s.recall);
    }
    table.precision.push_back(std::move(prec));
    table.recall.push_back(std::move(rec));
  }
  return table;
}

SentenceScore ScoreSentence(const ExtractionSet& preds,
                            const ExtractionSet& golds, PrecisionMode mode) {
  if (!preds.sentence_id.empty() && !golds.sentence_id.empty() &&
      preds.sentence_id != golds.sentence_id) {
    throw std::invalid_argument("cannot score '" + preds.sentence_id +
                                "' against '" + golds.sentence_id + "'");
  }
  SentenceScore s;
  s.id = golds.sentence_id.empty() ? preds.sentence_id : golds.sentence_id;
  for (const Tuple& t : preds.tuples) {
    IsDegenerate(t) ? ++s.degenerate_preds : ++s.num_preds;
  }
  for (const Tuple& t : golds.tuples) {
    IsDegenerate(t) ? ++s.degenerate_golds : ++s.num_golds;
  }
  const MatchTable table = BuildMatchTable(preds.tuples, golds.tuples);

  if (s.num_golds > 0 && s.num_preds > 0) {
    if (mode == PrecisionMode::kManyToOne) {
      std::vector<double> credits(s.num_preds, 0.0);
      for (const auto& row : table.precision) {
        for (std::size_t p = 0; p < s.num_preds; ++p) {
          credits[p] = std::max(credits[p], row[p]);
        }
      }
      s.pred_credit = StableSum(std::move(credits));
    } else {
      s.pred_credit = MaxAssignment(table.precision).total;
    }
  }
  Assignment recall = MaxAssignment(table.recall);
  s.gold_credit = recall.total;
  s.assignment = std::move(recall.pred_of_gold);
  return s;
}

double F1(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

namespace {

double Ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

std::unordered_map<std::string, std::size_t> IndexById(
    const std::vector<ExtractionSet>& sets, const char* side) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (!index.emplace(sets[i].sentence_id, i).second) {
      throw FormatError(std::string(side) + " file repeats sentence id '" +
                        sets[i].sentence_id + "'");
    }
  }
  return index;
}

const char* AveragingName(Averaging a) {
  return a == Averaging::kMicro ? "micro" : "macro";
}

const char* PrecisionModeName(PrecisionMode m) {
  return m == PrecisionMode::kManyToOne ? "many-to-one" : "one-to-one";
}

}  // namespace

ScoreReport ScoreCorpus(const std::vector<ExtractionSet>& preds,
                        const std::vector<ExtractionSet>& golds,
                        const ScoreOptions& options) {
  ScoreReport report;
  report.options = options;
  const auto pred_index = IndexById(preds, "prediction");
  const auto gold_index = IndexById(golds, "gold");
  for (const ExtractionSet& p : preds) {
    if (!gold_index.count(p.sentence_id)) {
      report.missing_gold.push_back(p.sentence_id);
    }
  }

  double pred_credit = 0.0, gold_credit = 0.0;
  std::size_t num_preds = 0, num_golds = 0;
  double p_sum = 0.0, r_sum = 0.0;
  std::size_t p_count = 0, r_count = 0;
  for (const ExtractionSet& g : golds) {
    auto it = pred_index.find(g.sentence_id);
    if (it == pred_index.end()) {
      report.missing_pred.push_back(g.sentence_id);
      continue;
    }
    SentenceScore s =
        ScoreSentence(preds[it->second], g, options.precision_mode);
    pred_credit += s.pred_credit;
    gold_credit += s.gold_credit;
    num_preds += s.num_preds;
    num_golds += s.num_golds;
    if (s.num_preds > 0) {
      p_sum += Ratio(s.pred_credit, s.num_preds);
      ++p_count;
    }
    if (s.num_golds > 0) {
      r_sum += Ratio(s.gold_credit, s.num_golds);
      ++r_count;
    }
    report.degenerate_preds += s.degenerate_preds;
    report.degenerate_golds += s.degenerate_golds;
    report.sentences.push_back(std::move(s));
  }
  if (options.averaging == Averaging::kMicro) {
    report.precision = Ratio(pred_credit, static_cast<double>(num_preds));
    report.recall = Ratio(gold_credit, static_cast<double>(num_golds));
  } else {
    report.precision = Ratio(p_sum, static_cast<double>(p_count));
    report.recall = Ratio(r_sum, static_cast<double>(r_count));
  }
  report.f1 = F1(report.precision, report.recall);
  return report;
}

std::string ScoreReport::ToJson() const {
  using Json = nlohmann::ordered_json;
  Json sents = Json::array();
  for (const SentenceScore& s : sentences) {
    sents.push_back({{"id", s.id},
                     {"pred_credit", s.pred_credit},
                     {"num_preds", s.num_preds},
                     {"gold_credit", s.gold_credit},
                     {"num_golds", s.num_golds},
                     {"assignment", s.assignment}});
  }
  Json j = {{"precision", precision},
            {"recall", recall},
            {"f1", f1},
            {"averaging", AveragingName(options.averaging)},
            {"precision_mode", PrecisionModeName(options.precision_mode)},
            {"sentences_scored", sentences.size()},
            {"missing_gold", missing_gold},
            {"missing_pred", missing_pred},
            {"degenerate_preds", degenerate_preds},
            {"degenerate_golds", degenerate_golds},
            {"sentences", sents}};
  return j.dump();
}

std::string ScoreReport::ToText(const std::string& label) const {
  const int width = static_cast<int>(std::max<std::size_t>(label.size(), 6));
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-*s  %6s  %6s  %6s\n", width, "", "P", "R",
                "F1");
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-*s  %6.3f  %6.3f  %6.3f\n", width,
                label.c_str(), precision, recall, f1);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "sentences=%zu missing_gold=%zu missing_pred=%zu "
                "degenerate=%zu/%zu (%s, %s)\n",
                sentences.size(), missing_gold.size(), missing_pred.size(),
                degenerate_preds, degenerate_golds,
                AveragingName(options.averaging),
                PrecisionModeName(options.precision_mode));
  out += buf;
  return out;
}

}  // namespace oiekit
