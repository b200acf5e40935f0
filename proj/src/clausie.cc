#include "oiekit/clausie.h"

#include <algorithm>
#include <istream>

#include "json.hpp"
#include "oiekit/error.h"

namespace oiekit {

namespace {

bool WordEq(const std::string& a, const std::string& b, bool case_fold) {
  return case_fold ? AsciiLower(a) == AsciiLower(b) : a == b;
}

bool IsContiguousSubsequence(const std::vector<std::string>& needle,
                             const std::vector<std::string>& hay,
                             bool case_fold) {
  if (needle.empty()) return true;
  if (needle.size() > hay.size()) return false;
  auto it = std::search(
      hay.begin(), hay.end(), needle.begin(), needle.end(),
      [&](const std::string& x, const std::string& y) {
        return WordEq(x, y, case_fold);
      });
  return it != hay.end();
}

}  // namespace

bool IsSubsumed(const Tuple& a, const Tuple& b, bool case_fold) {
  if (TupleEqual(a, b, case_fold)) return false;
  return IsContiguousSubsequence(a.subject, b.subject, case_fold) &&
         IsContiguousSubsequence(a.predicate, b.predicate, case_fold) &&
         IsContiguousSubsequence(a.object, b.object, case_fold);
}

ExtractionSet FilterExtractions(const ExtractionSet& set, bool case_fold) {
  ExtractionSet out{set.sentence_id, {}};
  const auto& tuples = set.tuples;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < tuples.size() && !drop; ++j) {
      if (j == i) continue;
      if (j < i && TupleEqual(tuples[i], tuples[j], case_fold)) drop = true;
      if (IsSubsumed(tuples[i], tuples[j], case_fold)) drop = true;
    }
    if (!drop) out.tuples.push_back(tuples[i]);
  }
  return out;
}

Tuple ParseClausieTriple(std::string_view text) {
  std::string_view body = Trim(text);
  if (body.size() < 2 || body.front() != '(' || body.back() != ')') {
    throw FormatError("triple must be enclosed in parentheses");
  }
  body = body.substr(1, body.size() - 2);
  std::vector<std::string_view> slots;
  std::size_t start = 0;
  while (true) {
    std::size_t semi = body.find(';', start);
    slots.push_back(body.substr(start, semi - start));
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  if (slots.size() != 3) {
    throw FormatError("triple needs exactly 3 ';'-separated slots, got " +
                      std::to_string(slots.size()));
  }
  Tuple t{SplitWhitespace(slots[0]), SplitWhitespace(slots[1]),
          SplitWhitespace(slots[2]), false};
  if (t.subject.empty() || t.predicate.empty() || t.object.empty()) {
    throw FormatError("triple has an empty slot");
  }
  return t;
}

std::vector<RawClausieRecord> ReadClausieText(std::istream& in) {
  std::vector<RawClausieRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  bool orphan_reported = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty()) continue;
    bool failure = line.front() == '!' ||
                   line.find("NullPointerException") != std::string_view::npos;
    if (line.front() == '(' || failure) {
      if (records.empty()) {
        // Output before any header cannot be attributed to a sentence.
        if (!orphan_reported) {
          RawClausieRecord orphan;
          orphan.line = line_no;
          orphan.format_error = "extraction before any sentence header";
          records.push_back(std::move(orphan));
          orphan_reported = true;
        }
        continue;
      }
      if (failure) {
        records.back().failed = true;
      } else {
        records.back().triple_texts.emplace_back(line);
      }
      continue;
    }
    RawClausieRecord rec;
    rec.line = line_no;
    std::size_t tab = raw.find('\t');
    if (tab == std::string::npos) {
      rec.format_error = "sentence header needs 'id<TAB>text'";
    } else {
      rec.id = std::string(Trim(std::string_view(raw).substr(0, tab)));
      rec.sentence = std::string(Trim(std::string_view(raw).substr(tab + 1)));
      if (rec.id.empty() || rec.sentence.empty()) {
        rec.format_error = "sentence header has empty id or text";
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<RawClausieRecord> ReadClausieJsonl(std::istream& in) {
  std::vector<RawClausieRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    RawClausieRecord rec;
    rec.line = line_no;
    try {
      auto j = nlohmann::json::parse(line);
      if (j.is_object() && j.value("failed", false)) {
        rec.failed = true;
        rec.id = j.value("id", "");
        rec.sentence = JoinWords(
            j.value("tokens", std::vector<std::string>{}));
        j.erase("failed");
        if (!j.contains("tuples")) j["tuples"] = nlohmann::json::array();
      }
      Record r = RecordFromJson(j.dump());
      rec.id = r.id;
      rec.sentence = JoinWords(r.tokens);
      rec.tuples = std::move(r.tuples);
    } catch (const std::exception& e) {
      rec.format_error = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

IngestResult IngestCorpus(const std::vector<RawClausieRecord>& records) {
  IngestResult result;
  IngestReport& report = result.report;
  for (const RawClausieRecord& rec : records) {
    ++report.records;
    auto error = [&](const std::string& msg) {
      ++report.format_errors;
      result.messages.push_back("line " + std::to_string(rec.line) + ": " +
                                msg);
    };
    if (!rec.format_error.empty()) {
      error(rec.format_error);
      ++report.skipped_records;
      continue;
    }
    if (rec.failed) {
      ++report.dropped_failed;
      continue;
    }
    Record out;
    out.id = rec.id;
    out.tokens = SplitWhitespace(rec.sentence);
    if (out.tokens.empty()) {
      error("record '" + rec.id + "' has no sentence tokens");
      ++report.skipped_records;
      continue;
    }
    out.tuples = rec.tuples;
    for (const std::string& text : rec.triple_texts) {
      try {
        out.tuples.push_back(ParseClausieTriple(text));
      } catch (const FormatError& e) {
        error("record '" + rec.id + "': " + e.what() + ": " + text);
      }
    }
    report.triples_in += out.tuples.size();
    report.triples_out += out.tuples.size();
    ++report.kept;
    result.dataset.push_back(std::move(out));
  }
  return result;
}

void FilterCorpus(IngestResult& result, bool case_fold) {
  std::size_t out = 0;
  for (Record& r : result.dataset) {
    r.tuples = FilterExtractions(r.extractions(), case_fold).tuples;
    out += r.tuples.size();
  }
  result.report.triples_out = out;
}

}  // namespace oiekit
