#ifndef OIEKIT_CLAUSIE_H_
#define OIEKIT_CLAUSIE_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "oiekit/core.h"

namespace oiekit {

// True iff every slot of `a` is a contiguous token subsequence of the same
// slot of `b`, and the two tuples differ.
bool IsSubsumed(const Tuple& a, const Tuple& b, bool case_fold = false);

// Drops every tuple subsumed by another tuple of the set and every repeat of
// an earlier tuple. Survivors keep their input order and contents.
ExtractionSet FilterExtractions(const ExtractionSet& set,
                                bool case_fold = false);

// Parses a single "(subj; pred; obj)" line. Throws FormatError unless it has
// exactly three non-empty slots.
Tuple ParseClausieTriple(std::string_view text);

// One captured ClausIE result for a sentence, before validation.
struct RawClausieRecord {
  std::string id;
  std::string sentence;                   // space-separated tokens
  std::vector<std::string> triple_texts;  // textual "(s; p; o)" lines
  std::vector<Tuple> tuples;              // pre-parsed (JSON-lines input)
  bool failed = false;                    // extractor crashed on it
  std::string format_error;               // non-empty: record unparseable
  std::size_t line = 0;
};

// Reads ClausIE's textual output. Each sentence starts with a header line
// "id<TAB>sentence text"; the following lines are triples "(s; p; o)" or a
// failure marker: a line starting with '!' or mentioning
// NullPointerException. Blank lines are ignored.
std::vector<RawClausieRecord> ReadClausieText(std::istream& in);

// Reads core-model JSON-lines records; {"failed": true} marks a failure.
std::vector<RawClausieRecord> ReadClausieJsonl(std::istream& in);

struct IngestReport {
  std::size_t records = 0;
  std::size_t kept = 0;
  std::size_t dropped_failed = 0;
  std::size_t format_errors = 0;  // bad records plus bad triple lines
  std::size_t skipped_records = 0;
  std::size_t triples_in = 0;
  std::size_t triples_out = 0;

  double drop_ratio() const {
    return records == 0 ? 0.0
                        : static_cast<double>(dropped_failed) /
                              static_cast<double>(records);
  }
  friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

struct IngestResult {
  std::vector<Record> dataset;
  IngestReport report;
  std::vector<std::string> messages;  // one per format error
};

// Validates raw records: failed sentences are dropped, unparseable records
// skipped, malformed triple lines skipped while the rest of the record is
// kept. No redundancy filtering happens here.
IngestResult IngestCorpus(const std::vector<RawClausieRecord>& records);

// Applies FilterExtractions to every record and updates triples_out.
void FilterCorpus(IngestResult& result, bool case_fold = false);

}  // namespace oiekit

#endif  // OIEKIT_CLAUSIE_H_
