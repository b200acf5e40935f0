#ifndef OIEKIT_BIO_H_
#define OIEKIT_BIO_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "oiekit/core.h"

namespace oiekit {

// One BIO label of an LSOIE extraction row: A0..A5 arguments, the predicate P,
// or outside.
struct BioTag {
  // kInvalid holds a label that failed to parse in a lenient read; a row
  // containing one is rejected at conversion time.
  enum class Role { kOutside, kArgument, kPredicate, kInvalid };

  Role role = Role::kOutside;
  int argument = 0;  // 0..kMaxArgument, meaningful for kArgument only
  bool begin = false;

  static constexpr int kMaxArgument = 5;

  // Accepts "A{k}-B", "A{k}-I", "P-B", "P-I", "O". Throws MalformedBio.
  static BioTag Parse(std::string_view text);
  // Like Parse, but yields a kInvalid tag instead of throwing.
  static BioTag ParseLenient(std::string_view text);
  std::string ToString() const;
  bool SameSpan(const BioTag& other) const {
    return role == other.role && argument == other.argument;
  }

  friend bool operator==(const BioTag&, const BioTag&) = default;
};

struct BioRow {
  std::vector<BioTag> tags;
};

struct BioExample {
  Sentence sentence;
  std::vector<BioRow> rows;
};

// How a stray X-I that does not continue an X span is treated.
enum class BioMode {
  kRepair,  // promote it to X-B
  kStrict,  // reject the row with MalformedBio
};

// Groups one BIO row into a tuple: A0 -> subject, P -> predicate,
// A1 then A2..A5 (ascending) -> object. Source order is kept inside each role.
// Throws MissingPredicate or MalformedBio. `repaired`, when given, receives
// the number of promoted I-tags.
Tuple BioRowToTuple(const Sentence& sentence, const BioRow& row,
                    BioMode mode = BioMode::kRepair,
                    std::size_t* repaired = nullptr);

struct BioConversionReport {
  std::size_t sentences = 0;
  std::size_t rows_in = 0;
  std::size_t tuples_out = 0;
  std::size_t dropped_missing_predicate = 0;
  std::size_t dropped_malformed = 0;
  std::size_t partial = 0;
  std::size_t repaired_tags = 0;

  std::size_t dropped_rows() const {
    return dropped_missing_predicate + dropped_malformed;
  }
  BioConversionReport& operator+=(const BioConversionReport& other);
  friend bool operator==(const BioConversionReport&,
                         const BioConversionReport&) = default;
};

struct BioConversion {
  ExtractionSet extractions;
  BioConversionReport report;
};

// One tuple per valid row, in row order. Failing rows are dropped and counted.
BioConversion BioExampleToExtractions(const BioExample& example,
                                      BioMode mode = BioMode::kRepair);

// Reads the LSOIE column layout: one token per line followed by one
// tab-separated BIO column per extraction row, blank line between sentences.
// Lines starting with "# " are comments; "# id = X" before a sentence names
// it, otherwise sentences are numbered s1, s2, ... Unknown labels are kept as
// kInvalid so that only their row is dropped. Throws FormatError with
// source:line context on layout errors.
std::vector<BioExample> ReadLsoie(std::istream& in, const std::string& source);

}  // namespace oiekit

#endif  // OIEKIT_BIO_H_
