#ifndef OIEKIT_CORE_H_
#define OIEKIT_CORE_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace oiekit {

// A single pre-split word of a sentence.
struct Token {
  std::string text;
  std::size_t index = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

// An ordered, non-empty list of tokens with contiguous 0-based indices.
class Sentence {
 public:
  // Throws FormatError if `words` is empty or any word is empty or contains
  // whitespace.
  Sentence(std::string id, const std::vector<std::string>& words);

  const std::string& id() const { return id_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  const std::string& word(std::size_t i) const { return tokens_.at(i).text; }
  std::vector<std::string> words() const;
  // Words joined by single spaces.
  std::string text() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;

 private:
  std::string id_;
  std::vector<Token> tokens_;
};

// One (subject; predicate; object) extraction. Slots are token-text lists.
// A tuple recovered from a malformed source may have an empty subject or
// object; such tuples carry `partial = true`.
struct Tuple {
  std::vector<std::string> subject;
  std::vector<std::string> predicate;
  std::vector<std::string> object;
  bool partial = false;

  // Predicate non-empty, and empty argument slots only when partial.
  bool IsWellFormed() const;
  std::size_t TokenCount() const {
    return subject.size() + predicate.size() + object.size();
  }

  friend bool operator==(const Tuple&, const Tuple&) = default;
};

// Builds a tuple from space-separated slot strings and sets `partial` when an
// argument slot is empty.
Tuple MakeTuple(std::string_view subject, std::string_view predicate,
                std::string_view object);

struct ExtractionSet {
  std::string sentence_id;
  std::vector<Tuple> tuples;

  friend bool operator==(const ExtractionSet&, const ExtractionSet&) = default;
};

// The canonical on-disk record: a sentence with its extractions. Prediction
// files may leave `tokens` empty.
struct Record {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<Tuple> tuples;

  ExtractionSet extractions() const { return {id, tuples}; }
  Sentence sentence() const { return Sentence(id, tokens); }

  friend bool operator==(const Record&, const Record&) = default;
};

// Strips leading and trailing whitespace; internal whitespace is kept.
std::string NormalizeTokenText(std::string_view raw);

// Slot-wise equality. `partial` is not compared.
bool TupleEqual(const Tuple& a, const Tuple& b, bool case_fold);

// String helpers shared across modules.
bool IsSpace(char c);
std::vector<std::string> SplitWhitespace(std::string_view text);
std::string JoinWords(const std::vector<std::string>& words,
                      std::string_view sep = " ");
std::string AsciiLower(std::string_view text);
std::string_view Trim(std::string_view text);

// Renders "(subj;pred;obj)" for logs and test failure messages.
std::string DebugString(const Tuple& t);

// JSON-lines I/O for the canonical record:
//   {"id": ..., "tokens": [...], "tuples": [{"subj": [...], "pred": [...],
//    "obj": [...]}]}
// A "partial": true member is written only for partial tuples.
std::string RecordToJson(const Record& record);
// Throws FormatError on malformed JSON or schema violations.
Record RecordFromJson(std::string_view line);

// Reads every non-blank line of `in`. Throws FormatError with
// `source:line` context on the first bad line.
std::vector<Record> ReadRecords(std::istream& in, const std::string& source);
void WriteRecords(std::ostream& out, const std::vector<Record>& records);

}  // namespace oiekit

#endif  // OIEKIT_CORE_H_
