#include "oiekit/core.h"

#include <algorithm>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "oiekit/error.h"

namespace oiekit {

using Json = nlohmann::ordered_json;

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string_view Trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && IsSpace(text[begin])) ++begin;
  while (end > begin && IsSpace(text[end - 1])) --end;
  return text.substr(begin, end - begin);
}

std::string NormalizeTokenText(std::string_view raw) {
  return std::string(Trim(raw));
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

std::string JoinWords(const std::vector<std::string>& words,
                      std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += sep;
    out += words[i];
  }
  return out;
}

std::string AsciiLower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  });
  return out;
}

Sentence::Sentence(std::string id, const std::vector<std::string>& words)
    : id_(std::move(id)) {
  if (words.empty()) {
    throw FormatError("sentence '" + id_ + "' has no tokens");
  }
  tokens_.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string& w = words[i];
    if (w.empty() || std::any_of(w.begin(), w.end(), IsSpace)) {
      throw FormatError("sentence '" + id_ + "': token " + std::to_string(i) +
                        " is empty or contains whitespace");
    }
    tokens_.push_back({w, i});
  }
}

std::vector<std::string> Sentence::words() const {
  std::vector<std::string> out;
  out.reserve(tokens_.size());
  for (const Token& t : tokens_) out.push_back(t.text);
  return out;
}

std::string Sentence::text() const { return JoinWords(words()); }

bool Tuple::IsWellFormed() const {
  if (predicate.empty()) return false;
  if ((subject.empty() || object.empty()) && !partial) return false;
  return true;
}

Tuple MakeTuple(std::string_view subject, std::string_view predicate,
                std::string_view object) {
  Tuple t{SplitWhitespace(subject), SplitWhitespace(predicate),
          SplitWhitespace(object), false};
  t.partial = t.subject.empty() || t.object.empty();
  return t;
}

namespace {

bool SlotEqual(const std::vector<std::string>& a,
               const std::vector<std::string>& b, bool case_fold) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (case_fold ? AsciiLower(a[i]) != AsciiLower(b[i]) : a[i] != b[i]) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> StringList(const Json& value, const char* what) {
  if (!value.is_array()) {
    throw FormatError(std::string("'") + what + "' must be an array");
  }
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const Json& v : value) {
    if (!v.is_string()) {
      throw FormatError(std::string("'") + what + "' must hold strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

bool TupleEqual(const Tuple& a, const Tuple& b, bool case_fold) {
  return SlotEqual(a.subject, b.subject, case_fold) &&
         SlotEqual(a.predicate, b.predicate, case_fold) &&
         SlotEqual(a.object, b.object, case_fold);
}

std::string DebugString(const Tuple& t) {
  return "(" + JoinWords(t.subject) + ";" + JoinWords(t.predicate) + ";" +
         JoinWords(t.object) + ")";
}

std::string RecordToJson(const Record& record) {
  Json tuples = Json::array();
  for (const Tuple& t : record.tuples) {
    Json j = {{"subj", t.subject}, {"pred", t.predicate}, {"obj", t.object}};
    if (t.partial) j["partial"] = true;
    tuples.push_back(std::move(j));
  }
  Json out = {{"id", record.id}, {"tokens", record.tokens}, {"tuples", tuples}};
  return out.dump();
}

Record RecordFromJson(std::string_view line) {
  Json j = Json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) throw FormatError("invalid JSON");
  if (!j.is_object()) throw FormatError("record must be a JSON object");
  Record r;
  if (!j.contains("id") || !j["id"].is_string()) {
    throw FormatError("record needs a string 'id'");
  }
  r.id = j["id"].get<std::string>();
  if (j.contains("tokens")) r.tokens = StringList(j["tokens"], "tokens");
  for (const std::string& tok : r.tokens) {
    if (tok.empty() || std::any_of(tok.begin(), tok.end(), IsSpace)) {
      throw FormatError("token is empty or contains whitespace");
    }
  }
  if (j.contains("tuples")) {
    if (!j["tuples"].is_array()) throw FormatError("'tuples' must be an array");
    for (const Json& jt : j["tuples"]) {
      if (!jt.is_object()) throw FormatError("tuple must be an object");
      Tuple t;
      if (jt.contains("subj")) t.subject = StringList(jt["subj"], "subj");
      if (jt.contains("pred")) t.predicate = StringList(jt["pred"], "pred");
      if (jt.contains("obj")) t.object = StringList(jt["obj"], "obj");
      if (jt.contains("partial")) {
        if (!jt["partial"].is_boolean()) {
          throw FormatError("'partial' must be a boolean");
        }
        t.partial = jt["partial"].get<bool>();
      }
      if (!t.IsWellFormed()) {
        throw FormatError("malformed tuple " + DebugString(t) +
                          " (empty predicate, or empty argument without "
                          "partial flag)");
      }
      r.tuples.push_back(std::move(t));
    }
  }
  return r;
}

std::vector<Record> ReadRecords(std::istream& in, const std::string& source) {
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      records.push_back(RecordFromJson(line));
    } catch (const FormatError& e) {
      throw FormatError(source, line_no, e.what());
    }
  }
  return records;
}

void WriteRecords(std::ostream& out, const std::vector<Record>& records) {
  for (const Record& r : records) out << RecordToJson(r) << '\n';
}

}  // namespace oiekit
