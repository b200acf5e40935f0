#include "oiekit/bio.h"

#include <algorithm>
#include <array>
#include <istream>
#include <optional>

#include "oiekit/error.h"

namespace oiekit {

BioTag BioTag::Parse(std::string_view text) {
  BioTag tag;
  if (text == "O") return tag;
  auto bad = [&] {
    return MalformedBio("unknown BIO tag '" + std::string(text) + "'");
  };
  if (text.size() < 3 || text[text.size() - 2] != '-') throw bad();
  char kind = text.back();
  if (kind != 'B' && kind != 'I') throw bad();
  tag.begin = kind == 'B';
  std::string_view head = text.substr(0, text.size() - 2);
  if (head == "P") {
    tag.role = Role::kPredicate;
    return tag;
  }
  if (head.size() < 2 || head[0] != 'A') throw bad();
  int k = 0;
  for (char c : head.substr(1)) {
    if (c < '0' || c > '9') throw bad();
    k = k * 10 + (c - '0');
    if (k > kMaxArgument) throw bad();
  }
  tag.role = Role::kArgument;
  tag.argument = k;
  return tag;
}

BioTag BioTag::ParseLenient(std::string_view text) {
  try {
    return Parse(text);
  } catch (const MalformedBio&) {
    BioTag tag;
    tag.role = Role::kInvalid;
    return tag;
  }
}

std::string BioTag::ToString() const {
  switch (role) {
    case Role::kInvalid:
      return "<invalid>";
    case Role::kOutside:
      return "O";
    case Role::kPredicate:
      return begin ? "P-B" : "P-I";
    case Role::kArgument:
      return "A" + std::to_string(argument) + (begin ? "-B" : "-I");
  }
  return "O";
}

Tuple BioRowToTuple(const Sentence& sentence, const BioRow& row, BioMode mode,
                    std::size_t* repaired) {
  if (row.tags.size() != sentence.size()) {
    throw MalformedBio("row has " + std::to_string(row.tags.size()) +
                       " tags for " + std::to_string(sentence.size()) +
                       " tokens");
  }
  std::array<std::vector<std::string>, BioTag::kMaxArgument + 1> arguments;
  std::vector<std::string> predicate;
  std::size_t promoted = 0;
  std::optional<BioTag> previous;
  for (std::size_t i = 0; i < row.tags.size(); ++i) {
    const BioTag& tag = row.tags[i];
    if (tag.role == BioTag::Role::kOutside) {
      previous.reset();
      continue;
    }
    if (tag.role == BioTag::Role::kInvalid) {
      throw MalformedBio("unknown BIO tag at token " + std::to_string(i));
    }
    if (!tag.begin && !(previous && previous->SameSpan(tag))) {
      if (mode == BioMode::kStrict) {
        throw MalformedBio("stray " + tag.ToString() + " at token " +
                           std::to_string(i));
      }
      ++promoted;
    }
    previous = tag;
    const std::string& word = sentence.word(i);
    if (tag.role == BioTag::Role::kPredicate) {
      predicate.push_back(word);
    } else {
      arguments[tag.argument].push_back(word);
    }
  }
  if (predicate.empty()) throw MissingPredicate("row has no P-* tag");

  Tuple t;
  t.subject = std::move(arguments[0]);
  t.predicate = std::move(predicate);
  for (int k = 1; k <= BioTag::kMaxArgument; ++k) {
    t.object.insert(t.object.end(), arguments[k].begin(), arguments[k].end());
  }
  t.partial = t.subject.empty() || t.object.empty();
  if (repaired) *repaired += promoted;
  return t;
}

BioConversionReport& BioConversionReport::operator+=(
    const BioConversionReport& other) {
  sentences += other.sentences;
  rows_in += other.rows_in;
  tuples_out += other.tuples_out;
  dropped_missing_predicate += other.dropped_missing_predicate;
  dropped_malformed += other.dropped_malformed;
  partial += other.partial;
  repaired_tags += other.repaired_tags;
  return *this;
}

BioConversion BioExampleToExtractions(const BioExample& example,
                                      BioMode mode) {
  BioConversion out;
  out.extractions.sentence_id = example.sentence.id();
  out.report.sentences = 1;
  for (const BioRow& row : example.rows) {
    ++out.report.rows_in;
    std::size_t repaired = 0;
    try {
      Tuple t = BioRowToTuple(example.sentence, row, mode, &repaired);
      if (t.partial) ++out.report.partial;
      out.report.repaired_tags += repaired;
      out.extractions.tuples.push_back(std::move(t));
    } catch (const MissingPredicate&) {
      ++out.report.dropped_missing_predicate;
    } catch (const MalformedBio&) {
      ++out.report.dropped_malformed;
    }
  }
  out.report.tuples_out = out.extractions.tuples.size();
  return out;
}

namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

std::vector<BioExample> ReadLsoie(std::istream& in, const std::string& source) {
  std::vector<BioExample> examples;
  std::vector<std::string> words;
  std::vector<std::vector<BioTag>> columns;
  std::string pending_id;
  std::size_t first_line = 0;
  std::size_t width = 0;

  auto flush = [&] {
    if (words.empty()) return;
    std::string id = pending_id.empty()
                         ? "s" + std::to_string(examples.size() + 1)
                         : pending_id;
    BioExample ex{Sentence(id, words), {}};
    for (auto& col : columns) ex.rows.push_back({std::move(col)});
    examples.push_back(std::move(ex));
    words.clear();
    columns.clear();
    pending_id.clear();
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) {
      flush();
      continue;
    }
    if (line.starts_with("# ")) {
      std::string_view body = Trim(line.substr(1));
      if (body.starts_with("id") && words.empty()) {
        body = Trim(body.substr(2));
        if (!body.empty() && body.front() == '=') {
          pending_id = std::string(Trim(body.substr(1)));
        }
      }
      continue;
    }
    std::vector<std::string_view> fields = SplitTabs(line);
    std::string word(Trim(fields[0]));
    if (word.empty() || std::any_of(word.begin(), word.end(), IsSpace)) {
      throw FormatError(source, line_no, "empty or space-containing token");
    }
    if (words.empty()) {
      first_line = line_no;
      width = fields.size();
      columns.assign(width - 1, {});
    } else if (fields.size() != width) {
      throw FormatError(source, line_no,
                        "expected " + std::to_string(width) +
                            " columns as on line " +
                            std::to_string(first_line) + ", got " +
                            std::to_string(fields.size()));
    }
    words.push_back(std::move(word));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      columns[c - 1].push_back(BioTag::ParseLenient(Trim(fields[c])));
    }
  }
  flush();
  return examples;
}

}  // namespace oiekit
