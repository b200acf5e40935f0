#include "oiekit/triple_codec.h"

namespace oiekit {

std::string AddPrefix(std::string_view text) {
  return std::string(kTaskPrefix) + std::string(text);
}

bool HasPrefix(std::string_view text) { return text.starts_with(kTaskPrefix); }

std::string StripPrefix(std::string_view text) {
  if (HasPrefix(text)) text.remove_prefix(kTaskPrefix.size());
  return std::string(text);
}

std::string EncodeTriples(const ExtractionSet& set) {
  std::string out;
  for (const Tuple& t : set.tuples) {
    if (!out.empty()) out += ' ';
    out += '(';
    out += JoinWords(t.subject);
    out += " ; ";
    out += JoinWords(t.predicate);
    out += " ; ";
    out += JoinWords(t.object);
    out += ')';
  }
  return out;
}

namespace {

void DecodeGroup(std::string_view body, std::size_t offset, DecodeResult& out) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t semi = body.find(';', start);
    parts.push_back(body.substr(start, semi - start));
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  if (parts.size() == 1) {
    out.warnings.push_back({offset, "group without ';' dropped"});
    return;
  }
  Tuple t;
  t.subject = SplitWhitespace(parts[0]);
  t.predicate = SplitWhitespace(parts[1]);
  for (std::size_t i = 2; i < parts.size(); ++i) {
    for (std::string& w : SplitWhitespace(parts[i])) {
      t.object.push_back(std::move(w));
    }
  }
  if (t.predicate.empty()) {
    out.warnings.push_back({offset, "group with empty predicate dropped"});
    return;
  }
  if (parts.size() == 2) {
    out.warnings.push_back({offset, "group with one ';' kept without object"});
  } else if (parts.size() > 3) {
    out.warnings.push_back(
        {offset, "extra ';' slots merged into the object"});
  }
  t.partial = t.subject.empty() || t.object.empty();
  out.extractions.tuples.push_back(std::move(t));
}

}  // namespace

DecodeResult DecodeTriples(std::string_view text, std::string sentence_id) {
  DecodeResult out;
  out.extractions.sentence_id = std::move(sentence_id);
  constexpr std::size_t kNone = std::string_view::npos;
  std::size_t stray = kNone;
  auto close_stray = [&] {
    if (stray != kNone) {
      out.warnings.push_back({stray, "text outside '( ... )' ignored"});
      stray = kNone;
    }
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    char c = text[pos];
    if (c == '(') {
      close_stray();
      std::size_t j = pos + 1;
      while (j < text.size() && text[j] != '(' && text[j] != ')') ++j;
      if (j == text.size()) {
        out.warnings.push_back({pos, "unbalanced '(' dropped"});
        pos = j;
      } else if (text[j] == '(') {
        out.warnings.push_back({pos, "unbalanced '(' dropped"});
        pos = j;
      } else {
        DecodeGroup(text.substr(pos + 1, j - pos - 1), pos, out);
        pos = j + 1;
      }
    } else if (c == ')') {
      close_stray();
      out.warnings.push_back({pos, "stray ')' ignored"});
      ++pos;
    } else {
      if (stray == kNone && !IsSpace(c)) stray = pos;
      ++pos;
    }
  }
  close_stray();
  return out;
}

}  // namespace oiekit
