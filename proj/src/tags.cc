#include "oiekit/tags.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "oiekit/error.h"

namespace oiekit {

std::string_view LayerName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kPos:
      return "pos";
    case LayerKind::kSynDp:
      return "syndp";
    case LayerKind::kSemDp:
      return "semdp";
  }
  return "pos";
}

std::optional<LayerKind> ParseLayerKind(std::string_view name) {
  std::string n = AsciiLower(name);
  if (n == "pos") return LayerKind::kPos;
  if (n == "syndp") return LayerKind::kSynDp;
  if (n == "semdp") return LayerKind::kSemDp;
  return std::nullopt;
}

const std::vector<std::string>& PosInventory() {
  static const std::vector<std::string> kTags = {
      // Penn Treebank
      "$", "''", "(", ")", ",", "--", ".", ":", "CC", "CD", "DT", "EX", "FW",
      "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNP", "NNPS", "NNS", "PDT",
      "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB",
      "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB", "``",
      // Stanza / English Web Treebank extensions
      "#", "-LRB-", "-RRB-", "HYPH", "NFP", "ADD", "AFX", "GW", "XX"};
  return kTags;
}

namespace {

const std::vector<std::string>& UniversalRelations() {
  static const std::vector<std::string> kRels = {
      "acl",        "advcl",     "advmod", "amod",     "appos",
      "aux",        "case",      "cc",     "ccomp",    "clf",
      "compound",   "conj",      "cop",    "csubj",    "dep",
      "det",        "discourse", "dislocated", "expl", "fixed",
      "flat",       "goeswith",  "iobj",   "list",     "mark",
      "nmod",       "nsubj",     "nummod", "obj",      "obl",
      "orphan",     "parataxis", "punct",  "reparandum", "root",
      "vocative",   "xcomp"};
  return kRels;
}

bool Contains(const std::vector<std::string>& v, std::string_view x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

const std::vector<std::string>& SynDpInventory() {
  static const std::vector<std::string> kRels = [] {
    std::vector<std::string> rels = UniversalRelations();
    for (const char* sub :
         {"acl:relcl", "advcl:relcl", "aux:pass", "cc:preconj", "compound:prt",
          "csubj:outer", "csubj:pass", "det:predet", "flat:foreign",
          "nmod:desc", "nmod:npmod", "nmod:poss", "nmod:tmod",
          "nmod:unmarked", "nsubj:outer", "nsubj:pass", "obl:agent",
          "obl:npmod", "obl:tmod", "obl:unmarked"}) {
      rels.emplace_back(sub);
    }
    return rels;
  }();
  return kRels;
}

const std::vector<std::string>& SemDpInventory() {
  static const std::vector<std::string> kRels = {
      "ARG1", "ARG2", "compound", "BV",   "root",  "poss",
      "loc",  "-and-c", "ARG3",   "times", "mwe",  "appos",
      "conj", "neg",  "subord",   "-or-c", "-but-c", "_"};
  return kRels;
}

const std::vector<std::string>& SpecialTags() {
  static const std::vector<std::string> kTags = {
      std::string(kPadTag), std::string(kUnkTag), std::string(kEosTag)};
  return kTags;
}

bool IsPosTag(std::string_view tag) { return Contains(PosInventory(), tag); }

bool IsSynDpRelation(std::string_view rel) {
  if (Contains(SynDpInventory(), rel)) return true;
  std::size_t colon = rel.find(':');
  return colon != std::string_view::npos && colon > 0 &&
         colon + 1 < rel.size() &&
         Contains(UniversalRelations(), rel.substr(0, colon));
}

bool IsSemDpRelation(std::string_view rel) {
  return Contains(SemDpInventory(), rel);
}

bool TaggedSentence::has(LayerKind kind) const {
  switch (kind) {
    case LayerKind::kPos:
      return pos.has_value();
    case LayerKind::kSynDp:
      return syndp.has_value();
    case LayerKind::kSemDp:
      return semdp.has_value();
  }
  return false;
}

std::string SelectSemDpTag(const std::vector<DepArc>& pairs) {
  if (pairs.empty()) return std::string(kBlankTag);
  return pairs.front().relation;
}

std::vector<std::string> TaggedSentence::WordTags(LayerKind kind) const {
  if (!has(kind)) {
    throw std::invalid_argument("sentence '" + sentence.id() + "' has no " +
                                std::string(LayerName(kind)) + " layer");
  }
  std::vector<std::string> out;
  switch (kind) {
    case LayerKind::kPos:
      out = *pos;
      break;
    case LayerKind::kSynDp:
      for (const DepArc& a : *syndp) out.push_back(a.relation);
      break;
    case LayerKind::kSemDp:
      for (const auto& pairs : *semdp) out.push_back(SelectSemDpTag(pairs));
      break;
  }
  return out;
}

std::vector<TagIssue> ValidateTaggedSentence(const TaggedSentence& tagged,
                                             std::size_t first_line) {
  std::vector<TagIssue> issues;
  const std::size_t n = tagged.sentence.size();
  auto line_of = [&](std::size_t i) {
    return first_line == 0 ? 0 : first_line + i;
  };
  auto issue = [&](std::size_t line, std::string msg) {
    issues.push_back({line, "sentence '" + tagged.sentence.id() + "': " +
                                std::move(msg)});
  };
  const int max_head = static_cast<int>(n);

  if (tagged.pos) {
    if (tagged.pos->size() != n) {
      issue(first_line, "PoS layer length differs from sentence length");
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!IsPosTag((*tagged.pos)[i])) {
          issue(line_of(i), "unknown PoS tag '" + (*tagged.pos)[i] + "'");
        }
      }
    }
  }
  if (tagged.syndp) {
    if (tagged.syndp->size() != n) {
      issue(first_line, "SynDP layer length differs from sentence length");
    } else {
      std::size_t roots = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const DepArc& a = (*tagged.syndp)[i];
        if (a.head < 0 || a.head > max_head) {
          issue(line_of(i), "SynDP head " + std::to_string(a.head) +
                                " out of range");
        } else if (a.head == static_cast<int>(i) + 1) {
          issue(line_of(i), "SynDP head points at the word itself");
        }
        if (!IsSynDpRelation(a.relation)) {
          issue(line_of(i), "unknown SynDP relation '" + a.relation + "'");
        }
        if ((a.head == 0) != (a.relation == "root")) {
          issue(line_of(i), "SynDP root must have head 0 and relation 'root'");
        }
        if (a.head == 0) ++roots;
      }
      if (roots != 1) {
        issue(first_line, "SynDP layer has " + std::to_string(roots) +
                              " roots, expected exactly 1");
      }
    }
  }
  if (tagged.semdp) {
    if (tagged.semdp->size() != n) {
      issue(first_line, "SemDP layer length differs from sentence length");
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        for (const DepArc& a : (*tagged.semdp)[i]) {
          if (a.head < 0 || a.head > max_head) {
            issue(line_of(i), "SemDP head " + std::to_string(a.head) +
                                  " out of range");
          }
          if (!IsSemDpRelation(a.relation)) {
            issue(line_of(i), "unknown SemDP relation '" + a.relation + "'");
          }
        }
      }
    }
  }
  return issues;
}

namespace {

std::vector<std::string_view> SplitOn(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t at = s.find(sep, start);
    parts.push_back(s.substr(start, at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return parts;
}

std::optional<int> ParseInt(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Row {
  std::size_t line;
  std::vector<std::string> fields;
};

// Builds one sentence from its rows, or reports why it cannot.
std::optional<TaggedSentence> BuildSentence(const std::string& id,
                                            const std::vector<Row>& rows,
                                            std::vector<TagIssue>& issues) {
  auto fail = [&](std::size_t line, const std::string& msg) {
    issues.push_back({line, "sentence '" + id + "': " + msg});
    return std::nullopt;
  };
  const std::size_t width = rows.front().fields.size();
  std::vector<std::string> words;
  for (const Row& r : rows) {
    if (r.fields.size() != width) {
      return fail(r.line, "expected " + std::to_string(width) +
                              " columns, got " +
                              std::to_string(r.fields.size()));
    }
    if (r.fields[0].empty() ||
        std::any_of(r.fields[0].begin(), r.fields[0].end(), IsSpace)) {
      return fail(r.line, "empty word");
    }
    words.push_back(r.fields[0]);
  }
  TaggedSentence ts{Sentence(id, words), {}, {}, {}};

  auto all_blank = [&](std::size_t col) {
    return std::all_of(rows.begin(), rows.end(), [&](const Row& r) {
      return r.fields[col] == kBlankTag;
    });
  };
  auto any_blank = [&](std::size_t col) {
    return std::any_of(rows.begin(), rows.end(), [&](const Row& r) {
      return r.fields[col] == kBlankTag;
    });
  };

  if (!all_blank(1)) {
    if (any_blank(1)) return fail(rows.front().line, "PoS layer partly blank");
    std::vector<std::string> pos;
    for (const Row& r : rows) pos.push_back(r.fields[1]);
    ts.pos = std::move(pos);
  }
  bool heads_blank = all_blank(2);
  bool rels_blank = all_blank(3);
  if (heads_blank != rels_blank || (!heads_blank && (any_blank(2) ||
                                                     any_blank(3)))) {
    return fail(rows.front().line, "SynDP layer partly blank");
  }
  if (!heads_blank) {
    std::vector<DepArc> arcs;
    for (const Row& r : rows) {
      std::optional<int> head = ParseInt(r.fields[2]);
      if (!head) return fail(r.line, "SynDP head is not an integer");
      arcs.push_back({*head, r.fields[3]});
    }
    ts.syndp = std::move(arcs);
  }
  if (width == 5) {
    std::vector<std::vector<DepArc>> sem;
    for (const Row& r : rows) {
      std::vector<DepArc> pairs;
      if (r.fields[4] != kBlankTag) {
        for (std::string_view pair : SplitOn(r.fields[4], '|')) {
          std::size_t colon = pair.find(':');
          if (colon == std::string_view::npos) {
            return fail(r.line, "SemDP pair needs 'head:rel'");
          }
          std::optional<int> head = ParseInt(pair.substr(0, colon));
          if (!head) return fail(r.line, "SemDP head is not an integer");
          pairs.push_back({*head, std::string(pair.substr(colon + 1))});
        }
      }
      sem.push_back(std::move(pairs));
    }
    ts.semdp = std::move(sem);
  }
  return ts;
}

}  // namespace

TagFile ReadTagTsv(std::istream& in) {
  TagFile file;
  std::vector<Row> rows;
  std::string pending_id;
  std::size_t count = 0;
  bool broken = false;  // a row of the pending sentence had a layout error

  auto flush = [&] {
    if (rows.empty()) return;
    ++count;
    std::string id =
        pending_id.empty() ? "s" + std::to_string(count) : pending_id;
    std::optional<TaggedSentence> ts;
    if (!broken) ts = BuildSentence(id, rows, file.issues);
    broken = false;
    if (ts) {
      for (TagIssue& i : ValidateTaggedSentence(*ts, rows.front().line)) {
        file.issues.push_back(std::move(i));
      }
      file.sentences.push_back(std::move(*ts));
      file.first_lines.push_back(rows.front().line);
    }
    rows.clear();
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
      std::string_view body = Trim(line.substr(2));
      if (body.starts_with("id") && rows.empty()) {
        body = Trim(body.substr(2));
        if (!body.empty() && body.front() == '=') {
          pending_id = std::string(Trim(body.substr(1)));
        }
      }
      continue;
    }
    std::vector<std::string> fields;
    for (std::string_view f : SplitOn(line, '\t')) {
      fields.emplace_back(Trim(f));
    }
    if (fields.size() != 4 && fields.size() != 5) {
      file.issues.push_back({line_no, "expected 4 or 5 tab-separated columns"});
      broken = true;
    }
    rows.push_back({line_no, std::move(fields)});
  }
  flush();
  return file;
}

void WriteTagTsv(std::ostream& out, const std::vector<TaggedSentence>& tagged) {
  for (const TaggedSentence& ts : tagged) {
    out << "# id = " << ts.sentence.id() << '\n';
    for (std::size_t i = 0; i < ts.sentence.size(); ++i) {
      out << ts.sentence.word(i) << '\t';
      out << (ts.pos ? (*ts.pos)[i] : std::string(kBlankTag)) << '\t';
      if (ts.syndp) {
        out << (*ts.syndp)[i].head << '\t' << (*ts.syndp)[i].relation;
      } else {
        out << kBlankTag << '\t' << kBlankTag;
      }
      if (ts.semdp) {
        out << '\t';
        const auto& pairs = (*ts.semdp)[i];
        if (pairs.empty()) out << kBlankTag;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
          if (k > 0) out << '|';
          out << pairs[k].head << ':' << pairs[k].relation;
        }
      }
      out << '\n';
    }
    out << '\n';
  }
}

std::vector<std::string> AlignTags(const TaggedSentence& tagged,
                                   const SubwordAlignment& alignment,
                                   LayerKind kind, SubwordPolicy policy) {
  using Kind = SubwordSource::Kind;
  if (alignment.sources.size() != alignment.subword_texts.size()) {
    throw AlignmentMismatch("alignment has " +
                            std::to_string(alignment.subword_texts.size()) +
                            " subwords but " +
                            std::to_string(alignment.sources.size()) +
                            " sources");
  }
  const std::vector<std::string> word_tags = tagged.WordTags(kind);
  const int n = static_cast<int>(word_tags.size());
  std::vector<std::string> out;
  out.reserve(alignment.sources.size());
  int last_word = -1;
  for (std::size_t i = 0; i < alignment.sources.size(); ++i) {
    const SubwordSource& src = alignment.sources[i];
    bool indexed = src.kind == Kind::kWord ||
                   (src.kind == Kind::kUnk && src.word >= 0);
    if (indexed) {
      if (src.word < 0 || src.word >= n) {
        throw AlignmentMismatch("subword " + std::to_string(i) +
                                " maps to word " + std::to_string(src.word) +
                                " of a " + std::to_string(n) +
                                "-word sentence");
      }
      if (src.word < last_word) {
        throw AlignmentMismatch("word indices decrease at subword " +
                                std::to_string(i));
      }
    }
    switch (src.kind) {
      case Kind::kPrefix:
      case Kind::kPad:
        out.emplace_back(kPadTag);
        break;
      case Kind::kEos:
        out.emplace_back(kEosTag);
        break;
      case Kind::kUnk:
        out.emplace_back(kUnkTag);
        break;
      case Kind::kWord:
        if (policy == SubwordPolicy::kFirstOnly && src.word == last_word) {
          out.emplace_back(kPadTag);
        } else {
          out.push_back(word_tags[src.word]);
        }
        break;
    }
    if (indexed) last_word = src.word;
  }
  return out;
}

std::vector<std::string> RecoverWordTags(const std::vector<std::string>& aligned,
                                         const SubwordAlignment& alignment,
                                         std::size_t word_count) {
  std::vector<std::string> words(word_count);
  std::vector<bool> filled(word_count, false);
  for (std::size_t i = 0; i < alignment.sources.size() && i < aligned.size();
       ++i) {
    const SubwordSource& src = alignment.sources[i];
    if (src.kind != SubwordSource::Kind::kWord || src.word < 0) continue;
    auto w = static_cast<std::size_t>(src.word);
    if (w < word_count && !filled[w]) {
      words[w] = aligned[i];
      filled[w] = true;
    }
  }
  return words;
}

SubwordAlignment ChunkAlignment(const Sentence& sentence,
                                std::size_t max_piece) {
  using Kind = SubwordSource::Kind;
  if (max_piece == 0) max_piece = 1;
  SubwordAlignment a;
  for (const char* piece : {"info", "_extract", ":"}) {
    a.subword_texts.emplace_back(piece);
    a.sources.push_back({Kind::kPrefix, -1});
  }
  static const std::string kWordStart = "\xE2\x96\x81";  // U+2581
  for (std::size_t w = 0; w < sentence.size(); ++w) {
    const std::string& word = sentence.word(w);
    std::size_t pos = 0;
    while (pos < word.size()) {
      std::size_t end = std::min(word.size(), pos + max_piece);
      // Never split inside a UTF-8 sequence.
      while (end < word.size() &&
             (static_cast<unsigned char>(word[end]) & 0xC0) == 0x80) {
        ++end;
      }
      std::string piece = word.substr(pos, end - pos);
      if (pos == 0) piece = kWordStart + piece;
      a.subword_texts.push_back(std::move(piece));
      a.sources.push_back({Kind::kWord, static_cast<int>(w)});
      pos = end;
    }
  }
  a.subword_texts.emplace_back(kEosTag);
  a.sources.push_back({Kind::kEos, -1});
  return a;
}

TagCounts CountDistinctTags(const std::vector<TaggedSentence>& corpus) {
  std::set<std::string> pos, syn, sem;
  for (const TaggedSentence& ts : corpus) {
    if (ts.pos) {
      for (auto& t : ts.WordTags(LayerKind::kPos)) pos.insert(t);
    }
    if (ts.syndp) {
      for (auto& t : ts.WordTags(LayerKind::kSynDp)) syn.insert(t);
    }
    if (ts.semdp) {
      for (auto& t : ts.WordTags(LayerKind::kSemDp)) sem.insert(t);
    }
  }
  return {pos.size(), syn.size(), sem.size()};
}

}  // namespace oiekit
