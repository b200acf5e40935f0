#include "oiekit/tanl.h"

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>

namespace oiekit {

VerbInputs MakeVerbInputs(const Sentence& sentence,
                          std::vector<std::size_t> verb_indices) {
  VerbInputs out;
  std::sort(verb_indices.begin(), verb_indices.end());
  verb_indices.erase(std::unique(verb_indices.begin(), verb_indices.end()),
                     verb_indices.end());
  if (verb_indices.empty()) {
    out.empty_verb_list = true;
    return out;
  }
  for (std::size_t v : verb_indices) {
    if (v >= sentence.size()) {
      throw std::out_of_range("verb position " + std::to_string(v) +
                              " outside sentence '" + sentence.id() + "'");
    }
  }
  for (std::size_t v : verb_indices) {
    std::string text(kTaskPrefix);
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i > 0) text += ' ';
      if (i == v) {
        text += '[' + sentence.word(i) + ']';
      } else {
        text += sentence.word(i);
      }
    }
    out.inputs.push_back({sentence.id(), v, std::move(text)});
  }
  return out;
}

std::vector<std::size_t> VerbPositions(const std::vector<std::string>& pos) {
  static const std::array<std::string_view, 6> kVerbTags = {
      "VB", "VBD", "VBG", "VBN", "VBP", "VBZ"};
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (std::find(kVerbTags.begin(), kVerbTags.end(), pos[i]) !=
        kVerbTags.end()) {
      out.push_back(i);
    }
  }
  return out;
}

std::string UnmarkVerbInput(const VerbTaggedInput& input) {
  std::vector<std::string> words = SplitWhitespace(StripPrefix(input.text));
  if (input.verb_index < words.size()) {
    std::string& w = words[input.verb_index];
    if (w.size() >= 2 && w.front() == '[' && w.back() == ']') {
      w = w.substr(1, w.size() - 2);
    }
  }
  return JoinWords(words);
}

std::string EncodeTanl(const ExtractionSet& set) {
  std::string out;
  for (std::size_t i = 0; i < set.tuples.size(); ++i) {
    const Tuple& t = set.tuples[i];
    const std::string k = std::to_string(i + 1);
    if (i > 0) out += ' ';
    out += "[[" + JoinWords(t.subject) + " | subject " + k + "] [" +
           JoinWords(t.predicate) + " | predicate " + k + "] [" +
           JoinWords(t.object) + " | object " + k + "] | tuple " + k + "]";
  }
  return out;
}

namespace {

enum class Role { kSubject, kPredicate, kObject, kTuple };

struct Segment {
  std::size_t begin = 0;
  std::string text;  // characters directly inside, children excluded
  std::vector<Segment> children;
};

// Nesting deeper than this is never produced by the format.
constexpr std::size_t kMaxDepth = 8;

// Parses the segment opening at text[pos] == '['. On success returns it and
// sets `end` past its ']'. Returns nullopt when the segment is unbalanced or
// nests too deeply.
std::optional<Segment> ParseSegment(std::string_view text, std::size_t pos,
                                    std::size_t& end) {
  std::vector<Segment> stack;
  stack.push_back({pos, {}, {}});
  for (std::size_t i = pos + 1; i < text.size(); ++i) {
    char c = text[i];
    if (c == '[') {
      if (stack.size() >= kMaxDepth) return std::nullopt;
      stack.push_back({i, {}, {}});
    } else if (c == ']') {
      Segment done = std::move(stack.back());
      stack.pop_back();
      if (stack.empty()) {
        end = i + 1;
        return done;
      }
      stack.back().children.push_back(std::move(done));
    } else {
      stack.back().text += c;
    }
  }
  return std::nullopt;
}

struct Label {
  Role role;
  std::string content;
  std::string index;
};

std::optional<Label> SplitLabel(const std::string& text) {
  std::size_t bar = text.rfind('|');
  if (bar == std::string::npos) return std::nullopt;
  std::string label = AsciiLower(Trim(std::string_view(text).substr(bar + 1)));
  static const std::array<std::pair<std::string_view, Role>, 4> kRoles = {{
      {"subject", Role::kSubject},
      {"predicate", Role::kPredicate},
      {"object", Role::kObject},
      {"tuple", Role::kTuple},
  }};
  for (const auto& [word, role] : kRoles) {
    if (!label.starts_with(word)) continue;
    std::string_view rest = Trim(std::string_view(label).substr(word.size()));
    if (!std::all_of(rest.begin(), rest.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
      return std::nullopt;
    }
    return Label{role, text.substr(0, bar), std::string(rest)};
  }
  return std::nullopt;
}

// Collects role slots for one tuple under construction.
struct TupleBuilder {
  std::string index;
  std::size_t offset = 0;
  std::array<std::optional<std::vector<std::string>>, 3> slots;
  bool wrapped = true;
};

void AddSlot(TupleBuilder& b, const Segment& seg, const Label& label,
             DecodeResult& out) {
  if (!seg.children.empty()) {
    out.warnings.push_back({seg.begin, "nested segment inside a role ignored"});
  }
  auto& slot = b.slots[static_cast<int>(label.role)];
  if (slot) {
    out.warnings.push_back({seg.begin, "repeated role ignored"});
    return;
  }
  slot = SplitWhitespace(label.content);
}

void Finish(const TupleBuilder& b, DecodeResult& out) {
  if (!b.wrapped) {
    out.warnings.push_back(
        {b.offset, "role segments without a tuple wrapper grouped"});
  }
  if (!b.slots[1] || b.slots[1]->empty()) {
    out.warnings.push_back({b.offset, "tuple without predicate dropped"});
    return;
  }
  if (!b.slots[0] || !b.slots[2]) {
    out.warnings.push_back({b.offset, "tuple missing a role kept as partial"});
  }
  Tuple t;
  t.subject = b.slots[0].value_or(std::vector<std::string>{});
  t.predicate = *b.slots[1];
  t.object = b.slots[2].value_or(std::vector<std::string>{});
  t.partial = t.subject.empty() || t.object.empty();
  out.extractions.tuples.push_back(std::move(t));
}

}  // namespace

DecodeResult DecodeTanl(std::string_view text, std::string sentence_id) {
  DecodeResult out;
  out.extractions.sentence_id = std::move(sentence_id);
  // Builders in order of first appearance; loose ones stay open until the end.
  std::vector<TupleBuilder> builders;

  constexpr std::size_t kNone = std::string_view::npos;
  std::size_t stray = kNone;
  auto close_stray = [&] {
    if (stray != kNone) {
      out.warnings.push_back({stray, "text outside '[ ... ]' ignored"});
      stray = kNone;
    }
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    char c = text[pos];
    if (c == ']') {
      close_stray();
      out.warnings.push_back({pos, "stray ']' ignored"});
      ++pos;
      continue;
    }
    if (c != '[') {
      if (stray == kNone && !IsSpace(c)) stray = pos;
      ++pos;
      continue;
    }
    close_stray();
    std::size_t end = 0;
    std::optional<Segment> seg = ParseSegment(text, pos, end);
    if (!seg) {
      // Retry just past the bracket so that inner segments can be recovered.
      out.warnings.push_back({pos, "unbalanced '[' skipped"});
      ++pos;
      continue;
    }
    pos = end;
    std::optional<Label> label = SplitLabel(seg->text);
    if (!label) {
      out.warnings.push_back({seg->begin, "segment without a role label dropped"});
      continue;
    }
    if (label->role == Role::kTuple) {
      TupleBuilder b;
      b.index = label->index;
      b.offset = seg->begin;
      if (!Trim(label->content).empty()) {
        out.warnings.push_back({seg->begin, "text inside tuple ignored"});
      }
      for (const Segment& child : seg->children) {
        std::optional<Label> cl = SplitLabel(child.text);
        if (!cl || cl->role == Role::kTuple) {
          out.warnings.push_back({child.begin, "bad role segment ignored"});
          continue;
        }
        AddSlot(b, child, *cl, out);
      }
      builders.push_back(std::move(b));
      continue;
    }
    auto it = std::find_if(builders.begin(), builders.end(),
                           [&](const TupleBuilder& b) {
                             return !b.wrapped && b.index == label->index;
                           });
    if (it == builders.end()) {
      TupleBuilder b;
      b.index = label->index;
      b.offset = seg->begin;
      b.wrapped = false;
      builders.push_back(std::move(b));
      it = std::prev(builders.end());
    }
    AddSlot(*it, *seg, *label, out);
  }
  close_stray();
  for (const TupleBuilder& b : builders) Finish(b, out);
  std::stable_sort(out.warnings.begin(), out.warnings.end(),
                   [](const ParseWarning& a, const ParseWarning& b) {
                     return a.offset < b.offset;
                   });
  return out;
}

ExtractionSet MergeVerbOutputs(const std::vector<ExtractionSet>& per_verb) {
  ExtractionSet out;
  if (per_verb.empty()) return out;
  out.sentence_id = per_verb.front().sentence_id;
  for (const ExtractionSet& set : per_verb) {
    if (set.sentence_id != out.sentence_id) {
      throw std::invalid_argument("cannot merge outputs of sentences '" +
                                  out.sentence_id + "' and '" +
                                  set.sentence_id + "'");
    }
    for (const Tuple& t : set.tuples) {
      bool seen = std::any_of(
          out.tuples.begin(), out.tuples.end(),
          [&](const Tuple& u) { return TupleEqual(t, u, false); });
      if (!seen) out.tuples.push_back(t);
    }
  }
  return out;
}

}  // namespace oiekit
