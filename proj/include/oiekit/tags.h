#ifndef OIEKIT_TAGS_H_
#define OIEKIT_TAGS_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oiekit/core.h"

namespace oiekit {

enum class LayerKind { kPos, kSynDp, kSemDp };

std::string_view LayerName(LayerKind kind);
// Accepts "pos", "syndp", "semdp" (case-insensitive).
std::optional<LayerKind> ParseLayerKind(std::string_view name);

// Special tags carried by non-word subwords.
inline constexpr std::string_view kPadTag = "<pad>";
inline constexpr std::string_view kUnkTag = "<unk>";
inline constexpr std::string_view kEosTag = "</s>";
// Blank SemDP tag of words without semantic heads.
inline constexpr std::string_view kBlankTag = "_";

// Tag inventories. PoS: Penn Treebank tags plus the extensions emitted by
// Stanza's English models. SynDP: Universal Dependencies relations (base and
// the English subtypes). SemDP: the DM relation set.
const std::vector<std::string>& PosInventory();
const std::vector<std::string>& SynDpInventory();
const std::vector<std::string>& SemDpInventory();
const std::vector<std::string>& SpecialTags();

bool IsPosTag(std::string_view tag);
// Relations are accepted when listed, or when their base (text before ':')
// is a universal relation.
bool IsSynDpRelation(std::string_view rel);
bool IsSemDpRelation(std::string_view rel);

// A dependency edge. `head` is a 1-based word position, 0 for the root.
struct DepArc {
  int head = 0;
  std::string relation;

  friend bool operator==(const DepArc&, const DepArc&) = default;
};

// A sentence with any subset of the three word-level tag layers.
struct TaggedSentence {
  Sentence sentence;
  std::optional<std::vector<std::string>> pos;
  std::optional<std::vector<DepArc>> syndp;
  std::optional<std::vector<std::vector<DepArc>>> semdp;

  bool has(LayerKind kind) const;
  // The tag each word contributes to an embedding lookup: the PoS tag, the
  // SynDP relation label, or the first SemDP relation. Throws
  // std::invalid_argument when the layer is absent.
  std::vector<std::string> WordTags(LayerKind kind) const;
};

// First relation of a word's SemDP pairs, or "_" when it has none.
std::string SelectSemDpTag(const std::vector<DepArc>& pairs);

struct TagIssue {
  std::size_t line = 0;  // 0 when not tied to a file line
  std::string message;
};

// Checks the layer invariants: lengths, inventories, head ranges, exactly one
// SynDP root. `first_line` numbers the sentence's first word row.
std::vector<TagIssue> ValidateTaggedSentence(const TaggedSentence& tagged,
                                             std::size_t first_line = 0);

// Interchange TSV: word, PoS, SynDP-head, SynDP-rel[, SemDP] per line, blank
// line between sentences. SemDP is "head:rel|head:rel" or "_". A layer that
// is absent has "_" in every row (SemDP: the column is omitted). Lines
// starting with "# " are comments; "# id = X" names the next sentence.
struct TagFile {
  std::vector<TaggedSentence> sentences;
  std::vector<TagIssue> issues;
  std::vector<std::size_t> first_lines;  // parallel to sentences
};

// Reads and validates. Sentences with row-level format problems are skipped
// and their issues reported; invariant violations are reported but the
// sentence is kept.
TagFile ReadTagTsv(std::istream& in);
void WriteTagTsv(std::ostream& out, const std::vector<TaggedSentence>& tagged);

// Where a subword came from.
struct SubwordSource {
  enum class Kind { kWord, kPrefix, kPad, kUnk, kEos };
  Kind kind = Kind::kWord;
  int word = -1;  // word index for kWord (and optionally kUnk)

  friend bool operator==(const SubwordSource&, const SubwordSource&) = default;
};

struct SubwordAlignment {
  std::vector<std::string> subword_texts;
  std::vector<SubwordSource> sources;  // parallel to subword_texts
};

enum class SubwordPolicy {
  kRepeat,     // every subword of a word carries the word's tag
  kFirstOnly,  // only the first subword does; the rest get <pad>
};

// Word tags projected onto subwords. Prefix and pad subwords get <pad>, the
// end-of-sequence subword </s>, unknown subwords <unk>. Throws
// AlignmentMismatch on out-of-range or decreasing word indices, or when the
// two alignment lists differ in length.
std::vector<std::string> AlignTags(const TaggedSentence& tagged,
                                   const SubwordAlignment& alignment,
                                   LayerKind kind,
                                   SubwordPolicy policy = SubwordPolicy::kRepeat);

// Inverse projection: the tag of each word's first aligned subword. Words
// with no kWord subword get "".
std::vector<std::string> RecoverWordTags(const std::vector<std::string>& aligned,
                                         const SubwordAlignment& alignment,
                                         std::size_t word_count);

// A deterministic stand-in for a subword tokenizer: the task prefix becomes
// the subwords "info", "_extract", ":"; every word is cut into pieces of
// `max_piece` bytes, widened so no UTF-8 character is split, and the first
// piece carries the U+2581 word-start marker; a final "</s>" closes the stream.
SubwordAlignment ChunkAlignment(const Sentence& sentence,
                                std::size_t max_piece = 4);

// Per-layer counts of distinct embedding tags over a corpus.
struct TagCounts {
  std::size_t pos = 0;
  std::size_t syndp = 0;
  std::size_t semdp = 0;
};
TagCounts CountDistinctTags(const std::vector<TaggedSentence>& corpus);

}  // namespace oiekit

#endif  // OIEKIT_TAGS_H_
