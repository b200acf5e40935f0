#ifndef OIEKIT_TANL_H_
#define OIEKIT_TANL_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "oiekit/core.h"
#include "oiekit/triple_codec.h"

namespace oiekit {

// Encoder input with one verb wrapped in square brackets:
//   "info_extract: The cat [sat] on the mat ."
struct VerbTaggedInput {
  std::string sentence_id;
  std::size_t verb_index = 0;
  std::string text;

  friend bool operator==(const VerbTaggedInput&,
                         const VerbTaggedInput&) = default;
};

struct VerbInputs {
  std::vector<VerbTaggedInput> inputs;
  bool empty_verb_list = false;  // the sentence produced no inputs
};

// One input per distinct verb position, ordered by position. Throws
// std::out_of_range for a position outside the sentence.
VerbInputs MakeVerbInputs(const Sentence& sentence,
                          std::vector<std::size_t> verb_indices);

// Positions whose PoS tag is a verb tag (VB, VBD, VBG, VBN, VBP, VBZ).
std::vector<std::size_t> VerbPositions(const std::vector<std::string>& pos);

// Drops the task prefix and the brackets around the tagged verb, giving back
// the sentence text.
std::string UnmarkVerbInput(const VerbTaggedInput& input);

// "[[s | subject 1] [p | predicate 1] [o | object 1] | tuple 1] [[...] | tuple 2]"
std::string EncodeTanl(const ExtractionSet& set);

// Recovers tuples from "[content | role k]" segments. Role keywords are
// matched case-insensitively and the space before k is optional. Role
// segments outside a tuple wrapper are grouped by k. Missing roles give
// partial tuples, unbalanced or unlabeled segments are dropped; every anomaly
// becomes a warning. Never throws.
DecodeResult DecodeTanl(std::string_view text, std::string sentence_id = "");

// Concatenates per-verb outputs in order and removes exact duplicates
// (first occurrence kept). Throws std::invalid_argument when the sets name
// different sentences.
ExtractionSet MergeVerbOutputs(const std::vector<ExtractionSet>& per_verb);

}  // namespace oiekit

#endif  // OIEKIT_TANL_H_
