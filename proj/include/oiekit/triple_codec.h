#ifndef OIEKIT_TRIPLE_CODEC_H_
#define OIEKIT_TRIPLE_CODEC_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "oiekit/core.h"

namespace oiekit {

// A recoverable anomaly met while decoding generated text. `offset` is the
// byte position in the decoded string where the anomaly starts.
struct ParseWarning {
  std::size_t offset = 0;
  std::string message;

  friend bool operator==(const ParseWarning&, const ParseWarning&) = default;
};

struct DecodeResult {
  ExtractionSet extractions;
  std::vector<ParseWarning> warnings;
};

// The task prefix every encoder input carries.
inline constexpr std::string_view kTaskPrefix = "info_extract: ";

std::string AddPrefix(std::string_view text);
// Removes kTaskPrefix if present; otherwise returns `text` unchanged.
std::string StripPrefix(std::string_view text);
bool HasPrefix(std::string_view text);

// "(s ; p ; o) (s ; p ; o)". Empty set encodes to "".
std::string EncodeTriples(const ExtractionSet& set);

// Greedy left-to-right scan for balanced "( ... )" groups:
//   2 semicolons       -> triple (empty argument slot -> partial tuple)
//   1 semicolon        -> partial tuple with empty object, warning
//   3+ semicolons      -> extra slots merged into the object, warning
//   0 semicolons, unbalanced group, empty predicate -> dropped, warning
// Non-blank text outside groups is ignored with one warning per run.
// Never throws.
DecodeResult DecodeTriples(std::string_view text,
                           std::string sentence_id = "");

}  // namespace oiekit

#endif  // OIEKIT_TRIPLE_CODEC_H_
