#ifndef OIEKIT_PIPELINE_H_
#define OIEKIT_PIPELINE_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "oiekit/bio.h"
#include "oiekit/clausie.h"
#include "oiekit/core.h"
#include "oiekit/tags.h"
#include "oiekit/tanl.h"

namespace oiekit {

// Environment variable holding the default worker count.
inline constexpr const char* kJobsEnv = "OIEKIT_JOBS";

// Worker count from kJobsEnv, or 1. Throws InvalidConfig on a value that is
// not a positive integer.
int DefaultJobs();

// Applies fn(i) for i in [0, count) on up to `jobs` threads. Results come
// back in index order whatever the scheduling. The first exception thrown
// by a worker is rethrown after all workers stop.
template <typename Out, typename Fn>
std::vector<Out> ParallelMap(std::size_t count, int jobs, Fn&& fn) {
  std::vector<std::optional<Out>> slots(count);
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
    for (std::thread& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<Out> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Flat "key = value" run configuration with '#' comments. Keys mirror the
// command-line flags plus the trainer hyperparameters (learning_rate,
// batch_size, epochs, max_token_length), which are carried for an external
// trainer and echoed in reports.
class RunConfig {
 public:
  // Throws FormatError with source:line on a bad line or unknown key.
  static RunConfig Parse(std::istream& in, const std::string& source);
  static RunConfig Load(const std::string& path);

  std::optional<std::string> Get(std::string_view key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  static const std::vector<std::string>& KnownKeys();

 private:
  std::map<std::string, std::string> values_;
};

// Reads a whole file; throws FormatError naming the path when it cannot be
// opened.
std::string ReadFile(const std::string& path);

// --- convert ---------------------------------------------------------------

struct ConvertOutput {
  std::vector<Record> records;
  BioConversionReport report;
};
ConvertOutput ConvertLsoie(const std::vector<BioExample>& examples,
                           BioMode mode, int jobs = 1);
std::string ToJson(const BioConversionReport& report);
std::string ToText(const BioConversionReport& report);

// Seq2seq training pairs: {"id", "input": prefix + sentence, "target":
// encoded triples}.
std::string TargetJsonl(const std::vector<Record>& records);

// --- filter ----------------------------------------------------------------

enum class ClausieFormat { kAuto, kText, kJsonl };

// Parses `text` (auto: JSON-lines when the first non-blank character is
// '{'), ingests, and filters every kept record.
IngestResult FilterClausie(std::string_view text, ClausieFormat format,
                           bool case_fold, int jobs = 1);
std::string ToJson(const IngestReport& report);
std::string ToText(const IngestReport& report);

// --- tanl ------------------------------------------------------------------

struct VerbSource {
  Sentence sentence;
  std::vector<std::size_t> verbs;
};

// JSON-lines {"id", "tokens", "verbs": [positions]}.
std::vector<VerbSource> ReadVerbSources(std::istream& in,
                                        const std::string& source);
// Verb positions from the PoS layer of a tag file.
std::vector<VerbSource> VerbSourcesFromTags(const TagFile& tags);

struct TanlGenOutput {
  std::vector<VerbTaggedInput> inputs;
  std::size_t sentences = 0;
  std::size_t empty_verb_lists = 0;
};
TanlGenOutput TanlGenerate(const std::vector<VerbSource>& sources,
                           int jobs = 1);
// {"id", "verb_index", "input"} per line.
std::string InputsJsonl(const std::vector<VerbTaggedInput>& inputs);

enum class OutputCodec { kTanl, kTriples };

struct ParseReport {
  std::size_t outputs = 0;
  std::size_t sentences = 0;
  std::size_t tuples = 0;
  std::size_t partial = 0;
  std::size_t duplicates_merged = 0;
  std::vector<std::string> warnings;  // "id:offset: message"
};
struct ParseOutput {
  std::vector<Record> records;
  ParseReport report;
};
// Reads {"id", "output"} lines, decodes each, and merges the outputs of one
// sentence in line order.
ParseOutput ParseOutputs(std::istream& in, const std::string& source,
                         OutputCodec codec, int jobs = 1);
std::string ToJson(const ParseReport& report);
std::string ToText(const ParseReport& report);

// --- merge -----------------------------------------------------------------

// Groups records by id (first appearance order) and merges each group's
// tuples with MergeVerbOutputs. The first non-empty token list wins.
std::vector<Record> MergeRecords(const std::vector<Record>& records,
                                 std::size_t* duplicates_removed = nullptr);

// --- align -----------------------------------------------------------------

// JSON-lines {"id", "subwords": [...], "sources": [...]} where each source is
// a word index or one of "prefix", "pad", "unk", "eos".
std::map<std::string, SubwordAlignment> ReadAlignments(
    std::istream& in, const std::string& source);

struct AlignOutput {
  std::string jsonl;  // {"id", "subwords", "<layer>": [...]} per sentence
  std::size_t sentences = 0;
  std::size_t subwords = 0;
  std::vector<std::string> errors;  // sentences skipped on mismatch
};
// Uses the alignment of each sentence id from `alignments`, or
// ChunkAlignment(max_piece) when the map is empty.
AlignOutput AlignCorpus(const TagFile& tags,
                        const std::map<std::string, SubwordAlignment>& alignments,
                        SubwordPolicy policy, std::size_t max_piece,
                        int jobs = 1);

// --- stats -----------------------------------------------------------------

struct DatasetStats {
  std::size_t sentences = 0;
  std::size_t tuples = 0;
  std::size_t partial = 0;
  std::size_t tokens = 0;
  double tuples_per_sentence() const {
    return sentences == 0 ? 0.0
                          : static_cast<double>(tuples) /
                                static_cast<double>(sentences);
  }
};
DatasetStats ComputeStats(const std::vector<Record>& records);
// Counts of an LSOIE source before conversion: sentences and tag rows.
DatasetStats ComputeLsoieStats(const std::vector<BioExample>& examples);
std::string ToJson(const DatasetStats& stats);
std::string ToText(const DatasetStats& stats);

// --- validate-tags ---------------------------------------------------------

struct TagValidation {
  std::size_t sentences = 0;
  std::vector<TagIssue> issues;
  TagCounts distinct;
  bool semdp_not_above_syndp = true;  // distinct SemDP <= distinct SynDP
  bool ok() const { return issues.empty(); }
};
TagValidation ValidateTags(const TagFile& file);
std::string ToJson(const TagValidation& v);
// Issues are prefixed with `source:` when a source name is given.
std::string ToText(const TagValidation& v, const std::string& source = "");

}  // namespace oiekit

#endif  // OIEKIT_PIPELINE_H_
