#include "oiekit/pipeline.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "oiekit/error.h"
#include "oiekit/triple_codec.h"

namespace oiekit {

using Json = nlohmann::ordered_json;

int DefaultJobs() {
  const char* env = std::getenv(kJobsEnv);
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  long jobs = std::strtol(env, &end, 10);
  if (*end != '\0' || jobs < 1 || jobs > 1024) {
    throw InvalidConfig(std::string(kJobsEnv) + "='" + env +
                        "' is not a positive integer");
  }
  return static_cast<int>(jobs);
}

const std::vector<std::string>& RunConfig::KnownKeys() {
  static const std::vector<std::string> kKeys = {
      "jobs",          "seed",           "bio_mode",   "case_fold",
      "averaging",     "precision_mode", "policy",     "max_piece",
      "allow_missing", "codec",          "format",     "learning_rate",
      "batch_size",    "epochs",         "max_token_length"};
  return kKeys;
}

RunConfig RunConfig::Parse(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  const auto& known = KnownKeys();
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    // A '#' after whitespace starts a trailing comment.
    for (std::size_t i = 1; i < body.size(); ++i) {
      if (body[i] == '#' && (body[i - 1] == ' ' || body[i - 1] == '\t')) {
        body = body.substr(0, i);
        break;
      }
    }
    body = Trim(body);
    if (body.empty() || body.front() == '#') continue;
    std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(source, line_no, "expected 'key = value'");
    }
    std::string key(Trim(body.substr(0, eq)));
    std::string value(Trim(body.substr(eq + 1)));
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw FormatError(source, line_no, "unknown key '" + key + "'");
    }
    if (value.empty()) {
      throw FormatError(source, line_no, "empty value for '" + key + "'");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config '" + path + "'");
  return Parse(in, path);
}

std::optional<std::string> RunConfig::Get(std::string_view key) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- convert ---------------------------------------------------------------

ConvertOutput ConvertLsoie(const std::vector<BioExample>& examples,
                           BioMode mode, int jobs) {
  std::vector<BioConversion> parts = ParallelMap<BioConversion>(
      examples.size(), jobs,
      [&](std::size_t i) { return BioExampleToExtractions(examples[i], mode); });
  ConvertOutput out;
  out.records.reserve(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out.report += parts[i].report;
    out.records.push_back({examples[i].sentence.id(),
                           examples[i].sentence.words(),
                           std::move(parts[i].extractions.tuples)});
  }
  return out;
}

std::string ToJson(const BioConversionReport& r) {
  Json j = {{"sentences", r.sentences},
            {"rows_in", r.rows_in},
            {"tuples_out", r.tuples_out},
            {"dropped_rows", r.dropped_rows()},
            {"dropped_missing_predicate", r.dropped_missing_predicate},
            {"dropped_malformed", r.dropped_malformed},
            {"partial", r.partial},
            {"repaired_tags", r.repaired_tags}};
  return j.dump();
}

std::string ToText(const BioConversionReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "sentences          %zu\n"
                "rows in            %zu\n"
                "tuples out         %zu\n"
                "dropped rows       %zu (no predicate %zu, malformed %zu)\n"
                "partial tuples     %zu\n"
                "repaired tags      %zu\n",
                r.sentences, r.rows_in, r.tuples_out, r.dropped_rows(),
                r.dropped_missing_predicate, r.dropped_malformed, r.partial,
                r.repaired_tags);
  return buf;
}

std::string TargetJsonl(const std::vector<Record>& records) {
  std::string out;
  for (const Record& r : records) {
    Json j = {{"id", r.id},
              {"input", AddPrefix(JoinWords(r.tokens))},
              {"target", EncodeTriples(r.extractions())}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

// --- filter ----------------------------------------------------------------

IngestResult FilterClausie(std::string_view text, ClausieFormat format,
                           bool case_fold, int jobs) {
  if (format == ClausieFormat::kAuto) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    format = first != std::string_view::npos && text[first] == '{'
                 ? ClausieFormat::kJsonl
                 : ClausieFormat::kText;
  }
  std::istringstream in{std::string(text)};
  std::vector<RawClausieRecord> raw = format == ClausieFormat::kJsonl
                                          ? ReadClausieJsonl(in)
                                          : ReadClausieText(in);
  IngestResult result = IngestCorpus(raw);
  std::vector<ExtractionSet> filtered = ParallelMap<ExtractionSet>(
      result.dataset.size(), jobs, [&](std::size_t i) {
        return FilterExtractions(result.dataset[i].extractions(), case_fold);
      });
  result.report.triples_out = 0;
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    result.dataset[i].tuples = std::move(filtered[i].tuples);
    result.report.triples_out += result.dataset[i].tuples.size();
  }
  return result;
}

std::string ToJson(const IngestReport& r) {
  Json j = {{"records", r.records},
            {"kept", r.kept},
            {"dropped_failed", r.dropped_failed},
            {"drop_ratio", r.drop_ratio()},
            {"format_errors", r.format_errors},
            {"skipped_records", r.skipped_records},
            {"triples_in", r.triples_in},
            {"triples_out", r.triples_out}};
  return j.dump();
}

std::string ToText(const IngestReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "records            %zu\n"
                "kept               %zu\n"
                "dropped (failed)   %zu (ratio %.4f)\n"
                "skipped records    %zu\n"
                "format errors      %zu\n"
                "triples in         %zu\n"
                "triples out        %zu\n",
                r.records, r.kept, r.dropped_failed, r.drop_ratio(),
                r.skipped_records, r.format_errors, r.triples_in,
                r.triples_out);
  return buf;
}

// --- tanl ------------------------------------------------------------------

std::vector<VerbSource> ReadVerbSources(std::istream& in,
                                        const std::string& source) {
  std::vector<VerbSource> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      Record r = RecordFromJson(line);
      Json j = Json::parse(line);
      std::vector<std::size_t> verbs;
      if (j.contains("verbs")) {
        if (!j["verbs"].is_array()) throw FormatError("'verbs' must be an array");
        for (const Json& v : j["verbs"]) {
          if (!v.is_number_unsigned()) {
            throw FormatError("verb positions must be non-negative integers");
          }
          verbs.push_back(v.get<std::size_t>());
        }
      }
      out.push_back({r.sentence(), std::move(verbs)});
    } catch (const FormatError& e) {
      throw FormatError(source, line_no, e.what());
    }
  }
  return out;
}

std::vector<VerbSource> VerbSourcesFromTags(const TagFile& tags) {
  std::vector<VerbSource> out;
  for (const TaggedSentence& t : tags.sentences) {
    std::vector<std::size_t> verbs;
    if (t.pos) verbs = VerbPositions(*t.pos);
    out.push_back({t.sentence, std::move(verbs)});
  }
  return out;
}

TanlGenOutput TanlGenerate(const std::vector<VerbSource>& sources, int jobs) {
  std::vector<VerbInputs> parts = ParallelMap<VerbInputs>(
      sources.size(), jobs, [&](std::size_t i) {
        return MakeVerbInputs(sources[i].sentence, sources[i].verbs);
      });
  TanlGenOutput out;
  out.sentences = sources.size();
  for (VerbInputs& p : parts) {
    if (p.empty_verb_list) ++out.empty_verb_lists;
    for (VerbTaggedInput& in : p.inputs) out.inputs.push_back(std::move(in));
  }
  return out;
}

std::string InputsJsonl(const std::vector<VerbTaggedInput>& inputs) {
  std::string out;
  for (const VerbTaggedInput& in : inputs) {
    Json j = {{"id", in.sentence_id},
              {"verb_index", in.verb_index},
              {"input", in.text}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

ParseOutput ParseOutputs(std::istream& in, const std::string& source,
                         OutputCodec codec, int jobs) {
  struct Line {
    std::string id;
    std::string output;
  };
  std::vector<Line> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") ||
        !j["id"].is_string() || !j.contains("output") ||
        !j["output"].is_string()) {
      throw FormatError(source, line_no,
                        "expected {\"id\": string, \"output\": string}");
    }
    lines.push_back({j["id"].get<std::string>(), j["output"].get<std::string>()});
  }
  std::vector<DecodeResult> decoded = ParallelMap<DecodeResult>(
      lines.size(), jobs, [&](std::size_t i) {
        return codec == OutputCodec::kTanl
                   ? DecodeTanl(lines[i].output, lines[i].id)
                   : DecodeTriples(lines[i].output, lines[i].id);
      });

  ParseOutput out;
  out.report.outputs = lines.size();
  std::vector<Record> per_output;
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    for (const ParseWarning& w : decoded[i].warnings) {
      out.report.warnings.push_back(lines[i].id + ":" +
                                    std::to_string(w.offset) + ": " +
                                    w.message);
    }
    per_output.push_back(
        {lines[i].id, {}, std::move(decoded[i].extractions.tuples)});
  }
  out.records = MergeRecords(per_output, &out.report.duplicates_merged);
  out.report.sentences = out.records.size();
  for (const Record& r : out.records) {
    out.report.tuples += r.tuples.size();
    for (const Tuple& t : r.tuples) out.report.partial += t.partial ? 1 : 0;
  }
  return out;
}

std::string ToJson(const ParseReport& r) {
  Json j = {{"outputs", r.outputs},
            {"sentences", r.sentences},
            {"tuples", r.tuples},
            {"partial", r.partial},
            {"duplicates_merged", r.duplicates_merged},
            {"warnings", r.warnings}};
  return j.dump();
}

std::string ToText(const ParseReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "outputs            %zu\n"
                "sentences          %zu\n"
                "tuples             %zu\n"
                "partial tuples     %zu\n"
                "duplicates merged  %zu\n"
                "warnings           %zu\n",
                r.outputs, r.sentences, r.tuples, r.partial,
                r.duplicates_merged, r.warnings.size());
  return buf;
}

// --- merge -----------------------------------------------------------------

std::vector<Record> MergeRecords(const std::vector<Record>& records,
                                 std::size_t* duplicates_removed) {
  std::unordered_map<std::string, std::size_t> group_of;
  std::vector<std::vector<const Record*>> groups;
  for (const Record& r : records) {
    auto [it, inserted] = group_of.emplace(r.id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&r);
  }
  std::vector<Record> out;
  std::size_t removed = 0;
  for (const auto& group : groups) {
    std::vector<ExtractionSet> sets;
    Record merged;
    merged.id = group.front()->id;
    std::size_t in = 0;
    for (const Record* r : group) {
      if (merged.tokens.empty()) merged.tokens = r->tokens;
      sets.push_back(r->extractions());
      in += r->tuples.size();
    }
    merged.tuples = MergeVerbOutputs(sets).tuples;
    removed += in - merged.tuples.size();
    out.push_back(std::move(merged));
  }
  if (duplicates_removed) *duplicates_removed = removed;
  return out;
}

// --- align -----------------------------------------------------------------

std::map<std::string, SubwordAlignment> ReadAlignments(
    std::istream& in, const std::string& source) {
  std::map<std::string, SubwordAlignment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    auto fail = [&](const std::string& msg) {
      throw FormatError(source, line_no, msg);
    };
    if (j.is_discarded() || !j.is_object()) fail("invalid JSON object");
    if (!j.contains("id") || !j["id"].is_string()) fail("missing string 'id'");
    if (!j.contains("subwords") || !j["subwords"].is_array() ||
        !j.contains("sources") || !j["sources"].is_array()) {
      fail("'subwords' and 'sources' arrays are required");
    }
    SubwordAlignment a;
    for (const Json& s : j["subwords"]) {
      if (!s.is_string()) fail("subwords must be strings");
      a.subword_texts.push_back(s.get<std::string>());
    }
    for (const Json& s : j["sources"]) {
      SubwordSource src;
      if (s.is_number_integer()) {
        src.kind = SubwordSource::Kind::kWord;
        src.word = s.get<int>();
      } else if (s == "prefix") {
        src.kind = SubwordSource::Kind::kPrefix;
      } else if (s == "pad") {
        src.kind = SubwordSource::Kind::kPad;
      } else if (s == "unk") {
        src.kind = SubwordSource::Kind::kUnk;
      } else if (s == "eos") {
        src.kind = SubwordSource::Kind::kEos;
      } else {
        fail("source must be a word index or prefix/pad/unk/eos");
      }
      a.sources.push_back(src);
    }
    const std::string id = j["id"].get<std::string>();
    if (!out.emplace(id, std::move(a)).second) fail("repeated id '" + id + "'");
  }
  return out;
}

AlignOutput AlignCorpus(const TagFile& tags,
                        const std::map<std::string, SubwordAlignment>& alignments,
                        SubwordPolicy policy, std::size_t max_piece,
                        int jobs) {
  struct Piece {
    std::string line;
    std::size_t subwords = 0;
    std::string error;
  };
  std::vector<Piece> pieces = ParallelMap<Piece>(
      tags.sentences.size(), jobs, [&](std::size_t i) {
        const TaggedSentence& t = tags.sentences[i];
        Piece p;
        SubwordAlignment a;
        if (alignments.empty()) {
          a = ChunkAlignment(t.sentence, max_piece);
        } else {
          auto it = alignments.find(t.sentence.id());
          if (it == alignments.end()) {
            p.error = t.sentence.id() + ": no alignment";
            return p;
          }
          a = it->second;
        }
        try {
          Json j = {{"id", t.sentence.id()}, {"subwords", a.subword_texts}};
          for (LayerKind kind :
               {LayerKind::kPos, LayerKind::kSynDp, LayerKind::kSemDp}) {
            if (!t.has(kind)) continue;
            j[std::string(LayerName(kind))] = AlignTags(t, a, kind, policy);
          }
          p.line = j.dump();
          p.subwords = a.subword_texts.size();
        } catch (const AlignmentMismatch& e) {
          p.error = t.sentence.id() + ": " + e.what();
        }
        return p;
      });
  AlignOutput out;
  for (Piece& p : pieces) {
    if (!p.error.empty()) {
      out.errors.push_back(std::move(p.error));
      continue;
    }
    ++out.sentences;
    out.subwords += p.subwords;
    out.jsonl += p.line;
    out.jsonl += '\n';
  }
  return out;
}

// --- stats -----------------------------------------------------------------

DatasetStats ComputeStats(const std::vector<Record>& records) {
  DatasetStats s;
  s.sentences = records.size();
  for (const Record& r : records) {
    s.tokens += r.tokens.size();
    s.tuples += r.tuples.size();
    for (const Tuple& t : r.tuples) s.partial += t.partial ? 1 : 0;
  }
  return s;
}

DatasetStats ComputeLsoieStats(const std::vector<BioExample>& examples) {
  DatasetStats s;
  s.sentences = examples.size();
  for (const BioExample& e : examples) {
    s.tokens += e.sentence.size();
    s.tuples += e.rows.size();
  }
  return s;
}

std::string ToJson(const DatasetStats& s) {
  Json j = {{"sentences", s.sentences},
            {"tuples", s.tuples},
            {"tuples_per_sentence", s.tuples_per_sentence()},
            {"partial", s.partial},
            {"tokens", s.tokens}};
  return j.dump();
}

std::string ToText(const DatasetStats& s) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "sentences          %zu\n"
                "tuples             %zu\n"
                "tuples/sentence    %.3f\n"
                "partial tuples     %zu\n"
                "tokens             %zu\n",
                s.sentences, s.tuples, s.tuples_per_sentence(), s.partial,
                s.tokens);
  return buf;
}

// --- validate-tags ---------------------------------------------------------

TagValidation ValidateTags(const TagFile& file) {
  TagValidation v;
  v.sentences = file.sentences.size();
  v.issues = file.issues;
  v.distinct = CountDistinctTags(file.sentences);
  if (v.distinct.syndp > 0 && v.distinct.semdp > 0) {
    v.semdp_not_above_syndp = v.distinct.semdp <= v.distinct.syndp;
  }
  return v;
}

std::string ToJson(const TagValidation& v) {
  Json issues = Json::array();
  for (const TagIssue& i : v.issues) {
    issues.push_back({{"line", i.line}, {"message", i.message}});
  }
  Json j = {{"ok", v.ok()},
            {"sentences", v.sentences},
            {"distinct_pos", v.distinct.pos},
            {"distinct_syndp", v.distinct.syndp},
            {"distinct_semdp", v.distinct.semdp},
            {"inventory_pos", PosInventory().size()},
            {"inventory_syndp", SynDpInventory().size()},
            {"inventory_semdp", SemDpInventory().size()},
            {"semdp_not_above_syndp", v.semdp_not_above_syndp},
            {"issues", issues}};
  return j.dump();
}

std::string ToText(const TagValidation& v, const std::string& source) {
  std::string out;
  for (const TagIssue& i : v.issues) {
    out += (source.empty() ? "line " : source + ":") + std::to_string(i.line) +
           ": " + i.message + "\n";
  }
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "sentences          %zu\n"
                "distinct tags      PoS %zu, SynDP %zu, SemDP %zu\n"
                "inventory sizes    PoS %zu, SynDP %zu, SemDP %zu\n"
                "issues             %zu\n",
                v.sentences, v.distinct.pos, v.distinct.syndp,
                v.distinct.semdp, PosInventory().size(),
                SynDpInventory().size(), SemDpInventory().size(),
                v.issues.size());
  out += buf;
  return out;
}

}  // namespace oiekit
