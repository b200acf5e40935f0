// oiekit: command-line driver for the OIE dataset and evaluation pipeline.
//
// Exit codes: 0 success, 1 input or runtime error, 2 a check failed
// (gradcheck violation, score id mismatch or F1 below --min-f1, tag file
// issues). CLI11 usage errors keep CLI11's own nonzero codes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oiekit/bio.h"
#include "oiekit/carb.h"
#include "oiekit/clausie.h"
#include "oiekit/core.h"
#include "oiekit/error.h"
#include "oiekit/gradcheck.h"
#include "oiekit/pipeline.h"
#include "oiekit/tags.h"

namespace {

using namespace oiekit;

constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

// Options shared by every subcommand.
struct Globals {
  std::string config_path;
  std::string report_path;
  int jobs = 0;
  CLI::Option* jobs_opt = nullptr;
  RunConfig config;
};

// CLI flag > config file > built-in default.
std::string Resolve(const CLI::Option* opt, const std::string& cli_value,
                    const RunConfig& cfg, const std::string& key,
                    const std::string& fallback) {
  if (opt != nullptr && opt->count() > 0) return cli_value;
  if (auto v = cfg.Get(key)) return *v;
  return fallback;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw InvalidConfig(key + " must be true or false, got '" + value + "'");
}

bool ResolveFlag(const CLI::Option* opt, const RunConfig& cfg,
                 const std::string& key) {
  if (opt != nullptr && opt->count() > 0) return true;
  if (auto v = cfg.Get(key)) return ParseBool(key, *v);
  return false;
}

long ResolveInt(const CLI::Option* opt, long cli_value, const RunConfig& cfg,
                const std::string& key, long fallback) {
  if (opt != nullptr && opt->count() > 0) return cli_value;
  if (auto v = cfg.Get(key)) {
    try {
      std::size_t used = 0;
      long value = std::stol(*v, &used);
      if (used == v->size()) return value;
    } catch (const std::exception&) {
    }
    throw InvalidConfig(key + " must be an integer, got '" + *v + "'");
  }
  return fallback;
}

int Jobs(const Globals& g) {
  long jobs = ResolveInt(g.jobs_opt, g.jobs, g.config, "jobs", DefaultJobs());
  if (jobs < 1) throw InvalidConfig("jobs must be >= 1");
  return static_cast<int>(jobs);
}

std::string ReadInput(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  return ReadFile(path);
}

std::string SourceName(const std::string& path) {
  return path == "-" ? "<stdin>" : path;
}

void WriteOutput(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << data;
  if (!out) throw FormatError("write to '" + path + "' failed");
}

std::string RecordsJsonl(const std::vector<Record>& records) {
  std::ostringstream ss;
  WriteRecords(ss, records);
  return ss.str();
}

// Human table to `text_stream`, machine JSON to --report when given.
void EmitReport(const Globals& g, const std::string& text,
                const std::string& json, std::ostream& text_stream) {
  text_stream << text;
  text_stream.flush();
  if (!g.report_path.empty()) WriteOutput(g.report_path, json + "\n");
}

// Data goes to stdout when no output path is set; the report moves aside.
std::ostream& ReportStream(const std::string& out_path) {
  return out_path.empty() || out_path == "-" ? std::cerr : std::cout;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open information extraction dataset and evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path,
                 "Flat key = value run configuration");
  app.add_option("--report", g.report_path, "Write the JSON report here");
  g.jobs_opt = app.add_option(
      "-j,--jobs", g.jobs,
      std::string("Worker threads (default: $") + kJobsEnv + " or 1)");

  // convert
  auto* convert = app.add_subcommand("convert", "LSOIE BIO columns to tuples");
  std::string convert_in, convert_out, convert_targets;
  convert->add_option("input", convert_in, "LSOIE file, '-' for stdin")
      ->required();
  convert->add_option("-o,--output", convert_out, "JSON-lines dataset");
  convert->add_option("--targets", convert_targets,
                      "Also write {id, input, target} training pairs");
  auto* convert_strict =
      convert->add_flag("--strict", "Reject rows with a stray I-tag");

  // filter
  auto* filter = app.add_subcommand("filter", "Filter ClausIE extractions");
  std::string filter_in, filter_out, filter_format = "auto";
  filter->add_option("input", filter_in, "ClausIE text or JSON-lines")
      ->required();
  filter->add_option("-o,--output", filter_out, "JSON-lines dataset");
  auto* filter_format_opt =
      filter->add_option("--format", filter_format, "auto, text or jsonl")
          ->check(CLI::IsMember({"auto", "text", "jsonl"}));
  auto* filter_fold =
      filter->add_flag("--case-fold", "Compare slots case-insensitively");

  // tanl gen / parse
  auto* tanl = app.add_subcommand("tanl", "TANL input generation and parsing");
  tanl->require_subcommand(1);
  auto* tanl_gen = tanl->add_subcommand("gen", "One input per verb");
  std::string gen_in, gen_out;
  tanl_gen->add_option("input", gen_in,
                       "JSON-lines {id, tokens, verbs}, or a tag TSV with "
                       "--tags")
      ->required();
  tanl_gen->add_option("-o,--output", gen_out, "{id, verb_index, input}");
  auto* gen_tags =
      tanl_gen->add_flag("--tags", "Input is a tag TSV; verbs are VB* words");
  auto* tanl_parse = tanl->add_subcommand("parse", "Decode generated outputs");
  std::string parse_in, parse_out, parse_codec = "tanl";
  tanl_parse->add_option("input", parse_in, "JSON-lines {id, output}")
      ->required();
  tanl_parse->add_option("-o,--output", parse_out, "JSON-lines dataset");
  auto* parse_codec_opt =
      tanl_parse->add_option("--codec", parse_codec, "tanl or triples")
          ->check(CLI::IsMember({"tanl", "triples"}));
  auto* parse_warnings =
      tanl_parse->add_flag("--warnings", "Print every decode warning");

  // merge
  auto* merge = app.add_subcommand("merge", "Merge records sharing an id");
  std::vector<std::string> merge_in;
  std::string merge_out;
  merge->add_option("inputs", merge_in, "JSON-lines datasets")->required();
  merge->add_option("-o,--output", merge_out, "JSON-lines dataset");

  // align
  auto* align = app.add_subcommand("align", "Project word tags onto subwords");
  std::string align_in, align_out, align_alignment, align_policy = "repeat";
  long max_piece = 4;
  align->add_option("input", align_in, "Tag TSV")->required();
  align->add_option("-o,--output", align_out, "JSON-lines aligned tags");
  align->add_option("--alignment", align_alignment,
                    "JSON-lines {id, subwords, sources}; default: fixed-size "
                    "byte pieces");
  auto* align_policy_opt =
      align->add_option("--policy", align_policy, "repeat or first")
          ->check(CLI::IsMember({"repeat", "first"}));
  auto* max_piece_opt = align->add_option(
      "--max-piece", max_piece, "Piece size of the built-in segmentation");

  // score
  auto* score = app.add_subcommand("score", "P/R/F1 of predictions vs gold");
  std::string gold_path, pred_path, score_label = "system";
  double min_f1 = 0.0;
  score->add_option("--gold", gold_path, "Gold JSON-lines")->required();
  score->add_option("--pred", pred_path, "Predicted JSON-lines")->required();
  score->add_option("--label", score_label, "Row label of the table");
  score->add_option("--min-f1", min_f1, "Fail when F1 is below this");
  auto* score_macro = score->add_flag("--macro", "Macro-average sentences");
  auto* score_strict =
      score->add_flag("--one-to-one", "One-to-one precision credit");
  auto* score_allow =
      score->add_flag("--allow-missing", "Do not fail on unmatched ids");

  // gradcheck
  auto* gradcheck =
      app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  long seed = 7, cases = 54;
  auto* seed_opt = gradcheck->add_option("--seed", seed, "Random seed");
  gradcheck->add_option("--cases", cases, "Cases per operation")
      ->check(CLI::PositiveNumber);

  // stats
  auto* stats = app.add_subcommand("stats", "Dataset counts");
  std::string stats_in;
  stats->add_option("input", stats_in, "JSON-lines dataset")->required();
  auto* stats_lsoie =
      stats->add_flag("--lsoie", "Input is an LSOIE file before conversion");

  // validate-tags
  auto* validate = app.add_subcommand("validate-tags", "Check a tag TSV");
  std::string validate_in;
  validate->add_option("input", validate_in, "Tag TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!g.config_path.empty()) g.config = RunConfig::Load(g.config_path);
    const RunConfig& cfg = g.config;

    if (*convert) {
      const std::string mode =
          convert_strict->count() > 0
              ? "strict"
              : cfg.Get("bio_mode").value_or("repair");
      if (mode != "strict" && mode != "repair") {
        throw InvalidConfig("bio_mode must be repair or strict");
      }
      std::istringstream in(ReadInput(convert_in));
      ConvertOutput out = ConvertLsoie(
          ReadLsoie(in, SourceName(convert_in)),
          mode == "strict" ? BioMode::kStrict : BioMode::kRepair, Jobs(g));
      WriteOutput(convert_out, RecordsJsonl(out.records));
      if (!convert_targets.empty()) {
        WriteOutput(convert_targets, TargetJsonl(out.records));
      }
      EmitReport(g, ToText(out.report), ToJson(out.report),
                 ReportStream(convert_out));
      return 0;
    }

    if (*filter) {
      const std::string format =
          Resolve(filter_format_opt, filter_format, cfg, "format", "auto");
      ClausieFormat f = format == "text"    ? ClausieFormat::kText
                        : format == "jsonl" ? ClausieFormat::kJsonl
                                            : ClausieFormat::kAuto;
      IngestResult result =
          FilterClausie(ReadInput(filter_in), f,
                        ResolveFlag(filter_fold, cfg, "case_fold"), Jobs(g));
      for (const std::string& m : result.messages) {
        std::cerr << SourceName(filter_in) << ": " << m << "\n";
      }
      WriteOutput(filter_out, RecordsJsonl(result.dataset));
      EmitReport(g, ToText(result.report), ToJson(result.report),
                 ReportStream(filter_out));
      return 0;
    }

    if (*tanl_gen) {
      std::istringstream in(ReadInput(gen_in));
      std::vector<VerbSource> sources;
      if (gen_tags->count() > 0) {
        TagFile tags = ReadTagTsv(in);
        for (const TagIssue& i : tags.issues) {
          std::cerr << SourceName(gen_in) << ":" << i.line << ": " << i.message
                    << "\n";
        }
        sources = VerbSourcesFromTags(tags);
      } else {
        sources = ReadVerbSources(in, SourceName(gen_in));
      }
      TanlGenOutput out = TanlGenerate(sources, Jobs(g));
      WriteOutput(gen_out, InputsJsonl(out.inputs));
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "sentences          %zu\ninputs             %zu\n"
                    "empty verb lists   %zu\n",
                    out.sentences, out.inputs.size(), out.empty_verb_lists);
      nlohmann::ordered_json j = {{"sentences", out.sentences},
                                  {"inputs", out.inputs.size()},
                                  {"empty_verb_lists", out.empty_verb_lists}};
      EmitReport(g, buf, j.dump(), ReportStream(gen_out));
      return 0;
    }

    if (*tanl_parse) {
      const std::string codec =
          Resolve(parse_codec_opt, parse_codec, cfg, "codec", "tanl");
      if (codec != "tanl" && codec != "triples") {
        throw InvalidConfig("codec must be tanl or triples");
      }
      std::istringstream in(ReadInput(parse_in));
      ParseOutput out = ParseOutputs(
          in, SourceName(parse_in),
          codec == "tanl" ? OutputCodec::kTanl : OutputCodec::kTriples,
          Jobs(g));
      if (parse_warnings->count() > 0) {
        for (const std::string& w : out.report.warnings) std::cerr << w << "\n";
      }
      WriteOutput(parse_out, RecordsJsonl(out.records));
      EmitReport(g, ToText(out.report), ToJson(out.report),
                 ReportStream(parse_out));
      return 0;
    }

    if (*merge) {
      std::vector<Record> all;
      for (const std::string& path : merge_in) {
        std::istringstream in(ReadInput(path));
        for (Record& r : ReadRecords(in, SourceName(path))) {
          all.push_back(std::move(r));
        }
      }
      std::size_t removed = 0;
      std::vector<Record> merged = MergeRecords(all, &removed);
      WriteOutput(merge_out, RecordsJsonl(merged));
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "records in         %zu\nrecords out        %zu\n"
                    "duplicates removed %zu\n",
                    all.size(), merged.size(), removed);
      nlohmann::ordered_json j = {{"records_in", all.size()},
                                  {"records_out", merged.size()},
                                  {"duplicates_removed", removed}};
      EmitReport(g, buf, j.dump(), ReportStream(merge_out));
      return 0;
    }

    if (*align) {
      const std::string policy =
          Resolve(align_policy_opt, align_policy, cfg, "policy", "repeat");
      if (policy != "repeat" && policy != "first") {
        throw InvalidConfig("policy must be repeat or first");
      }
      const long piece = ResolveInt(max_piece_opt, max_piece, cfg, "max_piece", 4);
      if (piece < 1) throw InvalidConfig("max_piece must be >= 1");
      std::istringstream in(ReadInput(align_in));
      TagFile tags = ReadTagTsv(in);
      for (const TagIssue& i : tags.issues) {
        std::cerr << SourceName(align_in) << ":" << i.line << ": " << i.message
                  << "\n";
      }
      std::map<std::string, SubwordAlignment> alignments;
      if (!align_alignment.empty()) {
        std::istringstream ain(ReadInput(align_alignment));
        alignments = ReadAlignments(ain, SourceName(align_alignment));
      }
      AlignOutput out = AlignCorpus(
          tags, alignments,
          policy == "first" ? SubwordPolicy::kFirstOnly : SubwordPolicy::kRepeat,
          static_cast<std::size_t>(piece), Jobs(g));
      for (const std::string& e : out.errors) std::cerr << e << "\n";
      WriteOutput(align_out, out.jsonl);
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "sentences          %zu\nsubwords           %zu\n"
                    "skipped            %zu\n",
                    out.sentences, out.subwords, out.errors.size());
      nlohmann::ordered_json j = {{"sentences", out.sentences},
                                  {"subwords", out.subwords},
                                  {"skipped", out.errors}};
      EmitReport(g, buf, j.dump(), ReportStream(align_out));
      return out.errors.empty() ? 0 : kExitError;
    }

    if (*score) {
      ScoreOptions options;
      const bool macro = score_macro->count() > 0 ||
                         cfg.Get("averaging").value_or("micro") == "macro";
      const bool one_to_one =
          score_strict->count() > 0 ||
          cfg.Get("precision_mode").value_or("many-to-one") == "one-to-one";
      options.averaging = macro ? Averaging::kMacro : Averaging::kMicro;
      options.precision_mode =
          one_to_one ? PrecisionMode::kOneToOne : PrecisionMode::kManyToOne;
      std::istringstream gin(ReadInput(gold_path));
      std::istringstream pin(ReadInput(pred_path));
      std::vector<ExtractionSet> golds, preds;
      for (const Record& r : ReadRecords(gin, SourceName(gold_path))) {
        golds.push_back(r.extractions());
      }
      for (const Record& r : ReadRecords(pin, SourceName(pred_path))) {
        preds.push_back(r.extractions());
      }
      ScoreReport report = ScoreCorpus(preds, golds, options);
      for (const std::string& id : report.missing_gold) {
        std::cerr << "missing gold for '" << id << "'\n";
      }
      for (const std::string& id : report.missing_pred) {
        std::cerr << "missing prediction for '" << id << "'\n";
      }
      EmitReport(g, report.ToText(score_label), report.ToJson(), std::cout);
      const bool allow = ResolveFlag(score_allow, cfg, "allow_missing");
      if (report.has_mismatches() && !allow) return kExitCheckFailed;
      if (report.f1 < min_f1) return kExitCheckFailed;
      return 0;
    }

    if (*gradcheck) {
      GradCheckOptions options;
      const long s = ResolveInt(seed_opt, seed, cfg, "seed", 7);
      if (s < 0) throw InvalidConfig("seed must be non-negative");
      options.seed = static_cast<std::uint64_t>(s);
      options.cases_per_op = static_cast<std::size_t>(cases);
      GradCheckReport report = RunGradCheck(options);
      EmitReport(g, report.ToText(), report.ToJson(), std::cout);
      return report.passed() ? 0 : kExitCheckFailed;
    }

    if (*stats) {
      std::istringstream in(ReadInput(stats_in));
      DatasetStats s = stats_lsoie->count() > 0
                           ? ComputeLsoieStats(ReadLsoie(in, SourceName(stats_in)))
                           : ComputeStats(ReadRecords(in, SourceName(stats_in)));
      EmitReport(g, ToText(s), ToJson(s), std::cout);
      return 0;
    }

    if (*validate) {
      std::istringstream in(ReadInput(validate_in));
      TagValidation v = ValidateTags(ReadTagTsv(in));
      EmitReport(g, ToText(v, SourceName(validate_in)), ToJson(v), std::cout);
      return v.ok() ? 0 : kExitCheckFailed;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
