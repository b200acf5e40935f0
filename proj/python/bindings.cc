#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "oiekit/bio.h"
#include "oiekit/carb.h"
#include "oiekit/clausie.h"
#include "oiekit/core.h"
#include "oiekit/embed.h"
#include "oiekit/error.h"
#include "oiekit/gradcheck.h"
#include "oiekit/pipeline.h"
#include "oiekit/tags.h"
#include "oiekit/tanl.h"
#include "oiekit/triple_codec.h"

namespace py = pybind11;

namespace oiekit {
namespace {

using Rows = std::vector<std::vector<double>>;

Matrix ToMatrix(const Rows& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw DimensionMismatch("ragged matrix rows");
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Rows FromMatrix(const Matrix& m) {
  Rows rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rows[r].assign(m.row(r).begin(), m.row(r).end());
  }
  return rows;
}

py::tuple DecodeToPython(const DecodeResult& r) {
  py::list warnings;
  for (const ParseWarning& w : r.warnings) {
    warnings.append(py::make_tuple(w.offset, w.message));
  }
  return py::make_tuple(r.extractions, warnings);
}

py::dict ScoreToDict(const ScoreReport& r) {
  py::dict d;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["sentences"] = r.sentences.size();
  d["missing_gold"] = r.missing_gold;
  d["missing_pred"] = r.missing_pred;
  d["degenerate_preds"] = r.degenerate_preds;
  d["degenerate_golds"] = r.degenerate_golds;
  return d;
}

TagInputs Inputs(const std::vector<std::string>& pos,
                 const std::vector<std::string>& dp,
                 const TagEmbeddingTable* pos_table,
                 const TagEmbeddingTable* dp_table) {
  TagInputs in;
  in.pos = pos;
  in.dp = dp;
  in.pos_table = pos_table;
  in.dp_table = dp_table;
  return in;
}

}  // namespace
}  // namespace oiekit

PYBIND11_MODULE(_oiekit, m) {
  using namespace oiekit;
  m.doc() = "Open information extraction toolkit: codecs, filters, scorer "
            "and tag-embedding kernels.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", error.ptr());
  py::register_exception<MissingPredicate>(m, "MissingPredicate", error.ptr());
  py::register_exception<MalformedBio>(m, "MalformedBio", error.ptr());
  py::register_exception<AlignmentMismatch>(m, "AlignmentMismatch", error.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", error.ptr());
  py::register_exception<UnknownTag>(m, "UnknownTag", error.ptr());
  py::register_exception<InvalidConfig>(m, "InvalidConfig", error.ptr());
  py::register_exception<DegenerateTuple>(m, "DegenerateTuple", error.ptr());
  py::register_exception<TooLarge>(m, "TooLarge", error.ptr());

  py::class_<Tuple>(m, "Tuple")
      .def(py::init<>())
      .def(py::init([](const std::vector<std::string>& s,
                       const std::vector<std::string>& p,
                       const std::vector<std::string>& o) {
             Tuple t;
             t.subject = s;
             t.predicate = p;
             t.object = o;
             t.partial = s.empty() || o.empty();
             return t;
           }),
           py::arg("subject"), py::arg("predicate"), py::arg("object"))
      .def_readwrite("subject", &Tuple::subject)
      .def_readwrite("predicate", &Tuple::predicate)
      .def_readwrite("object", &Tuple::object)
      .def_readwrite("partial", &Tuple::partial)
      .def("is_well_formed", &Tuple::IsWellFormed)
      .def("__eq__", [](const Tuple& a, const Tuple& b) { return a == b; })
      .def("__repr__", [](const Tuple& t) { return "Tuple" + DebugString(t); });

  m.def("make_tuple", &MakeTuple, py::arg("subject"), py::arg("predicate"),
        py::arg("object"),
        "Tuple from three whitespace-separated strings.");

  py::class_<ExtractionSet>(m, "ExtractionSet")
      .def(py::init<>())
      .def(py::init([](std::string id, std::vector<Tuple> tuples) {
             return ExtractionSet{std::move(id), std::move(tuples)};
           }),
           py::arg("sentence_id"), py::arg("tuples"))
      .def_readwrite("sentence_id", &ExtractionSet::sentence_id)
      .def_readwrite("tuples", &ExtractionSet::tuples)
      .def("__eq__", [](const ExtractionSet& a, const ExtractionSet& b) {
        return a == b;
      })
      .def("__len__", [](const ExtractionSet& s) { return s.tuples.size(); });

  // Codecs.
  m.def("encode_triples", &EncodeTriples, py::arg("extractions"));
  m.def("decode_triples",
        [](const std::string& text, const std::string& id) {
          return DecodeToPython(DecodeTriples(text, id));
        },
        py::arg("text"), py::arg("sentence_id") = "",
        "Returns (ExtractionSet, [(offset, message), ...]).");
  m.def("encode_tanl", &EncodeTanl, py::arg("extractions"));
  m.def("decode_tanl",
        [](const std::string& text, const std::string& id) {
          return DecodeToPython(DecodeTanl(text, id));
        },
        py::arg("text"), py::arg("sentence_id") = "");
  m.def("add_prefix", &AddPrefix, py::arg("text"));
  m.def("strip_prefix", &StripPrefix, py::arg("text"));
  m.def("make_verb_inputs",
        [](const std::string& id, const std::vector<std::string>& words,
           const std::vector<std::size_t>& verbs) {
          std::vector<std::string> out;
          for (const VerbTaggedInput& in :
               MakeVerbInputs(Sentence(id, words), verbs).inputs) {
            out.push_back(in.text);
          }
          return out;
        },
        py::arg("sentence_id"), py::arg("words"), py::arg("verbs"),
        "One prefixed input per distinct verb position, ascending.");
  m.def("verb_positions", &VerbPositions, py::arg("pos_tags"));
  m.def("merge_verb_outputs", &MergeVerbOutputs, py::arg("per_verb"));

  // BIO and filtering.
  m.def("bio_row_to_tuple",
        [](const std::vector<std::string>& words,
           const std::vector<std::string>& tags, bool strict) {
          BioRow row;
          for (const std::string& t : tags) row.tags.push_back(BioTag::Parse(t));
          return BioRowToTuple(Sentence("s", words), row,
                               strict ? BioMode::kStrict : BioMode::kRepair);
        },
        py::arg("words"), py::arg("tags"), py::arg("strict") = false);
  m.def("is_subsumed", &IsSubsumed, py::arg("a"), py::arg("b"),
        py::arg("case_fold") = false);
  m.def("filter_extractions", &FilterExtractions, py::arg("extractions"),
        py::arg("case_fold") = false);

  // Scoring.
  m.def("pair_match",
        [](const Tuple& pred, const Tuple& gold) {
          PairScore s = PairMatch(pred, gold);
          return py::make_tuple(s.precision, s.recall);
        },
        py::arg("pred"), py::arg("gold"));
  m.def("max_assignment",
        [](const WeightTable& t) {
          Assignment a = MaxAssignment(t);
          return py::make_tuple(a.pred_of_gold, a.total);
        },
        py::arg("table"), "Maximum-weight one-to-one gold->pred assignment.");
  m.def("f1", &F1, py::arg("precision"), py::arg("recall"));
  m.def("score_corpus",
        [](const std::vector<ExtractionSet>& preds,
           const std::vector<ExtractionSet>& golds, bool macro,
           bool one_to_one) {
          ScoreOptions o;
          o.averaging = macro ? Averaging::kMacro : Averaging::kMicro;
          o.precision_mode =
              one_to_one ? PrecisionMode::kOneToOne : PrecisionMode::kManyToOne;
          return ScoreToDict(ScoreCorpus(preds, golds, o));
        },
        py::arg("preds"), py::arg("golds"), py::arg("macro") = false,
        py::arg("one_to_one") = false);

  // Embedding kernels.
  py::class_<TagEmbeddingTable>(m, "TagEmbeddingTable")
      .def(py::init<std::string, std::size_t, bool>(), py::arg("kind"),
           py::arg("dim"), py::arg("trainable") = true)
      .def_static("random", &TagEmbeddingTable::Random, py::arg("kind"),
                  py::arg("tags"), py::arg("dim"), py::arg("seed"),
                  py::arg("trainable") = true)
      .def_static("from_json", &TagEmbeddingTable::FromJson, py::arg("text"))
      .def_property_readonly("dim", &TagEmbeddingTable::dim)
      .def_property("trainable", &TagEmbeddingTable::trainable,
                    &TagEmbeddingTable::set_trainable)
      .def("__len__", &TagEmbeddingTable::size)
      .def("__contains__", &TagEmbeddingTable::contains)
      .def("set", &TagEmbeddingTable::Set, py::arg("tag"), py::arg("vector"))
      .def("lookup", &TagEmbeddingTable::Lookup, py::arg("tag"))
      .def("to_json", &TagEmbeddingTable::ToJson);

  py::class_<WaConfig>(m, "WaConfig")
      .def(py::init<double, double, double>(), py::arg("wt_src"),
           py::arg("wt_pos"), py::arg("wt_dp"))
      .def_property_readonly("wt_src", &WaConfig::wt_src)
      .def_property_readonly("wt_pos", &WaConfig::wt_pos)
      .def_property_readonly("wt_dp", &WaConfig::wt_dp);

  py::class_<LcConfig>(m, "LcConfig")
      .def_static("baseline", &LcConfig::Baseline, py::arg("dim_src"),
                  py::arg("dim_pos"), py::arg("dim_dp"),
                  py::arg("use_bias") = true)
      .def_readonly("dim_src", &LcConfig::dim_src)
      .def_readonly("dim_pos", &LcConfig::dim_pos)
      .def_readonly("dim_dp", &LcConfig::dim_dp)
      .def_property(
          "projection", [](const LcConfig& c) { return FromMatrix(c.projection); },
          [](LcConfig& c, const Rows& rows) { c.projection = ToMatrix(rows); })
      .def_readwrite("bias", &LcConfig::bias);

  m.def("wa_forward",
        [](const Rows& src, const std::vector<std::string>& pos,
           const std::vector<std::string>& dp, const TagEmbeddingTable* pos_table,
           const TagEmbeddingTable* dp_table, const WaConfig& cfg) {
          return FromMatrix(WaForward(ToMatrix(src),
                                      Inputs(pos, dp, pos_table, dp_table), cfg));
        },
        py::arg("src"), py::arg("pos_tags"), py::arg("dp_tags"),
        py::arg("pos_table").none(true), py::arg("dp_table").none(true),
        py::arg("config"));
  m.def("lc_forward",
        [](const Rows& src, const std::vector<std::string>& pos,
           const std::vector<std::string>& dp, const TagEmbeddingTable* pos_table,
           const TagEmbeddingTable* dp_table, const LcConfig& cfg) {
          return FromMatrix(LcForward(ToMatrix(src),
                                      Inputs(pos, dp, pos_table, dp_table), cfg));
        },
        py::arg("src"), py::arg("pos_tags"), py::arg("dp_tags"),
        py::arg("pos_table").none(true), py::arg("dp_table").none(true),
        py::arg("config"));
  m.def("run_gradcheck",
        [](std::uint64_t seed, std::size_t cases) {
          GradCheckOptions o;
          o.seed = seed;
          o.cases_per_op = cases;
          GradCheckReport r = RunGradCheck(o);
          py::dict d;
          d["passed"] = r.passed();
          d["wa_cases"] = r.count("wa");
          d["lc_cases"] = r.count("lc");
          d["max_rel_error"] = r.max_rel_error();
          d["seconds"] = r.seconds;
          return d;
        },
        py::arg("seed") = 7, py::arg("cases") = 54);

  // Tags.
  m.def("align_tags",
        [](const std::vector<std::string>& words,
           const std::vector<std::string>& pos, std::size_t max_piece) {
          TaggedSentence t{Sentence("s", words), pos, {}, {}};
          SubwordAlignment a = ChunkAlignment(t.sentence, max_piece);
          return py::make_tuple(a.subword_texts,
                                AlignTags(t, a, LayerKind::kPos));
        },
        py::arg("words"), py::arg("pos_tags"), py::arg("max_piece") = 4,
        "PoS tags projected onto chunked subwords: (subwords, tags).");
  m.def("select_semdp_tag",
        [](const std::vector<std::pair<int, std::string>>& pairs) {
          std::vector<DepArc> arcs;
          for (const auto& [head, rel] : pairs) arcs.push_back({head, rel});
          return SelectSemDpTag(arcs);
        },
        py::arg("pairs"));
}
