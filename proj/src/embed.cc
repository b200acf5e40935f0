#include "oiekit/embed.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <type_traits>

#include "json.hpp"
#include "oiekit/error.h"
#include "oiekit/tags.h"

namespace oiekit {

using Json = nlohmann::ordered_json;

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

TagEmbeddingTable::TagEmbeddingTable(std::string kind, std::size_t dim,
                                     bool trainable)
    : kind_(std::move(kind)), dim_(dim), trainable_(trainable) {
  if (dim_ == 0) throw InvalidConfig("embedding dimension must be >= 1");
}

TagEmbeddingTable TagEmbeddingTable::Random(
    std::string kind, const std::vector<std::string>& tags, std::size_t dim,
    std::uint64_t seed, bool trainable) {
  TagEmbeddingTable table(std::move(kind), dim, trainable);
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  auto add = [&](const std::string& tag) {
    if (table.contains(tag)) return;
    std::vector<double> v(dim);
    for (double& x : v) x = uniform(rng);
    table.vectors_.emplace(tag, std::move(v));
  };
  for (const std::string& tag : tags) add(tag);
  for (const std::string& tag : SpecialTags()) add(tag);
  return table;
}

void TagEmbeddingTable::Set(const std::string& tag, std::vector<double> vec) {
  if (vec.size() != dim_) {
    throw DimensionMismatch("vector for '" + tag + "' has length " +
                            std::to_string(vec.size()) + ", table dim is " +
                            std::to_string(dim_));
  }
  vectors_[tag] = std::move(vec);
}

const std::vector<double>& TagEmbeddingTable::Lookup(
    const std::string& tag) const {
  auto it = vectors_.find(tag);
  if (it == vectors_.end()) {
    throw UnknownTag("tag '" + tag + "' has no " + kind_ + " embedding");
  }
  return it->second;
}

std::vector<double>& TagEmbeddingTable::Mutable(const std::string& tag) {
  auto it = vectors_.find(tag);
  if (it == vectors_.end()) {
    throw UnknownTag("tag '" + tag + "' has no " + kind_ + " embedding");
  }
  return it->second;
}

TagGradients TagEmbeddingTable::ZeroGradients() const {
  TagGradients g;
  for (const auto& [tag, v] : vectors_) {
    g.emplace(tag, std::vector<double>(dim_, 0.0));
  }
  return g;
}

std::string TagEmbeddingTable::ToJson() const {
  Json vectors = Json::object();
  for (const auto& [tag, v] : vectors_) vectors[tag] = v;
  Json j = {{"kind", kind_},
            {"dim", dim_},
            {"trainable", trainable_},
            {"vectors", vectors}};
  return j.dump();
}

TagEmbeddingTable TagEmbeddingTable::FromJson(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw FormatError("embedding table must be a JSON object");
  }
  try {
    TagEmbeddingTable table(j.at("kind").get<std::string>(),
                            j.at("dim").get<std::size_t>(),
                            j.value("trainable", true));
    for (const auto& [tag, v] : j.at("vectors").items()) {
      table.Set(tag, v.get<std::vector<double>>());
    }
    return table;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("embedding table: ") + e.what());
  }
}

WaConfig::WaConfig(double wt_src, double wt_pos, double wt_dp)
    : wt_src_(wt_src), wt_pos_(wt_pos), wt_dp_(wt_dp) {
  for (double w : {wt_src, wt_pos, wt_dp}) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw InvalidConfig("weighted-addition weights must lie in [0, 1]");
    }
  }
  if (std::abs(wt_src + wt_pos + wt_dp - 1.0) > kSumTolerance) {
    throw InvalidConfig("weighted-addition weights must sum to 1");
  }
}

std::string WaConfig::ToJson() const {
  Json j = {{"wt_src", wt_src_}, {"wt_pos", wt_pos_}, {"wt_dp", wt_dp_}};
  return j.dump();
}

WaConfig WaConfig::FromJson(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw FormatError("WA config must be a JSON object");
  }
  try {
    return WaConfig(j.at("wt_src").get<double>(), j.value("wt_pos", 0.0),
                    j.value("wt_dp", 0.0));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("WA config: ") + e.what());
  }
}

void LcConfig::Validate() const {
  if (dim_src == 0) throw DimensionMismatch("dim_src must be >= 1");
  if (projection.rows() != dim_src || projection.cols() != concat_dim()) {
    throw DimensionMismatch(
        "projection is " + std::to_string(projection.rows()) + "x" +
        std::to_string(projection.cols()) + ", expected " +
        std::to_string(dim_src) + "x" + std::to_string(concat_dim()));
  }
  if (bias.size() != dim_src) {
    throw DimensionMismatch("bias length must equal dim_src");
  }
}

LcConfig LcConfig::Baseline(std::size_t dim_src, std::size_t dim_pos,
                            std::size_t dim_dp, bool use_bias) {
  LcConfig cfg;
  cfg.dim_src = dim_src;
  cfg.dim_pos = dim_pos;
  cfg.dim_dp = dim_dp;
  cfg.projection = Matrix(dim_src, dim_src + dim_pos + dim_dp);
  for (std::size_t i = 0; i < dim_src; ++i) cfg.projection(i, i) = 1.0;
  cfg.bias.assign(dim_src, 0.0);
  cfg.use_bias = use_bias;
  return cfg;
}

std::string LcConfig::ToJson(bool with_weights) const {
  Json j = {{"dim_src", dim_src},
            {"dim_pos", dim_pos},
            {"dim_dp", dim_dp},
            {"use_bias", use_bias}};
  if (with_weights) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < projection.rows(); ++r) {
      auto row = projection.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["projection"] = rows;
    j["bias"] = bias;
  }
  return j.dump();
}

LcConfig LcConfig::FromJson(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw FormatError("LC config must be a JSON object");
  }
  try {
    LcConfig cfg = Baseline(j.at("dim_src").get<std::size_t>(),
                            j.value("dim_pos", std::size_t{0}),
                            j.value("dim_dp", std::size_t{0}),
                            j.value("use_bias", true));
    if (j.contains("projection")) {
      const Json& rows = j["projection"];
      if (rows.size() != cfg.projection.rows()) {
        throw DimensionMismatch("projection row count mismatch");
      }
      for (std::size_t r = 0; r < rows.size(); ++r) {
        auto row = rows[r].get<std::vector<double>>();
        if (row.size() != cfg.projection.cols()) {
          throw DimensionMismatch("projection column count mismatch");
        }
        std::copy(row.begin(), row.end(), cfg.projection.row(r).begin());
      }
    }
    if (j.contains("bias")) cfg.bias = j["bias"].get<std::vector<double>>();
    cfg.Validate();
    return cfg;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("LC config: ") + e.what());
  }
}

namespace {

// Resolves the table of one layer, checking its shape against the batch.
const TagEmbeddingTable& LayerTable(const TagEmbeddingTable* table,
                                    std::span<const std::string> tags,
                                    std::size_t rows, std::size_t dim,
                                    const char* layer) {
  if (table == nullptr) {
    throw InvalidConfig(std::string(layer) +
                        " layer is used but no table was given");
  }
  if (table->dim() != dim) {
    throw DimensionMismatch(std::string(layer) + " table has dim " +
                            std::to_string(table->dim()) + ", expected " +
                            std::to_string(dim));
  }
  if (tags.size() != rows) {
    throw DimensionMismatch(std::string(layer) + " has " +
                            std::to_string(tags.size()) + " tags for " +
                            std::to_string(rows) + " positions");
  }
  return *table;
}

void Accumulate(std::span<double> into, std::span<const double> from,
                double scale) {
  for (std::size_t k = 0; k < into.size(); ++k) into[k] += scale * from[k];
}

TagGradients::mapped_type& GradFor(TagGradients& grads, const std::string& tag,
                                   const char* layer) {
  auto it = grads.find(tag);
  if (it == grads.end()) {
    throw UnknownTag("tag '" + tag + "' has no " + layer + " embedding");
  }
  return it->second;
}

}  // namespace

Matrix WaForward(const Matrix& src, const TagInputs& tags,
                 const WaConfig& cfg) {
  const std::size_t n = src.rows();
  const std::size_t d = src.cols();
  const bool use_pos = cfg.wt_pos() > 0.0;
  const bool use_dp = cfg.wt_dp() > 0.0;
  const TagEmbeddingTable* pos =
      use_pos ? &LayerTable(tags.pos_table, tags.pos, n, d, "PoS") : nullptr;
  const TagEmbeddingTable* dp =
      use_dp ? &LayerTable(tags.dp_table, tags.dp, n, d, "DP") : nullptr;

  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = out.row(i);
    auto s = src.row(i);
    for (std::size_t k = 0; k < d; ++k) x[k] = cfg.wt_src() * s[k];
    if (pos) Accumulate(x, pos->Lookup(tags.pos[i]), cfg.wt_pos());
    if (dp) Accumulate(x, dp->Lookup(tags.dp[i]), cfg.wt_dp());
  }
  return out;
}

WaGradients WaBackward(const Matrix& upstream, const TagInputs& tags,
                       const WaConfig& cfg) {
  const std::size_t n = upstream.rows();
  const std::size_t d = upstream.cols();
  WaGradients g;
  g.src = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    Accumulate(g.src.row(i), upstream.row(i), cfg.wt_src());
  }
  if (tags.pos_table) g.pos = tags.pos_table->ZeroGradients();
  if (tags.dp_table) g.dp = tags.dp_table->ZeroGradients();
  if (cfg.wt_pos() > 0.0) {
    LayerTable(tags.pos_table, tags.pos, n, d, "PoS");
    for (std::size_t i = 0; i < n; ++i) {
      Accumulate(GradFor(g.pos, tags.pos[i], "PoS"), upstream.row(i),
                 cfg.wt_pos());
    }
  }
  if (cfg.wt_dp() > 0.0) {
    LayerTable(tags.dp_table, tags.dp, n, d, "DP");
    for (std::size_t i = 0; i < n; ++i) {
      Accumulate(GradFor(g.dp, tags.dp[i], "DP"), upstream.row(i),
                 cfg.wt_dp());
    }
  }
  return g;
}

namespace {

// Builds src_i ⊕ emb(pos_i) ⊕ emb(dp_i) for every position.
Matrix Concatenate(const Matrix& src, const TagInputs& tags,
                   const LcConfig& cfg) {
  cfg.Validate();
  const std::size_t n = src.rows();
  if (src.cols() != cfg.dim_src) {
    throw DimensionMismatch("source has dim " + std::to_string(src.cols()) +
                            ", config expects " + std::to_string(cfg.dim_src));
  }
  const TagEmbeddingTable* pos =
      cfg.dim_pos > 0
          ? &LayerTable(tags.pos_table, tags.pos, n, cfg.dim_pos, "PoS")
          : nullptr;
  const TagEmbeddingTable* dp =
      cfg.dim_dp > 0 ? &LayerTable(tags.dp_table, tags.dp, n, cfg.dim_dp, "DP")
                     : nullptr;
  Matrix z(n, cfg.concat_dim());
  for (std::size_t i = 0; i < n; ++i) {
    auto out = z.row(i);
    auto s = src.row(i);
    std::copy(s.begin(), s.end(), out.begin());
    if (pos) {
      const auto& e = pos->Lookup(tags.pos[i]);
      std::copy(e.begin(), e.end(), out.begin() + cfg.dim_src);
    }
    if (dp) {
      const auto& e = dp->Lookup(tags.dp[i]);
      std::copy(e.begin(), e.end(), out.begin() + cfg.dim_src + cfg.dim_pos);
    }
  }
  return z;
}

}  // namespace

Matrix LcForward(const Matrix& src, const TagInputs& tags,
                 const LcConfig& cfg) {
  const Matrix z = Concatenate(src, tags, cfg);
  const std::size_t n = z.rows();
  const std::size_t cols = cfg.concat_dim();
  Matrix out(n, cfg.dim_src);
  for (std::size_t i = 0; i < n; ++i) {
    auto zi = z.row(i);
    for (std::size_t j = 0; j < cfg.dim_src; ++j) {
      double acc = cfg.use_bias ? cfg.bias[j] : 0.0;
      auto p = cfg.projection.row(j);
      for (std::size_t k = 0; k < cols; ++k) acc += p[k] * zi[k];
      out(i, j) = acc;
    }
  }
  return out;
}

LcGradients LcBackward(const Matrix& upstream, const Matrix& src,
                       const TagInputs& tags, const LcConfig& cfg) {
  const Matrix z = Concatenate(src, tags, cfg);
  const std::size_t n = z.rows();
  const std::size_t cols = cfg.concat_dim();
  if (upstream.rows() != n || upstream.cols() != cfg.dim_src) {
    throw DimensionMismatch("upstream gradient shape differs from output");
  }
  LcGradients g;
  g.src = Matrix(n, cfg.dim_src);
  g.projection = Matrix(cfg.dim_src, cols);
  g.bias.assign(cfg.dim_src, 0.0);
  if (tags.pos_table) g.pos = tags.pos_table->ZeroGradients();
  if (tags.dp_table) g.dp = tags.dp_table->ZeroGradients();

  std::vector<double> gz(cols);
  for (std::size_t i = 0; i < n; ++i) {
    auto up = upstream.row(i);
    auto zi = z.row(i);
    std::fill(gz.begin(), gz.end(), 0.0);
    for (std::size_t j = 0; j < cfg.dim_src; ++j) {
      auto p = cfg.projection.row(j);
      auto gp = g.projection.row(j);
      for (std::size_t k = 0; k < cols; ++k) {
        gp[k] += up[j] * zi[k];
        gz[k] += p[k] * up[j];
      }
      if (cfg.use_bias) g.bias[j] += up[j];
    }
    std::span<const double> gzs(gz);
    std::copy(gz.begin(), gz.begin() + cfg.dim_src, g.src.row(i).begin());
    if (cfg.dim_pos > 0) {
      Accumulate(GradFor(g.pos, tags.pos[i], "PoS"),
                 gzs.subspan(cfg.dim_src, cfg.dim_pos), 1.0);
    }
    if (cfg.dim_dp > 0) {
      Accumulate(GradFor(g.dp, tags.dp[i], "DP"),
                 gzs.subspan(cfg.dim_src + cfg.dim_pos, cfg.dim_dp), 1.0);
    }
  }
  return g;
}

namespace {

struct ToyPass {
  double loss = 0.0;
  TagGradients source;
  TagGradients pos;
  TagGradients dp;
  Matrix projection;
  std::vector<double> bias;
};

Matrix LookupSource(const TagEmbeddingTable& table,
                    const std::vector<std::string>& words) {
  Matrix src(words.size(), table.dim());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& v = table.Lookup(words[i]);
    std::copy(v.begin(), v.end(), src.row(i).begin());
  }
  return src;
}

void AddInto(TagGradients& into, const TagGradients& from) {
  for (const auto& [tag, g] : from) {
    auto& dst = into.at(tag);
    for (std::size_t k = 0; k < g.size(); ++k) dst[k] += g[k];
  }
}

// Loss and, when `grads` is set, the gradient of every parameter.
ToyPass RunToy(const ToyModel& model, const std::vector<ToyExample>& data,
               bool grads) {
  ToyPass pass;
  std::size_t entries = 0;
  for (const ToyExample& ex : data) entries += ex.target.data().size();
  if (entries == 0) return pass;
  const double scale = 1.0 / static_cast<double>(entries);

  if (grads) {
    pass.source = model.source.ZeroGradients();
    if (model.pos) pass.pos = model.pos->ZeroGradients();
    if (model.dp) pass.dp = model.dp->ZeroGradients();
    if (const auto* lc = std::get_if<LcConfig>(&model.composition)) {
      pass.projection = Matrix(lc->projection.rows(), lc->projection.cols());
      pass.bias.assign(lc->bias.size(), 0.0);
    }
  }
  for (const ToyExample& ex : data) {
    const Matrix src = LookupSource(model.source, ex.words);
    TagInputs tags{ex.pos, ex.dp, model.pos ? &*model.pos : nullptr,
                   model.dp ? &*model.dp : nullptr};
    const Matrix x = std::visit(
        [&](const auto& cfg) {
          if constexpr (std::is_same_v<std::decay_t<decltype(cfg)>, WaConfig>) {
            return WaForward(src, tags, cfg);
          } else {
            return LcForward(src, tags, cfg);
          }
        },
        model.composition);
    if (x.rows() != ex.target.rows() || x.cols() != ex.target.cols()) {
      throw DimensionMismatch("toy target shape differs from composed output");
    }
    Matrix upstream(x.rows(), x.cols());
    for (std::size_t e = 0; e < x.data().size(); ++e) {
      double diff = x.data()[e] - ex.target.data()[e];
      pass.loss += diff * diff * scale;
      upstream.data()[e] = 2.0 * diff * scale;
    }
    if (!grads) continue;

    Matrix gsrc;
    if (const auto* wa = std::get_if<WaConfig>(&model.composition)) {
      WaGradients g = WaBackward(upstream, tags, *wa);
      gsrc = std::move(g.src);
      AddInto(pass.pos, g.pos);
      AddInto(pass.dp, g.dp);
    } else {
      const auto& lc = std::get<LcConfig>(model.composition);
      LcGradients g = LcBackward(upstream, src, tags, lc);
      gsrc = std::move(g.src);
      AddInto(pass.pos, g.pos);
      AddInto(pass.dp, g.dp);
      for (std::size_t e = 0; e < g.projection.data().size(); ++e) {
        pass.projection.data()[e] += g.projection.data()[e];
      }
      for (std::size_t j = 0; j < g.bias.size(); ++j) pass.bias[j] += g.bias[j];
    }
    for (std::size_t i = 0; i < ex.words.size(); ++i) {
      Accumulate(pass.source.at(ex.words[i]), gsrc.row(i), 1.0);
    }
  }
  return pass;
}

void Descend(TagEmbeddingTable& table, const TagGradients& grads, double lr) {
  if (!table.trainable()) return;
  for (const auto& [tag, g] : grads) {
    auto& v = table.Mutable(tag);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] -= lr * g[k];
  }
}

}  // namespace

double ToyLoss(const ToyModel& model, const std::vector<ToyExample>& data) {
  return RunToy(model, data, false).loss;
}

std::vector<double> FitToy(ToyModel& model, const std::vector<ToyExample>& data,
                           int steps, double lr) {
  if (!(lr > 0.0)) throw InvalidConfig("learning rate must be positive");
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(std::max(steps, 0)) + 1);
  for (int step = 0; step < steps; ++step) {
    ToyPass pass = RunToy(model, data, true);
    curve.push_back(pass.loss);
    Descend(model.source, pass.source, lr);
    if (model.pos) Descend(*model.pos, pass.pos, lr);
    if (model.dp) Descend(*model.dp, pass.dp, lr);
    if (auto* lc = std::get_if<LcConfig>(&model.composition)) {
      for (std::size_t e = 0; e < lc->projection.data().size(); ++e) {
        lc->projection.data()[e] -= lr * pass.projection.data()[e];
      }
      if (lc->use_bias) {
        for (std::size_t j = 0; j < lc->bias.size(); ++j) {
          lc->bias[j] -= lr * pass.bias[j];
        }
      }
    }
  }
  curve.push_back(ToyLoss(model, data));
  return curve;
}

}  // namespace oiekit
