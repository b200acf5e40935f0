#include <cmath>

#include "doctest.h"
#include "oiekit/embed.h"
#include "oiekit/error.h"
#include "test_support.h"

using namespace oiekit;
using oiekit::testing::Rng;

namespace {

Matrix Rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Matrix RandomMatrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.Uniform(-1, 1);
  return m;
}

// Two words, two tags, orthogonal targets.
std::vector<ToyExample> SeparableTask() {
  return {{{"a", "b"}, {"X", "Y"}, {}, Rows({{1, 0}, {0, 1}})},
          {{"b", "a"}, {"Y", "X"}, {}, Rows({{0, 1}, {1, 0}})}};
}

ToyModel WaToy(std::uint64_t seed) {
  return {TagEmbeddingTable::Random("src", {"a", "b"}, 2, seed),
          TagEmbeddingTable::Random("pos", {"X", "Y"}, 2, seed + 1),
          std::nullopt,
          WaConfig(0.5, 0.5, 0.0)};
}

}  // namespace

TEST_CASE("WaConfig validation") {
  CHECK_NOTHROW(WaConfig(1, 0, 0));
  CHECK_NOTHROW(WaConfig(0.3, 0.3, 0.4));
  CHECK_THROWS_AS(WaConfig(0.5, 0.4, 0.0), InvalidConfig);
  CHECK_THROWS_AS(WaConfig(1.2, -0.2, 0.0), InvalidConfig);
  CHECK_THROWS_AS(WaConfig(NAN, 0.5, 0.5), InvalidConfig);
  WaConfig c = WaConfig::FromJson(WaConfig(0.6, 0.3, 0.1).ToJson());
  CHECK(c.wt_pos() == 0.3);
  CHECK(WaConfig::FromJson(R"({"wt_src":1})").wt_dp() == 0.0);
  CHECK_THROWS_AS(WaConfig::FromJson(R"({"wt_pos":1})"), FormatError);
  CHECK_THROWS_AS(WaConfig::FromJson(R"({"wt_src":0.5})"), InvalidConfig);
}

TEST_CASE("WA forward examples") {
  TagEmbeddingTable pos("pos", 2);
  pos.Set("NN", {0, 1});
  pos.Set("VB", {1, 0});
  std::vector<std::string> tags = {"NN"};
  TagInputs in{tags, {}, &pos, nullptr};
  Matrix src = Rows({{1, 0}});
  Matrix out = WaForward(src, in, WaConfig(0.6, 0.4, 0));
  CHECK(out(0, 0) == doctest::Approx(0.6));
  CHECK(out(0, 1) == doctest::Approx(0.4));
  tags[0] = "VB";
  out = WaForward(src, in, WaConfig(0.9, 0.1, 0));
  CHECK(out(0, 0) == doctest::Approx(1.0));
  CHECK(out(0, 1) == 0.0);
  // Identity, with no tables at all since zero-weight layers are skipped.
  CHECK(WaForward(src, TagInputs{}, WaConfig(1, 0, 0)) == src);
}

TEST_CASE("WA forward errors") {
  TagEmbeddingTable pos("pos", 2);
  pos.Set("NN", {0, 1});
  std::vector<std::string> tags = {"JJ"};
  Matrix src = Rows({{1, 0}});
  CHECK_THROWS_AS(WaForward(src, {tags, {}, &pos, nullptr}, WaConfig(0.5, 0.5, 0)),
                  UnknownTag);
  std::vector<std::string> two = {"NN", "NN"};
  CHECK_THROWS_AS(WaForward(src, {two, {}, &pos, nullptr}, WaConfig(0.5, 0.5, 0)),
                  DimensionMismatch);
  TagEmbeddingTable wide("pos", 3);
  wide.Set("NN", {0, 1, 0});
  std::vector<std::string> nn = {"NN"};
  CHECK_THROWS_AS(WaForward(src, {nn, {}, &wide, nullptr}, WaConfig(0.5, 0.5, 0)),
                  DimensionMismatch);
  CHECK_THROWS_AS(WaForward(src, {nn, {}, nullptr, nullptr}, WaConfig(0.5, 0.5, 0)),
                  InvalidConfig);
}

TEST_CASE("WA backward examples") {
  TagEmbeddingTable pos("pos", 2);
  pos.Set("NN", {0, 1});
  pos.Set("VB", {1, 0});
  std::vector<std::string> tags = {"NN", "NN"};
  TagInputs in{tags, {}, &pos, nullptr};
  Matrix up = Rows({{1, 2}, {3, -1}});
  WaGradients g = WaBackward(up, in, WaConfig(0.6, 0.4, 0));
  CHECK(g.pos.at("NN")[0] == doctest::Approx(0.4 * 4));
  CHECK(g.pos.at("NN")[1] == doctest::Approx(0.4 * 1));
  CHECK(g.pos.at("VB") == std::vector<double>{0, 0});
  CHECK(g.src(1, 0) == doctest::Approx(0.6 * 3));
  WaGradients id = WaBackward(up, in, WaConfig(1, 0, 0));
  CHECK(id.src == up);
  for (const auto& [tag, v] : id.pos) CHECK(v == std::vector<double>{0, 0});
}

TEST_CASE("WA is linear in the source") {
  Rng rng(71);
  TagEmbeddingTable pos = TagEmbeddingTable::Random("pos", {"A", "B"}, 3, 1);
  TagEmbeddingTable dp = TagEmbeddingTable::Random("dp", {"x", "y"}, 3, 2);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = rng.Int(1, 5);
    std::vector<std::string> pt(n), dt(n);
    for (auto& t : pt) t = rng.Pick(std::vector<std::string>{"A", "B"});
    for (auto& t : dt) t = rng.Pick(std::vector<std::string>{"x", "y"});
    const double wp = rng.Uniform(0, 0.5), wd = rng.Uniform(0, 0.5);
    WaConfig cfg(1 - wp - wd, wp, wd);
    TagInputs in{pt, dt, &pos, &dp};
    Matrix x = RandomMatrix(rng, n, 3), y = RandomMatrix(rng, n, 3);
    const double alpha = rng.Uniform(-2, 2), beta = rng.Uniform(-2, 2);
    Matrix mix(n, 3);
    for (std::size_t k = 0; k < mix.data().size(); ++k) {
      mix.data()[k] = alpha * x.data()[k] + beta * y.data()[k];
    }
    // Tag terms are affine, so compare differences against the zero source.
    Matrix zero(n, 3);
    Matrix f0 = WaForward(zero, in, cfg);
    Matrix fm = WaForward(mix, in, cfg), fx = WaForward(x, in, cfg),
           fy = WaForward(y, in, cfg);
    for (std::size_t k = 0; k < mix.data().size(); ++k) {
      const double lhs = fm.data()[k] - f0.data()[k];
      const double rhs = alpha * (fx.data()[k] - f0.data()[k]) +
                         beta * (fy.data()[k] - f0.data()[k]);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("LC forward examples") {
  LcConfig cfg;
  cfg.dim_src = 2;
  cfg.dim_pos = 1;
  cfg.projection = Rows({{1, 0, 1}, {0, 1, 0}});
  cfg.bias = {0, 0};
  TagEmbeddingTable pos("pos", 1);
  pos.Set("NN", {3});
  std::vector<std::string> tags = {"NN"};
  Matrix out = LcForward(Rows({{1, 2}}), {tags, {}, &pos, nullptr}, cfg);
  CHECK(out(0, 0) == 4.0);
  CHECK(out(0, 1) == 2.0);

  LcConfig plain = LcConfig::Baseline(2, 0, 0);
  plain.Validate();
  Matrix src = Rows({{0.3, -7}});
  CHECK(LcForward(src, {}, plain) == src);
  LcConfig baseline = LcConfig::Baseline(2, 1, 0);
  CHECK(LcForward(src, {tags, {}, &pos, nullptr}, baseline) == src);
}

TEST_CASE("LC config validation and JSON") {
  LcConfig bad = LcConfig::Baseline(2, 1, 1);
  bad.bias.pop_back();
  CHECK_THROWS_AS(bad.Validate(), DimensionMismatch);
  bad = LcConfig::Baseline(2, 1, 1);
  bad.projection = Matrix(2, 3);
  CHECK_THROWS_AS(bad.Validate(), DimensionMismatch);
  LcConfig cfg = LcConfig::Baseline(3, 2, 1);
  cfg.projection(1, 4) = 0.25;
  cfg.bias[2] = -1;
  LcConfig back = LcConfig::FromJson(cfg.ToJson());
  CHECK(back.projection == cfg.projection);
  CHECK(back.bias == cfg.bias);
  LcConfig dims = LcConfig::FromJson(cfg.ToJson(false));
  CHECK(dims.projection == LcConfig::Baseline(3, 2, 1).projection);
}

TEST_CASE("LC backward examples") {
  LcConfig cfg = LcConfig::Baseline(2, 1, 0);
  TagEmbeddingTable pos("pos", 1);
  pos.Set("NN", {3});
  std::vector<std::string> tags = {"NN"};
  Matrix src = Rows({{1, 2}});
  Matrix up = Rows({{1, 0}});
  LcGradients g = LcBackward(up, src, {tags, {}, &pos, nullptr}, cfg);
  CHECK(g.src == up);
  CHECK(g.pos.at("NN") == std::vector<double>{0});
  CHECK(g.bias == std::vector<double>{1, 0});
  // dP = up ⊗ (src ⊕ pos).
  CHECK(g.projection == Rows({{1, 2, 3}, {0, 0, 0}}));
}

TEST_CASE("tag table JSON round-trip and errors") {
  TagEmbeddingTable t = TagEmbeddingTable::Random("pos", {"NN", "VB"}, 4, 9);
  CHECK(t.size() == 5);
  CHECK(t.contains("<pad>"));
  for (const auto& [tag, v] : t.vectors()) {
    for (double x : v) CHECK(std::abs(x) <= 0.5);
  }
  CHECK(TagEmbeddingTable::FromJson(t.ToJson()) == t);
  CHECK(TagEmbeddingTable::Random("pos", {"NN"}, 4, 9) ==
        TagEmbeddingTable::Random("pos", {"NN"}, 4, 9));
  CHECK_THROWS_AS(t.Lookup("JJ"), UnknownTag);
  CHECK_THROWS_AS(t.Set("JJ", {1}), DimensionMismatch);
  CHECK_THROWS_AS(TagEmbeddingTable("pos", 0), InvalidConfig);
  CHECK_THROWS_AS(
      TagEmbeddingTable::FromJson(R"({"kind":"p","dim":2,"vectors":{"a":[1]}})"),
      DimensionMismatch);
  CHECK_THROWS_AS(TagEmbeddingTable::FromJson("{"), FormatError);
}

TEST_CASE("fit_toy converges on a separable task") {
  ToyModel model = WaToy(3);
  std::vector<double> losses = FitToy(model, SeparableTask(), 500, 0.1);
  REQUIRE(losses.size() == 501);
  CHECK(losses.back() < 0.01 * losses.front());
  CHECK(losses.back() == doctest::Approx(ToyLoss(model, SeparableTask())));
  CHECK_THROWS_AS(FitToy(model, SeparableTask(), 1, 0.0), InvalidConfig);
}

TEST_CASE("fit_toy fixed point") {
  ToyModel model = WaToy(4);
  std::vector<ToyExample> data = SeparableTask();
  for (ToyExample& ex : data) {
    TagInputs in{ex.pos, {}, &*model.pos, nullptr};
    Matrix src(ex.words.size(), 2);
    for (std::size_t i = 0; i < ex.words.size(); ++i) {
      const auto& v = model.source.Lookup(ex.words[i]);
      std::copy(v.begin(), v.end(), src.row(i).begin());
    }
    ex.target = WaForward(src, in, std::get<WaConfig>(model.composition));
  }
  for (double loss : FitToy(model, data, 20, 0.1)) CHECK(loss == 0.0);
}

TEST_CASE("frozen tables are bit-identical after fitting") {
  ToyModel model = WaToy(5);
  model.source.set_trainable(false);
  const TagEmbeddingTable before = model.source;
  const TagEmbeddingTable pos_before = *model.pos;
  FitToy(model, SeparableTask(), 50, 0.1);
  CHECK(model.source == before);
  CHECK_FALSE(*model.pos == pos_before);

  ToyModel lc{TagEmbeddingTable::Random("src", {"a", "b"}, 2, 6),
              TagEmbeddingTable::Random("pos", {"X", "Y"}, 2, 7, false),
              std::nullopt, LcConfig::Baseline(2, 2, 0)};
  const TagEmbeddingTable lc_pos = *lc.pos;
  std::vector<double> losses = FitToy(lc, SeparableTask(), 200, 0.1);
  CHECK(*lc.pos == lc_pos);
  CHECK(losses.back() < losses.front());
}
