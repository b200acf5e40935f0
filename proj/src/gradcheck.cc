#include "oiekit/gradcheck.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "json.hpp"
#include "oiekit/embed.h"
#include "oiekit/tags.h"

namespace oiekit {

namespace {

constexpr std::array<std::size_t, 3> kDims = {2, 8, 16};
constexpr std::array<std::size_t, 3> kPositions = {1, 3, 7};

// Batch tags are drawn from the first kUsedTags inventory entries; the
// tables also hold the specials, which never occur and so must get exactly
// zero gradient.
constexpr std::size_t kUsedTags = 4;

struct Batch {
  Matrix src;
  Matrix upstream;
  std::vector<std::string> pos;
  std::vector<std::string> dp;
};

std::vector<std::string> Head(const std::vector<std::string>& v) {
  return {v.begin(), v.begin() + std::min(kUsedTags, v.size())};
}

Matrix RandomMatrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (double& x : m.data()) x = u(rng);
  return m;
}

std::vector<std::string> RandomTags(const std::vector<std::string>& pool,
                                    std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::vector<std::string> tags(n);
  for (auto& t : tags) t = pool[pick(rng)];
  return tags;
}

double Dot(const Matrix& a, const Matrix& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    sum += a.data()[i] * b.data()[i];
  }
  return sum;
}

// Compares analytic entries against central differences of `loss`.
class Checker {
 public:
  Checker(const GradCheckOptions& options, GradCheckCase& result)
      : options_(options), result_(result) {}

  template <typename LossFn>
  void Check(const std::string& name, double& param, double analytic,
             LossFn&& loss) {
    const double orig = param;
    const double up = orig + options_.epsilon;
    const double down = orig - options_.epsilon;
    param = up;
    const double lp = loss();
    param = down;
    const double lm = loss();
    param = orig;
    const double numeric = (lp - lm) / (up - down);
    const double err = RelativeError(analytic, numeric, options_.floor);
    ++result_.entries;
    if (result_.worst.empty() || err > result_.max_rel_error) {
      result_.max_rel_error = err;
      result_.worst = name;
    }
  }

  template <typename LossFn>
  void CheckTable(const std::string& layer, TagEmbeddingTable& table,
                  const TagGradients& grads,
                  const std::vector<std::string>& used, LossFn&& loss) {
    for (const auto& [tag, g] : grads) {
      const bool present = std::find(used.begin(), used.end(), tag) !=
                           used.end();
      if (!present) {
        for (double x : g) {
          if (x != 0.0) result_.absent_tag_zero = false;
        }
        continue;
      }
      auto& v = table.Mutable(tag);
      for (std::size_t k = 0; k < v.size(); ++k) {
        Check(layer + "[" + tag + "][" + std::to_string(k) + "]", v[k], g[k],
              loss);
      }
    }
  }

 private:
  const GradCheckOptions& options_;
  GradCheckCase& result_;
};

WaConfig RandomWaConfig(std::size_t index, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  double a = u(rng), b = u(rng), c = u(rng);
  // Every third case drops the DP layer so the skipped-lookup path is covered.
  if (index % 3 == 2) c = 0.0;
  const double sum = a + b + c;
  a /= sum;
  b /= sum;
  return WaConfig(a, b, c == 0.0 ? 0.0 : 1.0 - a - b);
}

GradCheckCase CheckWa(std::size_t index, std::size_t d, std::size_t n,
                      std::mt19937_64& rng, const GradCheckOptions& options) {
  GradCheckCase result;
  result.op = "wa";
  result.dim = d;
  result.positions = n;
  TagEmbeddingTable pos =
      TagEmbeddingTable::Random("pos", Head(PosInventory()), d, rng());
  TagEmbeddingTable dp =
      TagEmbeddingTable::Random("semdp", Head(SemDpInventory()), d, rng());
  Batch b{RandomMatrix(n, d, rng), RandomMatrix(n, d, rng),
          RandomTags(Head(PosInventory()), n, rng),
          RandomTags(Head(SemDpInventory()), n, rng)};
  const WaConfig cfg = RandomWaConfig(index, rng);
  const TagInputs tags{b.pos, b.dp, &pos, &dp};

  auto loss = [&] { return Dot(b.upstream, WaForward(b.src, tags, cfg)); };
  const WaGradients g = WaBackward(b.upstream, tags, cfg);

  Checker checker(options, result);
  for (std::size_t e = 0; e < b.src.data().size(); ++e) {
    checker.Check("src[" + std::to_string(e) + "]", b.src.data()[e],
                  g.src.data()[e], loss);
  }
  checker.CheckTable("pos", pos, g.pos, b.pos, loss);
  checker.CheckTable("dp", dp, g.dp, b.dp, loss);
  result.passed =
      result.max_rel_error <= options.tolerance && result.absent_tag_zero;
  return result;
}

GradCheckCase CheckLc(std::size_t index, std::size_t d, std::size_t n,
                      std::mt19937_64& rng, const GradCheckOptions& options) {
  GradCheckCase result;
  result.op = "lc";
  result.dim = d;
  result.positions = n;
  std::uniform_int_distribution<std::size_t> tag_dim(1, d);
  LcConfig cfg;
  cfg.dim_src = d;
  // Every third case leaves the DP layer out of the concatenation.
  cfg.dim_pos = tag_dim(rng);
  cfg.dim_dp = index % 3 == 2 ? 0 : tag_dim(rng);
  cfg.projection = RandomMatrix(d, cfg.concat_dim(), rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  cfg.bias.resize(d);
  for (double& x : cfg.bias) x = u(rng);

  TagEmbeddingTable pos = TagEmbeddingTable::Random(
      "pos", Head(PosInventory()), cfg.dim_pos, rng());
  TagEmbeddingTable dp = TagEmbeddingTable::Random(
      "semdp", Head(SemDpInventory()), std::max<std::size_t>(cfg.dim_dp, 1),
      rng());
  Batch b{RandomMatrix(n, d, rng), RandomMatrix(n, d, rng),
          RandomTags(Head(PosInventory()), n, rng),
          RandomTags(Head(SemDpInventory()), n, rng)};
  TagInputs tags{b.pos, {}, &pos, nullptr};
  if (cfg.dim_dp > 0) {
    tags.dp = b.dp;
    tags.dp_table = &dp;
  }

  auto loss = [&] { return Dot(b.upstream, LcForward(b.src, tags, cfg)); };
  const LcGradients g = LcBackward(b.upstream, b.src, tags, cfg);

  Checker checker(options, result);
  for (std::size_t e = 0; e < b.src.data().size(); ++e) {
    checker.Check("src[" + std::to_string(e) + "]", b.src.data()[e],
                  g.src.data()[e], loss);
  }
  checker.CheckTable("pos", pos, g.pos, b.pos, loss);
  if (cfg.dim_dp > 0) checker.CheckTable("dp", dp, g.dp, b.dp, loss);
  for (std::size_t e = 0; e < cfg.projection.data().size(); ++e) {
    checker.Check("projection[" + std::to_string(e) + "]",
                  cfg.projection.data()[e], g.projection.data()[e], loss);
  }
  for (std::size_t j = 0; j < cfg.bias.size(); ++j) {
    checker.Check("bias[" + std::to_string(j) + "]", cfg.bias[j], g.bias[j],
                  loss);
  }
  result.passed =
      result.max_rel_error <= options.tolerance && result.absent_tag_zero;
  return result;
}

}  // namespace

double RelativeError(double analytic, double numeric, double floor) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

bool GradCheckReport::passed() const {
  return !cases.empty() &&
         std::all_of(cases.begin(), cases.end(),
                     [](const GradCheckCase& c) { return c.passed; });
}

std::size_t GradCheckReport::count(const std::string& op) const {
  return std::count_if(cases.begin(), cases.end(),
                       [&](const GradCheckCase& c) { return c.op == op; });
}

double GradCheckReport::max_rel_error() const {
  double worst = 0.0;
  for (const GradCheckCase& c : cases) worst = std::max(worst, c.max_rel_error);
  return worst;
}

std::string GradCheckReport::ToJson() const {
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const GradCheckCase& c : cases) {
    if (c.passed) continue;
    failures.push_back({{"op", c.op},
                        {"dim", c.dim},
                        {"positions", c.positions},
                        {"max_rel_error", c.max_rel_error},
                        {"worst", c.worst},
                        {"absent_tag_zero", c.absent_tag_zero}});
  }
  nlohmann::ordered_json j = {{"passed", passed()},
                              {"wa_cases", count("wa")},
                              {"lc_cases", count("lc")},
                              {"tolerance", tolerance},
                              {"max_rel_error", max_rel_error()},
                              {"seconds", seconds},
                              {"failures", failures}};
  return j.dump();
}

std::string GradCheckReport::ToText() const {
  std::string out;
  char buf[160];
  for (const std::string op : {"wa", "lc"}) {
    double worst = 0.0;
    std::size_t failed = 0, entries = 0;
    for (const GradCheckCase& c : cases) {
      if (c.op != op) continue;
      worst = std::max(worst, c.max_rel_error);
      entries += c.entries;
      if (!c.passed) ++failed;
    }
    std::snprintf(buf, sizeof(buf),
                  "%-3s cases=%zu entries=%zu max_rel_error=%.3e failed=%zu\n",
                  op.c_str(), count(op), entries, worst, failed);
    out += buf;
  }
  for (const GradCheckCase& c : cases) {
    if (c.passed) continue;
    std::snprintf(buf, sizeof(buf),
                  "FAIL %s d=%zu N=%zu rel_error=%.3e at %s%s\n", c.op.c_str(),
                  c.dim, c.positions, c.max_rel_error, c.worst.c_str(),
                  c.absent_tag_zero ? "" : " (absent tag has gradient)");
    out += buf;
  }
  out += passed() ? "all checks passed\n" : "gradient check FAILED\n";
  return out;
}

GradCheckReport RunGradCheck(const GradCheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  GradCheckReport report;
  report.tolerance = options.tolerance;
  std::mt19937_64 rng(options.seed);
  for (std::size_t i = 0; i < options.cases_per_op; ++i) {
    const std::size_t combo = i % (kDims.size() * kPositions.size());
    const std::size_t d = kDims[combo / kPositions.size()];
    const std::size_t n = kPositions[combo % kPositions.size()];
    report.cases.push_back(CheckWa(i, d, n, rng, options));
    report.cases.push_back(CheckLc(i, d, n, rng, options));
  }
  report.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

}  // namespace oiekit
