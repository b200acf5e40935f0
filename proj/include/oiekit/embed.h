#ifndef OIEKIT_EMBED_H_
#define OIEKIT_EMBED_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace oiekit {

// Dense row-major matrix of doubles. One row per sentence position.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using TagGradients = std::map<std::string, std::vector<double>>;

// Learned vectors for every tag of one layer, specials included.
class TagEmbeddingTable {
 public:
  // Throws InvalidConfig when dim is 0.
  TagEmbeddingTable(std::string kind, std::size_t dim, bool trainable = true);

  // Every tag of `tags` plus <pad>, <unk> and </s>, drawn uniformly from
  // [-1/sqrt(dim), 1/sqrt(dim)] with a 64-bit seeded generator.
  static TagEmbeddingTable Random(std::string kind,
                                  const std::vector<std::string>& tags,
                                  std::size_t dim, std::uint64_t seed,
                                  bool trainable = true);

  const std::string& kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  bool trainable() const { return trainable_; }
  void set_trainable(bool trainable) { trainable_ = trainable; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(const std::string& tag) const {
    return vectors_.count(tag) > 0;
  }

  // Throws DimensionMismatch on a wrong-length vector.
  void Set(const std::string& tag, std::vector<double> vec);
  // Throws UnknownTag.
  const std::vector<double>& Lookup(const std::string& tag) const;
  std::vector<double>& Mutable(const std::string& tag);
  const std::map<std::string, std::vector<double>>& vectors() const {
    return vectors_;
  }
  // A zero gradient for every tag of the table.
  TagGradients ZeroGradients() const;

  // {"kind": ..., "dim": d, "trainable": b, "vectors": {tag: [..]}}
  std::string ToJson() const;
  // Throws FormatError or DimensionMismatch.
  static TagEmbeddingTable FromJson(const std::string& text);

  friend bool operator==(const TagEmbeddingTable&,
                         const TagEmbeddingTable&) = default;

 private:
  std::string kind_;
  std::size_t dim_;
  bool trainable_;
  std::map<std::string, std::vector<double>> vectors_;
};

// Weighted Addition fractions. Each lies in [0, 1] and they sum to 1 within
// kSumTolerance; the constructor throws InvalidConfig otherwise.
class WaConfig {
 public:
  static constexpr double kSumTolerance = 1e-9;

  WaConfig(double wt_src, double wt_pos, double wt_dp);

  double wt_src() const { return wt_src_; }
  double wt_pos() const { return wt_pos_; }
  double wt_dp() const { return wt_dp_; }

  std::string ToJson() const;
  static WaConfig FromJson(const std::string& text);

 private:
  double wt_src_;
  double wt_pos_;
  double wt_dp_;
};

// Linearized Concatenation parameters: x = projection * (src ⊕ pos ⊕ dp) + bias.
// A layer with dimension 0 is absent.
struct LcConfig {
  std::size_t dim_src = 0;
  std::size_t dim_pos = 0;
  std::size_t dim_dp = 0;
  Matrix projection;         // dim_src × (dim_src + dim_pos + dim_dp)
  std::vector<double> bias;  // dim_src
  bool use_bias = true;

  std::size_t concat_dim() const { return dim_src + dim_pos + dim_dp; }
  // Throws DimensionMismatch.
  void Validate() const;

  // Projection [I | 0] and zero bias: the output starts equal to the source.
  static LcConfig Baseline(std::size_t dim_src, std::size_t dim_pos,
                           std::size_t dim_dp, bool use_bias = true);

  // Dimensions always; projection and bias only when `with_weights`.
  std::string ToJson(bool with_weights = true) const;
  // Missing weights default to the baseline initialization.
  static LcConfig FromJson(const std::string& text);
};

// Per-position tags and the tables they index. A layer not used by the
// composition may leave its tags empty and its table null.
struct TagInputs {
  std::span<const std::string> pos;
  std::span<const std::string> dp;
  const TagEmbeddingTable* pos_table = nullptr;
  const TagEmbeddingTable* dp_table = nullptr;
};

struct WaGradients {
  Matrix src;
  TagGradients pos;  // empty when no PoS table was given
  TagGradients dp;
};

struct LcGradients {
  Matrix src;
  TagGradients pos;
  TagGradients dp;
  Matrix projection;
  std::vector<double> bias;
};

// x_i = wt_src * src_i + wt_pos * emb(pos_i) + wt_dp * emb(dp_i).
// Zero-weight layers are never looked up.
// Throws DimensionMismatch or UnknownTag.
Matrix WaForward(const Matrix& src, const TagInputs& tags, const WaConfig& cfg);
WaGradients WaBackward(const Matrix& upstream, const TagInputs& tags,
                       const WaConfig& cfg);

// Throws DimensionMismatch or UnknownTag.
Matrix LcForward(const Matrix& src, const TagInputs& tags, const LcConfig& cfg);
LcGradients LcBackward(const Matrix& upstream, const Matrix& src,
                       const TagInputs& tags, const LcConfig& cfg);

// Desk-scale learning problem: word vectors come from a source table, the
// composed embedding is regressed onto a target.
struct ToyExample {
  std::vector<std::string> words;
  std::vector<std::string> pos;
  std::vector<std::string> dp;
  Matrix target;  // words.size() × source dim
};

struct ToyModel {
  TagEmbeddingTable source;
  std::optional<TagEmbeddingTable> pos;
  std::optional<TagEmbeddingTable> dp;
  std::variant<WaConfig, LcConfig> composition;
};

// Mean squared error over every entry of every example.
double ToyLoss(const ToyModel& model, const std::vector<ToyExample>& data);

// Full-batch gradient descent. Tables with trainable() == false are left
// untouched; LC projection and bias are always trained. Returns steps + 1
// losses: the initial one and the one after each update. Throws
// InvalidConfig when lr <= 0.
std::vector<double> FitToy(ToyModel& model, const std::vector<ToyExample>& data,
                           int steps, double lr);

}  // namespace oiekit

#endif  // OIEKIT_EMBED_H_
