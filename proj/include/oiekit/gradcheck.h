#ifndef OIEKIT_GRADCHECK_H_
#define OIEKIT_GRADCHECK_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace oiekit {

// Finite-difference verification of WaBackward and LcBackward. Each case
// draws a random batch, random tables and a random upstream gradient u, and
// compares every analytic gradient entry with the central difference of
// L = sum(u * forward).
struct GradCheckOptions {
  std::uint64_t seed = 7;
  std::size_t cases_per_op = 54;  // cycled over d in {2,8,16}, N in {1,3,7}
  double epsilon = 1e-5;
  double tolerance = 1e-4;  // maximum relative error
  // Denominator floor of the relative error. Entries whose true gradient is
  // zero differ from it only by roundoff of order 1e-11.
  double floor = 1e-6;
};

struct GradCheckCase {
  std::string op;  // "wa" or "lc"
  std::size_t dim = 0;
  std::size_t positions = 0;
  std::size_t entries = 0;  // gradient entries compared
  double max_rel_error = 0.0;
  std::string worst;  // name of the worst entry, e.g. "pos[NN][3]"
  bool absent_tag_zero = true;  // gradient of tags outside the batch is 0
  bool passed = false;
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  double seconds = 0.0;
  double tolerance = 0.0;

  bool passed() const;
  std::size_t count(const std::string& op) const;
  double max_rel_error() const;
  std::string ToJson() const;
  std::string ToText() const;
};

// |a - n| / max(|a|, |n|, floor).
double RelativeError(double analytic, double numeric, double floor);

GradCheckReport RunGradCheck(const GradCheckOptions& options = {});

}  // namespace oiekit

#endif  // OIEKIT_GRADCHECK_H_
