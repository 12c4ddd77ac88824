#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "geoscatter/rigidity/embedding.hpp"

namespace geoscatter {

/// Discrete map x_k -> y_k from M1 to M2 recovered by matching embeddings.
struct IsometryMap {
  std::vector<Vec2> source;
  std::vector<Vec2> image;
  /// |Phi_2(y) - Phi_1(x)| / |Phi_1(x)| at the returned image, from a
  /// direct evaluation when an embedder is given and from the quadratic
  /// model otherwise.
  std::vector<double> residual;
  /// Direct evaluations of Phi_2 spent on each point.
  std::vector<int> evaluations;
  /// Boundary points are pinned to the identity.
  std::vector<bool> pinned;
  std::uint64_t node_set_id = 0;
};

struct MatchOptions {
  /// Samples of M2 around the nearest neighbour used in the quadratic model.
  std::size_t neighbors = 12;
  /// A sample farther than 1.5 model radii from the nearest neighbour whose
  /// mismatch is below ratio * best makes the match ambiguous.
  double ambiguity_ratio = 2.0;
  /// With an embedder, the model minimizer is accepted when its direct
  /// relative mismatch is below this; otherwise Gauss-Newton steps on
  /// directly evaluated Phi_2 follow (Broyden updates of a starting
  /// Jacobian) until it is.
  double polish_tolerance = 1e-4;
  /// Start from the Jacobian of the quadratic model and switch to forward
  /// differences after the first stalled step; otherwise start from
  /// forward differences.
  bool model_jacobian = true;
  std::size_t max_polish_steps = 6;
  /// Chart step of the forward differences.
  double jacobian_step = 5e-4;
  /// Polishing stops once a Gauss-Newton step is shorter than this or
  /// reduces the mismatch by less than half with a difference Jacobian.
  double min_step = 1e-7;
};

using Embedder = std::function<EmbeddingSample(const Vec2&)>;

/// For each sample of M1: nearest neighbour among samples2 in embedding
/// space, then the minimizer of |Q(y) - Phi_1(x)|^2 for a least-squares
/// quadratic model Q of Phi_2 on nearby samples, then (with an embedder)
/// verification and polish steps y <- y - J^+ (Phi_2(y) - Phi_1(x)). An
/// embedder failure at a trial point (for instance outside M2) halves the
/// step. Points listed in `boundary` (entries of samples1 with
/// the same coordinates) are pinned to the identity; their residual is
/// measured with the embedder when one is given.
/// Throws ConfigError on mismatched node sets and AmbiguityError when two
/// far-apart samples of M2 match equally well.
IsometryMap match_isometry(const std::vector<EmbeddingSample>& samples1,
                           const std::vector<EmbeddingSample>& samples2,
                           const std::vector<bool>& boundary = {}, const MatchOptions& options = {},
                           const Embedder& embed2 = {}, std::size_t threads = 1);

} // namespace geoscatter
