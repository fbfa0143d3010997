#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nuqmc/discrepancy.hpp"
#include "nuqmc/selection.hpp"

namespace nuqmc {

/// How many points K are sampled from mu before selecting N of them.
struct KPolicy {
  enum class Kind { paper, scaled, explicit_k };
  Kind kind = Kind::scaled;
  double factor = 16.0;  // scaled: K = ceil(factor * N^2)
  Index k = 0;           // explicit_k

  static KPolicy paper() { return {Kind::paper, 16.0, 0}; }
  static KPolicy scaled(double c = 16.0) { return {Kind::scaled, c, 0}; }
  static KPolicy fixed(Index k) { return {Kind::explicit_k, 16.0, k}; }
};

/// Accepts "paper", "scaled", "scaled:<c>" and "K=<int>".
KPolicy parse_k_policy(const std::string& text);
std::string to_string(const KPolicy& policy);

/// Resolves K; throws PreconditionError when N > sqrt(K) and BudgetExceeded
/// when K d exceeds 2^26 coordinates.
Index resolve_k(const KPolicy& policy, Index n, Index d);

struct ConstructionConfig {
  KPolicy k_policy;
  BalancingEngine engine = BalancingEngine::beck_fiala;
  std::uint64_t seed = 0;
  double budget = default_budget();
  /// Skips the sampling-term evaluation (the certificate then carries only
  /// the selection term and is flagged incomplete).
  bool certify_sampling = true;
};

struct ConstructionCertificate {
  Index n = 0;
  Index k = 0;
  SelectionCertificate selection;
  /// Rigorous bound on sup_A |(1/N) #(x in A) - (1/K) #(z in A)|: the
  /// selection chain with the measured dyadic prefix error, divided by N.
  double selection_term = 0.0;
  /// Same with the engine's per-edge error times (m+1)^d.
  double selection_term_engine = 0.0;
  /// D*(z; mu): "exact", "upper_bound", "nominal" (1/N, paper K policy) or
  /// "skipped".
  double sampling_term = 0.0;
  std::string sampling_kind;
  double bound = 0.0;         // selection_term + sampling_term
  double paper_bound = 0.0;   // 63 sqrt(d) (2 + log2 N)^((3d+1)/2) / N, recorded only
  bool complete = true;
};

struct ConstructionResult {
  PointSet points;
  std::vector<Index> indices;  // into the K samples
  ConstructionCertificate certificate;
};

/// Samples K points from mu, selects N of them, and certifies
/// D*(points; mu) <= certificate.bound.
ConstructionResult construct_point_set(const BoxMeasure& mu, Index n, const ConstructionConfig& cfg);

/// N_i = 2^(2^i - 2) for i >= 1 (i <= 6).
std::int64_t block_size(Index i);
/// M_i = N_1 + ... + N_{i-1}.
std::int64_t block_offset(Index i);

/// Infinite sequence for mu: block i is an N_i-point set for mu x lambda in
/// dimension d+1, ordered by its strictly increasing last coordinate, which
/// is then dropped. Blocks are built on demand. Not thread-safe.
class SequenceState {
 public:
  SequenceState(MeasurePtr mu, ConstructionConfig cfg);

  /// Next point of the sequence (dimension d).
  Vector next_point();

  /// Block holding the next point to be emitted (1-based).
  Index block_index() const;
  Index emitted() const { return emitted_; }
  PointMatrix emitted_points() const;

  /// Bound on D*_N(x_1..x_N; mu) from the block certificates:
  ///   (sum_{l<i} N_l c_l + 2 N_i c_i) / N   for N = M_i + j, 1 <= j <= N_i,
  /// where c_l bounds D*(block l; mu x lambda) including the tie shift.
  double envelope(Index n);

  struct Block {
    PointMatrix projected;   // N_i x d, in emission order
    PointMatrix lifted;      // N_i x (d+1), last coordinate strictly increasing
    ConstructionCertificate certificate;
    double tie_shift = 0.0;  // largest k * 2^-52 added to a tied coordinate
    double bound = 0.0;      // certificate.bound + tie_shift
  };

  const Block& block(Index i);

 private:
  MeasurePtr mu_;
  std::shared_ptr<AppendUniformMeasure> nu_;
  ConstructionConfig cfg_;
  std::vector<Block> blocks_;
  Index emitted_ = 0;
  std::vector<double> history_;
};

/// ceil(2^26 d / eps^2) computed exactly from a decimal string such as
/// "0.5", "1e-3". Throws PreconditionError for eps outside (0,1] or when the
/// result does not fit in 64 bits.
std::uint64_t inverse_size_paper(Index d, const std::string& eps);
/// Same for the exact binary value of a double.
std::uint64_t inverse_size_paper(Index d, double eps);

struct EmpiricalInverse {
  Index n = 0;
  std::vector<std::pair<Index, double>> success_rate;  // (N, fraction of seeds with D* <= eps)
};

/// Smallest N in 1, 2, 4, ... such that at least `quantile` of `seeds`
/// i.i.d. samples of size N from mu have exact D* <= eps. d <= 2 only
/// (BudgetExceeded otherwise).
EmpiricalInverse inverse_size_empirical(const BoxMeasure& mu, double eps, Index seeds = 50, double quantile = 0.9,
                                        std::uint64_t seed = 0);

struct AlexanderBound {
  bool condition_sample = false;     // t > 2^{33/2} d / sqrt(N) log(max(N/(2d), e))
  bool condition_dimension = false;  // t > sqrt(2^25 d log 4)
  std::optional<double> probability_bound;  // 16 exp(-t^2) when both hold
  double threshold_sample = 0.0;
  double threshold_dimension = 0.0;
};

AlexanderBound alexander_bound(double t, std::int64_t n, Index d);

}  // namespace nuqmc
