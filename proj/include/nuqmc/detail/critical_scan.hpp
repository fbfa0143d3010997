#pragma once

#include <functional>
#include <vector>

#include "nuqmc/measures.hpp"

namespace nuqmc::detail {

using MassFn = std::function<double(const Eigen::Ref<const Vector>&, bool closed)>;

/// sup over anchored boxes of |#pos(A)/pos_den - target(A)| where the target
/// is either a counting measure (#neg(A)/neg_den), the ordered product of
/// 1-d CDFs, or an arbitrary mass function.
struct ScanProblem {
  Index dim = 0;
  const PointMatrix* positive = nullptr;
  double positive_den = 1.0;

  const PointMatrix* negative = nullptr;
  double negative_den = 1.0;

  const std::vector<Cdf1d>* marginals = nullptr;
  MassFn mass;

  double budget = 1e8;
};

struct ScanResult {
  double value = 0.0;
  Vector corner;
  bool closed = true;
  std::int64_t evaluated = 0;
};

/// Number of elementary steps the exact scan would take.
double scan_cost(const ScanProblem& problem);

/// Exact supremum over the critical grid, both closed and open variants.
/// Throws BudgetExceeded when scan_cost exceeds the budget.
ScanResult critical_scan(const ScanProblem& problem);

}  // namespace nuqmc::detail
