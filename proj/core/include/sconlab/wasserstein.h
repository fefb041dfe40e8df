#pragma once

#include <vector>

#include "sconlab/numerics.h"

namespace sconlab {

/// Uniform empirical measure on the rows of an n x d matrix.
class PointCloud {
 public:
  explicit PointCloud(Matrix points);

  int size() const { return static_cast<int>(points_.rows()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  const Matrix& points() const { return points_; }

 private:
  Matrix points_;
};

struct GaussianLaw {
  Vector mean;
  SymmetricMatrix cov;

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Coupling between two n-point uniform measures; entries sum to 1.
struct TransportPlan {
  Matrix weights;

  double cost(const Matrix& cost_matrix) const {
    return weights.cwiseProduct(cost_matrix).sum();
  }
};

/// C_ij = ||x_i - y_j||^2.
Matrix squared_distance_matrix(const PointCloud& x, const PointCloud& y);

/// Exact W2 by enumerating all n! matchings. Refuses n > 8.
double w2_bruteforce(const PointCloud& x, const PointCloud& y);

struct AssignmentResult {
  double distance = 0.0;
  /// assignment[i] = index of the point of y matched to x_i.
  std::vector<int> assignment;

  /// Permutation matrix scaled by 1/n.
  TransportPlan plan() const;
};

/// Exact W2 between equal-size uniform clouds by a shortest augmenting path
/// (Hungarian) solver on the squared-Euclidean cost, O(n^3).
AssignmentResult w2_assignment(const PointCloud& x, const PointCloud& y);

/// Solves min over permutations p of sum_i cost(i, p(i)). Returns p.
std::vector<int> solve_linear_assignment(const Matrix& cost);

struct SinkhornOptions {
  double epsilon = 0.0;  // required, > 0
  double tol = 1e-9;
  long max_iter = 100000;
};

struct SinkhornResult {
  /// sqrt of the primal cost of the returned feasible plan; an upper bound
  /// on the exact distance.
  double distance_upper = 0.0;
  TransportPlan plan;
  long iterations = 0;
  /// L1 row-marginal error of the unrounded iterate at exit.
  double marginal_violation = 0.0;
};

/// Entropic OT in the log domain. Iterates until the L1 row-marginal error
/// falls below tol, then rounds the iterate onto the transport polytope so
/// that the reported cost belongs to a feasible plan. Throws ConvergenceError
/// if max_iter is exhausted.
SinkhornResult w2_sinkhorn(const PointCloud& x, const PointCloud& y,
                           const SinkhornOptions& options);

/// ||m1 - m2||^2 + tr(S1 + S2 - 2 (S2^{1/2} S1 S2^{1/2})^{1/2}), square-rooted.
double w2_gaussian(const GaussianLaw& a, const GaussianLaw& b);

}  // namespace sconlab
