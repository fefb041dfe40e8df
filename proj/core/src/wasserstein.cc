#include "sconlab/wasserstein.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sconlab/errors.h"

namespace sconlab {

PointCloud::PointCloud(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw InvalidArgument("PointCloud: need at least one point of dim >= 1");
  }
  require_finite(points_, "PointCloud");
}

namespace {

void require_same_shape(const PointCloud& x, const PointCloud& y,
                        const char* who) {
  if (x.dim() != y.dim()) {
    throw InvalidArgument(std::string(who) + ": point dimensions differ");
  }
  if (x.size() != y.size()) {
    throw InvalidArgument(std::string(who) +
                          ": only equal-size clouds are supported (" +
                          std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  }
}

}  // namespace

Matrix squared_distance_matrix(const PointCloud& x, const PointCloud& y) {
  const Matrix& px = x.points();
  const Matrix& py = y.points();
  Matrix cost(px.rows(), py.rows());
  for (Eigen::Index j = 0; j < py.rows(); ++j) {
    for (Eigen::Index i = 0; i < px.rows(); ++i) {
      cost(i, j) = (px.row(i) - py.row(j)).squaredNorm();
    }
  }
  return cost;
}

double w2_bruteforce(const PointCloud& x, const PointCloud& y) {
  require_same_shape(x, y, "w2_bruteforce");
  const int n = x.size();
  if (n > 8) {
    throw InvalidArgument("w2_bruteforce: n=" + std::to_string(n) +
                          " exceeds the enumeration limit of 8");
  }
  const Matrix cost = squared_distance_matrix(x, y);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best / n);
}

TransportPlan AssignmentResult::plan() const {
  const auto n = static_cast<Eigen::Index>(assignment.size());
  TransportPlan plan{Matrix::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    plan.weights(i, assignment[i]) = 1.0 / static_cast<double>(n);
  }
  return plan;
}

std::vector<int> solve_linear_assignment(const Matrix& cost) {
  require_square(cost, "solve_linear_assignment");
  require_finite(cost, "solve_linear_assignment");
  const int n = static_cast<int>(cost.rows());
  if (n == 1) return {0};

  // Exact solution in two phases. An epsilon-scaling auction (Bertsekas)
  // produces column prices v and a nearly optimal assignment; rows whose
  // assigned column is not exactly of minimum reduced cost are released,
  // and the Jonker-Volgenant shortest augmenting path phase assigns them
  // optimally. The auction only serves as a warm start, so the result is
  // exact regardless of the final epsilon.
  std::vector<double> c(static_cast<std::size_t>(n) * n);  // row-major
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c[static_cast<std::size_t>(i) * n + j] = cost(i, j);
  }
  auto at = [&](int i, int j) { return c[static_cast<std::size_t>(i) * n + j]; };
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<int> rowsol(n, -1), colsol(n, -1), free_rows;
  std::vector<double> v(n, 0.0);
  free_rows.reserve(n);

  const auto [cmin, cmax] = std::minmax_element(c.begin(), c.end());
  const double spread = *cmax - *cmin;
  if (spread > 0.0) {
    const double eps_final = spread * 1e-7 / n;
    for (double eps = spread / 4.0;; eps = std::max(eps / 8.0, eps_final)) {
      std::fill(rowsol.begin(), rowsol.end(), -1);
      std::fill(colsol.begin(), colsol.end(), -1);
      std::vector<int> pending(n);
      std::iota(pending.begin(), pending.end(), 0);
      while (!pending.empty()) {
        const int i = pending.back();
        pending.pop_back();
        const double* row = &c[static_cast<std::size_t>(i) * n];
        double best = kInf, second = kInf;
        int jbest = 0;
        for (int j = 0; j < n; ++j) {
          const double h = row[j] - v[j];
          if (h < second) {
            if (h < best) {
              second = best;
              best = h;
              jbest = j;
            } else {
              second = h;
            }
          }
        }
        v[jbest] -= (second - best) + eps;
        const int displaced = colsol[jbest];
        colsol[jbest] = i;
        rowsol[i] = jbest;
        if (displaced >= 0) {
          rowsol[displaced] = -1;
          pending.push_back(displaced);
        }
      }
      if (eps <= eps_final) break;
    }
  }

  // Keep only rows sitting exactly on a minimum of their reduced cost.
  for (int i = 0; i < n; ++i) {
    const int assigned = rowsol[i];
    bool tight = assigned >= 0;
    if (tight) {
      const double mine = at(i, assigned) - v[assigned];
      for (int j = 0; j < n && tight; ++j) tight = !(at(i, j) - v[j] < mine);
    }
    if (!tight) {
      if (assigned >= 0) colsol[assigned] = -1;
      rowsol[i] = -1;
      free_rows.push_back(i);
    }
  }

  // Shortest augmenting paths for the remaining free rows.
  std::vector<double> dist(n);
  std::vector<int> pred(n), collist(n);
  for (const int free_row : free_rows) {
    for (int j = 0; j < n; ++j) {
      dist[j] = at(free_row, j) - v[j];
      pred[j] = free_row;
      collist[j] = j;
    }
    int low = 0, up = 0, last = 0, end_of_path = -1;
    double min = 0.0;
    bool found = false;
    do {
      if (up == low) {
        // Collect the columns at minimum distance into [low, up).
        last = low - 1;
        min = dist[collist[up++]];
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double h = dist[j];
          if (h <= min) {
            if (h < min) {
              up = low;
              min = h;
            }
            collist[k] = collist[up];
            collist[up++] = j;
          }
        }
        for (int k = low; k < up; ++k) {
          if (colsol[collist[k]] < 0) {
            end_of_path = collist[k];
            found = true;
            break;
          }
        }
      }
      if (!found) {
        // Scan the row assigned to the next closest column.
        const int j1 = collist[low++];
        const int i = colsol[j1];
        const double h = at(i, j1) - v[j1] - min;
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double reduced = at(i, j) - v[j] - h;
          if (reduced < dist[j]) {
            pred[j] = i;
            if (reduced == min) {
              if (colsol[j] < 0) {
                end_of_path = j;
                found = true;
                break;
              }
              collist[k] = collist[up];
              collist[up++] = j;
            }
            dist[j] = reduced;
          }
        }
      }
    } while (!found);

    for (int k = 0; k <= last; ++k) {
      const int j1 = collist[k];
      v[j1] += dist[j1] - min;
    }
    int i;
    do {
      i = pred[end_of_path];
      colsol[end_of_path] = i;
      const int j1 = end_of_path;
      end_of_path = rowsol[i];
      rowsol[i] = j1;
    } while (i != free_row);
  }
  return rowsol;
}

AssignmentResult w2_assignment(const PointCloud& x, const PointCloud& y) {
  require_same_shape(x, y, "w2_assignment");
  const Matrix cost = squared_distance_matrix(x, y);
  AssignmentResult result;
  result.assignment = solve_linear_assignment(cost);
  double total = 0.0;
  for (int i = 0; i < x.size(); ++i) total += cost(i, result.assignment[i]);
  result.distance = std::sqrt(std::max(0.0, total / x.size()));
  return result;
}

namespace {

// Altschuler, Weed & Rigollet rounding: returns a plan with exactly the
// requested marginals (up to floating point) close to `p` in L1.
Matrix round_to_feasible(Matrix p, const Vector& r, const Vector& c) {
  const Vector row_sums = p.rowwise().sum();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if (row_sums(i) > r(i)) p.row(i) *= r(i) / row_sums(i);
  }
  const Vector col_sums = p.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    if (col_sums(j) > c(j)) p.col(j) *= c(j) / col_sums(j);
  }
  const Vector err_r = (r - p.rowwise().sum()).cwiseMax(0.0);
  const Vector err_c = (c - p.colwise().sum().transpose()).cwiseMax(0.0);
  const double mass = err_r.sum();
  if (mass > 0.0) p += err_r * err_c.transpose() / mass;
  return p;
}

}  // namespace

namespace {

constexpr double kNewtonShift = 1e-10;
// Sinkhorn sweeps between progress checks, and the improvement factor a
// block must achieve before the solver switches to Newton steps.
constexpr long kSinkhornBlock = 50;
constexpr double kStallRatio = 0.5;

// Entropic dual in units of epsilon: potentials F, G with plan
// P_ij = exp(F_i + G_j - C_ij / eps) and uniform marginals 1/n.
class EntropicDual {
 public:
  EntropicDual(const Matrix& cost, double eps)
      : scaled_(cost / eps),
        n_(static_cast<int>(cost.rows())),
        weight_(1.0 / n_),
        log_weight_(-std::log(static_cast<double>(n_))) {}

  // Exact column marginals after the G update.
  void sinkhorn_sweep(Vector& f, Vector& g) const {
    for (int i = 0; i < n_; ++i) f(i) = log_weight_ - row_lse(g, i);
    for (int j = 0; j < n_; ++j) g(j) = log_weight_ - col_lse(f, j);
  }

  Matrix plan(const Vector& f, const Vector& g) const {
    Matrix p(n_, n_);
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) p(i, j) = std::exp(f(i) + g(j) - scaled_(i, j));
    }
    return p;
  }

  // L1 error of both marginals.
  double violation(const Matrix& p) const {
    return (p.rowwise().sum().array() - weight_).abs().sum() +
           (p.colwise().sum().array() - weight_).abs().sum();
  }

  // Concave dual objective divided by epsilon.
  double objective(const Vector& f, const Vector& g, const Matrix& p) const {
    return weight_ * (f.sum() + g.sum()) - p.sum();
  }

  // One damped Newton step on the dual. G(n-1) is pinned to remove the
  // (F + c, G - c) invariance; the reduced Hessian is a weighted graph
  // Laplacian block and positive definite while the plan is connected.
  // Returns false when no ascent step could be found.
  bool newton_step(Vector& f, Vector& g) const {
    const Matrix p = plan(f, g);
    const int m = 2 * n_ - 1;
    Matrix hessian = Matrix::Zero(m, m);
    Vector grad(m);
    const Vector rows = p.rowwise().sum();
    const Vector cols = p.colwise().sum().transpose();
    for (int i = 0; i < n_; ++i) {
      hessian(i, i) = rows(i);
      grad(i) = weight_ - rows(i);
    }
    for (int j = 0; j < n_ - 1; ++j) {
      hessian(n_ + j, n_ + j) = cols(j);
      grad(n_ + j) = weight_ - cols(j);
      for (int i = 0; i < n_; ++i) {
        hessian(i, n_ + j) = p(i, j);
        hessian(n_ + j, i) = p(i, j);
      }
    }
    // Entries of the plan that underflow can leave the Laplacian block
    // numerically semidefinite; a tiny shift keeps the step an ascent one.
    hessian.diagonal().array() += kNewtonShift * weight_;
    const Eigen::LDLT<Matrix> ldlt(hessian);
    const Vector step = ldlt.solve(grad);
    if (!step.allFinite()) return false;
    // Armijo on the dual objective; near the optimum its changes fall below
    // rounding, so a step that shrinks the marginal error is also accepted.
    const double base = objective(f, g, p);
    const double base_violation = violation(p);
    const double slope = grad.dot(step);
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      Vector f_try = f + t * step.head(n_);
      Vector g_try = g;
      g_try.head(n_ - 1) += t * step.tail(n_ - 1);
      const Matrix p_try = plan(f_try, g_try);
      const double value = objective(f_try, g_try, p_try);
      if (!std::isfinite(value)) continue;
      if (value >= base + 1e-4 * t * slope ||
          violation(p_try) < kStallRatio * base_violation) {
        f = std::move(f_try);
        g = std::move(g_try);
        return true;
      }
    }
    return false;
  }

 private:
  double row_lse(const Vector& g, int i) const {
    double m = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_; ++j) m = std::max(m, g(j) - scaled_(i, j));
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += std::exp(g(j) - scaled_(i, j) - m);
    return m + std::log(s);
  }
  double col_lse(const Vector& f, int j) const {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i) m = std::max(m, f(i) - scaled_(i, j));
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += std::exp(f(i) - scaled_(i, j) - m);
    return m + std::log(s);
  }

  Matrix scaled_;
  int n_;
  double weight_;
  double log_weight_;
};

// Intermediate epsilon stages only need a rough warm start.
constexpr double kStageTolerance = 1e-3;
constexpr double kEpsilonDecay = 0.25;

}  // namespace

SinkhornResult w2_sinkhorn(const PointCloud& x, const PointCloud& y,
                           const SinkhornOptions& options) {
  require_same_shape(x, y, "w2_sinkhorn");
  if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) {
    throw InvalidArgument("w2_sinkhorn: epsilon must be positive");
  }
  if (!(options.tol > 0.0) || options.max_iter < 1) {
    throw InvalidArgument("w2_sinkhorn: tol must be > 0 and max_iter >= 1");
  }
  const int n = x.size();
  const Matrix cost = squared_distance_matrix(x, y);
  const double weight = 1.0 / n;

  // Epsilon scaling: start at the cost spread and shrink geometrically to
  // the target, carrying the potentials (rescaled to the new epsilon).
  std::vector<double> stages;
  const double spread = cost.maxCoeff() - cost.minCoeff();
  for (double e = spread; e > options.epsilon; e *= kEpsilonDecay) stages.push_back(e);
  stages.push_back(options.epsilon);

  Vector f = Vector::Zero(n);
  Vector g = Vector::Zero(n);
  long iter = 0;
  double violation = std::numeric_limits<double>::infinity();
  double previous_eps = stages.front();
  Matrix plan;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const double eps = stages[s];
    const bool final_stage = s + 1 == stages.size();
    const double stage_tol = final_stage ? options.tol : std::max(options.tol, kStageTolerance);
    f *= previous_eps / eps;
    g *= previous_eps / eps;
    previous_eps = eps;
    const EntropicDual dual(cost, eps);

    bool newton = false;
    double block_start = std::numeric_limits<double>::infinity();
    while (true) {
      plan = dual.plan(f, g);
      violation = dual.violation(plan);
      if (violation <= stage_tol) break;
      if (iter >= options.max_iter) {
        throw ConvergenceError(
            "w2_sinkhorn: max_iter exhausted with L1 marginal violation " +
                std::to_string(violation),
            violation);
      }
      if (newton) {
        if (!dual.newton_step(f, g)) {
          // Newton has run out of ascent directions; fall back.
          newton = false;
          block_start = std::numeric_limits<double>::infinity();
          dual.sinkhorn_sweep(f, g);
        }
      } else {
        dual.sinkhorn_sweep(f, g);
      }
      ++iter;
      if (!newton && iter % kSinkhornBlock == 0) {
        const bool stalled = violation > kStallRatio * block_start;
        block_start = violation;
        if (stalled) {
          if (!final_stage) break;  // good enough as a warm start
          newton = true;
        }
      }
    }
  }

  SinkhornResult result;
  const Vector marg = Vector::Constant(n, weight);
  result.plan.weights = round_to_feasible(std::move(plan), marg, marg);
  result.iterations = iter;
  result.marginal_violation = violation;
  result.distance_upper = std::sqrt(std::max(0.0, result.plan.cost(cost)));
  return result;
}

double w2_gaussian(const GaussianLaw& a, const GaussianLaw& b) {
  if (a.dim() != b.dim() || a.cov.dim() != a.dim() || b.cov.dim() != b.dim()) {
    throw InvalidArgument("w2_gaussian: dimension mismatch");
  }
  require_psd(a.cov, "w2_gaussian");
  const SymmetricMatrix root_b = psd_sqrt(b.cov);
  const SymmetricMatrix inner(root_b.matrix() * a.cov.matrix() * root_b.matrix());
  const double cross = psd_sqrt(inner).trace();
  const double squared =
      (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * cross;
  return std::sqrt(std::max(0.0, squared));
}

}  // namespace sconlab
