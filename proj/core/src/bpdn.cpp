#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "lowercs/error.hpp"
#include "lowercs/solvers.hpp"

namespace lowercs {

std::string_view to_string(WeightMode mode) noexcept {
  switch (mode) {
    case WeightMode::Unit: return "unit";
    case WeightMode::SupNorm: return "sup_norm";
    case WeightMode::SupNormSquared: return "sup_norm^2";
    case WeightMode::SupNormCubed: return "sup_norm^3";
  }
  return "unknown";
}

WeightMode parse_weight_mode(std::string_view text) {
  if (text == "unit") return WeightMode::Unit;
  if (text == "sup_norm") return WeightMode::SupNorm;
  if (text == "sup_norm^2" || text == "sup_norm2") return WeightMode::SupNormSquared;
  if (text == "sup_norm^3" || text == "sup_norm3") return WeightMode::SupNormCubed;
  throw UsageError("unknown weight mode '" + std::string(text) + "'");
}

std::string_view to_string(BPDNAlgorithm algorithm) noexcept {
  switch (algorithm) {
    case BPDNAlgorithm::Auto: return "auto";
    case BPDNAlgorithm::Homotopy: return "homotopy";
    case BPDNAlgorithm::Pareto: return "pareto";
    case BPDNAlgorithm::Admm: return "admm";
  }
  return "unknown";
}

BPDNAlgorithm parse_bpdn_algorithm(std::string_view text) {
  if (text == "auto") return BPDNAlgorithm::Auto;
  if (text == "homotopy") return BPDNAlgorithm::Homotopy;
  if (text == "pareto") return BPDNAlgorithm::Pareto;
  if (text == "admm") return BPDNAlgorithm::Admm;
  throw UsageError("unknown BPDN algorithm '" + std::string(text) + "'");
}

WeightVector make_weights(BasisKind kind, const IndexSet& set, WeightMode mode) {
  const double power = static_cast<double>(static_cast<int>(mode));
  Eigen::VectorXd values(static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    values[static_cast<Eigen::Index>(i)] =
        mode == WeightMode::Unit ? 1.0 : std::pow(weight(kind, set[i]), power);
  }
  return WeightVector(set, std::move(values));
}

namespace {

/// Least-squares solves with a fixed set of columns, through QR so that the
/// conditioning is that of the columns and not of their Gram matrix.
class ColumnSolver {
 public:
  explicit ColumnSolver(const Eigen::MatrixXd& columns) : qr_(columns) {
    const Eigen::VectorXd diag = qr_.matrixQR().diagonal().cwiseAbs();
    ok_ = diag.size() > 0 && diag.minCoeff() > 1e-13 * diag.maxCoeff();
  }
  bool ok() const { return ok_; }
  /// (C'C)^{-1} v
  Eigen::VectorXd gram_solve(const Eigen::VectorXd& v) const {
    const auto k = qr_.cols();
    const auto r = qr_.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    return r.solve(r.transpose().solve(v));
  }
  /// argmin ||C z - b||
  Eigen::VectorXd least_squares(const Eigen::VectorXd& b) const {
    const auto k = qr_.cols();
    const Eigen::VectorXd qtb = qr_.householderQ().adjoint() * b;
    return qr_.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(qtb.head(k));
  }

 private:
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  bool ok_ = false;
};

struct Polished {
  Eigen::VectorXd x;
  bool certified;
};

/// Exact minimizer of signs'x over { x supported on S : ||b - Bx|| <= sigma },
/// where S and the signs come from a nearly optimal x, plus a dual certificate
/// check on the full problem. Empty when the support cannot keep those signs.
std::optional<Polished> polish(const Eigen::MatrixXd& B, const Eigen::VectorXd& b, double sigma,
                               const Eigen::VectorXd& x, double cutoff) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > cutoff) support.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(support.size());
  if (k == 0 || k > B.rows()) return std::nullopt;
  Eigen::MatrixXd bs(B.rows(), k);
  Eigen::VectorXd signs(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    bs.col(j) = B.col(support[j]);
    signs[j] = x[support[j]] > 0.0 ? 1.0 : -1.0;
  }
  const ColumnSolver gram(bs);
  if (!gram.ok()) return std::nullopt;
  const Eigen::VectorXd least = gram.least_squares(b);
  const double slack2 = sigma * sigma - (b - bs * least).squaredNorm();
  if (slack2 < -1e-14 * std::max(1.0, b.squaredNorm())) return std::nullopt;
  const Eigen::VectorXd h = gram.gram_solve(signs);
  const double shs = signs.dot(h);
  if (!(shs > 0.0)) return std::nullopt;
  const Eigen::VectorXd xs = least - std::sqrt(std::max(slack2, 0.0) / shs) * h;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(xs[j] * signs[j] > 0.0)) return std::nullopt;
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index j = 0; j < k; ++j) full[support[j]] = xs[j];

  // y with B_S'y = signs certifies optimality when ||B'y||_inf <= 1.
  Eigen::VectorXd y;
  const Eigen::VectorXd r = b - B * full;
  if (slack2 > 0.0 && r.norm() > 0.0) {
    const double mu = (bs.transpose() * r).dot(signs) / static_cast<double>(k);
    if (!(mu > 0.0)) return Polished{full, false};
    y = r / mu;
  } else {
    y = bs * h;
  }
  const double worst = (B.transpose() * y).lpNorm<Eigen::Infinity>();
  const double on_support = (bs.transpose() * y - signs).lpNorm<Eigen::Infinity>();
  return Polished{full, worst <= 1.0 + 1e-6 && on_support <= 1e-6};
}

/// Follows the lasso path x(lambda) of min 0.5||b - Bx||^2 + lambda ||x||_1
/// from lambda = ||B'b||_inf downwards. The residual norm decreases along the
/// path, so the point where it reaches sigma solves the BPDN problem.
BPDNSolution solve_homotopy(const Eigen::MatrixXd& B, const Eigen::VectorXd& b, double sigma,
                            const BPDNConfig& config) {
  const Eigen::Index n = B.cols();
  BPDNSolution out{Eigen::VectorXd::Zero(n), 0, false, "homotopy"};
  Eigen::VectorXd& x = out.x;
  Eigen::VectorXd r = b;
  Eigen::VectorXd c = B.transpose() * r;
  Eigen::Index first = 0;
  double lambda = c.cwiseAbs().maxCoeff(&first);
  std::vector<Eigen::Index> active{first};
  std::vector<char> in_active(static_cast<std::size_t>(n), 0);
  in_active[static_cast<std::size_t>(first)] = 1;
  Eigen::Index dropped = -1;
  const double sigma2 = sigma * sigma;

  while (out.iterations < config.max_iterations) {
    ++out.iterations;
    const auto k = static_cast<Eigen::Index>(active.size());
    if (k > B.rows()) return out;
    Eigen::MatrixXd ba(B.rows(), k);
    Eigen::VectorXd signs(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      ba.col(j) = B.col(active[j]);
      const double xj = x[active[j]];
      signs[j] = xj != 0.0 ? (xj > 0.0 ? 1.0 : -1.0) : (c[active[j]] > 0.0 ? 1.0 : -1.0);
    }
    const ColumnSolver gram(ba);
    if (!gram.ok()) return out;
    const Eigen::VectorXd dir = gram.gram_solve(signs);
    const Eigen::VectorXd v = ba * dir;
    const Eigen::VectorXd a = B.transpose() * v;

    // Largest step keeps lambda >= 0; the path ends there.
    double step = lambda;
    Eigen::Index join = -1;
    Eigen::Index leave = -1;
    // With as many columns as rows the residual is lambda * v, so only the
    // end of the path or a removal can come next.
    for (Eigen::Index j = 0; j < n && k < B.rows(); ++j) {
      if (in_active[static_cast<std::size_t>(j)] || j == dropped) continue;
      for (double t : {(lambda - c[j]) / (1.0 - a[j]), (lambda + c[j]) / (1.0 + a[j])}) {
        // joins at the very end of the path are roundoff when b lies in the
        // span of the active columns
        if (t > 1e-14 * lambda && t < step && t < lambda * (1.0 - 1e-10)) {
          step = t;
          join = j;
        }
      }
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      const double xj = x[active[j]];
      if (xj == 0.0) continue;
      const double t = -xj / dir[j];
      if (t > 0.0 && t < step) {
        step = t;
        join = -1;
        leave = j;
      }
    }
    // ||r - t v||^2 = sigma^2 before the next event ends the problem.
    const double vv = v.squaredNorm();
    const double rv = r.dot(v);
    const double rr = r.squaredNorm();
    bool finish = false;
    if (vv > 0.0) {
      const double disc = rv * rv - vv * (rr - sigma2);
      if (disc >= 0.0) {
        const double t = (rv - std::sqrt(disc)) / vv;
        if (t >= 0.0 && t <= step) {
          step = t;
          join = -1;
          leave = -1;
          finish = true;
        }
      }
    }

    for (Eigen::Index j = 0; j < k; ++j) x[active[j]] += step * dir[j];
    lambda -= step;
    dropped = -1;
    if (leave >= 0) {
      const Eigen::Index idx = active[static_cast<std::size_t>(leave)];
      x[idx] = 0.0;
      in_active[static_cast<std::size_t>(idx)] = 0;
      active.erase(active.begin() + leave);
      dropped = idx;
    }
    r = b - B * x;
    c = B.transpose() * r;
    if (finish || lambda <= 0.0 || r.squaredNorm() <= sigma2) {
      out.converged = true;
      break;
    }
    if (join >= 0) {
      active.push_back(join);
      in_active[static_cast<std::size_t>(join)] = 1;
    }
    if (active.empty()) return out;
  }
  if (!out.converged) return out;

  // The last segment has a closed form on the final support, which is more
  // accurate than the accumulated steps; it also yields the dual certificate.
  out.converged = false;
  const double xmax = x.lpNorm<Eigen::Infinity>();
  const Eigen::VectorXd path_end = x;
  for (double cutoff : {0.0, 1e-9 * xmax, 1e-6 * xmax}) {
    const auto p = polish(B, b, sigma, path_end, cutoff);
    if (!p || (b - B * p->x).norm() > sigma * (1.0 + 1e-12) + 1e-14) continue;
    // The minimum-norm certificate can miss for exact fits; agreement with
    // the path end is then the evidence.
    x = p->x;
    out.converged = p->certified || (x - path_end).norm() <= 1e-6 * std::max(1.0, xmax);
    if (out.converged) break;
  }
  return out;
}

/// Root finding on the Pareto curve phi(tau) = min { ||b - Bx|| : ||x||_1 <= tau }
/// with Newton updates of tau, each subproblem handled by spectral projected
/// gradient with a nonmonotone line search.
BPDNSolution solve_pareto(const Eigen::MatrixXd& B, const Eigen::VectorXd& b, double sigma,
                          const BPDNConfig& config) {
  constexpr double kGamma = 1e-4;
  constexpr double kAlphaMin = 1e-16;
  constexpr double kAlphaMax = 1e5;
  constexpr std::size_t kMemory = 3;
  constexpr int kMaxLineSearch = 20;
  const double tol = config.tolerance;

  BPDNSolution out{Eigen::VectorXd::Zero(B.cols()), 0, false, "pareto"};
  Eigen::VectorXd& x = out.x;
  Eigen::VectorXd r = b;
  Eigen::VectorXd g = -(B.transpose() * r);
  double f = 0.5 * r.squaredNorm();
  double tau = 0.0;
  double alpha = 1.0 / std::max(g.lpNorm<Eigen::Infinity>(), std::numeric_limits<double>::min());
  alpha = std::clamp(alpha, kAlphaMin, kAlphaMax);
  std::deque<double> history{f};
  // Best feasible iterate seen, by l1 norm.
  Eigen::VectorXd best;
  double best_norm = std::numeric_limits<double>::infinity();

  while (true) {
    const double rnorm = std::sqrt(2.0 * f);
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    const double gap = r.dot(r - b) + tau * gnorm;
    const double rel_gap = std::abs(gap) / std::max(1.0, f);
    const double rel_err1 = std::abs(rnorm - sigma) / std::max(1.0, rnorm);
    const double rel_err2 = std::abs(f - 0.5 * sigma * sigma) / std::max(1.0, f);

    if (rnorm <= sigma * (1.0 + tol) + tol * 1e-4) {
      const double n1 = x.lpNorm<1>();
      if (n1 < best_norm) {
        best_norm = n1;
        best = x;
      }
    }
    if (rel_err1 <= tol && rel_gap <= std::max(tol, rel_err2)) {
      out.converged = true;
      break;
    }
    if (out.iterations >= config.max_iterations) break;

    if (rel_gap <= std::max(tol, rel_err2) && gnorm > 0.0) {
      // Weak duality gives tau* >= (b'r - sigma ||r||) / ||B'r||_inf for any r;
      // at an exact subproblem solution this is the Newton step, and it can
      // never overshoot the root.
      const double lower = (b.dot(r) - sigma * rnorm) / gnorm;
      if (lower > tau) {
        tau = lower;
        history.assign(1, f);
      }
    }

    ++out.iterations;
    Eigen::VectorXd direction = project_l1_ball(x - alpha * g, tau) - x;
    double gtd = g.dot(direction);
    if (!(gtd < 0.0) && alpha != 1.0) {
      // a collapsed spectral step can hide a descent direction
      alpha = 1.0;
      direction = project_l1_ball(x - alpha * g, tau) - x;
      gtd = g.dot(direction);
    }
    if (!(gtd < 0.0)) {
      // stationary for this tau
      if (gnorm == 0.0) break;
      const double lower = (b.dot(r) - sigma * rnorm) / gnorm;
      if (!(lower > tau)) break;
      tau = lower;
      history.assign(1, f);
      continue;
    }
    const double fmax = *std::max_element(history.begin(), history.end());

    Eigen::VectorXd x_new;
    Eigen::VectorXd r_new;
    double f_new = 0.0;
    bool accepted = false;
    double step = 1.0;
    for (int ls = 0; ls < kMaxLineSearch; ++ls) {
      x_new = x + step * direction;
      r_new = b - B * x_new;
      f_new = 0.5 * r_new.squaredNorm();
      if (f_new <= fmax + kGamma * step * gtd) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // projected arc search with a shrinking gradient step
      double arc = alpha;
      for (int ls = 0; ls < kMaxLineSearch; ++ls) {
        arc *= 0.5;
        x_new = project_l1_ball(x - arc * g, tau);
        r_new = b - B * x_new;
        f_new = 0.5 * r_new.squaredNorm();
        if (f_new <= fmax + kGamma * g.dot(x_new - x)) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }

    const Eigen::VectorXd g_new = -(B.transpose() * r_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sts = s.squaredNorm();
    const double sty = s.dot(y);
    alpha = sty <= 0.0 ? kAlphaMax : std::clamp(sts / sty, kAlphaMin, kAlphaMax);

    x = std::move(x_new);
    r = std::move(r_new);
    g = g_new;
    f = f_new;
    history.push_back(f);
    if (history.size() > kMemory) history.pop_front();
  }

  if (!out.converged && best.size() > 0 && best_norm <= x.lpNorm<1>()) x = best;

  // Finish on the identified support: exact feasibility and, with a dual
  // certificate, proven optimality.
  const double xmax = x.lpNorm<Eigen::Infinity>();
  const bool x_feasible = (b - B * x).norm() <= sigma * (1.0 + tol) + tol * 1e-4;
  for (double cutoff : {0.0, 1e-9 * xmax, 1e-6 * xmax}) {
    const auto p = polish(B, b, sigma, x, cutoff);
    if (!p) continue;
    if ((b - B * p->x).norm() > sigma * (1.0 + 1e-12) + 1e-14) continue;
    if (p->certified || !x_feasible) {
      x = p->x;
      out.converged = out.converged || p->certified;
      out.method += "+polish";
      break;
    }
  }
  return out;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  return v.unaryExpr([t](double e) { return std::copysign(std::max(std::abs(e) - t, 0.0), e); });
}

/// ADMM on min ||w||_1 s.t. x = w, Bx = u, ||u - b|| <= sigma, with residual
/// balancing of the penalty every kAdmmRebalance iterations.
constexpr std::size_t kAdmmRebalance = 50;

BPDNSolution solve_admm(const Eigen::MatrixXd& B, const Eigen::VectorXd& b, double sigma,
                        const BPDNConfig& config) {
  const Eigen::Index n = B.cols();
  const Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(n, n) + B.transpose() * B;
  const Eigen::LDLT<Eigen::MatrixXd> solver(gram);

  BPDNSolution out{Eigen::VectorXd::Zero(n), 0, false, "admm"};
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = x;
  Eigen::VectorXd u = b;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(b.size());
  double rho = 1.0 / std::max((B.transpose() * b).lpNorm<Eigen::Infinity>(), 1e-12);
  const double scale = std::max(1.0, b.norm());

  for (; out.iterations < config.max_iterations; ++out.iterations) {
    x = solver.solve(w - p + B.transpose() * (u - q));
    const Eigen::VectorXd bx = B * x;
    const Eigen::VectorXd w_old = w;
    const Eigen::VectorXd u_old = u;
    w = soft_threshold(x + p, 1.0 / rho);
    Eigen::VectorXd shifted = bx + q - b;
    const double len = shifted.norm();
    if (len > sigma) shifted *= sigma / len;
    u = b + shifted;
    p += x - w;
    q += bx - u;

    const double primal = std::sqrt((x - w).squaredNorm() + (bx - u).squaredNorm());
    const double dual =
        rho * std::sqrt((w - w_old).squaredNorm() + (B.transpose() * (u - u_old)).squaredNorm());
    if (primal <= config.tolerance * scale && dual <= config.tolerance * scale) {
      out.converged = true;
      ++out.iterations;
      break;
    }
    if ((out.iterations + 1) % kAdmmRebalance != 0) continue;
    if (primal > 10.0 * dual) {
      rho *= 2.0;
      p /= 2.0;
      q /= 2.0;
    } else if (dual > 10.0 * primal) {
      rho /= 2.0;
      p *= 2.0;
      q *= 2.0;
    }
  }
  out.x = w;
  return out;
}

}  // namespace

BPDNSolution solve_bpdn(const Eigen::MatrixXd& B, const Eigen::VectorXd& b, double sigma,
                        const BPDNConfig& config) {
  if (B.rows() != b.size()) throw ShapeError("matrix rows and observation length differ");
  if (!(sigma >= 0.0)) throw DomainError("residual budget must be >= 0");
  if (!(config.tolerance > 0.0)) throw DomainError("tolerance must be positive");
  if (config.max_iterations == 0) throw DomainError("max_iterations must be positive");
  if (b.norm() <= sigma) return BPDNSolution{Eigen::VectorXd::Zero(B.cols()), 0, true, "zero"};

  switch (config.algorithm) {
    case BPDNAlgorithm::Homotopy: return solve_homotopy(B, b, sigma, config);
    case BPDNAlgorithm::Pareto: return solve_pareto(B, b, sigma, config);
    case BPDNAlgorithm::Admm: return solve_admm(B, b, sigma, config);
    case BPDNAlgorithm::Auto: break;
  }
  BPDNSolution path = solve_homotopy(B, b, sigma, config);
  if (path.converged) return path;
  BPDNSolution first = solve_pareto(B, b, sigma, config);
  first.iterations += path.iterations;
  if (first.converged) return first;
  BPDNSolution second = solve_admm(B, b, sigma, config);
  const auto feasible = [&](const BPDNSolution& s) {
    return (b - B * s.x).norm() <= sigma + 1e-6;
  };
  const bool f1 = feasible(first);
  const bool f2 = feasible(second);
  if (f2 && (!f1 || second.x.lpNorm<1>() < first.x.lpNorm<1>())) {
    second.iterations += first.iterations;
    return second;
  }
  first.iterations += second.iterations;
  return first;
}

RecoveryReport weighted_bpdn(const SensingSystem& system, const WeightVector& weights,
                             const BPDNConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (!(weights.index_set() == system.index_set())) {
    throw ShapeError("weights are keyed to a different index set than the system");
  }
  const Eigen::VectorXd& omega = weights.values();
  const Eigen::MatrixXd scaled = system.matrix() * omega.cwiseInverse().asDiagonal();
  const double sigma = system.residual_budget();
  BPDNSolution sol = solve_bpdn(scaled, system.observations(), sigma, config);
  const Eigen::VectorXd z = sol.x.cwiseQuotient(omega);

  const double residual = (system.observations() - system.matrix() * z).norm();
  if (residual > sigma + 1e-6) {
    throw ConvergenceError("BPDN did not reach the residual budget: residual " +
                           std::to_string(residual) + " > " + std::to_string(sigma) + " after " +
                           std::to_string(sol.iterations) + " iterations");
  }
  CoefficientVector coefficients(system.index_set(), z);
  IndexSet support = coefficients.support();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return RecoveryReport{std::move(coefficients),
                        residual,
                        omega.cwiseProduct(z.cwiseAbs()).sum(),
                        sol.iterations,
                        sol.converged,
                        std::move(support),
                        {residual},
                        seconds,
                        "bpdn/" + sol.method};
}

}  // namespace lowercs
