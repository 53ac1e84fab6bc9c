#include "balayage/qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "balayage/error.hpp"

namespace balayage {

namespace {

constexpr std::size_t kRefresh = 50;
constexpr std::size_t kStagnationWindow = 20000;
// subspace solves start after this many iterations and need a support unchanged for kSteady
constexpr std::size_t kPolishAfter = 200;
constexpr std::size_t kSteady = 25;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_sizes(const KernelMatrix& K, std::span<const double> b) {
  if (K.size() == 0) throw ValidationError("qp: empty problem");
  if (b.size() != K.size()) throw ValidationError("qp: linear term does not match the matrix size");
  for (double v : b) {
    if (!std::isfinite(v)) throw ValidationError("qp: linear term must be finite");
  }
}

void project(std::vector<double>& v, Constraint c) {
  if (c == Constraint::nonneg_cone) {
    for (double& x : v) x = std::max(0.0, x);
  } else {
    v = project_simplex(v);
  }
}

// Minimizer of the objective on the face {w_i = 0 outside `sup`} (plus sum w = 1 for the simplex),
// ignoring the sign constraints. Empty when the reduced system is singular.
std::vector<double> face_minimizer(const KernelMatrix& K, std::span<const double> b, const std::vector<std::size_t>& sup,
                                   Constraint c) {
  const auto m = static_cast<Eigen::Index>(sup.size());
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index bb = 0; bb < m; ++bb) A(a, bb) = K(sup[a], sup[bb]);
    rhs(a) = b[sup[a]];
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) return {};
  Eigen::VectorXd x = llt.solve(rhs);
  if (c == Constraint::simplex) {
    // x = x_b + t x_1 with t fixing the mass
    const Eigen::VectorXd x1 = llt.solve(Eigen::VectorXd::Ones(m));
    const double s1 = x1.sum();
    if (!(s1 > 0.0)) return {};
    x += ((1.0 - x.sum()) / s1) * x1;
  }
  if (!x.allFinite()) return {};
  std::vector<double> w(K.size(), 0.0);
  for (Eigen::Index a = 0; a < m; ++a) w[sup[a]] = x(a);
  return w;
}

}  // namespace

std::vector<double> project_simplex(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cum += u[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  std::vector<double> w(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::max(0.0, v[i] - theta);
    sum += w[i];
  }
  // remove the rounding drift so that the mass is 1 to machine precision
  if (sum > 0.0) {
    for (double& x : w) x /= sum;
  }
  return w;
}

QPSolution kkt_report(const KernelMatrix& K, std::span<const double> b, std::span<const double> w, Constraint c) {
  check_sizes(K, b);
  if (w.size() != K.size()) throw ValidationError("qp: point does not match the matrix size");
  const std::size_t n = K.size();
  QPSolution s;
  s.w.assign(w.begin(), w.end());
  double bmax = 0.0;
  for (double v : b) bmax = std::max(bmax, std::abs(v));
  s.scale = std::max(1.0, bmax);
  const auto kw = K.apply(w);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = kw[i] - b[i];
  s.objective = dot(w, kw) - 2.0 * dot(b, w);
  const double level = c == Constraint::simplex ? dot(w, g) : 0.0;
  s.multiplier_c = c == Constraint::simplex ? level : std::numeric_limits<double>::quiet_NaN();
  double stat = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stat = std::max(stat, level - g[i]);
    comp = std::max(comp, std::abs(w[i] * (g[i] - level)));
  }
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = w[i] - g[i];
  project(z, c);
  double nat = 0.0;
  for (std::size_t i = 0; i < n; ++i) nat = std::max(nat, std::abs(w[i] - z[i]));
  s.kkt_stationarity = stat / s.scale;
  s.kkt_complementarity = comp / s.scale;
  s.natural_residual = nat / s.scale;
  return s;
}

QPSolution solve(const KernelMatrix& K, std::span<const double> b, Constraint c, const QPOptions& opt) {
  check_sizes(K, b);
  if (!(opt.tol > 0.0)) throw ValidationError("qp: tol must be positive");
  const std::size_t n = K.size();

  std::vector<double> w(n, c == Constraint::simplex ? 1.0 / static_cast<double>(n) : 0.0);
  if (opt.start) {
    if (opt.start->size() != n) throw ValidationError("qp: start point does not match the matrix size");
    w = *opt.start;
    project(w, c);
  }
  double bmax = 0.0;
  for (double v : b) bmax = std::max(bmax, std::abs(v));
  const double scale = std::max(1.0, bmax);

  auto kw = K.apply(w);
  std::vector<double> g(n), z(n), d(n);
  double kmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) kmax = std::max(kmax, K(i, i));
  double step = 1.0 / kmax;

  auto met = [&](const QPSolution& r) {
    return r.kkt_stationarity <= opt.tol && r.kkt_complementarity <= opt.tol && r.natural_residual <= opt.tol;
  };

  std::vector<double> trace;
  std::vector<std::size_t> support;
  std::size_t steady = 0;
  double best_nat = std::numeric_limits<double>::infinity();
  std::size_t best_at = 0;
  std::size_t it = 0;
  std::string status = "max_iter reached";
  bool converged = false;
  for (;; ++it) {
    for (std::size_t i = 0; i < n; ++i) g[i] = kw[i] - b[i];
    // residual check, reusing K w
    {
      const double level = c == Constraint::simplex ? dot(w, g) : 0.0;
      double stat = 0.0, comp = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        stat = std::max(stat, level - g[i]);
        comp = std::max(comp, std::abs(w[i] * (g[i] - level)));
      }
      for (std::size_t i = 0; i < n; ++i) z[i] = w[i] - g[i];
      project(z, c);
      double nat = 0.0;
      for (std::size_t i = 0; i < n; ++i) nat = std::max(nat, std::abs(w[i] - z[i]));
      if (stat / scale <= opt.tol && comp / scale <= opt.tol && nat / scale <= opt.tol) {
        converged = true;
        status = "converged";
        break;
      }
      if (nat < best_nat * (1.0 - 1e-3)) {
        best_nat = nat;
        best_at = it;
      } else if (it - best_at > kStagnationWindow) {
        status = "stagnation";
        break;
      }
    }
    if (it >= opt.max_iter) break;

    if (it >= kPolishAfter) {
      std::vector<std::size_t> sup;
      for (std::size_t i = 0; i < n; ++i) {
        if (w[i] > 0.0) sup.push_back(i);
      }
      steady = sup == support ? steady + 1 : 0;
      support = std::move(sup);
      if (steady == kSteady && !support.empty()) {
        steady = 0;
        const auto target = face_minimizer(K, b, support, c);
        if (!target.empty()) {
          // move toward the face minimizer, stopping where the first mass reaches zero
          double t = 1.0;
          for (std::size_t i = 0; i < n; ++i) {
            if (target[i] < 0.0) t = std::min(t, w[i] / (w[i] - target[i]));
          }
          for (std::size_t i = 0; i < n; ++i) w[i] = std::max(0.0, w[i] + t * (target[i] - w[i]));
          if (c == Constraint::simplex) w = project_simplex(w);
          kw = K.apply(w);
          if (opt.keep_trace) trace.push_back(dot(w, kw) - 2.0 * dot(b, w));
          continue;
        }
      }
    }

    for (std::size_t i = 0; i < n; ++i) z[i] = w[i] - step * g[i];
    project(z, c);
    double dd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = z[i] - w[i];
      dd += d[i] * d[i];
    }
    if (dd == 0.0) {
      // projected step is stuck at the current step length; restart with a larger one
      step = std::max(step * 10.0, 1.0 / kmax);
      continue;
    }
    const auto kd = K.apply(d);
    const double dkd = dot(d, kd);
    const double gd = dot(g, d);
    double theta = 1.0;
    if (dkd > 0.0) theta = std::clamp(-gd / dkd, 0.0, 1.0);
    if (gd >= 0.0) {
      // not a descent direction at rounding level; restart the step length
      step = 1.0 / kmax;
      theta = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += theta * d[i];
      kw[i] += theta * kd[i];
    }
    if (c == Constraint::nonneg_cone) {
      for (double& x : w) x = std::max(0.0, x);
    }
    if ((it + 1) % kRefresh == 0) kw = K.apply(w);
    if (dkd > 0.0) step = std::clamp(dd / dkd, 1e-3 / kmax, 1e6 / kmax);
    if (opt.keep_trace) trace.push_back(dot(w, kw) - 2.0 * dot(b, w));
  }

  if (c == Constraint::simplex) w = project_simplex(w);
  QPSolution s = kkt_report(K, b, w, c);
  s.iterations = it;
  s.converged = converged && met(s);
  s.status = s.converged ? "converged" : (converged ? "residual drift after refresh" : status);
  s.trace = std::move(trace);
  return s;
}

QPSolution solve_cone(const KernelMatrix& K, std::span<const double> b, const QPOptions& opt) {
  return solve(K, b, Constraint::nonneg_cone, opt);
}

QPSolution solve_simplex(const KernelMatrix& K, std::span<const double> b, const QPOptions& opt) {
  return solve(K, b, Constraint::simplex, opt);
}

QPSolution brute_force(const KernelMatrix& K, std::span<const double> b, Constraint c) {
  check_sizes(K, b);
  const std::size_t n = K.size();
  if (n > 12) throw ValidationError("brute_force: at most 12 unknowns are enumerated");
  std::vector<double> best;
  double best_obj = std::numeric_limits<double>::infinity();
  if (c == Constraint::nonneg_cone) {
    best.assign(n, 0.0);
    best_obj = 0.0;
  }
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
    std::vector<std::size_t> sup;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1U << i)) sup.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(sup.size());
    const Eigen::Index rows = c == Constraint::simplex ? m + 1 : m;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, rows);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index bb = 0; bb < m; ++bb) A(a, bb) = K(sup[a], sup[bb]);
      rhs(a) = b[sup[a]];
    }
    if (c == Constraint::simplex) {
      for (Eigen::Index a = 0; a < m; ++a) {
        A(a, m) = -1.0;
        A(m, a) = 1.0;
      }
      rhs(m) = 1.0;
    }
    const Eigen::VectorXd x = A.fullPivLu().solve(rhs);
    if (!x.allFinite()) continue;
    std::vector<double> w(n, 0.0);
    bool feasible = true;
    for (Eigen::Index a = 0; a < m; ++a) {
      if (x(a) < -1e-13) feasible = false;
      w[sup[a]] = std::max(0.0, x(a));
    }
    if (!feasible) continue;
    if (c == Constraint::simplex) {
      double sum = 0.0;
      for (double v : w) sum += v;
      if (!(sum > 0.0)) continue;
      for (double& v : w) v /= sum;
    }
    const auto kw = K.apply(w);
    const double obj = dot(w, kw) - 2.0 * dot(b, w);
    if (obj < best_obj) {
      best_obj = obj;
      best = w;
    }
  }
  if (best.empty()) throw SolverError("brute_force: no feasible support found");
  QPSolution s = kkt_report(K, b, best, c);
  s.iterations = std::size_t{1} << n;
  s.converged = true;
  s.status = "enumerated";
  return s;
}

}  // namespace balayage
