#include "fowt/sqp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fowt/error.hpp"
#include "fowt/parallel.hpp"

namespace fowt::opt {

const char* to_string(SqpStatus status) {
  switch (status) {
    case SqpStatus::converged: return "converged";
    case SqpStatus::max_iterations: return "max_iterations";
    case SqpStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

std::vector<double> scales(std::size_t n, const std::vector<double>& lower, const std::vector<double>& upper) {
  std::vector<double> s(n, 1.0);
  if (lower.empty() && upper.empty()) return s;
  require(lower.size() == n && upper.size() == n, ErrorKind::Config, "bounds do not match the variable count");
  for (std::size_t i = 0; i < n; ++i) {
    require(upper[i] > lower[i], ErrorKind::Config, "bounds must satisfy lower < upper");
    s[i] = upper[i] - lower[i];
  }
  return s;
}

std::string probe_context(std::size_t i, const std::exception& e) {
  return "finite-difference probe on coordinate " + std::to_string(i) + ": " + e.what();
}

/// Gradients with respect to the normalized coordinates.
Jacobians normalized_jacobians(const EvalFn& fn, const std::vector<double>& x, double step,
                               const std::vector<double>& scale, int jobs) {
  const std::size_t n = x.size();
  std::vector<Evaluation> plus(n), minus(n);
  parallel_for(2 * n, jobs, [&](std::size_t k) {
    const std::size_t i = k / 2;
    std::vector<double> xp = x;
    xp[i] += (k % 2 == 0 ? step : -step) * scale[i];
    try {
      (k % 2 == 0 ? plus : minus)[i] = fn(xp);
    } catch (const Error& e) {
      throw Error(e.kind(), probe_context(i, e));
    } catch (const std::exception& e) {
      throw Error(ErrorKind::Numerical, probe_context(i, e));
    }
  });
  Jacobians jac;
  jac.objective.resize(n);
  const std::size_t m = plus.empty() ? 0 : plus[0].constraints.size();
  jac.constraints.assign(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    jac.objective[i] = (plus[i].objective - minus[i].objective) / (2.0 * step);
    require(plus[i].constraints.size() == m && minus[i].constraints.size() == m, ErrorKind::Consistency,
            "constraint count changed between probes");
    for (std::size_t j = 0; j < m; ++j)
      jac.constraints[j][i] = (plus[i].constraints[j] - minus[i].constraints[j]) / (2.0 * step);
  }
  return jac;
}

double max_violation(const std::vector<double>& g) {
  double v = 0.0;
  for (double gi : g) v = std::max(v, gi);
  return v;
}

double sum_violation(const std::vector<double>& g) {
  double v = 0.0;
  for (double gi : g) v += std::max(gi, 0.0);
  return v;
}

}  // namespace

std::vector<double> fd_gradient(const ScalarFn& fn, const std::vector<double>& x, double step,
                                const std::vector<double>& lower, const std::vector<double>& upper) {
  require(step > 0.0, ErrorKind::Config, "finite-difference step must be positive");
  const auto scale = scales(x.size(), lower, upper);
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> xp = x, xm = x;
    xp[i] += step * scale[i];
    xm[i] -= step * scale[i];
    double fp, fm;
    try {
      fp = fn(xp);
      fm = fn(xm);
    } catch (const Error& e) {
      throw Error(e.kind(), probe_context(i, e));
    } catch (const std::exception& e) {
      throw Error(ErrorKind::Numerical, probe_context(i, e));
    }
    grad[i] = (fp - fm) / (2.0 * step) / scale[i];
  }
  return grad;
}

Jacobians fd_jacobians(const EvalFn& fn, const std::vector<double>& x, double step,
                       const std::vector<double>& lower, const std::vector<double>& upper, int jobs) {
  require(step > 0.0, ErrorKind::Config, "finite-difference step must be positive");
  const auto scale = scales(x.size(), lower, upper);
  auto jac = normalized_jacobians(fn, x, step, scale, jobs);
  for (std::size_t i = 0; i < x.size(); ++i) {
    jac.objective[i] /= scale[i];
    for (auto& row : jac.constraints) row[i] /= scale[i];
  }
  return jac;
}

QpResult solve_elastic_qp(const std::vector<std::vector<double>>& b, const std::vector<double>& c,
                          const std::vector<std::vector<double>>& jac, const std::vector<double>& g,
                          const std::vector<double>& lo, const std::vector<double>& hi, double penalty) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(g.size());
  const int nw = n + 1;  // p and the elastic variable xi
  constexpr double kEps = 1.0;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nw, nw);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  h(n, n) = kEps;
  Eigen::VectorXd q(nw);
  for (int i = 0; i < n; ++i) q(i) = c[static_cast<std::size_t>(i)];
  q(n) = penalty;

  // rows a_j w <= r_j: general, upper bounds, lower bounds, xi <= 1, xi >= 0
  const int rows = m + 2 * n + 2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, nw);
  Eigen::VectorXd r(rows);
  for (int i = 0; i < m; ++i) {
    const auto si = static_cast<std::size_t>(i);
    for (int j = 0; j < n; ++j) a(i, j) = jac[si][static_cast<std::size_t>(j)];
    a(i, n) = -std::max(g[si], 0.0);
    r(i) = -g[si];
  }
  for (int j = 0; j < n; ++j) {
    a(m + j, j) = 1.0;
    r(m + j) = hi[static_cast<std::size_t>(j)];
    a(m + n + j, j) = -1.0;
    r(m + n + j) = -lo[static_cast<std::size_t>(j)];
  }
  a(m + 2 * n, n) = 1.0;
  r(m + 2 * n) = 1.0;
  a(m + 2 * n + 1, n) = -1.0;
  r(m + 2 * n + 1) = 0.0;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(nw);
  w(n) = 1.0;  // (p, xi) = (0, 1) satisfies every row
  std::vector<int> working;
  std::vector<char> in_set(static_cast<std::size_t>(rows), 0);
  Eigen::VectorXd lambda;

  QpResult out;
  const int max_iter = 20 * (rows + nw);
  bool at_subspace_min = false;
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    const int k = static_cast<int>(working.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nw + k, nw + k);
    kkt.topLeftCorner(nw, nw) = h;
    for (int s = 0; s < k; ++s) {
      kkt.block(nw + s, 0, 1, nw) = a.row(working[static_cast<std::size_t>(s)]);
      kkt.block(0, nw + s, nw, 1) = a.row(working[static_cast<std::size_t>(s)]).transpose();
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nw + k);
    rhs.head(nw) = -(h * w + q);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) {
      // Finite-difference noise can make a nearly duplicated row pass the
      // independence test; the newest row is released and the step retried.
      require(k > 0, ErrorKind::Numerical, "QP working-set system is singular");
      in_set[static_cast<std::size_t>(working.back())] = 0;
      working.pop_back();
      at_subspace_min = false;
      continue;
    }
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd d = sol.head(nw);
    lambda = sol.tail(k);

    // A full unblocked step lands on the minimizer of the current subspace.
    if (at_subspace_min || d.lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + w.lpNorm<Eigen::Infinity>())) {
      at_subspace_min = false;
      // Bland's rule: the lowest row index with a negative multiplier leaves.
      int drop = -1;
      for (int s = 0; s < k; ++s) {
        if (lambda(s) < -1e-10 && (drop < 0 || working[static_cast<std::size_t>(s)] < working[static_cast<std::size_t>(drop)]))
          drop = s;
      }
      if (drop < 0) break;
      in_set[static_cast<std::size_t>(working[static_cast<std::size_t>(drop)])] = 0;
      working.erase(working.begin() + drop);
      continue;
    }

    // Rows spanned by the working set (duplicated constraints) never enter it.
    auto dependent = [&](int j) {
      if (k == 0) return false;
      Eigen::MatrixXd ws(nw, k);
      for (int s = 0; s < k; ++s) ws.col(s) = a.row(working[static_cast<std::size_t>(s)]).transpose();
      const Eigen::VectorXd aj = a.row(j).transpose();
      const Eigen::VectorXd coef = ws.colPivHouseholderQr().solve(aj);
      return (ws * coef - aj).norm() <= 1e-6 * aj.norm();
    };
    std::vector<char> skip(static_cast<std::size_t>(rows), 0);
    double alpha = 1.0;
    int block = -1;
    while (true) {
      alpha = 1.0;
      block = -1;
      for (int j = 0; j < rows; ++j) {
        if (in_set[static_cast<std::size_t>(j)] || skip[static_cast<std::size_t>(j)]) continue;
        const double ad = a.row(j).dot(d);
        if (ad <= 1e-12 * a.row(j).norm() * d.norm()) continue;
        const double aj = std::max((r(j) - a.row(j).dot(w)) / ad, 0.0);
        if (aj < alpha) {
          alpha = aj;
          block = j;
        }
      }
      if (block < 0 || !dependent(block)) break;
      skip[static_cast<std::size_t>(block)] = 1;
    }
    w += alpha * d;
    at_subspace_min = block < 0;
    if (block >= 0) {
      working.push_back(block);
      in_set[static_cast<std::size_t>(block)] = 1;
    }
    require(it + 1 < max_iter, ErrorKind::Numerical, "QP active-set iteration limit reached");
  }

  out.p.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) out.p[static_cast<std::size_t>(i)] = w(i);
  out.xi = std::clamp(w(n), 0.0, 1.0);
  out.multipliers.assign(static_cast<std::size_t>(m), 0.0);
  for (std::size_t s = 0; s < working.size(); ++s)
    if (working[s] < m) out.multipliers[static_cast<std::size_t>(working[s])] = std::max(lambda(static_cast<int>(s)), 0.0);
  return out;
}

SqpResult minimize(const EvalFn& fn, const std::vector<double>& x0, const std::vector<double>& lower,
                   const std::vector<double>& upper, const SqpSettings& settings,
                   const std::function<void(const SqpIterate&)>& on_iterate) {
  const std::size_t n = x0.size();
  require(n >= 1, ErrorKind::Config, "optimizer needs at least one variable");
  require(settings.fd_step > 0.0 && settings.tol > 0.0 && settings.max_iter >= 1, ErrorKind::Config,
          "optimizer settings need fd_step > 0, tol > 0 and max_iter >= 1");
  const auto scale = scales(n, lower, upper);
  for (std::size_t i = 0; i < n; ++i)
    require(x0[i] >= lower[i] && x0[i] <= upper[i], ErrorKind::Config,
            "starting point outside bounds at coordinate " + std::to_string(i));

  auto to_x = [&](const Eigen::VectorXd& z) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lower[i] + scale[i] * z(static_cast<int>(i));
    return x;
  };
  Eigen::VectorXd z(static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) z(static_cast<int>(i)) = (x0[i] - lower[i]) / scale[i];

  Evaluation ev = fn(to_x(z));
  const std::size_t m = ev.constraints.size();
  const double fscale = std::abs(ev.objective) > 0.0 ? std::abs(ev.objective) : 1.0;

  // Jacobians in normalized coordinates of the scaled objective.
  auto jacobians = [&](const Eigen::VectorXd& zz) {
    auto jac = normalized_jacobians(fn, to_x(zz), settings.fd_step, scale, settings.jobs);
    for (double& v : jac.objective) v /= fscale;
    return jac;
  };
  auto lagrangian_gradient = [&](const Jacobians& jac, const std::vector<double>& mu) {
    Eigen::VectorXd gl(static_cast<int>(n));
    for (std::size_t i = 0; i < n; ++i) {
      double v = jac.objective[i];
      for (std::size_t j = 0; j < m; ++j) v += mu[j] * jac.constraints[j][i];
      gl(static_cast<int>(i)) = v;
    }
    return gl;
  };

  SqpResult res;
  res.history.push_back({0, to_x(z), ev, 0.0, 0.0});
  if (on_iterate) on_iterate(res.history.back());

  Eigen::MatrixXd bmat = Eigen::MatrixXd::Identity(static_cast<int>(n), static_cast<int>(n));
  Jacobians jac = jacobians(z);
  double rho = 0.0;
  res.status = SqpStatus::max_iterations;
  std::vector<double> mu(m, 0.0);

  for (int iter = 1; iter <= settings.max_iter; ++iter) {
    std::vector<std::vector<double>> bvec(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) bvec[i][j] = bmat(static_cast<int>(i), static_cast<int>(j));
    std::vector<double> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = -z(static_cast<int>(i));
      hi[i] = 1.0 - z(static_cast<int>(i));
    }
    const QpResult qp = solve_elastic_qp(bvec, jac.objective, jac.constraints, ev.constraints, lo, hi,
                                         settings.elastic_penalty);
    mu = qp.multipliers;
    Eigen::VectorXd p(static_cast<int>(n));
    double gtp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p(static_cast<int>(i)) = qp.p[i];
      gtp += jac.objective[i] * qp.p[i];
    }
    double comp = 0.0, mu_max = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      comp += std::abs(mu[j] * ev.constraints[j]);
      mu_max = std::max(mu_max, mu[j]);
    }
    res.kkt_residual = std::abs(gtp) + comp;
    const bool feasible = max_violation(ev.constraints) <= settings.tol;
    if (feasible && (res.kkt_residual < settings.tol || p.lpNorm<Eigen::Infinity>() < 1e-10)) {
      res.status = SqpStatus::converged;
      break;
    }

    rho = std::max(rho, 1.1 * mu_max + 1e-6);
    const double viol = sum_violation(ev.constraints);
    const double merit = ev.objective / fscale + rho * viol;
    const double slope = std::min(gtp - rho * (1.0 - qp.xi) * viol, 0.0);

    double alpha = 1.0;
    Eigen::VectorXd z_new = z;
    Evaluation ev_new;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      z_new = (z + alpha * p).cwiseMax(0.0).cwiseMin(1.0);
      ev_new = fn(to_x(z_new));
      const double merit_new = ev_new.objective / fscale + rho * sum_violation(ev_new.constraints);
      if (merit_new <= merit + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // no merit decrease along the search direction
      res.status = feasible ? SqpStatus::converged : SqpStatus::infeasible;
      break;
    }

    const Jacobians jac_new = jacobians(z_new);
    const Eigen::VectorXd s = z_new - z;
    Eigen::VectorXd y = lagrangian_gradient(jac_new, mu) - lagrangian_gradient(jac, mu);
    const double sbs = s.dot(bmat * s);
    if (sbs > 1e-16) {
      const double sy = s.dot(y);
      if (sy < 0.2 * sbs) {
        const double theta = 0.8 * sbs / (sbs - sy);
        y = theta * y + (1.0 - theta) * (bmat * s);
      }
      const Eigen::VectorXd bs = bmat * s;
      bmat += (y * y.transpose()) / s.dot(y) - (bs * bs.transpose()) / sbs;
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(bmat, Eigen::EigenvaluesOnly);
      const auto& ev_b = eig.eigenvalues();
      if (!bmat.allFinite() || ev_b(0) <= 1e-10 * ev_b(ev_b.size() - 1))
        bmat = Eigen::MatrixXd::Identity(static_cast<int>(n), static_cast<int>(n));
    }

    z = z_new;
    ev = ev_new;
    jac = jac_new;
    res.iterations = iter;
    res.history.push_back({iter, to_x(z), ev, res.kkt_residual, alpha});
    if (on_iterate) on_iterate(res.history.back());
  }

  res.x = to_x(z);
  res.eval = ev;
  res.multipliers = mu;
  for (double& v : res.multipliers) v *= fscale;  // back to the unscaled objective
  for (std::size_t j = 0; j < m; ++j)
    if (ev.constraints[j] > settings.tol) res.violated.push_back(j);
  if (!res.violated.empty()) res.status = SqpStatus::infeasible;
  return res;
}

}  // namespace fowt::opt
