#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "sonc/error.hpp"
#include "sonc/poly.hpp"
#include "sonc/polytope.hpp"

namespace sonc {

struct CriticalPoint {
  std::vector<double> x_star;
  double d_star = 0;
  double residual = 0;         // relative violation of the stationarity equations
  std::size_t which_beta = 0;  // index of the freed term in the gamma list
  bool converged = false;
  bool stopped_below = false;  // objective went below the requested coefficient
  std::vector<std::vector<double>> minimizers;  // distinct minimizers attaining d_star
};

struct CriticalOptions {
  double gradient_tol = 1e-12;
  int max_iterations = 200;
  int restarts = 24;
  std::uint64_t seed = 0x5eedULL;
  int samples = 10000;
  std::optional<std::vector<double>> start;  // starting log-point in the reduced coordinates
};

namespace detail {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// G(z) = sum c_i e^{<a_i,z>} - sum d_j e^{<b_j,z>} in reduced coordinates.
struct ExpSum {
  std::vector<Vec> a;
  std::vector<long double> c;
  std::vector<Vec> b;
  std::vector<long double> d;
  std::size_t dim = 0;

  long double positive_part(const Vec& z) const {
    long double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += c[i] * std::exp(static_cast<long double>(a[i].dot(z)));
    return s;
  }

  long double value(const Vec& z) const {
    long double s = positive_part(z);
    for (std::size_t j = 0; j < b.size(); ++j) s -= d[j] * std::exp(static_cast<long double>(b[j].dot(z)));
    return s;
  }

  void derivatives(const Vec& z, Vec& grad, Mat& hess) const {
    grad = Vec::Zero(static_cast<Eigen::Index>(dim));
    hess = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < a.size(); ++i) {
      double w = static_cast<double>(c[i] * std::exp(static_cast<long double>(a[i].dot(z))));
      grad += w * a[i];
      hess += w * a[i] * a[i].transpose();
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      double w = static_cast<double>(d[j] * std::exp(static_cast<long double>(b[j].dot(z))));
      grad -= w * b[j];
      hess -= w * b[j] * b[j].transpose();
    }
  }

  double max_norm() const {
    double m = 1.0;
    for (const auto& v : a) m = std::max(m, v.lpNorm<Eigen::Infinity>());
    for (const auto& v : b) m = std::max(m, v.lpNorm<Eigen::Infinity>());
    return m;
  }
};

struct Reduced {
  ExpSum g;
  std::vector<std::size_t> coords;
  std::vector<Exponent> alphas;
  std::vector<long double> cs;
  std::vector<Exponent> others;  // gamma exponents except the freed one
  std::vector<long double> ds;
  Exponent beta;
};

inline Vec reduced_diff(const Exponent& p, const Exponent& base, const std::vector<std::size_t>& coords) {
  Vec v(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t k = 0; k < coords.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = static_cast<double>(p[coords[k]] - base[coords[k]]);
  return v;
}

inline Reduced reduce(const SparsePoly& f, std::size_t freed, bool require_negative) {
  Reduced r;
  const auto gamma = gamma_terms(f);
  if (gamma.empty()) throw PreconditionError("no inner term");
  if (freed >= gamma.size()) throw PreconditionError("freed index out of range");
  for (const auto& [e, c] : f.terms())
    if (e.is_even() && c > 0) {
      r.alphas.push_back(e);
      r.cs.push_back(static_cast<long double>(to_double(c)));
    }
  if (r.alphas.empty()) throw PreconditionError("no outer terms");
  r.beta = gamma[freed].first;
  if (interior_classification(PointSet(r.alphas), r.beta).location != Location::interior)
    throw PreconditionError("inner exponent " + r.beta.to_string() + " is not interior to the outer hull");
  r.coords = affine_coordinates(r.alphas);
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    if (j == freed) continue;
    if (require_negative && gamma[j].second <= 0)
      throw PreconditionError("inner coefficients must be negative after sign normalisation");
    r.others.push_back(gamma[j].first);
    r.ds.push_back(static_cast<long double>(to_double(gamma[j].second)));
  }
  r.g.dim = r.coords.size();
  for (std::size_t i = 0; i < r.alphas.size(); ++i) {
    r.g.a.push_back(reduced_diff(r.alphas[i], r.beta, r.coords));
    r.g.c.push_back(r.cs[i]);
  }
  for (std::size_t j = 0; j < r.others.size(); ++j) {
    r.g.b.push_back(reduced_diff(r.others[j], r.beta, r.coords));
    r.g.d.push_back(r.ds[j]);
  }
  return r;
}

inline std::vector<double> lift_point(const Reduced& r, const Vec& z, std::size_t n) {
  std::vector<double> x(n, 1.0);
  for (std::size_t k = 0; k < r.coords.size(); ++k) x[r.coords[k]] = std::exp(z(static_cast<Eigen::Index>(k)));
  return x;
}

// Relative residual of the stationarity equations in full coordinates.
inline double stationarity_residual(const Reduced& r, const Vec& z, double d_star) {
  const std::size_t n = r.beta.size();
  long double scalar = -static_cast<long double>(d_star);
  std::vector<long double> vec(n, 0.0L);
  long double scale = 0, maxdiff = 1;
  for (std::size_t i = 0; i < r.alphas.size(); ++i) {
    long double w = r.cs[i] * std::exp(static_cast<long double>(r.g.a[i].dot(z)));
    scalar += w;
    scale += w;
    for (std::size_t k = 0; k < n; ++k) {
      long double diff = static_cast<long double>(r.alphas[i][k] - r.beta[k]);
      vec[k] += w * diff;
      maxdiff = std::max(maxdiff, std::fabs(diff));
    }
  }
  for (std::size_t j = 0; j < r.others.size(); ++j) {
    long double w = r.ds[j] * std::exp(static_cast<long double>(r.g.b[j].dot(z)));
    scalar -= w;
    for (std::size_t k = 0; k < n; ++k) vec[k] -= w * static_cast<long double>(r.others[j][k] - r.beta[k]);
  }
  long double worst = std::fabs(scalar);
  for (auto v : vec) worst = std::max(worst, std::fabs(v) / maxdiff);
  return static_cast<double>(worst / std::max(scale, std::numeric_limits<long double>::min()));
}

// Newton on the log-sum-exp of the positive part; strictly convex on the reduced span.
inline Vec minimize_positive_part(const ExpSum& g, Vec z, const CriticalOptions& opt, bool& converged) {
  const double tol = opt.gradient_tol * g.max_norm();
  auto phi = [&](const Vec& y) { return std::log(g.positive_part(y)); };
  converged = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    // softmax weights
    std::vector<long double> w(g.a.size());
    long double total = 0;
    for (std::size_t i = 0; i < g.a.size(); ++i) total += (w[i] = g.c[i] * std::exp(static_cast<long double>(g.a[i].dot(z))));
    Vec mean = Vec::Zero(static_cast<Eigen::Index>(g.dim));
    for (std::size_t i = 0; i < g.a.size(); ++i) mean += static_cast<double>(w[i] / total) * g.a[i];
    if (mean.lpNorm<Eigen::Infinity>() <= tol) {
      converged = true;
      break;
    }
    Mat h = Mat::Zero(static_cast<Eigen::Index>(g.dim), static_cast<Eigen::Index>(g.dim));
    for (std::size_t i = 0; i < g.a.size(); ++i) {
      Vec dv = g.a[i] - mean;
      h += static_cast<double>(w[i] / total) * dv * dv.transpose();
    }
    Vec step = h.ldlt().solve(-mean);
    if (!step.allFinite()) step = -mean;
    long double f0 = phi(z);
    double slope = mean.dot(step);
    if (slope >= 0) {
      step = -mean;
      slope = -mean.squaredNorm();
    }
    if (-slope < 1e-10) {
      // quadratic region: the line search cannot resolve decreases this small
      z += step;
      continue;
    }
    double t = 1.0;
    Vec next = z + step;
    while (t > 1e-12) {
      next = z + t * step;
      if (phi(next) <= f0 + 1e-4L * t * slope) break;
      t *= 0.5;
    }
    if (t <= 1e-12) {
      // no further decrease possible at working precision
      converged = mean.lpNorm<Eigen::Infinity>() <= 1e3 * tol;
      break;
    }
    z = next;
  }
  return z;
}

struct LocalResult {
  Vec z;
  long double value = 0;
  bool converged = false;
  bool below = false;
};

// Damped Newton with eigenvalue clamping on G = positive - negative part.
inline LocalResult minimize_difference(const ExpSum& g, Vec z, const CriticalOptions& opt, long double stop_below) {
  LocalResult res;
  const double scale_a = g.max_norm();
  for (int it = 0; it < opt.max_iterations; ++it) {
    long double val = g.value(z);
    if (val < stop_below || !std::isfinite(static_cast<double>(val))) {
      res.z = z;
      res.value = val;
      res.below = true;
      return res;
    }
    Vec grad;
    Mat hess;
    g.derivatives(z, grad, hess);
    const double pos = static_cast<double>(g.positive_part(z));
    if (grad.lpNorm<Eigen::Infinity>() <= opt.gradient_tol * pos * scale_a) {
      res.converged = true;
      break;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(hess);
    Vec ev = es.eigenvalues();
    const double floor = std::max(1e-10 * ev.cwiseAbs().maxCoeff(), 1e-300);
    bool clamped = false;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      clamped = clamped || ev(k) < floor;
      ev(k) = std::max(std::fabs(ev(k)), floor);
    }
    Vec step = -(es.eigenvectors() * (ev.cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * grad)));
    double slope = grad.dot(step);
    if (!(slope < 0)) {
      step = -grad / std::max(1.0, grad.norm());
      slope = grad.dot(step);
    }
    if (!clamped && -slope < 1e-10 * pos) {
      z += step;
      continue;
    }
    double t = 1.0;
    Vec next = z;
    bool moved = false;
    while (t > 1e-14) {
      next = z + t * step;
      long double nv = g.value(next);
      if (std::isfinite(static_cast<double>(nv)) && nv <= val + 1e-4L * t * slope) {
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) {
      res.converged = grad.lpNorm<Eigen::Infinity>() <= 1e3 * opt.gradient_tol * pos * scale_a;
      break;
    }
    z = next;
    if (z.lpNorm<Eigen::Infinity>() > 600) {
      res.z = z;
      res.value = g.value(z);
      res.below = res.value < stop_below;
      return res;
    }
  }
  res.z = z;
  res.value = g.value(z);
  return res;
}

}  // namespace detail

// d* = inf over y of sum c_i exp<alpha_i - beta, y> for the single inner term.
inline CriticalPoint critical_point_single(const SparsePoly& f, const CriticalOptions& opt = {}) {
  auto gamma = gamma_terms(f);
  if (gamma.size() != 1) throw PreconditionError("critical_point_single needs exactly one inner term");
  detail::Reduced r = detail::reduce(f, 0, false);
  detail::Vec z0 = detail::Vec::Zero(static_cast<Eigen::Index>(r.g.dim));
  if (opt.start && opt.start->size() == r.g.dim)
    for (std::size_t k = 0; k < r.g.dim; ++k) z0(static_cast<Eigen::Index>(k)) = (*opt.start)[k];
  bool ok = false;
  detail::Vec z = detail::minimize_positive_part(r.g, z0, opt, ok);
  CriticalPoint cp;
  cp.d_star = static_cast<double>(r.g.positive_part(z));
  cp.x_star = detail::lift_point(r, z, f.nvars());
  cp.residual = detail::stationarity_residual(r, z, cp.d_star);
  cp.converged = ok;
  cp.which_beta = 0;
  cp.minimizers.push_back(cp.x_star);
  if (!ok || !(cp.residual < 1e-9)) throw NumericalFailure("single-term critical point did not converge", cp.residual);
  return cp;
}

// d_l* = inf over y of the outer part minus the other inner terms, all divided by x^{beta_l}.
inline CriticalPoint critical_point_multi(const SparsePoly& f, std::size_t freed, const CriticalOptions& opt = {}) {
  auto gamma = gamma_terms(f);
  if (gamma.size() == 1) return critical_point_single(f, opt);
  detail::Reduced r = detail::reduce(f, freed, true);
  const long double requested = static_cast<long double>(to_double(gamma[freed].second));
  const long double stop_below = requested > 0 ? requested * (1.0L - 1e-6L) : -1e300L;

  // start from the minimiser of the outer part alone
  detail::ExpSum outer = r.g;
  outer.b.clear();
  outer.d.clear();
  bool ok = false;
  detail::Vec z0 = detail::minimize_positive_part(outer, detail::Vec::Zero(static_cast<Eigen::Index>(r.g.dim)), opt, ok);

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<detail::Vec> starts{z0, detail::Vec::Zero(static_cast<Eigen::Index>(r.g.dim))};
  for (int s = 0; s < opt.restarts; ++s) {
    detail::Vec v = z0;
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) += 3.0 * unit(rng);
    starts.push_back(v);
  }

  std::vector<detail::LocalResult> found;
  auto record = [&](const detail::LocalResult& lr) -> bool {
    found.push_back(lr);
    return lr.below;
  };
  auto finish_below = [&](const detail::LocalResult& lr) {
    CriticalPoint cp;
    cp.d_star = static_cast<double>(lr.value);
    cp.x_star = detail::lift_point(r, lr.z, f.nvars());
    cp.which_beta = freed;
    cp.stopped_below = true;
    cp.residual = 0;
    return cp;
  };
  for (const auto& s : starts) {
    auto lr = detail::minimize_difference(r.g, s, opt, stop_below);
    if (record(lr)) return finish_below(lr);
  }

  auto best_index = [&]() {
    std::size_t bi = found.size();
    for (std::size_t i = 0; i < found.size(); ++i)
      if (found[i].converged && (bi == found.size() || found[i].value < found[bi].value)) bi = i;
    return bi;
  };
  std::size_t bi = best_index();
  if (bi == found.size()) throw NumericalFailure("no start converged to a stationary point");

  // sampling check around the best point
  std::uniform_real_distribution<double> near(-1.0, 1.0);
  for (int round = 0; round < 3; ++round) {
    const detail::LocalResult best = found[bi];
    const long double margin = 1e-9L * std::max(1.0L, r.g.positive_part(best.z));
    std::optional<detail::Vec> lower;
    long double lower_val = best.value;
    for (int s = 0; s < opt.samples; ++s) {
      double radius = s % 2 == 0 ? 1.0 : 4.0;
      detail::Vec v = best.z;
      for (Eigen::Index k = 0; k < v.size(); ++k) v(k) += radius * near(rng);
      long double val = r.g.value(v);
      if (val < lower_val - margin) {
        lower_val = val;
        lower = v;
      }
    }
    if (!lower) break;
    auto lr = detail::minimize_difference(r.g, *lower, opt, stop_below);
    if (record(lr)) return finish_below(lr);
    if (!lr.converged) throw NumericalFailure("sampling found a lower value but Newton did not converge");
    bi = best_index();
    if (round == 2) throw NumericalFailure("sampling keeps finding lower objective values");
  }

  const detail::LocalResult& best = found[bi];
  CriticalPoint cp;
  cp.d_star = static_cast<double>(best.value);
  cp.x_star = detail::lift_point(r, best.z, f.nvars());
  cp.which_beta = freed;
  cp.converged = true;
  cp.residual = detail::stationarity_residual(r, best.z, cp.d_star);
  const long double tie = 1e-9L * std::max(1.0L, r.g.positive_part(best.z));
  for (const auto& lr : found) {
    if (!lr.converged || lr.value > best.value + tie) continue;
    auto x = detail::lift_point(r, lr.z, f.nvars());
    bool dup = false;
    for (const auto& m : cp.minimizers) {
      double diff = 0;
      for (std::size_t k = 0; k < x.size(); ++k) diff = std::max(diff, std::fabs(std::log(x[k] / m[k])));
      if (diff < 1e-6) dup = true;
    }
    if (!dup) cp.minimizers.push_back(std::move(x));
  }
  if (!(cp.residual < 1e-9)) throw NumericalFailure("stationarity residual too large", cp.residual);
  return cp;
}

}  // namespace sonc
