#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "intersim/trajectory.hpp"

namespace intersim {

struct FitConfig {
  double w1 = 0.7;   // position
  double w2 = 30.0;  // per-axis velocity continuity
  double w3 = 20.0;  // per-axis local centering
  double w4 = 30.0;  // combined-axis continuity
  int k = 2;         // local-centering window, frames
  int spline_degree = 3;
  int control_point_spacing = 10;  // frames per control point
  int max_iterations = 500;
  double convergence_tolerance = 1e-6;

  void validate() const {
    if (w1 < 0.0 || w2 < 0.0 || w3 < 0.0 || w4 < 0.0) throw Error("fit weights must be >= 0");
    if (k < 1) throw Error("fit window k must be >= 1");
    if (spline_degree < 2) throw Error("spline degree must be >= 2");
    if (control_point_spacing < 1) throw Error("control point spacing must be >= 1");
    if (max_iterations < 1) throw Error("max_iterations must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Loss terms. Each is a Euclidean norm over per-frame residuals.

inline double loss_position(std::span<const double> fit, std::span<const double> raw) {
  if (fit.size() != raw.size() || fit.empty()) {
    throw Error("loss_position: inputs must be equal-length and non-empty");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < fit.size(); ++i) {
    const double r = fit[i] - raw[i];
    s += r * r;
  }
  return std::sqrt(s);
}

inline double loss_velocity_continuity(std::span<const double> fit) {
  if (fit.size() < 2) throw Error("loss_velocity_continuity: need >= 2 values");
  double s = 0.0;
  for (std::size_t t = 1; t < fit.size(); ++t) {
    const double d = fit[t] - fit[t - 1];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double loss_local_centering(std::span<const double> fit, int k) {
  if (k < 1) throw Error("loss_local_centering: k must be >= 1");
  if (fit.size() < static_cast<std::size_t>(2 * k + 1)) {
    throw Error("loss_local_centering: need >= 2k+1 values");
  }
  double s = 0.0;
  for (std::size_t t = k; t + k < fit.size(); ++t) {
    double avg = 0.0;
    for (int j = 1; j <= k; ++j) avg += fit[t - j] + fit[t + j];
    avg /= 2.0 * k;
    const double r = fit[t] - avg;
    s += r * r;
  }
  return std::sqrt(s);
}

// Continuity of the combined velocity: magnitude differences plus unit-vector
// differences; frames with near-zero speed contribute nothing to the
// direction part.
inline double loss_combined_xy(std::span<const double> fit_x, std::span<const double> fit_y) {
  if (fit_x.size() != fit_y.size()) throw Error("loss_combined_xy: length mismatch");
  if (fit_x.size() < 3) throw Error("loss_combined_xy: need >= 3 values");
  const std::size_t n = fit_x.size();
  double mag_sq = 0.0;
  double dir_sq = 0.0;
  for (std::size_t t = 2; t < n; ++t) {
    const Vec2 v{fit_x[t] - fit_x[t - 1], fit_y[t] - fit_y[t - 1]};
    const Vec2 w{fit_x[t - 1] - fit_x[t - 2], fit_y[t - 1] - fit_y[t - 2]};
    const double nv = v.norm();
    const double nw = w.norm();
    const double a = nv - nw;
    mag_sq += a * a;
    if (nv >= kEps && nw >= kEps) {
      dir_sq += (v / nv - w / nw).norm_sq();
    }
  }
  return std::sqrt(mag_sq) + std::sqrt(dir_sq);
}

// Total loss of a candidate fit, both axes, sharing the combined term once.
inline double total_fit_loss(std::span<const double> fit_x, std::span<const double> fit_y,
                             std::span<const double> raw_x, std::span<const double> raw_y,
                             const FitConfig& cfg) {
  return cfg.w1 * (loss_position(fit_x, raw_x) + loss_position(fit_y, raw_y)) +
         cfg.w2 * (loss_velocity_continuity(fit_x) + loss_velocity_continuity(fit_y)) +
         cfg.w3 * (loss_local_centering(fit_x, cfg.k) + loss_local_centering(fit_y, cfg.k)) +
         cfg.w4 * loss_combined_xy(fit_x, fit_y);
}

// ---------------------------------------------------------------------------
// Clamped uniform B-spline basis.

class BSplineBasis {
 public:
  BSplineBasis(int num_ctrl, int degree) : num_ctrl_(num_ctrl), degree_(degree) {
    if (num_ctrl < degree + 1) throw Error("BSplineBasis: need >= degree+1 control points");
    const int interior = num_ctrl - degree - 1;
    knots_.assign(degree + 1, 0.0);
    for (int i = 1; i <= interior; ++i) {
      knots_.push_back(static_cast<double>(i) / (interior + 1));
    }
    knots_.insert(knots_.end(), degree + 1, 1.0);
  }

  int num_ctrl() const { return num_ctrl_; }

  // All basis function values at parameter u in [0, 1].
  std::vector<double> row(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    const int d = degree_;
    int span = num_ctrl_ - 1;
    if (u < 1.0) {
      span = d;
      while (span + 1 < num_ctrl_ && u >= knots_[span + 1]) ++span;
    }
    std::vector<double> n(d + 1, 0.0);
    std::vector<double> left(d + 1, 0.0);
    std::vector<double> right(d + 1, 0.0);
    n[0] = 1.0;
    for (int j = 1; j <= d; ++j) {
      left[j] = u - knots_[span + 1 - j];
      right[j] = knots_[span + j] - u;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double temp = n[r] / (right[r + 1] + left[j - r]);
        n[r] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      n[j] = saved;
    }
    std::vector<double> out(num_ctrl_, 0.0);
    for (int r = 0; r <= d; ++r) out[span - d + r] = n[r];
    return out;
  }

 private:
  int num_ctrl_;
  int degree_;
  std::vector<double> knots_;
};

// ---------------------------------------------------------------------------
// The curve-fitting problem: control points of one B-spline per axis,
// objective = total_fit_loss of the evaluated curve.

class TrajectoryFitProblem {
 public:
  TrajectoryFitProblem(std::vector<double> raw_x, std::vector<double> raw_y,
                       std::vector<double> params, const FitConfig& cfg)
      : cfg_(cfg),
        n_(static_cast<int>(raw_x.size())),
        raw_x_(std::move(raw_x)),
        raw_y_(std::move(raw_y)),
        basis_(num_ctrl_for(n_, cfg), cfg.spline_degree) {
    cfg_.validate();
    if (raw_x_.size() != raw_y_.size()) throw Error("fit: axis length mismatch");
    if (n_ < 2 * cfg_.k + 1) throw Error("fit: need >= 2k+1 samples");
    b_.resize(n_, basis_.num_ctrl());
    for (int i = 0; i < n_; ++i) {
      const auto r = basis_.row(params[static_cast<std::size_t>(i)]);
      for (int j = 0; j < basis_.num_ctrl(); ++j) b_(i, j) = r[static_cast<std::size_t>(j)];
    }
  }

  int num_ctrl() const { return basis_.num_ctrl(); }

  // Control vector layout: [cx; cy].
  Eigen::VectorXd initial_guess() const {
    const Eigen::MatrixXd bt_b = b_.transpose() * b_;
    Eigen::MatrixXd reg = bt_b;
    reg.diagonal().array() += 1e-10 * (1.0 + bt_b.trace());
    const auto solver = reg.ldlt();
    Eigen::VectorXd c(2 * num_ctrl());
    c.head(num_ctrl()) =
        solver.solve(b_.transpose() * Eigen::Map<const Eigen::VectorXd>(raw_x_.data(), n_));
    c.tail(num_ctrl()) =
        solver.solve(b_.transpose() * Eigen::Map<const Eigen::VectorXd>(raw_y_.data(), n_));
    return c;
  }

  void evaluate(const Eigen::VectorXd& c, std::vector<double>& fx, std::vector<double>& fy) const {
    const Eigen::VectorXd ex = b_ * c.head(num_ctrl());
    const Eigen::VectorXd ey = b_ * c.tail(num_ctrl());
    fx.assign(ex.data(), ex.data() + n_);
    fy.assign(ey.data(), ey.data() + n_);
  }

  double loss(const Eigen::VectorXd& c) const {
    std::vector<double> fx, fy;
    evaluate(c, fx, fy);
    return total_fit_loss(fx, fy, raw_x_, raw_y_, cfg_);
  }

  // Analytic gradient of the total loss with respect to the control points.
  Eigen::VectorXd gradient(const Eigen::VectorXd& c) const {
    std::vector<double> fx, fy;
    evaluate(c, fx, fy);
    const int n = n_;

    std::vector<double> gx(n, 0.0);
    std::vector<double> gy(n, 0.0);

    // Position term.
    accumulate_position(fx, raw_x_, gx);
    accumulate_position(fy, raw_y_, gy);

    // Per-axis velocity continuity.
    accumulate_velocity(fx, gx);
    accumulate_velocity(fy, gy);

    // Per-axis local centering.
    accumulate_centering(fx, gx);
    accumulate_centering(fy, gy);

    // Combined term, via gradients w.r.t. per-frame velocities.
    accumulate_combined(fx, fy, gx, gy);

    Eigen::VectorXd grad(2 * num_ctrl());
    grad.head(num_ctrl()) = b_.transpose() * Eigen::Map<const Eigen::VectorXd>(gx.data(), n);
    grad.tail(num_ctrl()) = b_.transpose() * Eigen::Map<const Eigen::VectorXd>(gy.data(), n);
    return grad;
  }

  struct SolveResult {
    Eigen::VectorXd control;
    double loss = 0.0;
    int iterations = 0;
    bool converged = false;
  };

  // Gradient descent with backtracking line search from the least-squares
  // position fit; keeps the best iterate seen.
  SolveResult solve() const {
    SolveResult res;
    Eigen::VectorXd c = initial_guess();
    double current = loss(c);
    res.control = c;
    res.loss = current;

    double step = 1e-2;
    for (int iter = 0; iter < cfg_.max_iterations; ++iter) {
      res.iterations = iter + 1;
      const Eigen::VectorXd g = gradient(c);
      const double g_norm_sq = g.squaredNorm();
      if (g_norm_sq < 1e-18) {
        res.converged = true;
        break;
      }
      bool accepted = false;
      while (step > 1e-14) {
        const Eigen::VectorXd trial = c - step * g;
        const double trial_loss = loss(trial);
        if (trial_loss <= current - 1e-4 * step * g_norm_sq) {
          const double rel_change = (current - trial_loss) / std::max(current, 1e-12);
          c = trial;
          current = trial_loss;
          accepted = true;
          if (current < res.loss) {
            res.loss = current;
            res.control = c;
          }
          if (rel_change < cfg_.convergence_tolerance) {
            res.converged = true;
          }
          break;
        }
        step *= 0.5;
      }
      if (!accepted || res.converged) {
        res.converged = res.converged || !accepted;
        break;
      }
      step *= 1.8;
    }
    return res;
  }

 private:
  static int num_ctrl_for(int n, const FitConfig& cfg) {
    const int segments = (n + cfg.control_point_spacing - 1) / cfg.control_point_spacing;
    return std::clamp(segments + cfg.spline_degree, cfg.spline_degree + 1, n);
  }

  void accumulate_position(const std::vector<double>& fit, const std::vector<double>& raw,
                           std::vector<double>& g) const {
    double norm = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double r = fit[i] - raw[i];
      norm += r * r;
    }
    norm = std::sqrt(norm);
    if (norm < kEps) return;
    for (int i = 0; i < n_; ++i) g[i] += cfg_.w1 * (fit[i] - raw[i]) / norm;
  }

  void accumulate_velocity(const std::vector<double>& fit, std::vector<double>& g) const {
    double norm = 0.0;
    for (int t = 1; t < n_; ++t) {
      const double d = fit[t] - fit[t - 1];
      norm += d * d;
    }
    norm = std::sqrt(norm);
    if (norm < kEps) return;
    for (int t = 1; t < n_; ++t) {
      const double coeff = cfg_.w2 * (fit[t] - fit[t - 1]) / norm;
      g[t] += coeff;
      g[t - 1] -= coeff;
    }
  }

  void accumulate_centering(const std::vector<double>& fit, std::vector<double>& g) const {
    const int k = cfg_.k;
    double norm = 0.0;
    std::vector<double> resid(n_, 0.0);
    for (int t = k; t + k < n_; ++t) {
      double avg = 0.0;
      for (int j = 1; j <= k; ++j) avg += fit[t - j] + fit[t + j];
      avg /= 2.0 * k;
      resid[t] = fit[t] - avg;
      norm += resid[t] * resid[t];
    }
    norm = std::sqrt(norm);
    if (norm < kEps) return;
    for (int t = k; t + k < n_; ++t) {
      const double coeff = cfg_.w3 * resid[t] / norm;
      g[t] += coeff;
      for (int j = 1; j <= k; ++j) {
        g[t - j] -= coeff / (2.0 * k);
        g[t + j] -= coeff / (2.0 * k);
      }
    }
  }

  void accumulate_combined(const std::vector<double>& fx, const std::vector<double>& fy,
                           std::vector<double>& gx, std::vector<double>& gy) const {
    const int n = n_;
    std::vector<Vec2> v(n);  // v[t] valid for t >= 1
    for (int t = 1; t < n; ++t) v[t] = {fx[t] - fx[t - 1], fy[t] - fy[t - 1]};

    // Magnitude part.
    std::vector<double> a(n, 0.0);  // a[t] valid for t >= 2
    double mag_norm = 0.0;
    for (int t = 2; t < n; ++t) {
      a[t] = v[t].norm() - v[t - 1].norm();
      mag_norm += a[t] * a[t];
    }
    mag_norm = std::sqrt(mag_norm);

    // Direction part.
    std::vector<Vec2> u(n);
    std::vector<bool> unit_ok(n, false);
    for (int t = 1; t < n; ++t) {
      const double m = v[t].norm();
      if (m >= kEps) {
        u[t] = v[t] / m;
        unit_ok[t] = true;
      }
    }
    std::vector<Vec2> bdiff(n);  // b[t] valid for t >= 2
    double dir_norm = 0.0;
    for (int t = 2; t < n; ++t) {
      if (unit_ok[t] && unit_ok[t - 1]) {
        bdiff[t] = u[t] - u[t - 1];
        dir_norm += bdiff[t].norm_sq();
      }
    }
    dir_norm = std::sqrt(dir_norm);

    std::vector<Vec2> dv(n);  // gradient w.r.t. v[t]
    if (mag_norm >= kEps) {
      for (int t = 1; t < n; ++t) {
        if (!unit_ok[t]) continue;
        double coeff = 0.0;
        if (t >= 2) coeff += a[t];
        if (t + 1 < n) coeff -= a[t + 1];
        dv[t] += u[t] * (cfg_.w4 * coeff / mag_norm);
      }
    }
    if (dir_norm >= kEps) {
      for (int t = 1; t < n; ++t) {
        if (!unit_ok[t]) continue;
        Vec2 w{0.0, 0.0};
        if (t >= 2 && unit_ok[t - 1]) w += bdiff[t];
        if (t + 1 < n && unit_ok[t + 1]) w -= bdiff[t + 1];
        // Jacobian of v/|v|: (I - u u^T) / |v|.
        const double inv_m = 1.0 / v[t].norm();
        const Vec2 jw = (w - u[t] * dot(u[t], w)) * inv_m;
        dv[t] += jw * (cfg_.w4 / dir_norm);
      }
    }

    for (int t = 1; t < n; ++t) {
      gx[t] += dv[t].x;
      gx[t - 1] -= dv[t].x;
      gy[t] += dv[t].y;
      gy[t - 1] -= dv[t].y;
    }
  }

  FitConfig cfg_;
  int n_;
  std::vector<double> raw_x_;
  std::vector<double> raw_y_;
  BSplineBasis basis_;
  Eigen::MatrixXd b_;
};

struct FitResult {
  Trajectory trajectory;
  bool converged = false;
  int iterations = 0;
  double raw_loss = 0.0;     // the raw samples evaluated as their own fit
  double fitted_loss = 0.0;  // loss of the returned curve
};

// Denoises one trajectory by optimizing B-spline control points against the
// weighted loss; preserves the frame set. Non-convergence returns the best
// iterate with converged = false.
inline FitResult fit_trajectory(const Trajectory& raw, const FitConfig& cfg = {}) {
  cfg.validate();
  raw.validate();
  const int n = static_cast<int>(raw.samples.size());
  if (n < 2 * cfg.k + 1) {
    throw Error("fit_trajectory '" + raw.agent_id + "': need >= 2k+1 samples");
  }

  std::vector<double> params(n);
  const double f0 = static_cast<double>(raw.samples.front().frame);
  const double f1 = static_cast<double>(raw.samples.back().frame);
  for (int i = 0; i < n; ++i) {
    params[i] = (static_cast<double>(raw.samples[i].frame) - f0) / (f1 - f0);
  }

  TrajectoryFitProblem problem(raw.xs(), raw.ys(), params, cfg);
  const auto sol = problem.solve();

  std::vector<double> fx, fy;
  problem.evaluate(sol.control, fx, fy);

  FitResult out;
  out.trajectory = raw;
  for (int i = 0; i < n; ++i) {
    out.trajectory.samples[i].x = fx[i];
    out.trajectory.samples[i].y = fy[i];
  }
  out.converged = sol.converged;
  out.iterations = sol.iterations;
  out.fitted_loss = sol.loss;
  const auto rx = raw.xs();
  const auto ry = raw.ys();
  out.raw_loss = total_fit_loss(rx, ry, rx, ry, cfg);
  return out;
}

}  // namespace intersim
