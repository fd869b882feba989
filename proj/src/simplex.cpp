#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "tsfl/lp_solver.hpp"

namespace tsfl {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kError:
      return "error";
  }
  return "error";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class State : std::uint8_t { kBasic, kLower, kUpper, kFree, kDead };

enum class Outcome { kOptimal, kUnbounded, kLimit };

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt), m_(lp.num_rows()), n_(lp.num_cols()) {}

  LpResult run();

 private:
  double& t(int i, int j) { return tab_[static_cast<size_t>(i) * cols_ + j]; }
  bool is_artificial(int j) const { return j >= n_ + m_; }

  void setup();
  void price_from(const std::vector<double>& cost);
  Outcome iterate(const std::vector<double>& cost);
  void pivot(int r, int q);
  void drive_out_artificials();
  void refine();

  const LinearProgram& lp_;
  const SimplexOptions& opt_;
  int m_;
  int n_;
  int cols_ = 0;
  std::vector<double> tab_;
  std::vector<double> dense_a_;  // m x n original matrix
  std::vector<double> lb_, ub_, x_, d_;
  std::vector<State> state_;
  std::vector<int> basis_;
  std::vector<int> art_row_;  // artificial column -> row
  std::vector<double> art_sign_;
  std::vector<int> nz_;
  int iterations_ = 0;
};

void Tableau::setup() {
  dense_a_.assign(static_cast<size_t>(m_) * n_, 0.0);
  for (const LpEntry& e : lp_.entries) {
    dense_a_[static_cast<size_t>(e.row) * n_ + e.col] += e.value;
  }
  std::vector<double> start(n_);
  for (int j = 0; j < n_; ++j) {
    const double lo = lp_.col_lower[j];
    const double hi = lp_.col_upper[j];
    start[j] = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
  }
  std::vector<double> resid(m_);
  std::vector<bool> needs_art(m_, false);
  int arts = 0;
  for (int i = 0; i < m_; ++i) {
    double r = lp_.row_rhs[i];
    for (int j = 0; j < n_; ++j) r -= dense_a_[static_cast<size_t>(i) * n_ + j] * start[j];
    resid[i] = r;
    const RowSense s = lp_.row_sense[i];
    const double slo = s == RowSense::kLessEqual ? 0.0 : (s == RowSense::kEqual ? 0.0 : -kInf);
    const double shi = s == RowSense::kGreaterEqual ? 0.0 : (s == RowSense::kEqual ? 0.0 : kInf);
    if (r < slo - opt_.feasibility_tol || r > shi + opt_.feasibility_tol) {
      needs_art[i] = true;
      ++arts;
    }
  }
  cols_ = n_ + m_ + arts;
  tab_.assign(static_cast<size_t>(m_) * cols_, 0.0);
  lb_.assign(cols_, 0.0);
  ub_.assign(cols_, 0.0);
  x_.assign(cols_, 0.0);
  state_.assign(cols_, State::kLower);
  basis_.assign(m_, -1);
  art_row_.assign(arts, -1);
  art_sign_.assign(arts, 1.0);
  for (int j = 0; j < n_; ++j) {
    lb_[j] = lp_.col_lower[j];
    ub_[j] = lp_.col_upper[j];
    x_[j] = start[j];
    if (std::isfinite(lb_[j])) {
      state_[j] = State::kLower;
    } else if (std::isfinite(ub_[j])) {
      state_[j] = State::kUpper;
    } else {
      state_[j] = State::kFree;
    }
  }
  int next_art = 0;
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < n_; ++j) t(i, j) = dense_a_[static_cast<size_t>(i) * n_ + j];
    const int s = n_ + i;
    t(i, s) = 1.0;
    const RowSense sense = lp_.row_sense[i];
    lb_[s] = sense == RowSense::kGreaterEqual ? -kInf : 0.0;
    ub_[s] = sense == RowSense::kLessEqual ? kInf : 0.0;
    if (!needs_art[i]) {
      basis_[i] = s;
      state_[s] = State::kBasic;
      x_[s] = resid[i];
      continue;
    }
    x_[s] = 0.0;
    state_[s] = sense == RowSense::kGreaterEqual ? State::kUpper : State::kLower;
    const int a = n_ + m_ + next_art;
    const double sign = resid[i] > 0 ? 1.0 : -1.0;
    art_row_[next_art] = i;
    art_sign_[next_art] = sign;
    ++next_art;
    t(i, a) = sign;
    lb_[a] = 0.0;
    ub_[a] = kInf;
    x_[a] = std::abs(resid[i]);
    basis_[i] = a;
    state_[a] = State::kBasic;
    if (sign < 0) {
      for (int j = 0; j < cols_; ++j) t(i, j) = -t(i, j);
    }
  }
}

void Tableau::price_from(const std::vector<double>& cost) {
  d_ = cost;
  for (int i = 0; i < m_; ++i) {
    const double cb = cost[basis_[i]];
    if (cb == 0.0) continue;
    const double* row = &tab_[static_cast<size_t>(i) * cols_];
    for (int j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
  }
  for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
}

void Tableau::pivot(int r, int q) {
  double* prow = &tab_[static_cast<size_t>(r) * cols_];
  const double inv = 1.0 / prow[q];
  nz_.clear();
  for (int j = 0; j < cols_; ++j) {
    if (prow[j] == 0.0) continue;
    if (state_[j] == State::kDead) {
      prow[j] = 0.0;
      continue;
    }
    prow[j] *= inv;
    nz_.push_back(j);
  }
  prow[q] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* row = &tab_[static_cast<size_t>(i) * cols_];
    const double f = row[q];
    if (f == 0.0) continue;
    for (int j : nz_) row[j] -= f * prow[j];
    row[q] = 0.0;
  }
  const double f = d_[q];
  if (f != 0.0) {
    for (int j : nz_) d_[j] -= f * prow[j];
  }
  d_[q] = 0.0;
}

Outcome Tableau::iterate(const std::vector<double>& cost) {
  price_from(cost);
  int streak = 0;
  bool bland = false;
  const double dtol = opt_.optimality_tol;
  while (true) {
    if (iterations_ >= opt_.max_iterations) return Outcome::kLimit;
    int q = -1;
    double best = 0.0;
    for (int j = 0; j < cols_; ++j) {
      const State s = state_[j];
      if (s == State::kBasic || s == State::kDead) continue;
      if (lb_[j] == ub_[j]) continue;
      const double dj = d_[j];
      double score = 0.0;
      if (s == State::kLower) {
        score = dj > dtol ? dj : 0.0;
      } else if (s == State::kUpper) {
        score = dj < -dtol ? -dj : 0.0;
      } else {
        score = std::abs(dj) > dtol ? std::abs(dj) : 0.0;
      }
      if (score <= 0.0) continue;
      if (bland) {
        q = j;
        break;
      }
      if (score > best) {
        best = score;
        q = j;
      }
    }
    if (q < 0) return Outcome::kOptimal;
    ++iterations_;
    const double dir = d_[q] > 0 ? 1.0 : -1.0;
    const double ftol = opt_.feasibility_tol;

    double harris = kInf;
    for (int i = 0; i < m_; ++i) {
      const double a = dir * tab_[static_cast<size_t>(i) * cols_ + q];
      if (std::abs(a) <= opt_.pivot_tol) continue;
      const int k = basis_[i];
      double ratio = kInf;
      if (a > 0) {
        if (std::isfinite(lb_[k])) ratio = (x_[k] - lb_[k] + ftol) / a;
      } else if (std::isfinite(ub_[k])) {
        ratio = (ub_[k] - x_[k] + ftol) / -a;
      }
      harris = std::min(harris, ratio);
    }
    const double span = ub_[q] - lb_[q];
    if (!std::isfinite(harris) && !std::isfinite(span)) {
      return Outcome::kUnbounded;
    }
    int r = -1;
    double step = kInf;
    if (bland) {
      for (int i = 0; i < m_; ++i) {
        const double a = dir * tab_[static_cast<size_t>(i) * cols_ + q];
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const int k = basis_[i];
        double ratio = kInf;
        if (a > 0) {
          if (std::isfinite(lb_[k])) ratio = (x_[k] - lb_[k]) / a;
        } else if (std::isfinite(ub_[k])) {
          ratio = (ub_[k] - x_[k]) / -a;
        }
        ratio = std::max(ratio, 0.0);
        if (ratio < step || (ratio == step && r >= 0 && k < basis_[r])) {
          step = ratio;
          r = i;
        }
      }
    } else {
      double best_piv = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = dir * tab_[static_cast<size_t>(i) * cols_ + q];
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const int k = basis_[i];
        double ratio = kInf;
        if (a > 0) {
          if (std::isfinite(lb_[k])) ratio = (x_[k] - lb_[k]) / a;
        } else if (std::isfinite(ub_[k])) {
          ratio = (ub_[k] - x_[k]) / -a;
        }
        if (ratio <= harris && std::abs(a) > best_piv) {
          best_piv = std::abs(a);
          step = std::max(ratio, 0.0);
          r = i;
        }
      }
    }
    if (std::isfinite(span) && span <= step) {
      for (int i = 0; i < m_; ++i) {
        const double a = tab_[static_cast<size_t>(i) * cols_ + q];
        if (a != 0.0) x_[basis_[i]] -= dir * span * a;
      }
      if (state_[q] == State::kLower) {
        state_[q] = State::kUpper;
        x_[q] = ub_[q];
      } else {
        state_[q] = State::kLower;
        x_[q] = lb_[q];
      }
      streak = 0;
      bland = false;
      continue;
    }
    if (r < 0) return Outcome::kUnbounded;
    const double a_rq = dir * tab_[static_cast<size_t>(r) * cols_ + q];
    for (int i = 0; i < m_; ++i) {
      const double a = tab_[static_cast<size_t>(i) * cols_ + q];
      if (a != 0.0) x_[basis_[i]] -= dir * step * a;
    }
    x_[q] += dir * step;
    const int leaving = basis_[r];
    if (is_artificial(leaving)) {
      state_[leaving] = State::kDead;
      x_[leaving] = 0.0;
    } else if (a_rq > 0) {
      state_[leaving] = State::kLower;
      x_[leaving] = lb_[leaving];
    } else {
      state_[leaving] = State::kUpper;
      x_[leaving] = ub_[leaving];
    }
    pivot(r, q);
    basis_[r] = q;
    state_[q] = State::kBasic;
    if (step <= 1e-12) {
      if (++streak > opt_.degenerate_streak_for_bland) bland = true;
    } else {
      streak = 0;
      bland = false;
    }
  }
}

void Tableau::drive_out_artificials() {
  for (int r = 0; r < m_; ++r) {
    const int a = basis_[r];
    if (!is_artificial(a)) continue;
    const double* row = &tab_[static_cast<size_t>(r) * cols_];
    double scale = 0.0;
    for (int j = 0; j < n_ + m_; ++j) scale = std::max(scale, std::abs(row[j]));
    int best = -1;
    double best_abs = 1e-7 * std::max(scale, 1.0);
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == State::kBasic || state_[j] == State::kDead) continue;
      if (std::abs(row[j]) > best_abs) {
        best_abs = std::abs(row[j]);
        best = j;
      }
    }
    if (best < 0) continue;  // redundant row; the artificial stays basic at 0
    state_[a] = State::kDead;
    x_[a] = 0.0;
    pivot(r, best);
    basis_[r] = best;
    state_[best] = State::kBasic;
  }
  for (int j = n_ + m_; j < cols_; ++j) {
    ub_[j] = 0.0;
    if (state_[j] != State::kBasic) state_[j] = State::kDead;
  }
}

void Tableau::refine() {
  if (m_ == 0) return;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
  Eigen::VectorXd rhs(m_);
  for (int i = 0; i < m_; ++i) rhs[i] = lp_.row_rhs[i];
  auto column_into = [&](int k, int dest) {
    if (k < n_) {
      for (int i = 0; i < m_; ++i) b(i, dest) = dense_a_[static_cast<size_t>(i) * n_ + k];
    } else if (k < n_ + m_) {
      b(k - n_, dest) = 1.0;
    } else {
      const int idx = k - n_ - m_;
      b(art_row_[idx], dest) = art_sign_[idx];
    }
  };
  for (int i = 0; i < m_; ++i) column_into(basis_[i], i);
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == State::kBasic || x_[j] == 0.0) continue;
    if (j < n_) {
      for (int i = 0; i < m_; ++i) rhs[i] -= dense_a_[static_cast<size_t>(i) * n_ + j] * x_[j];
    } else {
      rhs[j - n_] -= x_[j];
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
  Eigen::VectorXd xb = lu.solve(rhs);
  if (!xb.allFinite()) return;
  const double resid = (b * xb - rhs).lpNorm<Eigen::Infinity>();
  if (resid > 1e-9 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())) return;
  for (int i = 0; i < m_; ++i) {
    const int k = basis_[i];
    double v = xb[i];
    if (v < lb_[k] && v > lb_[k] - 1e-7) v = lb_[k];
    if (v > ub_[k] && v < ub_[k] + 1e-7) v = ub_[k];
    x_[k] = v;
  }
}

LpResult Tableau::run() {
  LpResult result;
  for (int j = 0; j < n_; ++j) {
    if (lp_.col_lower[j] > lp_.col_upper[j]) {
      result.status = LpStatus::kInfeasible;
      result.message = "column bounds cross";
      return result;
    }
  }
  setup();
  const int arts = cols_ - n_ - m_;
  if (arts > 0) {
    std::vector<double> phase1(cols_, 0.0);
    for (int j = n_ + m_; j < cols_; ++j) phase1[j] = -1.0;
    const Outcome o = iterate(phase1);
    if (o == Outcome::kLimit) {
      result.status = LpStatus::kError;
      result.message = "iteration limit in phase 1";
      return result;
    }
    double infeas = 0.0;
    double bscale = 1.0;
    for (double v : lp_.row_rhs) bscale = std::max(bscale, std::abs(v));
    for (int j = n_ + m_; j < cols_; ++j) {
      if (state_[j] == State::kBasic) infeas += x_[j];
    }
    if (infeas > 1e-8 * bscale) {
      result.status = LpStatus::kInfeasible;
      result.iterations = iterations_;
      return result;
    }
    drive_out_artificials();
  }
  std::vector<double> cost(cols_, 0.0);
  for (int j = 0; j < n_; ++j) cost[j] = lp_.objective[j];
  const Outcome o = iterate(cost);
  result.iterations = iterations_;
  if (o == Outcome::kLimit) {
    result.status = LpStatus::kError;
    result.message = "iteration limit in phase 2";
    return result;
  }
  if (o == Outcome::kUnbounded) {
    result.status = LpStatus::kUnbounded;
    return result;
  }
  refine();
  result.status = LpStatus::kOptimal;
  result.x.assign(x_.begin(), x_.begin() + n_);
  result.objective = 0.0;
  for (int j = 0; j < n_; ++j) result.objective += lp_.objective[j] * result.x[j];
  return result;
}

}  // namespace

LpResult DenseSimplex::solve(const LinearProgram& lp) {
  Tableau tableau(lp, options_);
  return tableau.run();
}

std::unique_ptr<LpSolver> make_default_solver() {
  return std::make_unique<DenseSimplex>();
}

}  // namespace tsfl
