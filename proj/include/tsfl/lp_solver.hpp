#pragma once

#include <memory>
#include <string>
#include <vector>

namespace tsfl {

enum class RowSense { kLessEqual, kGreaterEqual, kEqual };

struct LpEntry {
  int row;
  int col;
  double value;
};

// Maximize objective . x subject to row senses and column bounds.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  std::vector<RowSense> row_sense;
  std::vector<double> row_rhs;
  std::vector<LpEntry> entries;  // row-major after sort_entries()

  int num_cols() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(row_rhs.size()); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kError };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::kError;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
  std::string message;
};

class LpSolver {
 public:
  virtual ~LpSolver() = default;
  virtual LpResult solve(const LinearProgram& lp) = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  int max_iterations = 200000;
  int degenerate_streak_for_bland = 50;
};

// Dense bounded-variable two-phase primal simplex.
class DenseSimplex final : public LpSolver {
 public:
  explicit DenseSimplex(SimplexOptions options = {}) : options_(options) {}
  LpResult solve(const LinearProgram& lp) override;

 private:
  SimplexOptions options_;
};

std::unique_ptr<LpSolver> make_default_solver();

}  // namespace tsfl
