#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sos {

// Block-diagonal symmetric matrix variable description with linear equality
// constraints A_i . X = b_i and objective C . X. Entries with row < col stand
// for the symmetric pair (value placed at both positions).
struct SdpEntry {
  int constraint;  // -1 for the objective C
  int block;
  int row, col;  // row <= col
  double value;
};

struct SdpProblem {
  std::vector<int> block_sizes;  // negative size = diagonal block (format hint)
  int num_constraints = 0;
  std::vector<SdpEntry> entries;
  std::vector<double> b;
  bool maximize = false;

  void add_entry(int constraint, int block, int row, int col, double value);
  int block_dim(int blk) const { return std::abs(block_sizes[blk]); }
};

enum class SdpStatus { Optimal, IterLimit, NumericalTrouble };

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalTrouble;
  double primal_obj = 0, dual_obj = 0;
  double gap = 1, primal_infeas = 1, dual_infeas = 1;
  std::vector<Eigen::MatrixXd> X, S;
  Eigen::VectorXd y;
  int iterations = 0;
  std::string message;
};

struct SdpOptions {
  double tol_gap = 1e-9;
  double tol_feas = 1e-10;
  int max_iterations = 200;
  double step_fraction = 0.98;
  double initial_scale = 0.0;  // 0: set from data
};

// Dense primal-dual path-following solver (HKM direction with a Mehrotra
// predictor-corrector), deterministic given inputs. Desk scale only.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& opt = {});

}  // namespace sos
