#pragma once

#include <Eigen/Dense>
#include <vector>

#include "skyris/config.hpp"

namespace skyris::bdris {

using Block = Eigen::Matrix2cd;

// Group-connected reflection matrix: M/2 symmetric 2x2 blocks (bd_active) or
// M scalars on the diagonal (diag_*).
struct BdRisMatrix {
  RisMode mode = RisMode::bd_active;
  std::vector<Block> blocks;
  Eigen::VectorXcd diag;
  double a_max = 1.0;

  int elements() const;
  Eigen::MatrixXcd dense() const;
  // Phi * x without forming the dense matrix.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x) const;
  double max_singular_value() const;
  double symmetry_defect() const;

  static BdRisMatrix zero(RisMode mode, int elements, double a_max);
};

Eigen::MatrixXcd assemble(const std::vector<Block>& blocks);

struct Takagi {
  Eigen::Matrix2cd u;      // unitary
  Eigen::Vector2d sigma;   // descending, non-negative
};

// A = U diag(sigma) U^T for complex symmetric 2x2 A.
Takagi takagi(const Block& a);
Eigen::Vector2d singular_values(const Block& a);

// Clip the Takagi values of a symmetric block at a_max.
Block project_block(const Block& raw, double a_max);

// p_s (a_c |Phi H_u w_c|^2 + sum_i a_i |Phi H_u w_i|^2)
double ris_output_power(const BdRisMatrix& phi, const Eigen::MatrixXcd& hu, double a_c,
                        const Eigen::VectorXcd& w_c, const std::vector<double>& a,
                        const std::vector<Eigen::VectorXcd>& w, double p_s);

}  // namespace skyris::bdris
