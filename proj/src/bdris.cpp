#include "skyris/bdris.hpp"

#include <cmath>

#include "skyris/errors.hpp"

namespace skyris::bdris {
namespace {

using cplx = std::complex<double>;

constexpr double kSymTol = 1e-12;

void require_symmetric(const Block& a, const char* who) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (std::abs(a(0, 1) - a(1, 0)) > kSymTol * scale)
    throw StructuralError(std::string(who) + ": block is not symmetric");
}

}  // namespace

int BdRisMatrix::elements() const {
  return mode == RisMode::bd_active ? 2 * static_cast<int>(blocks.size()) : static_cast<int>(diag.size());
}

Eigen::MatrixXcd BdRisMatrix::dense() const {
  if (mode == RisMode::bd_active) return assemble(blocks);
  return diag.asDiagonal();
}

Eigen::VectorXcd BdRisMatrix::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != elements()) throw StructuralError("BdRisMatrix::apply: dimension mismatch");
  if (mode != RisMode::bd_active) return diag.cwiseProduct(x);
  Eigen::VectorXcd y(x.size());
  for (size_t g = 0; g < blocks.size(); ++g) y.segment<2>(2 * g) = blocks[g] * x.segment<2>(2 * g);
  return y;
}

Eigen::MatrixXcd BdRisMatrix::apply(const Eigen::MatrixXcd& x) const {
  if (x.rows() != elements()) throw StructuralError("BdRisMatrix::apply: dimension mismatch");
  if (mode != RisMode::bd_active) return diag.asDiagonal() * x;
  Eigen::MatrixXcd y(x.rows(), x.cols());
  for (size_t g = 0; g < blocks.size(); ++g) y.middleRows<2>(2 * g) = blocks[g] * x.middleRows<2>(2 * g);
  return y;
}

double BdRisMatrix::max_singular_value() const {
  double s = 0.0;
  if (mode == RisMode::bd_active) {
    for (const auto& b : blocks) s = std::max(s, singular_values(b)[0]);
  } else if (diag.size() > 0) {
    s = diag.cwiseAbs().maxCoeff();
  }
  return s;
}

double BdRisMatrix::symmetry_defect() const {
  double d = 0.0;
  for (const auto& b : blocks) d = std::max(d, (b - b.transpose()).norm());
  return d;
}

BdRisMatrix BdRisMatrix::zero(RisMode mode, int elements, double a_max) {
  if (elements < 2 || elements % 2) throw StructuralError("BdRisMatrix: element count must be even");
  BdRisMatrix phi;
  phi.mode = mode;
  phi.a_max = a_max;
  if (mode == RisMode::bd_active)
    phi.blocks.assign(elements / 2, Block::Zero());
  else
    phi.diag = Eigen::VectorXcd::Zero(elements);
  return phi;
}

Eigen::MatrixXcd assemble(const std::vector<Block>& blocks) {
  if (blocks.empty()) throw StructuralError("assemble: no blocks");
  const Eigen::Index m = 2 * static_cast<Eigen::Index>(blocks.size());
  Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(m, m);
  for (size_t g = 0; g < blocks.size(); ++g) {
    require_symmetric(blocks[g], "assemble");
    phi.block<2, 2>(2 * g, 2 * g) = blocks[g];
  }
  return phi;
}

Eigen::Vector2d singular_values(const Block& a) {
  // eigenvalues of A^H A = [[p, q], [conj q, r]]
  const Eigen::Matrix2cd g = a.adjoint() * a;
  const double p = g(0, 0).real();
  const double r = g(1, 1).real();
  const double q = std::abs(g(0, 1));
  const double mid = 0.5 * (p + r);
  const double rad = std::hypot(0.5 * (p - r), q);
  const double s1 = std::sqrt(std::max(mid + rad, 0.0));
  const double det = std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
  const double s2 = s1 > 0.0 ? std::min(det / s1, s1) : 0.0;
  return {s1, s2};
}

Takagi takagi(const Block& a) {
  require_symmetric(a, "takagi");
  const Eigen::Vector2d s = singular_values(a);
  Takagi t;
  t.sigma = s;
  if (s[0] == 0.0) {
    t.u = Eigen::Matrix2cd::Identity();
    return t;
  }

  Eigen::Vector2cd v1;
  if (s[0] - s[1] <= 1e-12 * s[0]) {
    // B = A/s is unitary symmetric, so B conj(B) = I and v = x + conj(Bx)
    // satisfies Bv = conj(v).
    const Eigen::Matrix2cd b = a / s[0];
    for (const Eigen::Vector2cd& x : {Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(cplx(0.0, 1.0), 0.0),
                                     Eigen::Vector2cd(0.0, 1.0)}) {
      v1 = x + (b * x).conjugate();
      if (v1.norm() > 1e-6) break;
    }
  } else {
    // top eigenvector of A^H A = [[p, q], [conj q, r]]
    const Eigen::Matrix2cd g = a.adjoint() * a;
    const double p = g(0, 0).real();
    const double r = g(1, 1).real();
    const cplx q = g(0, 1);
    const double lam1 = s[0] * s[0];
    const Eigen::Vector2cd c1(q, lam1 - p);
    const Eigen::Vector2cd c2(lam1 - r, std::conj(q));
    v1 = c1.norm() >= c2.norm() ? c1 : c2;
  }
  v1.normalize();
  const Eigen::Vector2cd v2(-std::conj(v1[1]), std::conj(v1[0]));

  // A v = sigma e^{j psi} conj(v); u = conj(v) e^{j psi/2} gives u^T A u = sigma.
  auto align = [&](const Eigen::Vector2cd& v) {
    const cplx z = v.transpose() * a * v;
    const double psi = std::abs(z) > 0.0 ? std::arg(z) : 0.0;
    return Eigen::Vector2cd(v.conjugate() * std::polar(1.0, 0.5 * psi));
  };
  t.u.col(0) = align(v1);
  t.u.col(1) = align(v2);
  return t;
}

Block project_block(const Block& raw, double a_max) {
  if (!(a_max > 0.0)) throw DomainError("project_block: a_max must be positive");
  require_symmetric(raw, "project_block");
  const Eigen::Vector2d s = singular_values(raw);
  if (s[0] <= a_max * (1.0 + 1e-12)) return raw;
  Block out;
  if (s[0] - s[1] <= 1e-12 * s[0]) {
    out = raw * (a_max / s[0]);
  } else {
    const Takagi t = takagi(raw);
    out.setZero();
    for (int k = 0; k < 2; ++k) out += std::min(t.sigma[k], a_max) * t.u.col(k) * t.u.col(k).transpose();
  }
  return 0.5 * (out + out.transpose());
}

double ris_output_power(const BdRisMatrix& phi, const Eigen::MatrixXcd& hu, double a_c,
                        const Eigen::VectorXcd& w_c, const std::vector<double>& a,
                        const std::vector<Eigen::VectorXcd>& w, double p_s) {
  if (hu.rows() != phi.elements() || hu.cols() != w_c.size() || a.size() != w.size())
    throw StructuralError("ris_output_power: dimension mismatch");
  const Eigen::MatrixXcd ph = phi.apply(hu);
  double total = a_c * (ph * w_c).squaredNorm();
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i].size() != hu.cols()) throw StructuralError("ris_output_power: dimension mismatch");
    total += a[i] * (ph * w[i]).squaredNorm();
  }
  return p_s * total;
}

}  // namespace skyris::bdris
