#include "skyris/link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "skyris/errors.hpp"
#include "skyris/simd/kernels.hpp"

namespace skyris::link {
namespace {

void check_noise(double p_s, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("SINR: noise power must be positive");
  if (!(p_s >= 0.0)) throw DomainError("SINR: transmit power must be non-negative");
}

void check_index(int i, const Eigen::MatrixXd& gains, const RsmaAction& act) {
  if (i < 0 || i >= gains.rows() || gains.cols() != act.num_users() + 1)
    throw StructuralError("SINR: user index or gain table does not match the action");
}

}  // namespace

Eigen::RowVectorXcd equivalent_channel(const Eigen::VectorXcd& h, const Eigen::VectorXcd& g,
                                       const bdris::BdRisMatrix& phi, const Eigen::MatrixXcd& hu) {
  if (hu.cols() != h.size() || hu.rows() != g.size() || phi.elements() != g.size())
    throw StructuralError("equivalent_channel: dimension mismatch");
  return h.adjoint() + g.adjoint() * phi.apply(hu);
}

std::vector<Eigen::RowVectorXcd> equivalent_channels(const channel::ChannelSet& cs,
                                                     const bdris::BdRisMatrix& phi) {
  const Eigen::MatrixXcd cascade = phi.apply(cs.hu);
  std::vector<Eigen::RowVectorXcd> out;
  out.reserve(cs.h.size());
  for (size_t i = 0; i < cs.h.size(); ++i) {
    if (cs.g[i].size() != cascade.rows() || cs.h[i].size() != cascade.cols())
      throw StructuralError("equivalent_channels: dimension mismatch");
    out.push_back(cs.h[i].adjoint() + cs.g[i].adjoint() * cascade);
  }
  return out;
}

Eigen::MatrixXd stream_gains(const std::vector<Eigen::RowVectorXcd>& heq, const RsmaAction& act) {
  const int n_users = act.num_users();
  if (static_cast<int>(heq.size()) != n_users || static_cast<int>(act.w.size()) != n_users)
    throw StructuralError("stream_gains: user count mismatch");
  Eigen::MatrixXd gains(n_users, n_users + 1);
  for (int i = 0; i < n_users; ++i) {
    const auto n = static_cast<size_t>(heq[i].size());
    // H_eq,i w is the unconjugated product of the row with the precoder
    auto row = std::span<const std::complex<double>>(heq[i].data(), n);
    if (act.w_c.size() != heq[i].size()) throw StructuralError("stream_gains: precoder length mismatch");
    gains(i, 0) = std::norm(simd::cdotu(row, {act.w_c.data(), n}));
    for (int j = 0; j < n_users; ++j) {
      if (act.w[j].size() != heq[i].size()) throw StructuralError("stream_gains: precoder length mismatch");
      gains(i, j + 1) = std::norm(simd::cdotu(row, {act.w[j].data(), n}));
    }
  }
  return gains;
}

double sinr_common(int i, const Eigen::MatrixXd& gains, const RsmaAction& act, double p_s, double sigma2) {
  check_noise(p_s, sigma2);
  check_index(i, gains, act);
  double interference = sigma2;
  for (int j = 0; j < act.num_users(); ++j) interference += p_s * act.a[j] * gains(i, j + 1);
  return p_s * act.a_c * gains(i, 0) / interference;
}

double sinr_private(int i, const Eigen::MatrixXd& gains, const RsmaAction& act, double p_s, double sigma2) {
  check_noise(p_s, sigma2);
  check_index(i, gains, act);
  double interference = sigma2;
  for (int j = 0; j < act.num_users(); ++j)
    if (j != i) interference += p_s * act.a[j] * gains(i, j + 1);
  return p_s * act.a[i] * gains(i, i + 1) / interference;
}

LinkReport rates(const std::vector<Eigen::RowVectorXcd>& heq, const RsmaAction& act, double p_s,
                 double sigma2) {
  const Eigen::MatrixXd gains = stream_gains(heq, act);
  const int n_users = act.num_users();
  if (static_cast<int>(act.delta.size()) != n_users) throw StructuralError("rates: delta length mismatch");
  LinkReport rep;
  rep.r_c = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_users; ++i) {
    rep.sinr_common.push_back(sinr_common(i, gains, act, p_s, sigma2));
    rep.sinr_private.push_back(sinr_private(i, gains, act, p_s, sigma2));
    rep.r_c = std::min(rep.r_c, std::log2(1.0 + rep.sinr_common.back()));
  }
  rep.sum_rate = rep.r_c;
  for (int i = 0; i < n_users; ++i) {
    const double rp = std::log2(1.0 + rep.sinr_private[i]);
    rep.r_private.push_back(rp);
    rep.r_total.push_back(rp + act.delta[i] * rep.r_c);
    rep.sum_rate += rp;
  }
  return rep;
}

double energy_efficiency(const LinkReport& report, double p_total, double bandwidth, bool scaled) {
  if (!(p_total > 0.0)) throw DomainError("energy_efficiency: total power must be positive");
  const double ee = report.sum_rate / p_total;
  return scaled ? ee * bandwidth : ee;
}

}  // namespace skyris::link
