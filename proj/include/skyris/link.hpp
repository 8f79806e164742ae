#pragma once

#include <Eigen/Dense>
#include <vector>

#include "skyris/action.hpp"
#include "skyris/channel.hpp"

namespace skyris::link {

struct LinkReport {
  std::vector<double> sinr_common;
  std::vector<double> sinr_private;
  double r_c = 0.0;
  std::vector<double> r_private;
  std::vector<double> r_total;
  double sum_rate = 0.0;
};

// h_i^H + g_i^H Phi H_u.
Eigen::RowVectorXcd equivalent_channel(const Eigen::VectorXcd& h, const Eigen::VectorXcd& g,
                                       const bdris::BdRisMatrix& phi, const Eigen::MatrixXcd& hu);
std::vector<Eigen::RowVectorXcd> equivalent_channels(const channel::ChannelSet& cs,
                                                     const bdris::BdRisMatrix& phi);

// |H_eq,i w|^2 for each stream: column 0 is the common stream, column j the
// private stream of user j.
Eigen::MatrixXd stream_gains(const std::vector<Eigen::RowVectorXcd>& heq, const RsmaAction& act);

double sinr_common(int i, const Eigen::MatrixXd& gains, const RsmaAction& act, double p_s, double sigma2);
double sinr_private(int i, const Eigen::MatrixXd& gains, const RsmaAction& act, double p_s, double sigma2);

LinkReport rates(const std::vector<Eigen::RowVectorXcd>& heq, const RsmaAction& act, double p_s,
                 double sigma2);

double energy_efficiency(const LinkReport& report, double p_total, double bandwidth, bool scaled);

}  // namespace skyris::link
