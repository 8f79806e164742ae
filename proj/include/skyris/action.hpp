#pragma once

#include <Eigen/Dense>
#include <vector>

#include "skyris/bdris.hpp"
#include "skyris/config.hpp"

namespace skyris {

// Decoded decision variables for one coherence interval.
struct RsmaAction {
  double a_c = 0.0;
  std::vector<double> a;
  Eigen::VectorXcd w_c;
  std::vector<Eigen::VectorXcd> w;
  bdris::BdRisMatrix phi;
  Point2 uav;
  std::vector<double> delta;

  int num_users() const { return static_cast<int>(a.size()); }
  double power_fraction() const {
    double s = a_c;
    for (double v : a) s += v;
    return s;
  }
};

}  // namespace skyris
