#include "skyris/nn/mlp.hpp"

#include <cmath>

#include "skyris/errors.hpp"
#include "skyris/simd/kernels.hpp"

namespace skyris::nn {

std::size_t Mlp::count_params(const std::vector<int>& widths) {
  std::size_t n = 0;
  for (size_t l = 0; l + 1 < widths.size(); ++l)
    n += static_cast<std::size_t>(widths[l] + 1) * static_cast<std::size_t>(widths[l + 1]);
  return n;
}

Mlp::Mlp(std::vector<int> widths, Output out) : widths_(std::move(widths)), output_(out) {
  if (widths_.size() < 2) throw StructuralError("Mlp: need at least input and output widths");
  for (int w : widths_)
    if (w < 1) throw StructuralError("Mlp: layer widths must be positive");
  std::size_t off = 0;
  for (int l = 0; l < layers(); ++l) {
    offsets_.push_back(off);
    off += static_cast<std::size_t>(widths_[l] + 1) * widths_[l + 1];
  }
  params_.assign(off, 0.0);
}

Mlp::Mlp(std::vector<int> widths, Output out, Rng& rng, double final_scale) : Mlp(std::move(widths), out) {
  for (int l = 0; l < layers(); ++l) {
    const int fan_in = widths_[l];
    const int fan_out = widths_[l + 1];
    // orthonormal rows or columns from the QR factor of a Gaussian matrix
    const int big = std::max(fan_in, fan_out);
    const int small = std::min(fan_in, fan_out);
    Eigen::MatrixXd g(big, small);
    for (int c = 0; c < small; ++c)
      for (int r = 0; r < big; ++r) g(r, c) = standard_normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
    const Eigen::VectorXd d = qr.matrixQR().diagonal();
    for (int c = 0; c < small; ++c)
      if (d[c] < 0) q.col(c) *= -1.0;
    const double scale = l + 1 == layers() ? final_scale : 1.0;
    double* w = params_.data() + w_offset(l);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c)
        w[r * fan_in + c] = scale * (fan_out >= fan_in ? q(r, c) : q(c, r));
  }
}

void Mlp::set_flat(std::span<const double> p) {
  if (p.size() != params_.size())
    throw StructuralError("Mlp::set_flat: expected " + std::to_string(params_.size()) + " values");
  std::copy(p.begin(), p.end(), params_.begin());
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != in()) throw StructuralError("Mlp::forward: input width mismatch");
  const auto& k = simd::active();
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> z;
  for (int l = 0; l < layers(); ++l) {
    const int n_in = widths_[l];
    const int n_out = widths_[l + 1];
    z.assign(n_out, 0.0);
    k.gemv(params_.data() + w_offset(l), n_out, n_in, a.data(), z.data());
    const double* b = params_.data() + b_offset(l);
    for (int r = 0; r < n_out; ++r) {
      z[r] += b[r];
      if (squashed(l)) z[r] = std::tanh(z[r]);
    }
    a.swap(z);
  }
  return a;
}

Mat Mlp::forward(const Mat& x, Cache* cache) const {
  if (x.cols() != in()) throw StructuralError("Mlp::forward: input width mismatch");
  const auto& k = simd::active();
  const Eigen::Index batch = x.rows();
  Mat a = x;
  if (cache) {
    cache->acts.clear();
    cache->acts.push_back(x);
  }
  for (int l = 0; l < layers(); ++l) {
    const int n_in = widths_[l];
    const int n_out = widths_[l + 1];
    Mat z(batch, n_out);
    const double* w = params_.data() + w_offset(l);
    const double* b = params_.data() + b_offset(l);
    for (Eigen::Index s = 0; s < batch; ++s) {
      double* zr = z.data() + s * n_out;
      k.gemv(w, n_out, n_in, a.data() + s * n_in, zr);
      for (int r = 0; r < n_out; ++r) {
        zr[r] += b[r];
        if (squashed(l)) zr[r] = std::tanh(zr[r]);
      }
    }
    a = std::move(z);
    if (cache) cache->acts.push_back(a);
  }
  return a;
}

void Mlp::backward(const Cache& cache, const Mat& dy, std::span<double> grads, Mat* dx) const {
  if (static_cast<int>(cache.acts.size()) != layers() + 1) throw StructuralError("Mlp::backward: no forward cache");
  const Eigen::Index batch = cache.acts[0].rows();
  if (dy.rows() != batch || dy.cols() != out()) throw StructuralError("Mlp::backward: upstream shape mismatch");
  if (grads.size() != params_.size()) throw StructuralError("Mlp::backward: gradient length mismatch");
  const auto& k = simd::active();
  Mat delta = dy;
  for (int l = layers() - 1; l >= 0; --l) {
    const int n_in = widths_[l];
    const int n_out = widths_[l + 1];
    const Mat& y = cache.acts[l + 1];
    if (squashed(l)) delta.array() *= 1.0 - y.array().square();
    const Mat& a = cache.acts[l];
    double* gw = grads.data() + w_offset(l);
    double* gb = grads.data() + b_offset(l);
    const double* w = params_.data() + w_offset(l);
    const bool need_prev = l > 0 || dx != nullptr;
    Mat prev;
    if (need_prev) prev = Mat::Zero(batch, n_in);
    for (Eigen::Index s = 0; s < batch; ++s) {
      const double* d = delta.data() + s * n_out;
      k.ger_acc(gw, n_out, n_in, d, a.data() + s * n_in);
      k.axpy(1.0, d, gb, n_out);
      if (need_prev) k.gemv_t_acc(w, n_out, n_in, d, prev.data() + s * n_in);
    }
    if (l == 0) {
      if (dx) *dx = std::move(prev);
    } else {
      delta = std::move(prev);
    }
  }
}

Mat Mlp::jvp(const Cache& cache, std::span<const double> v) const {
  if (static_cast<int>(cache.acts.size()) != layers() + 1) throw StructuralError("Mlp::jvp: no forward cache");
  if (v.size() != params_.size()) throw StructuralError("Mlp::jvp: direction length mismatch");
  const auto& k = simd::active();
  const Eigen::Index batch = cache.acts[0].rows();
  Mat t = Mat::Zero(batch, in());
  for (int l = 0; l < layers(); ++l) {
    const int n_in = widths_[l];
    const int n_out = widths_[l + 1];
    const Mat& a = cache.acts[l];
    const double* w = params_.data() + w_offset(l);
    const double* vw = v.data() + w_offset(l);
    const double* vb = v.data() + b_offset(l);
    Mat dz(batch, n_out);
    std::vector<double> tmp(n_out);
    for (Eigen::Index s = 0; s < batch; ++s) {
      double* out = dz.data() + s * n_out;
      k.gemv(vw, n_out, n_in, a.data() + s * n_in, out);
      if (l > 0) {
        k.gemv(w, n_out, n_in, t.data() + s * n_in, tmp.data());
        k.axpy(1.0, tmp.data(), out, n_out);
      }
      k.axpy(1.0, vb, out, n_out);
    }
    if (squashed(l)) dz.array() *= 1.0 - cache.acts[l + 1].array().square();
    t = std::move(dz);
  }
  return t;
}

void polyak(Mlp& target, const Mlp& online, double tau) {
  if (target.param_count() != online.param_count()) throw StructuralError("polyak: shape mismatch");
  auto t = target.params();
  auto o = online.params();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = (1.0 - tau) * t[i] + tau * o[i];
}

}  // namespace skyris::nn
