#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "skyris/errors.hpp"
#include "skyris/nn/adam.hpp"
#include "skyris/nn/checkpoint.hpp"
#include "skyris/nn/gaussian.hpp"
#include "skyris/nn/mlp.hpp"

using namespace skyris;
using namespace skyris::nn;
namespace fs = std::filesystem;

namespace {

Mat random_batch(Rng& rng, int rows, int cols) {
  Mat x(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) x(r, c) = 2.0 * uniform01(rng) - 1.0;
  return x;
}

// sum over the batch of dy . f(x)
double loss(const Mlp& net, const Mat& x, const Mat& dy) { return (net.forward(x).array() * dy.array()).sum(); }

fs::path scratch(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "skyris_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("mlp: zero weights give zero output") {
  Mlp net({3, 5, 2}, Output::identity);
  CHECK(net.param_count() == Mlp::count_params({3, 5, 2}));
  CHECK(net.param_count() == 3 * 5 + 5 + 5 * 2 + 2);
  const auto y = net.forward(std::vector<double>{0.3, -1.0, 2.0});
  CHECK(y == std::vector<double>{0.0, 0.0});
}

TEST_CASE("mlp: single linear layer") {
  Mlp net({2, 2}, Output::identity);
  net.set_flat(std::vector<double>{1, 2, 3, 4, 0.5, -0.5});
  const auto y = net.forward(std::vector<double>{1.0, -1.0});
  CHECK(y[0] == doctest::Approx(-0.5));
  CHECK(y[1] == doctest::Approx(-1.5));
  Mlp sq({2, 2}, Output::tanh);
  sq.set_flat(std::vector<double>{1, 2, 3, 4, 0.5, -0.5});
  const auto z = sq.forward(std::vector<double>{1.0, -1.0});
  CHECK(z[0] == doctest::Approx(std::tanh(-0.5)));
  CHECK(z[1] == doctest::Approx(std::tanh(-1.5)));
}

TEST_CASE("mlp: tanh output saturates inside [-1, 1]") {
  Mlp net({1, 1}, Output::tanh);
  net.set_flat(std::vector<double>{1000.0, 0.0});
  CHECK(net.forward(std::vector<double>{1.0})[0] == doctest::Approx(1.0));
  CHECK(net.forward(std::vector<double>{-1.0})[0] == doctest::Approx(-1.0));
  Rng rng(3);
  Mlp big({4, 16, 3}, Output::tanh, rng, 50.0);
  const Mat y = big.forward(random_batch(rng, 50, 4));
  CHECK(y.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("mlp: errors") {
  CHECK_THROWS_AS(Mlp({3}, Output::identity), StructuralError);
  CHECK_THROWS_AS(Mlp({3, 0, 2}, Output::identity), StructuralError);
  Mlp net({3, 2}, Output::identity);
  CHECK_THROWS_AS(net.set_flat(std::vector<double>(5)), StructuralError);
  CHECK_THROWS_AS(net.forward(std::vector<double>(2)), StructuralError);
}

TEST_CASE("mlp: backward matches finite differences") {
  Rng rng(7);
  for (Output out : {Output::identity, Output::tanh}) {
    Mlp net({5, 8, 7, 3}, out, rng);
    auto p = net.get_flat();
    for (auto& v : p) v *= 1.3;
    net.set_flat(p);
    const Mat x = random_batch(rng, 4, 5);
    const Mat dy = random_batch(rng, 4, 3);
    Mlp::Cache cache;
    net.forward(x, &cache);
    std::vector<double> g(net.param_count(), 0.0);
    Mat dx;
    net.backward(cache, dy, g, &dx);
    const double h = 1e-6;
    for (std::size_t k = 0; k < p.size(); ++k) {
      Mlp plus = net, minus = net;
      plus.params()[k] += h;
      minus.params()[k] -= h;
      const double fd = (loss(plus, x, dy) - loss(minus, x, dy)) / (2 * h);
      CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
    for (int r = 0; r < x.rows(); ++r)
      for (int c = 0; c < x.cols(); ++c) {
        Mat xp = x, xm = x;
        xp(r, c) += h;
        xm(r, c) -= h;
        const double fd = (loss(net, xp, dy) - loss(net, xm, dy)) / (2 * h);
        CHECK(dx(r, c) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
  }
}

TEST_CASE("mlp: backward accumulates and is linear in the upstream") {
  Rng rng(8);
  Mlp net({3, 6, 2}, Output::tanh, rng);
  const Mat x = random_batch(rng, 5, 3);
  const Mat dy = random_batch(rng, 5, 2);
  Mlp::Cache cache;
  net.forward(x, &cache);
  std::vector<double> zero(net.param_count(), 0.0), one(net.param_count(), 0.0), two(net.param_count(), 0.0);
  net.backward(cache, Mat::Zero(5, 2), zero);
  for (double v : zero) CHECK(v == 0.0);
  net.backward(cache, dy, one);
  net.backward(cache, 2.0 * dy, two);
  for (std::size_t k = 0; k < one.size(); ++k) CHECK(two[k] == doctest::Approx(2.0 * one[k]));
  net.backward(cache, dy, one);
  for (std::size_t k = 0; k < one.size(); ++k) CHECK(one[k] == doctest::Approx(two[k]));
  CHECK_THROWS_AS(net.backward(Mlp::Cache{}, dy, one), StructuralError);
  CHECK_THROWS_AS(net.backward(cache, Mat::Zero(4, 2), one), StructuralError);
}

TEST_CASE("mlp: jvp matches finite differences") {
  Rng rng(9);
  Mlp net({4, 6, 3}, Output::identity, rng);
  const Mat x = random_batch(rng, 3, 4);
  std::vector<double> v(net.param_count());
  for (auto& e : v) e = 2.0 * uniform01(rng) - 1.0;
  Mlp::Cache cache;
  net.forward(x, &cache);
  const Mat j = net.jvp(cache, v);
  const double h = 1e-6;
  Mlp plus = net, minus = net;
  for (std::size_t k = 0; k < v.size(); ++k) {
    plus.params()[k] += h * v[k];
    minus.params()[k] -= h * v[k];
  }
  const Mat fd = (plus.forward(x) - minus.forward(x)) / (2 * h);
  CHECK((j - fd).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("polyak averaging") {
  Mlp a({2, 2}, Output::identity), b({2, 2}, Output::identity);
  b.set_flat(std::vector<double>(6, 1.0));
  polyak(a, b, 0.25);
  for (double v : a.params()) CHECK(v == doctest::Approx(0.25));
  polyak(a, b, 1.0);
  for (double v : a.params()) CHECK(v == 1.0);
}

TEST_CASE("adam: first steps") {
  Adam opt(2, 0.1);
  std::vector<double> p{1.0, -2.0};
  const std::vector<double> g{0.5, -4.0};
  opt.step(p, g);
  CHECK(p[0] == doctest::Approx(0.9));
  CHECK(p[1] == doctest::Approx(-1.9));
  opt.step(p, g);
  CHECK(p[0] == doctest::Approx(0.8));
  CHECK(opt.t == 2);
  std::vector<double> q{1.0, 1.0};
  Adam z(2, 0.1);
  z.step(q, std::vector<double>{0.0, 0.0});
  CHECK(q == std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(z.step(q, std::vector<double>{1.0}), StructuralError);
}

TEST_CASE("adam: minimizes a quadratic") {
  Adam opt(1, 0.05);
  std::vector<double> p{3.0};
  for (int k = 0; k < 2000; ++k) opt.step(p, std::vector<double>{2.0 * (p[0] - 0.7)});
  CHECK(p[0] == doctest::Approx(0.7).epsilon(1e-3));
}

TEST_CASE("gaussian: closed forms") {
  const std::vector<double> mu{0.0}, ls{0.0};
  CHECK(gaussian_logprob(mu, ls, std::vector<double>{0.0}) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)));
  CHECK(gaussian_logprob(mu, ls, std::vector<double>{1.0}) ==
        doctest::Approx(-0.5 - 0.5 * std::log(2 * std::numbers::pi)));
  const std::vector<double> ls2{std::log(2.0), 0.0};
  CHECK(gaussian_entropy(ls2) == doctest::Approx(std::log(2.0) + std::log(2 * std::numbers::pi * std::numbers::e)));
  CHECK(gaussian_kl(mu, ls, mu, ls) == 0.0);
  CHECK(gaussian_kl(mu, ls, std::vector<double>{1.0}, ls) == doctest::Approx(0.5));
  // KL(N(0,1) || N(0,4)) = log 2 + 1/8 - 1/2
  CHECK(gaussian_kl(mu, ls, mu, std::vector<double>{std::log(2.0)}) == doctest::Approx(std::log(2.0) - 0.375));
  CHECK_THROWS_AS(gaussian_logprob(mu, ls2, mu), StructuralError);
  CHECK_THROWS_AS(gaussian_kl(mu, ls, mu, ls2), StructuralError);
}

TEST_CASE("gaussian: KL is non-negative") {
  Rng rng(10);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> a(3), b(3), c(3), d(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = 4 * uniform01(rng) - 2;
      b[i] = 2 * uniform01(rng) - 1;
      c[i] = 4 * uniform01(rng) - 2;
      d[i] = 2 * uniform01(rng) - 1;
    }
    CHECK(gaussian_kl(a, b, c, d) >= 0.0);
  }
}

TEST_CASE("gaussian policy: flat round trip, combined evaluation, sampling") {
  Rng rng(11);
  GaussianPolicy pol(Mlp({3, 4, 2}, Output::identity, rng), -0.5);
  CHECK(pol.act_dim() == 2);
  auto flat = pol.get_flat();
  CHECK(flat.size() == pol.param_count());
  CHECK(flat.back() == -0.5);
  flat.back() = 0.25;
  pol.set_flat(flat);
  CHECK(pol.get_flat() == flat);
  CHECK_THROWS_AS(pol.set_flat(std::vector<double>(3)), StructuralError);

  pol.log_std = {10.0, -10.0};
  pol.clamp_log_std();
  CHECK(pol.log_std == std::vector<double>{kLogStdMax, kLogStdMin});

  GaussianPolicy other = pol;
  other.log_std = {0.0, 0.0};
  const std::vector<double> s{0.1, 0.2, 0.3}, a{0.5, -0.5};
  const auto mu = pol.mean.forward(s);
  const auto r = gaussian_logprob_entropy_kl(pol, other, s, a);
  CHECK(r.logprob == doctest::Approx(gaussian_logprob(mu, pol.log_std, a)));
  CHECK(r.entropy == doctest::Approx(gaussian_entropy(pol.log_std)));
  CHECK(r.kl == doctest::Approx(gaussian_kl(mu, other.log_std, mu, pol.log_std)));

  pol.log_std = {std::log(0.5), std::log(0.5)};
  double m0 = 0.0, v0 = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double x = pol.sample(s, rng)[0] - mu[0];
    m0 += x;
    v0 += x * x;
  }
  CHECK(m0 / n == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
  CHECK(v0 / n == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("checkpoint: round trip") {
  Rng rng(12);
  Checkpoint ck;
  ck.nets.emplace_back("actor", Mlp({3, 4, 2}, Output::tanh, rng));
  ck.nets.emplace_back("critic", Mlp({5, 1}, Output::identity, rng));
  ck.vectors.emplace_back("log_std", std::vector<double>{-0.5, 0.1});
  ck.meta = {{"agent", "td3"}, {"seed", 3}};
  const auto path = scratch("roundtrip.ckpt").string();
  save_checkpoint(path, ck);
  CHECK(fs::exists(path + ".json"));
  const Checkpoint back = load_checkpoint(path);
  CHECK(back.net("actor").get_flat() == ck.net("actor").get_flat());
  CHECK(back.net("actor").output() == Output::tanh);
  CHECK(back.net("critic").widths() == std::vector<int>{5, 1});
  CHECK(back.vec("log_std") == ck.vec("log_std"));
  CHECK(back.meta["agent"] == "td3");
  CHECK_THROWS_AS(back.net("missing"), CheckpointError);
  CHECK_THROWS_AS(back.vec("missing"), CheckpointError);
}

TEST_CASE("checkpoint: corruption is rejected") {
  Rng rng(13);
  Checkpoint ck;
  ck.nets.emplace_back("actor", Mlp({3, 4, 2}, Output::tanh, rng));
  const auto path = scratch("corrupt.ckpt").string();
  save_checkpoint(path, ck);
  std::string bytes;
  {
    std::ifstream is(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(is), {});
  }
  auto write = [&](const std::string& b) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os.write(b.data(), static_cast<std::streamsize>(b.size()));
  };
  std::string bad = bytes;
  bad[0] = 'X';
  write(bad);
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  bad = bytes;
  bad[8] = 9;  // version
  write(bad);
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  write(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  CHECK_THROWS_AS(load_checkpoint(scratch("does_not_exist.ckpt").string()), CheckpointError);
}

}
