#include <cmath>

#include "damplab/evolution.hpp"
#include "damplab/rng.hpp"
#include "doctest.h"

using namespace damplab;

namespace {

double max_abs_diff(const cvec& a, const cvec& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

InitialData mixed_data(const CircleGrid& g) {
  InitialData d;
  d.grid = g;
  SplitMix64 rng(3);
  for (long k : {0L, 1L, -2L, 5L}) {
    ModeField m{k, cvec(g.n()), cvec(g.n())};
    const cplx a = rng.complex_normal(), b = rng.complex_normal();
    for (std::size_t j = 0; j < g.n(); ++j) {
      const double x = g.node(j);
      m.v[j] = a * std::exp(-2.0 * x * x);
      m.w[j] = b * std::cos(3.0 * x) + a * std::sin(x);
    }
    d.modes.push_back(m);
  }
  return d;
}

}  // namespace

TEST_SUITE("evolution") {
  TEST_CASE("closed-form oracle") {
    for (double t : {0.0, 0.3, 1.7, 5.0}) {
      CHECK(oracle_constant_damping(2.0, 1.0, 1.0, 0.0, t).first.real() == doctest::Approx((1 + t) * std::exp(-t)));
      CHECK(oracle_constant_damping(0.0, 2.0, 1.0, 0.0, t).first.real() == doctest::Approx(std::cos(2 * t)));
      CHECK(oracle_constant_damping(1.0, 1.0, 0.0, 1.0, t).first.real() ==
            doctest::Approx(2.0 / std::sqrt(3.0) * std::exp(-t / 2) * std::sin(std::sqrt(3.0) * t / 2)));
      // overdamped: roots -1 and -4, v0 = 1, w0 = 0 -> (4 e^{-t} - e^{-4t}) / 3
      CHECK(oracle_constant_damping(5.0, 2.0, 1.0, 0.0, t).first.real() ==
            doctest::Approx((4 * std::exp(-t) - std::exp(-4 * t)) / 3));
    }
    // second component is the time derivative
    for (auto [c, om] : {std::pair{2.0, 1.0}, std::pair{0.5, 3.0}, std::pair{7.0, 1.0}}) {
      const double t = 1.3, h = 1e-5;
      const cplx v0(0.4, -1.0), w0(1.0, 0.2);
      const cplx fd = (oracle_constant_damping(c, om, v0, w0, t + h).first -
                       oracle_constant_damping(c, om, v0, w0, t - h).first) / (2 * h);
      CHECK(std::abs(oracle_constant_damping(c, om, v0, w0, t).second - fd) < 1e-8);
    }
    CHECK_THROWS_AS(oracle_constant_damping(-1.0, 1.0, 1.0, 0.0, 1.0), std::invalid_argument);
  }

  TEST_CASE("undamped single mode is rotated exactly") {
    const CircleGrid g(16);
    const rvec W(16, 0.0);
    for (double t : {0.1, 2.5, 40.0}) {
      WaveField f = WaveField::from(plane_wave(g, 1, 0));
      step(f, t, W);
      for (std::size_t j = 0; j < 16; ++j) CHECK(std::abs(f.modes[0].v[j] - std::cos(t) * std::polar(1.0, g.node(j))) < 1e-13);
      CHECK(f.t == t);
    }
    // omega = 0: v += w dt
    WaveField f = WaveField::from(plane_wave(g, 0, 0, 1.0, 2.0));
    step(f, 0.75, W);
    for (std::size_t j = 0; j < 16; ++j) CHECK(std::abs(f.modes[0].v[j] - 2.5) < 1e-14);
    CHECK_THROWS_AS(step(f, 0.0, W), std::invalid_argument);
  }

  TEST_CASE("energy and Sobolev norms of simple fields") {
    const CircleGrid g(32);
    // sin y = (e^{iy} - e^{-iy}) / 2i
    WaveField s{g, {{1, cvec(32, cplx(0, -0.5)), cvec(32, 0.0)}, {-1, cvec(32, cplx(0, 0.5)), cvec(32, 0.0)}}, 0.0};
    CHECK(energy(s) == doctest::Approx(2 * kPi * kPi));
    WaveField c{g, {{0, cvec(32, 3.0), cvec(32, 0.0)}}, 0.0};
    CHECK(energy(c) == doctest::Approx(0.0));
    WaveField w{g, {{0, cvec(32, 0.0), cvec(32, 1.0)}}, 0.0};
    CHECK(energy(w) == doctest::Approx(4 * kPi * kPi));

    const std::vector<ModeField> ey{{1, cvec(32, 1.0), cvec(32, 0.0)}};
    CHECK(sobolev_norm(g, ey, 1) == doctest::Approx(2 * kPi * std::sqrt(2.0)));
    const std::vector<ModeField> one{{0, cvec(32, 1.0), cvec(32, 0.0)}};
    for (int s2 : {0, 1, 2}) CHECK(sobolev_norm(g, one, s2) == doctest::Approx(2 * kPi));
    CHECK_THROWS_AS(sobolev_norm(g, one, 3), std::invalid_argument);

    // s = 0 is the L2 norm by quadrature: 2 pi * h * sum |v|^2 per mode
    const InitialData d = mixed_data(g);
    double l2 = 0;
    for (const auto& m : d.modes)
      for (const auto& v : m.v) l2 += 2 * kPi * g.h() * std::norm(v);
    CHECK(sobolev_norm(d, 0) == doctest::Approx(std::sqrt(l2)).epsilon(1e-13));
  }

  TEST_CASE("energy from the physical-space integral") {
    const CircleGrid g(64);
    const InitialData d = mixed_data(g);
    // 2 pi sum_k int |w|^2 + |v'|^2 + k^2 |v|^2 with the spectral derivative (no Nyquist content here).
    double ref = 0;
    for (const auto& m : d.modes) {
      const cvec dv = diff_apply(m.v, g);
      for (std::size_t j = 0; j < g.n(); ++j)
        ref += 2 * kPi * g.h() * (std::norm(m.w[j]) + std::norm(dv[j]) + double(m.k * m.k) * std::norm(m.v[j]));
    }
    CHECK(energy(WaveField::from(d)) == doctest::Approx(ref).epsilon(1e-10));
  }

  TEST_CASE("energy is conserved without damping") {
    const CircleGrid g(64);
    WaveField f = WaveField::from(mixed_data(g));
    const StrangStepper st(g, rvec(64, 0.0), 0.05);
    const double E0 = energy(f);
    for (int i = 0; i < 2000; ++i) st.step(f);
    CHECK(std::abs(energy(f) - E0) <= 1e-12 * E0);
  }

  TEST_CASE("damped energy is nonincreasing") {
    const CircleGrid g(128);
    const auto p = DampingProfile::exact(kPi / 2, 1.0);
    const DecaySeries s = run_decay(p, gaussian_strip(g, 3, kPi / 8), 40.0, 0.05, 5);
    CHECK(s.monotone);
    for (std::size_t i = 1; i < s.energy.size(); ++i) CHECK(s.energy[i] <= s.energy[i - 1] * (1 + 1e-12));
    CHECK(s.t.back() == doctest::Approx(40.0));
    CHECK(s.t.size() == 161);
  }

  TEST_CASE("modes evolve independently") {
    const CircleGrid g(64);
    const rvec W = sample_on_grid(DampingProfile::exact(1.0, 0.0), g);
    InitialData d = mixed_data(g);
    d.modes.resize(2);
    d.modes[1].k = 3;
    WaveField both = WaveField::from(d);
    InitialData d0 = d, d3 = d;
    d0.modes = {d.modes[0]};
    d3.modes = {d.modes[1]};
    WaveField a = WaveField::from(d0), b = WaveField::from(d3);
    const StrangStepper st(g, W, 0.02);
    for (int i = 0; i < 200; ++i) {
      st.step(both, 2);
      st.step(a);
      st.step(b);
    }
    CHECK(max_abs_diff(both.modes[0].v, a.modes[0].v) == 0.0);
    CHECK(max_abs_diff(both.modes[1].w, b.modes[0].w) == 0.0);
  }

  TEST_CASE("real data stays real") {
    const CircleGrid g(64);
    const rvec W = sample_on_grid(DampingProfile::exact(1.0, 1.0), g);
    InitialData d;
    d.grid = g;
    ModeField m{0, cvec(64), cvec(64)};
    for (std::size_t j = 0; j < 64; ++j) {
      m.v[j] = std::exp(-std::pow(g.node(j), 2));
      m.w[j] = std::sin(g.node(j));
    }
    d.modes.push_back(m);
    WaveField f = WaveField::from(d);
    for (int i = 0; i < 500; ++i) step(f, 0.03, W);
    for (std::size_t j = 0; j < 64; ++j) {
      CHECK(std::abs(f.modes[0].v[j].imag()) < 1e-13);
      CHECK(std::abs(f.modes[0].w[j].imag()) < 1e-13);
    }
  }

  TEST_CASE("constant damping converges to the oracle at second order") {
    const CircleGrid g(16);
    const rvec W(16, 1.0);
    const long m = 2, k = 3;
    const double om = std::sqrt(double(m * m + k * k)), T = 2.0;
    auto error_at = [&](double dt) {
      WaveField f = WaveField::from(plane_wave(g, m, k));
      const StrangStepper st(g, W, dt);
      const auto steps = static_cast<int>(std::lround(T / dt));
      for (int i = 0; i < steps; ++i) st.step(f);
      const cplx v = oracle_constant_damping(1.0, om, 1.0, 0.0, T).first;
      double err = 0;
      for (std::size_t j = 0; j < 16; ++j) err = std::max(err, std::abs(f.modes[0].v[j] - v * std::polar(1.0, double(m) * g.node(j))));
      return err;
    };
    const double e1 = error_at(0.01), e2 = error_at(0.005);
    CHECK(e1 < 1e-4);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("data families") {
    const CircleGrid g(64);
    const InitialData d = gaussian_strip(g, 4, 0.4);
    REQUIRE(d.modes.size() == 1);
    CHECK(d.modes[0].k == 4);
    CHECK(d.family == "gaussian-strip");
    for (std::size_t j = 0; j < 64; ++j) CHECK(std::abs(d.modes[0].w[j] - cplx(0, std::sqrt(17.0)) * d.modes[0].v[j]) < 1e-14);
    CHECK(d.modes[0].v[32] == cplx(1.0));
    CHECK_THROWS_AS(gaussian_strip(g, 1, 0.0), std::invalid_argument);

    // plane wave with w0 = 0 and no damping: d_t v1 = -(m^2+k^2) v0
    const InitialData pw = plane_wave(g, 2, 1);
    const double lit = literal_data_norm(pw, rvec(64, 0.0));
    const double h2 = 2 * kPi * std::pow(1 + 5.0, 1.0);  // ||v0||_{H^2} = 2 pi (1 + 5)
    CHECK(sobolev_norm(pw, 2) == doctest::Approx(h2));
    CHECK(lit == doctest::Approx(h2 + 5.0 * 2 * kPi * std::sqrt(6.0)));
    CHECK(data_norm(pw) == doctest::Approx(h2));
  }

  TEST_CASE("decay fits") {
    DecaySeries s;
    for (int i = 1; i <= 100; ++i) {
      s.t.push_back(i);
      s.energy.push_back(25.0 * std::pow(double(i), -4.0 / 3.0));
    }
    DecayFit f = fit_decay(s, 2.0, 50.0, 2.0 / 3.0, 5.0);
    CHECK(f.fit.exponent == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(f.sup_functional == doctest::Approx(1.0).epsilon(1e-12));

    DecaySeries flat{{1, 2, 3, 4}, {2, 2, 2, 2}, true};
    CHECK(std::abs(fit_decay(flat, 1, 4, 0.5, 1.0).fit.exponent) < 1e-14);
    DecaySeries bad{{1, 2, 3}, {1, 0, 1}, true};
    CHECK_THROWS_AS(fit_decay(bad, 1, 3, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(fit_decay(flat, 10, 20, 0.5, 1.0), std::invalid_argument);
    CHECK(default_decay_window(1000.0).first == 20.0);
    CHECK(decay_rate(0.0) == doctest::Approx(2.0 / 3.0));
  }

  TEST_CASE("constant damping energy decay matches the oracle") {
    const CircleGrid g(16);
    const double c = 0.5;
    const double om = 1.0;
    const DecaySeries s = run_decay(rvec(16, c), plane_wave(g, 1, 0), 10.0, 1e-3, 1000);
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      const auto [v, w] = oracle_constant_damping(c, om, 1.0, 0.0, s.t[i]);
      const double ref = 4 * kPi * kPi * (std::norm(w) + om * om * std::norm(v));
      CHECK(s.energy[i] == doctest::Approx(ref).epsilon(1e-5));
    }
  }
}
