#include <algorithm>
#include <cmath>

#include "damplab/rng.hpp"
#include "damplab/stationary.hpp"
#include "dense_oracle.hpp"
#include "doctest.h"

using namespace damplab;

namespace {

oracle::Dense dense_of(const StationaryOperator& op) {
  return oracle::assemble(op.grid().n(), [&](const cvec& e) { return op.apply(e); });
}

double dense_resolvent(const StationaryOperator& op) {
  const auto s = oracle::singular_values(dense_of(op));
  return 1.0 / s.back();
}

double rel_err(const cvec& a, const cvec& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

cvec random_f(std::size_t n, std::uint64_t seed) {
  SplitMix64 g(seed);
  return complex_gaussian_vector(n, g);
}

}  // namespace

TEST_SUITE("stationary") {
  TEST_CASE("fd2 operator matches the explicit stencil") {
    const CircleGrid g(16, DiffScheme::Fd2);
    const auto p = DampingProfile::exact(1.0, 1.0);
    const rvec W = sample_on_grid(p, g);
    const double q = 5.0, E = 7.5, h = g.h();
    const StationaryOperator op(q, E, W, g);
    CHECK(op.banded());
    const oracle::Dense A = dense_of(op);
    const std::size_t n = g.n();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        cplx expect = 0.0;
        if (i == j) expect = 2.0 / (h * h) + cplx(0.0, q * W[i]) - E;
        else if ((i + 1) % n == j || (j + 1) % n == i) expect = -1.0 / (h * h);
        CHECK(std::abs(A(i, j) - expect) < 1e-10);
      }
    }
  }

  TEST_CASE("apply_adjoint is the conjugate transpose") {
    for (auto scheme : {DiffScheme::Fd2, DiffScheme::Fd4, DiffScheme::Fourier}) {
      const CircleGrid g(16, scheme);
      const rvec W = sample_on_grid(DampingProfile::plateau(1.3, 0.5, 2.0, 0.4), g);
      const StationaryOperator op(3.0, 2.0, W, g);
      const oracle::Dense A = dense_of(op);
      const oracle::Dense Ah = oracle::assemble(g.n(), [&](const cvec& e) { return op.apply_adjoint(e); });
      for (std::size_t i = 0; i < g.n(); ++i)
        for (std::size_t j = 0; j < g.n(); ++j) CHECK(std::abs(Ah(i, j) - std::conj(A(j, i))) < 1e-9);
    }
  }

  TEST_CASE("solves agree with dense LU for every scheme") {
    for (auto scheme : {DiffScheme::Fd2, DiffScheme::Fd4, DiffScheme::Fourier}) {
      const CircleGrid g(64, scheme);
      const rvec W = sample_on_grid(DampingProfile::exact(kPi / 2, 1.0), g);
      const double q = 8.0;
      const StationaryOperator op(q, q * q, W, g);
      const cvec f = random_f(g.n(), 3);
      const oracle::Dense A = dense_of(op);
      const cvec u = op.solve(f);
      CHECK(rel_err(u, oracle::solve(A, f)) < 1e-8);
      CHECK(op.backward_error(u, f) <= 1e-10);
      const cvec v = op.solve(f, true);
      CHECK(rel_err(v, oracle::solve(oracle::adjoint(A), f)) < 1e-8);
    }
  }

  TEST_CASE("accepted solve records its backward error") {
    const CircleGrid g(256, DiffScheme::Fd2);
    const rvec W = sample_on_grid(DampingProfile::exact(kPi / 2, 0.0), g);
    const auto op = build_operator(32.0, 1024.0, W, g);
    const cvec f = random_f(g.n(), 4);
    const StationarySolve s = solve(op, f);
    CHECK(s.residual <= 1e-10);
    CHECK(s.residual == doctest::Approx(op.backward_error(s.u, f)));
    CHECK(s.q == 32.0);
    CHECK(s.E == 1024.0);
  }

  TEST_CASE("singular and malformed systems") {
    const CircleGrid g(32, DiffScheme::Fd2);
    const rvec zero(g.n(), 0.0);
    CHECK_THROWS_AS(
        {
          const StationaryOperator op(0.0, 0.0, zero, g);
          (void)op.solve(cvec(g.n(), 1.0));
        },
        SingularSystem);
    const rvec W = sample_on_grid(DampingProfile::exact(1.0, 1.0), g);
    const StationaryOperator op(4.0, 1.0, W, g);
    CHECK_THROWS_AS(op.solve(cvec(10, 1.0)), LengthMismatch);
    CHECK_THROWS_AS(StationaryOperator(4.0, 1.0, rvec(7, 0.0), g), LengthMismatch);
  }

  TEST_CASE("resolvent norm matches the smallest dense singular value") {
    for (auto scheme : {DiffScheme::Fd2, DiffScheme::Fourier}) {
      for (double beta : {0.0, 1.0}) {
        const CircleGrid g(96, scheme);
        const rvec W = sample_on_grid(DampingProfile::exact(kPi / 2, beta), g);
        for (double E : {0.0, 0.8, 60.0}) {
          const StationaryOperator op(8.0, E, W, g);
          const ResolventPoint r = resolvent_norm_1d(op);
          CHECK(r.norm == doctest::Approx(dense_resolvent(op)).epsilon(1e-5));
          CHECK(r.iterations >= 1);
          CHECK(r.method == "inverse-iteration");
        }
      }
    }
  }

  TEST_CASE("constant damping: norm from the Fourier symbol") {
    // A is diagonal in the Fourier basis; ||A^{-1}|| = 1 / min_m |-symbol_m + i q c - E|.
    for (auto scheme : {DiffScheme::Fd2, DiffScheme::Fourier, DiffScheme::Fd4}) {
      const CircleGrid g(128, scheme);
      const double c = 0.7, q = 10.0, E = 37.3;
      const rvec W(g.n(), c);
      double smin = 1e300;
      for (std::size_t i = 0; i < g.n(); ++i) {
        const long m = FourierTransform::wavenumber(i, g.n());
        smin = std::min(smin, std::abs(cplx(-g.diff2_symbol(m) - E, q * c)));
      }
      const ResolventPoint r = resolvent_norm_1d(q, E, W, g);
      CHECK(r.norm == doctest::Approx(1.0 / smin).epsilon(1e-6));
    }
  }

  TEST_CASE("torus norm is the sup over y-modes") {
    const CircleGrid g(48, DiffScheme::Fd2);
    const auto p = DampingProfile::exact(kPi / 2, 1.0);
    const rvec W = sample_on_grid(p, g);
    const double q = 4.5, E_cut = 1.0;
    const Resolvent2d r = resolvent_norm_2d(q, p, g, E_cut);
    // Modes with E = q^2 - k^2 >= -E_cut: k = 0..4.
    REQUIRE(r.modes.size() == 5);
    double best = 0.0;
    long best_k = -1;
    for (long k = 0; k <= 4; ++k) {
      const StationaryOperator op(q, q * q - double(k * k), W, g);
      const double ref = dense_resolvent(op);
      CHECK(r.modes[std::size_t(k)].norm == doctest::Approx(ref).epsilon(1e-5));
      CHECK(r.modes[std::size_t(k)].k == k);
      if (ref > best) best = ref, best_k = k;
    }
    CHECK(r.best.k == best_k);
    CHECK(r.best.norm == doctest::Approx(best).epsilon(1e-5));
    CHECK_THROWS_AS(resolvent_norm_2d(2.0, p, g), std::invalid_argument);
  }

  TEST_CASE("parallel mode sweep is identical to the serial one") {
    const CircleGrid g(128, DiffScheme::Fd2);
    const auto p = DampingProfile::exact(kPi / 2, 0.0);
    ResolventOptions one, four;
    four.jobs = 4;
    const Resolvent2d a = resolvent_norm_2d(12.0, p, g, 1.0, one);
    const Resolvent2d b = resolvent_norm_2d(12.0, p, g, 1.0, four);
    REQUIRE(a.modes.size() == b.modes.size());
    for (std::size_t i = 0; i < a.modes.size(); ++i) CHECK(a.modes[i].norm == b.modes[i].norm);
  }

  TEST_CASE("resonant peak sits above the integer-q value") {
    const CircleGrid g(128, DiffScheme::Fd2);
    const auto p = DampingProfile::exact(kPi / 2, 0.0);
    const ResonantPeak pk = resonant_peak_2d(16.0, p, g);
    CHECK(pk.k == 16);
    CHECK(pk.q_peak >= 16.0);
    CHECK(pk.E_peak == doctest::Approx(pk.q_peak * pk.q_peak - 256.0).epsilon(1e-9));
    // The undamped strip |x| < pi/2 has its first Dirichlet level at E = 1.
    CHECK(pk.E_peak > 0.5);
    CHECK(pk.E_peak < 1.0);
    const double nominal = resolvent_norm_2d(16.0, p, g).best.norm;
    CHECK(pk.at_peak.best.norm > 3.0 * nominal);
    CHECK(pk.at_peak.best.norm >= pk.peak_norm_1d * (1 - 1e-6));
  }

  TEST_CASE("inverse iteration reports non-convergence") {
    const CircleGrid g(64, DiffScheme::Fd2);
    const rvec W = sample_on_grid(DampingProfile::exact(1.0, 1.0), g);
    ResolventOptions o;
    o.max_iter = 1;
    o.tol = 1e-15;
    try {
      (void)resolvent_norm_1d(6.0, 30.0, W, g, o);
      FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
      CHECK(e.last_estimate > 0.0);
    }
  }

  TEST_CASE("exponent fit over resolvent points") {
    std::vector<ResolventPoint> pts;
    for (double q : {16.0, 32.0, 64.0}) {
      ResolventPoint r;
      r.q = q;
      r.norm = 2.0 * std::sqrt(q);
      pts.push_back(r);
    }
    CHECK(fit_exponent(pts).exponent == doctest::Approx(0.5).epsilon(1e-12));
    pts.pop_back();
    CHECK_THROWS_AS(fit_exponent(pts), std::invalid_argument);
  }
}
