#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "robust_pr/metrics.hpp"
#include "test_util.hpp"

using namespace robust_pr;

TEST_CASE("align_phase") {
  Rng rng(1);
  const Signal truth = sample_complex_gaussian(rng, 6);

  SUBCASE("pure phase offset") {
    const double theta = std::numbers::pi / 3.0;
    const PhaseAlignment a = align_phase(truth * std::polar(1.0, theta), truth);
    CHECK(a.theta == doctest::Approx(theta).epsilon(1e-12));
    CHECK((a.aligned - truth).norm() <= 1e-12);
  }
  SUBCASE("already aligned") {
    const PhaseAlignment a = align_phase(truth, truth);
    CHECK(a.theta == doctest::Approx(0.0));
    CHECK((a.aligned - truth).norm() <= 1e-15);
  }
  SUBCASE("range is [0, 2pi)") {
    const PhaseAlignment a = align_phase(truth * std::polar(1.0, -0.5), truth);
    CHECK(a.theta == doctest::Approx(2.0 * std::numbers::pi - 0.5));
  }
  SUBCASE("beats a 1e4-point grid search") {
    for (int rep = 0; rep < 20; ++rep) {
      const Signal t = sample_complex_gaussian(rng, 4);
      const Signal e = sample_complex_gaussian(rng, 4);
      double best = INFINITY;
      for (int k = 0; k < 10000; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / 10000.0;
        best = std::min(best, (e * std::polar(1.0, -phi) - t).norm());
      }
      const double got = (align_phase(e, t).aligned - t).norm();
      CHECK(got <= best + 1e-12);
      // The grid minimum is within half a cell of the optimum.
      CHECK(best - got <= e.norm() * std::numbers::pi / 10000.0 + 1e-12);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS(align_phase(truth, Signal::Zero(6)));
    CHECK_THROWS_AS(align_phase(Signal::Zero(5), truth), DimensionError);
  }
}

TEST_CASE("nmse") {
  Rng rng(2);
  const Signal truth = sample_complex_gaussian(rng, 8);
  CHECK(nmse(truth, truth) == doctest::Approx(0.0));
  CHECK(nmse(Signal::Zero(8), truth) == doctest::Approx(1.0));
  CHECK(nmse(Signal::Zero(8), truth, Alignment::Raw) == doctest::Approx(1.0));
  CHECK(nmse(truth * std::polar(1.0, 2.0), truth) <= 1e-24);
  CHECK(nmse(-truth, truth, Alignment::Raw) == doctest::Approx(4.0));
  CHECK_THROWS(nmse(truth, Signal::Zero(8)));
}

TEST_CASE("property: aligned nmse is phase invariant and never exceeds the raw ratio") {
  Rng rng(3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int rep = 0; rep < 200; ++rep) {
    const Signal t = sample_complex_gaussian(rng, 5);
    const Signal e = sample_complex_gaussian(rng, 5);
    const double base = nmse(e, t);
    CHECK(std::abs(nmse(e * std::polar(1.0, angle(rng)), t) - base) <= 1e-12);
    CHECK(base <= nmse(e, t, Alignment::Raw) + 1e-15);
  }
}

namespace {

struct Small {
  Eigen::MatrixXcd raw;
  MeasurementEnsemble ensemble;
  Signal truth;
};

Small make_small(Rng& rng, Index m, Index n) {
  Eigen::MatrixXcd raw = robust_pr::testing::random_matrix(rng, m, n);
  MeasurementEnsemble ens{ComplexMatrix(raw)};
  return Small{raw, ens, sample_complex_gaussian(rng, n)};
}

// Elementwise reference for |a_i^H x| using an explicit loop.
RealVector loop_modulus(const Eigen::MatrixXcd& raw, const Signal& x) {
  RealVector out(raw.rows());
  for (Index i = 0; i < raw.rows(); ++i) {
    Complex acc(0.0, 0.0);
    for (Index j = 0; j < raw.cols(); ++j) acc += raw(i, j) * x[j];
    out[i] = std::abs(acc);
  }
  return out;
}

}  // namespace

TEST_CASE("lad_objective") {
  Rng rng(4);
  Small s = make_small(rng, 10, 3);
  const Observations y = observe(s.ensemble, s.truth, ObservationKind::Intensity);
  const Observations b = observe(s.ensemble, s.truth, ObservationKind::Amplitude);
  CHECK(lad_objective(s.ensemble, s.truth, y) == doctest::Approx(0.0));
  CHECK(lad_objective(s.ensemble, s.truth, b) == doctest::Approx(0.0));
  CHECK(lad_objective(s.ensemble, Signal::Zero(3), y) == doctest::Approx(y.values.lpNorm<1>()));

  const Signal x = sample_complex_gaussian(rng, 3);
  const RealVector mod = loop_modulus(s.raw, x);
  double ref_i = 0.0, ref_a = 0.0;
  for (Index i = 0; i < 10; ++i) {
    ref_i += std::abs(y.values[i] - mod[i] * mod[i]);
    ref_a += std::abs(b.values[i] - mod[i]);
  }
  CHECK(std::abs(lad_objective(s.ensemble, x, y) - ref_i) <= 1e-10);
  CHECK(std::abs(lad_objective(s.ensemble, x, b) - ref_a) <= 1e-10);
}

TEST_CASE("ls_objective") {
  Rng rng(5);
  Small s = make_small(rng, 9, 4);
  const RealVector y = observe(s.ensemble, s.truth, ObservationKind::Intensity).values;
  CHECK(ls_objective(s.ensemble, s.truth, y, ObservationKind::Intensity) <= 1e-20);
  CHECK(ls_objective(s.ensemble, Signal::Zero(4), RealVector::Zero(9), ObservationKind::Amplitude) == 0.0);

  const Signal x = sample_complex_gaussian(rng, 4);
  const RealVector mod = loop_modulus(s.raw, x);
  double ref = 0.0;
  for (Index i = 0; i < 9; ++i) ref += std::pow(y[i] - mod[i] * mod[i], 2);
  CHECK(std::abs(ls_objective(s.ensemble, x, y, ObservationKind::Intensity) - ref) <= 1e-10 * (1.0 + ref));
  CHECK_THROWS_AS(ls_objective(s.ensemble, x, RealVector::Zero(3), ObservationKind::Amplitude), DimensionError);
}

TEST_CASE("property: objectives are phase invariant and satisfy Cauchy-Schwarz") {
  Rng rng(6);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int rep = 0; rep < 100; ++rep) {
    Small s = make_small(rng, 12, 3);
    for (auto kind : {ObservationKind::Intensity, ObservationKind::Amplitude}) {
      Observations obs = observe(s.ensemble, s.truth, kind);
      obs.values += robust_pr::testing::random_real(rng, 12, 0.5);
      const Signal x = sample_complex_gaussian(rng, 3);
      const Signal xr = x * std::polar(1.0, angle(rng));
      const double lad = lad_objective(s.ensemble, x, obs);
      const double ls = ls_objective(s.ensemble, x, obs.values, kind);
      CHECK(std::abs(lad_objective(s.ensemble, xr, obs) - lad) <= 1e-10 * (1.0 + lad));
      CHECK(std::abs(ls_objective(s.ensemble, xr, obs.values, kind) - ls) <= 1e-10 * (1.0 + ls));
      CHECK(lad <= std::sqrt(12.0) * std::sqrt(ls) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("evaluate bundles the metrics") {
  Rng rng(7);
  Small s = make_small(rng, 8, 2);
  const Observations y = observe(s.ensemble, s.truth, ObservationKind::Intensity);
  const MetricReport r = evaluate(s.ensemble, s.truth * std::polar(1.0, 1.0), s.truth, y);
  CHECK(r.nmse <= 1e-24);
  CHECK(r.aligned_phase == doctest::Approx(1.0));
  CHECK(r.lad_objective <= 1e-10);
}
