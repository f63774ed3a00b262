#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "core/array.hpp"
#include "core/channel.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

using namespace beamsweep;

namespace {

// Brute-force |w^H H f| with plain loops, independent of the Eigen path.
double reference_gain(const Eigen::VectorXcd& w, const Eigen::MatrixXcd& h,
                      const Eigen::VectorXcd& f) {
  std::complex<double> acc = 0.0;
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      acc += std::conj(w(r)) * h(r, c) * f(c);
    }
  }
  return std::abs(acc);
}

Eigen::VectorXcd random_unit_vector(int n, RandomStream& rng) {
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = std::polar(1.0, rng.uniform_range(-std::numbers::pi,
                                             std::numbers::pi));
  }
  return v;
}

Eigen::MatrixXcd random_matrix(int rows, int cols, RandomStream& rng) {
  Eigen::MatrixXcd h(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) h(r, c) = rng.gaussian_pair();
  }
  return h;
}

}  // namespace

TEST_CASE("steering vector at broadside is exactly all ones") {
  for (int n : {1, 4, 12, 33}) {
    for (double spacing : {0.25, 0.5, 1.0}) {
      const auto a = steering_vector({n, spacing}, SteeringAngle(0.0));
      REQUIRE(a.size() == n);
      for (int i = 0; i < n; ++i) {
        CHECK(a(i).real() == 1.0);
        CHECK(a(i).imag() == 0.0);
      }
    }
  }
}

TEST_CASE("steering vector N=4 at pi/6 walks quarter turns") {
  const auto a = steering_vector({4, 0.5}, SteeringAngle(std::numbers::pi / 6));
  // sin(pi/6) = 1/2 gives phases {0, pi/2, pi, 3pi/2}.
  CHECK(std::abs(a(0) - std::complex<double>(1, 0)) < 2e-15);
  CHECK(std::abs(a(1) - std::complex<double>(0, 1)) < 2e-15);
  CHECK(std::abs(a(2) - std::complex<double>(-1, 0)) < 2e-15);
  CHECK(std::abs(a(3) - std::complex<double>(0, -1)) < 2e-15);
}

TEST_CASE("steering vector N=12 theta=0.3 matches the n*pi*sin(0.3) table") {
  const auto a = steering_vector({12, 0.5}, SteeringAngle(0.3));
  // Wrapped phases computed independently at 40-digit precision.
  CHECK(std::arg(a(1)) == doctest::Approx(0.92840411023460188801).epsilon(1e-12));
  CHECK(std::arg(a(2)) == doctest::Approx(1.856808220469203776).epsilon(1e-12));
  CHECK(std::arg(a(5)) == doctest::Approx(-1.6411647560065770369).epsilon(1e-12));
  CHECK(std::arg(a(11)) == doctest::Approx(-2.3539254017785521858).epsilon(1e-12));
  for (int n = 0; n < 12; ++n) {
    CHECK(std::abs(std::abs(a(n)) - 1.0) < 1e-15);
  }
}

TEST_CASE("quantize_weights snaps to the nearest 2-bit phase") {
  Eigen::VectorXcd ideal(3);
  ideal << std::polar(1.0, std::numbers::pi / 2),  // on the grid
      std::polar(1.0, std::numbers::pi / 3),       // nearest is pi/2
      std::polar(1.0, 2.0);                        // nearest is pi/2 (2.0 rad)
  const PhaseWeights w = quantize_weights(ideal, 2);
  CHECK(w.phases[0] == 1);
  CHECK(w.phases[1] == 1);
  CHECK(w.phases[2] == 1);
}

TEST_CASE("quantize_weights breaks exact midpoint ties low") {
  // atan2(1, 1) == fl(pi/4) is an exact midpoint of the 2-bit grid.
  Eigen::VectorXcd ideal(1);
  ideal << std::complex<double>(1.0, 1.0);
  CHECK(quantize_weights(ideal, 2).phases[0] == 0);
}

TEST_CASE("quantize_weights wraps phases near 2*pi to index 0") {
  Eigen::VectorXcd ideal(1);
  ideal << std::polar(1.0, -0.1);  // 2*pi - 0.1, nearest grid point is 0
  CHECK(quantize_weights(ideal, 2).phases[0] == 0);
}

TEST_CASE("quantize_weights rejects zero-magnitude weights") {
  Eigen::VectorXcd ideal(2);
  ideal << std::complex<double>(1, 0), std::complex<double>(0, 0);
  CHECK_THROWS_AS(quantize_weights(ideal, 2), DomainError);
  CHECK_THROWS_AS(quantize_weights(Eigen::VectorXcd::Ones(4), 0), DomainError);
  CHECK_THROWS_AS(quantize_weights(Eigen::VectorXcd::Ones(4), 17), DomainError);
}

TEST_CASE("realized phase weights always have unit modulus") {
  RandomStream rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    PhaseWeights w;
    w.bits = 1 + static_cast<int>(rng.uniform() * 8);
    const int n = 1 + static_cast<int>(rng.uniform() * 16);
    for (int i = 0; i < n; ++i) {
      w.phases.push_back(
          static_cast<uint16_t>(rng.uniform() * w.levels()));
    }
    const auto realized = w.realize();
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(std::abs(realized(i)) - 1.0) < 1e-15);
    }
  }
}

TEST_CASE("phase weight validation catches out-of-range indices") {
  PhaseWeights w;
  w.bits = 2;
  w.phases = {0, 1, 4};  // 4 needs 3 bits
  CHECK_THROWS_AS(w.validate(), DomainError);
}

TEST_CASE("beamforming gain of the all-ones triple is 144") {
  const Eigen::MatrixXcd h = Eigen::MatrixXcd::Ones(12, 12);
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(12);
  CHECK(beamforming_gain(ones, h, ones) == doctest::Approx(144.0).epsilon(1e-12));

  PhaseWeights w;
  w.bits = 2;
  w.phases.assign(12, 0);
  // Same result through the quantized-weights overload.
  const ChannelMatrix channel(ArrayGeometry{}, ArrayGeometry{},
                              {PathComponent{{1.0, 0.0}, SteeringAngle(0),
                                             SteeringAngle(0), 0.0}});
  CHECK(beamforming_gain(w, channel, w) ==
        doctest::Approx(144.0).epsilon(1e-12));
}

TEST_CASE("precoder in the channel null space gives zero gain") {
  Eigen::VectorXcd a_t(2), a_r(2), f(2);
  a_t << 1.0, 1.0;
  a_r << 1.0, std::complex<double>(0, 1);
  const Eigen::MatrixXcd h = a_r * a_t.adjoint();
  f << 1.0, -1.0;  // orthogonal to a_t
  CHECK(beamforming_gain(a_r, h, f) < 1e-14);
}

TEST_CASE("beamforming gain matches a brute-force evaluation") {
  RandomStream rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = random_matrix(12, 12, rng);
    const auto w = random_unit_vector(12, rng);
    const auto f = random_unit_vector(12, rng);
    const double expected = reference_gain(w, h, f);
    CHECK(beamforming_gain(w, h, f) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("beamforming gain scales linearly in the precoder") {
  RandomStream rng(7);
  const auto h = random_matrix(12, 12, rng);
  const auto w = random_unit_vector(12, rng);
  const auto f = random_unit_vector(12, rng);
  const double base = beamforming_gain(w, h, f);
  for (double scale : {0.25, 2.0, 13.5}) {
    const std::complex<double> a = std::polar(scale, rng.uniform_range(0, 6));
    CHECK(beamforming_gain(w, h, (a * f).eval()) ==
          doctest::Approx(std::abs(a) * base).epsilon(1e-12));
  }
}

TEST_CASE("matched unquantized weights on a rank-one channel hit |a|*Nr*Nt") {
  RandomStream rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const SteeringAngle theta(rng.uniform_range(-1.3, 1.3));
    const SteeringAngle phi(rng.uniform_range(-1.3, 1.3));
    const std::complex<double> alpha =
        std::polar(rng.uniform_range(0.1, 2.0), rng.uniform_range(0, 6));
    const auto a_r = steering_vector({12, 0.5}, theta);
    const auto a_t = steering_vector({12, 0.5}, phi);
    const Eigen::MatrixXcd h = alpha * a_r * a_t.adjoint();
    CHECK(beamforming_gain(a_r, h, a_t) ==
          doctest::Approx(std::abs(alpha) * 144.0).epsilon(1e-9));
  }
}

TEST_CASE("quantization never helps on a rank-one channel") {
  RandomStream rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const SteeringAngle theta(rng.uniform_range(-1.3, 1.3));
    const SteeringAngle phi(rng.uniform_range(-1.3, 1.3));
    const auto a_r = steering_vector({12, 0.5}, theta);
    const auto a_t = steering_vector({12, 0.5}, phi);
    const Eigen::MatrixXcd h = a_r * a_t.adjoint();
    const double unquantized = beamforming_gain(a_r, h, a_t);
    const int bits = 1 + static_cast<int>(rng.uniform() * 4);
    const double quantized = beamforming_gain(
        quantize_weights(a_r, bits).realize(), h,
        quantize_weights(a_t, bits).realize());
    CHECK(quantized <= unquantized * (1.0 + 1e-12));
    CHECK(quantized > 0.0);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const Eigen::MatrixXcd h = Eigen::MatrixXcd::Ones(12, 12);
  CHECK_THROWS_AS(
      beamforming_gain(Eigen::VectorXcd::Ones(3), h, Eigen::VectorXcd::Ones(12)),
      DimensionError);
  CHECK_THROWS_AS(
      beamforming_gain(Eigen::VectorXcd::Ones(12), h, Eigen::VectorXcd::Ones(5)),
      DimensionError);
}

TEST_CASE("invalid geometry and angles are rejected") {
  CHECK_THROWS_AS(ArrayGeometry({0, 0.5}).validate(), DomainError);
  CHECK_THROWS_AS(ArrayGeometry({12, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS(SteeringAngle(std::numbers::pi / 2), DomainError);
  CHECK_THROWS_AS(SteeringAngle(-std::numbers::pi / 2), DomainError);
  CHECK_THROWS_AS(SteeringAngle(std::nan("")), DomainError);
  CHECK_NOTHROW(SteeringAngle(1.57));
}
