#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "core/baseband.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

using namespace beamsweep;

namespace {

PhaseWeights flat_weights(int n) {
  PhaseWeights w;
  w.bits = 2;
  w.phases.assign(n, 0);
  return w;
}

// Unit-gain-per-entry channel: w^H H f = 144 for flat weights.
ChannelMatrix ones_channel() {
  return ChannelMatrix(ArrayGeometry{}, ArrayGeometry{},
                       {PathComponent{{1.0, 0.0}, SteeringAngle(0),
                                      SteeringAngle(0), 0.0}});
}

SymbolStream alternating_reference(int64_t n, double amplitude) {
  SymbolStream s;
  s.amplitude = amplitude;
  for (int64_t k = 0; k < n; ++k) {
    s.symbols.emplace_back(k % 2 == 0 ? amplitude : -amplitude, 0.0);
  }
  return s;
}

}  // namespace

TEST_CASE("transmit power to amplitude") {
  CHECK(transmit_power_to_amplitude(30.0) == 1.0);  // 1 W reference
  // sqrt(0.001), evaluated independently.
  CHECK(transmit_power_to_amplitude(0.0) ==
        doctest::Approx(0.031622776601683791).epsilon(1e-15));
  for (double base : {-10.0, 0.0, 17.0}) {
    CHECK(transmit_power_to_amplitude(base + 20.0) ==
          doctest::Approx(10.0 * transmit_power_to_amplitude(base))
              .epsilon(1e-12));
  }
  CHECK_THROWS_AS(transmit_power_to_amplitude(
                      std::numeric_limits<double>::infinity()),
                  DomainError);
}

TEST_CASE("BPSK references are exactly +/- amplitude and seeded") {
  const SymbolStream a = make_bpsk_reference(500, 0.25, 7);
  const SymbolStream b = make_bpsk_reference(500, 0.25, 7);
  const SymbolStream c = make_bpsk_reference(500, 0.25, 8);
  REQUIRE(a.num_symbols() == 500);
  bool saw_plus = false, saw_minus = false;
  for (const auto& s : a.symbols) {
    CHECK(s.imag() == 0.0);
    CHECK((s.real() == 0.25 || s.real() == -0.25));
    saw_plus |= s.real() > 0;
    saw_minus |= s.real() < 0;
  }
  CHECK(saw_plus);
  CHECK(saw_minus);
  CHECK(a.symbols == b.symbols);
  CHECK(a.symbols != c.symbols);
}

TEST_CASE("noiseless link is an exact scalar multiple of the reference") {
  const ChannelMatrix h = ones_channel();
  const PhaseWeights w = flat_weights(12);
  const SymbolStream tx = make_bpsk_reference(64, 1.0, 3);
  const SymbolStream rx = simulate_link(tx, w, h, w, kNoiselessDbm, 99);
  const std::complex<double> g = effective_gain(w, h, w);
  REQUIRE(rx.num_symbols() == tx.num_symbols());
  for (int64_t k = 0; k < tx.num_symbols(); ++k) {
    CHECK(rx.symbols[k] == g * tx.symbols[k]);
  }
}

TEST_CASE("null-space precoder yields a vanishing noiseless stream") {
  // With wavelength spacing and a pi/6 departure angle the two-element
  // transmit response is [1, -1]; the flat precoder lies in its null space.
  const ArrayGeometry two{2, 1.0};
  const ChannelMatrix h(two, two,
                        {PathComponent{{1.0, 0.0}, SteeringAngle(0.5235987755982988),
                                       SteeringAngle(0), 0.0}});
  PhaseWeights flat;
  flat.bits = 1;
  flat.phases = {0, 0};

  const SymbolStream tx = make_bpsk_reference(32, 1.0, 5);
  const SymbolStream rx = simulate_link(tx, flat, h, flat, kNoiselessDbm, 1);
  for (const auto& s : rx.symbols) CHECK(std::abs(s) < 1e-13);
}

TEST_CASE("simulate_link is deterministic per seed") {
  const ChannelMatrix h = ones_channel();
  const PhaseWeights w = flat_weights(12);
  const SymbolStream tx = make_bpsk_reference(256, 1.0, 11);
  const SymbolStream rx1 = simulate_link(tx, w, h, w, -70.0, 42);
  const SymbolStream rx2 = simulate_link(tx, w, h, w, -70.0, 42);
  const SymbolStream rx3 = simulate_link(tx, w, h, w, -70.0, 43);
  CHECK(rx1.symbols == rx2.symbols);
  CHECK(rx1.symbols != rx3.symbols);
}

TEST_CASE("perfect reception reports the EVM floor") {
  const SymbolStream ref = alternating_reference(100, 1.0);
  const EvmReport r = compute_evm(ref, ref);
  CHECK(r.e_error == 0.0);
  CHECK(r.evm_db == kEvmFloorDb);
  CHECK(r.num_symbols == 100);
}

TEST_CASE("a constant 0.1-amplitude error reads exactly -10 dB") {
  // Quadrature error keeps every product representable: the fit stays at
  // exactly 1 and the ratio lands on 0.1 on the nose.
  const SymbolStream ref = alternating_reference(1000, 1.0);
  SymbolStream rx = ref;
  for (auto& s : rx.symbols) s += std::complex<double>(0.0, 0.1);
  const EvmReport r = compute_evm(rx, ref);
  CHECK(r.e_error == 0.1);
  CHECK(r.e_ref == 1.0);
  CHECK(r.evm_db == -10.0);
}

TEST_CASE("EVM dB identity holds on randomized inputs") {
  RandomStream rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int64_t n = 2 + static_cast<int64_t>(rng.uniform() * 300);
    SymbolStream ref, rx;
    for (int64_t k = 0; k < n; ++k) {
      ref.symbols.push_back(rng.gaussian_pair() + std::complex<double>(2, 0));
      rx.symbols.push_back(rng.gaussian_pair());
    }
    const EvmReport r = compute_evm(rx, ref);
    if (r.evm_db > kEvmFloorDb && r.evm_db < -kEvmFloorDb) {
      CHECK(std::abs(r.evm_db - 10.0 * std::log10(r.e_error / r.e_ref)) <
            1e-9);
    }
  }
}

TEST_CASE("AWGN-only EVM matches the analytic expectation") {
  const ChannelMatrix h = ones_channel();
  const PhaseWeights w = flat_weights(12);
  const SymbolStream tx = make_bpsk_reference(12500, 1.0, 21);
  const SymbolStream rx = simulate_link(tx, w, h, w, -70.0, 22);
  const EvmReport r = compute_evm(rx, tx);
  const double sigma = transmit_power_to_amplitude(-70.0);
  const double expected = 10.0 * std::log10(sigma / (144.0 * 1.0));
  CHECK(std::abs(r.evm_db - expected) < 0.2);
}

TEST_CASE("transmit power steps move EVM by half the step") {
  const ChannelMatrix h = ones_channel();
  const PhaseWeights w = flat_weights(12);
  for (double delta : {3.0, 6.0, 10.0}) {
    const SymbolStream tx_lo = make_bpsk_reference(
        12500, transmit_power_to_amplitude(0.0), 100);
    const SymbolStream tx_hi = make_bpsk_reference(
        12500, transmit_power_to_amplitude(delta), 100);
    const EvmReport lo =
        compute_evm(simulate_link(tx_lo, w, h, w, -70.0, 201), tx_lo);
    const EvmReport hi =
        compute_evm(simulate_link(tx_hi, w, h, w, -70.0, 202), tx_hi);
    CHECK(std::abs((lo.evm_db - hi.evm_db) - delta / 2.0) < 0.1);
  }
}

TEST_CASE("equalized EVM is invariant to a complex scale on the receiver") {
  const ChannelMatrix h = ones_channel();
  const PhaseWeights w = flat_weights(12);
  const SymbolStream tx = make_bpsk_reference(2000, 1.0, 31);
  const SymbolStream rx = simulate_link(tx, w, h, w, -50.0, 32);
  const EvmReport base = compute_evm(rx, tx);
  for (const std::complex<double> c :
       {std::complex<double>(2.5, 0), std::complex<double>(0, -0.3),
        std::complex<double>(-1.7, 4.1)}) {
    SymbolStream scaled = rx;
    for (auto& s : scaled.symbols) s *= c;
    const EvmReport r = compute_evm(scaled, tx);
    CHECK(std::abs(r.evm_db - base.evm_db) < 1e-9);
  }
}

TEST_CASE("12500-symbol reports have lower variance than 125-symbol ones") {
  const ChannelMatrix h = ones_channel();
  const PhaseWeights w = flat_weights(12);
  auto variance_at = [&](int64_t symbols) {
    std::vector<double> values;
    for (uint64_t seed = 1; seed <= 24; ++seed) {
      const SymbolStream tx = make_bpsk_reference(symbols, 1.0, 1000 + seed);
      const SymbolStream rx = simulate_link(tx, w, h, w, -70.0, 2000 + seed);
      values.push_back(compute_evm(rx, tx).evm_db);
    }
    double mean = 0;
    for (double v : values) mean += v;
    mean /= values.size();
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    return var / (values.size() - 1);
  };
  CHECK(variance_at(125) > 5.0 * variance_at(12500));
}

TEST_CASE("EVM rejects degenerate inputs") {
  SymbolStream ref = alternating_reference(10, 1.0);
  SymbolStream rx = alternating_reference(9, 1.0);
  CHECK_THROWS_AS(compute_evm(rx, ref), DimensionError);

  SymbolStream zero_ref;
  zero_ref.symbols.assign(10, {0.0, 0.0});
  CHECK_THROWS_AS(compute_evm(ref, zero_ref), DomainError);
  CHECK_THROWS_AS(compute_evm(SymbolStream{}, SymbolStream{}), DomainError);
}

TEST_CASE("the standard 20*log10 convention doubles the dB reading") {
  const SymbolStream ref = alternating_reference(1000, 1.0);
  SymbolStream rx = ref;
  for (auto& s : rx.symbols) s += std::complex<double>(0.1, 0.0);
  const EvmReport paper = compute_evm(rx, ref, EvmLogBase::Paper10);
  const EvmReport standard = compute_evm(rx, ref, EvmLogBase::Standard20);
  CHECK(standard.evm_db == doctest::Approx(2.0 * paper.evm_db).epsilon(1e-12));
}
