#include "core/baseband.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace beamsweep {

namespace {

// Compensated accumulator; keeps long reference/error sums exact enough
// that on-grid ratios (like the 0.1 case) survive to the dB stage intact.
class KahanSum {
 public:
  void add(double value) {
    const double y = value - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace

double transmit_power_to_amplitude(double power_dbm) {
  if (!std::isfinite(power_dbm)) {
    throw DomainError("transmit power must be finite");
  }
  return std::sqrt(std::pow(10.0, (power_dbm - 30.0) / 10.0));
}

SymbolStream make_bpsk_reference(int64_t num_symbols, double amplitude,
                                 uint64_t seed, int samples_per_symbol) {
  if (num_symbols < 1) throw DomainError("reference needs at least 1 symbol");
  if (!(amplitude > 0)) throw DomainError("amplitude must be positive");
  if (samples_per_symbol < 1) {
    throw DomainError("samples per symbol must be >= 1");
  }
  SymbolStream s;
  s.samples_per_symbol = samples_per_symbol;
  s.amplitude = amplitude;
  s.symbols.reserve(num_symbols);
  RandomStream bits(seed);
  for (int64_t k = 0; k < num_symbols; ++k) {
    s.symbols.emplace_back(bits.coin_flip() ? amplitude : -amplitude, 0.0);
  }
  return s;
}

SymbolStream simulate_link(const SymbolStream& tx, const PhaseWeights& f,
                           const ChannelMatrix& h, const PhaseWeights& w,
                           double noise_power_dbm, uint64_t seed) {
  if (tx.symbols.empty()) throw DomainError("transmit stream is empty");
  const std::complex<double> g = effective_gain(w, h, f);

  SymbolStream rx;
  rx.samples_per_symbol = tx.samples_per_symbol;
  rx.amplitude = tx.amplitude;
  rx.symbols.resize(tx.symbols.size());

  const bool noiseless =
      std::isinf(noise_power_dbm) && noise_power_dbm < 0;
  if (noiseless) {
    for (size_t k = 0; k < tx.symbols.size(); ++k) {
      rx.symbols[k] = g * tx.symbols[k];
    }
    return rx;
  }

  const double sigma = transmit_power_to_amplitude(noise_power_dbm);
  RandomStream noise(seed);
  for (size_t k = 0; k < tx.symbols.size(); ++k) {
    rx.symbols[k] = g * tx.symbols[k] + noise.complex_gaussian(sigma);
  }
  return rx;
}

EvmReport compute_evm(const SymbolStream& received,
                      const SymbolStream& reference, EvmLogBase log_base) {
  const int64_t n = reference.num_symbols();
  if (n < 1) throw DomainError("reference stream is empty");
  if (received.num_symbols() != n) {
    throw DimensionError("received stream has " +
                         std::to_string(received.num_symbols()) +
                         " symbols, reference has " + std::to_string(n));
  }

  KahanSum cross_re, cross_im, ref_energy;
  for (int64_t k = 0; k < n; ++k) {
    const std::complex<double> c =
        received.symbols[k] * std::conj(reference.symbols[k]);
    cross_re.add(c.real());
    cross_im.add(c.imag());
    ref_energy.add(std::norm(reference.symbols[k]));
  }
  if (ref_energy.value() == 0.0) {
    throw DomainError("reference stream has zero energy");
  }
  const std::complex<double> g =
      std::complex<double>(cross_re.value(), cross_im.value()) /
      ref_energy.value();

  KahanSum err_energy;
  for (int64_t k = 0; k < n; ++k) {
    err_energy.add(std::norm(received.symbols[k] - g * reference.symbols[k]));
  }

  EvmReport report;
  report.num_symbols = n;
  report.e_error = std::sqrt(err_energy.value() / static_cast<double>(n));
  report.e_ref =
      std::abs(g) * std::sqrt(ref_energy.value() / static_cast<double>(n));

  const double scale = log_base == EvmLogBase::Paper10 ? 10.0 : 20.0;
  double evm_db;
  if (report.e_ref == 0.0) {
    evm_db = -kEvmFloorDb;  // no signal at all: pin to the worst case
  } else if (report.e_error == 0.0) {
    evm_db = kEvmFloorDb;
  } else {
    evm_db = scale * std::log10(report.e_error / report.e_ref);
  }
  report.evm_db = std::clamp(evm_db, kEvmFloorDb, -kEvmFloorDb);
  return report;
}

}  // namespace beamsweep
