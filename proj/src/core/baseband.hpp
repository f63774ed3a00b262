// Baseband path: BPSK reference streams, the beamformed AWGN link, and the
// receiver EVM metric.
#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "core/array.hpp"
#include "core/channel.hpp"

namespace beamsweep {

// Pass as noise power to disable the noise term entirely.
constexpr double kNoiselessDbm = -std::numeric_limits<double>::infinity();

// Reports are clamped to [-100, +100] dB so zero-error (and zero-signal)
// cases stay finite and sortable.
constexpr double kEvmFloorDb = -100.0;

struct SymbolStream {
  std::vector<std::complex<double>> symbols;
  int samples_per_symbol = 4;  // metadata: the hardware oversampling ratio
  double amplitude = 1.0;      // linear RMS amplitude of the reference

  int64_t num_symbols() const { return static_cast<int64_t>(symbols.size()); }
};

// The EVM metric is an amplitude ratio in dB. The measurement campaign's
// convention is 10*log10(e_error / e_ref); the conventional definition uses
// 20*log10 and is kept available behind the flag.
enum class EvmLogBase { Paper10, Standard20 };

struct EvmReport {
  double e_error = 0.0;  // RMS error-vector amplitude (linear)
  double e_ref = 0.0;    // RMS equalized-reference amplitude (linear)
  double evm_db = 0.0;
  int64_t num_symbols = 0;
};

// Root-watt amplitude for a dBm power level: sqrt(10^((dbm - 30) / 10)).
double transmit_power_to_amplitude(double power_dbm);

// Random BPSK symbols, exactly +/- amplitude on the real axis.
SymbolStream make_bpsk_reference(int64_t num_symbols, double amplitude,
                                 uint64_t seed, int samples_per_symbol = 4);

// received_k = (w^H H f) * tx_k + n_k with circularly symmetric complex
// gaussian noise of the given receiver-referred power. Deterministic per
// seed; noise_power_dbm == kNoiselessDbm omits the noise term.
SymbolStream simulate_link(const SymbolStream& tx, const PhaseWeights& f,
                           const ChannelMatrix& h, const PhaseWeights& w,
                           double noise_power_dbm, uint64_t seed);

// Fits the single least-squares complex scalar g of received onto reference,
// then reports e_error = RMS|received - g*ref|, e_ref = RMS|g*ref| and the
// dB ratio. Throws DomainError for a zero-energy reference.
EvmReport compute_evm(const SymbolStream& received,
                      const SymbolStream& reference,
                      EvmLogBase log_base = EvmLogBase::Paper10);

}  // namespace beamsweep
