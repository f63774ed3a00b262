// Campaign orchestration: the exhaustive precoder/combiner search per
// (distance, power) point, in protocol mode (two nodes over a transport) or
// direct mode (in-process loop), with CSV output.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/baseband.hpp"
#include "core/channel.hpp"
#include "core/codebook.hpp"
#include "core/protocol.hpp"

namespace beamsweep {

enum class SweepMode { Protocol, Direct };
enum class TransportKind { Memory, Udp };

// Every knob of the testbed, loadable from a flat key=value file.
struct CampaignConfig {
  // array
  ArrayGeometry geometry;
  int phase_bits = 2;

  // codebooks (empty path -> generate the default beamsteering codebook)
  std::string tx_codebook_path;
  std::string rx_codebook_path;
  int num_beams = 16;
  double span_lo_rad = -1.0471975511965976;  // -60 degrees
  double span_hi_rad = 1.0471975511965976;

  // room / channel
  RoomGeometry room;
  double carrier_hz = kDefaultCarrierHz;
  double reflection_loss_db = 10.0;
  int max_bounces = 1;
  uint64_t channel_seed = 0;  // 0 keeps the transmitter on the center line

  // sweep points
  std::vector<double> distances_m{1.0, 2.0, 4.0, 8.0};
  std::vector<double> power_levels_dbm{0.0, 10.0, 20.0};

  // baseband
  double noise_power_dbm = -70.0;
  int64_t num_symbols = 12500;
  int samples_per_symbol = 4;
  EvmLogBase evm_log_base = EvmLogBase::Paper10;

  // determinism
  uint64_t seed = 1;

  // protocol mode
  ProtocolOptions protocol;
  double drop_probability = 0.0;
  TransportKind transport = TransportKind::Memory;
  uint16_t udp_base_port = 0;  // 0 -> ephemeral loopback ports

  void validate() const;
};

CampaignConfig parse_campaign_config(std::istream& in);
CampaignConfig load_campaign_config(const std::string& path);

// The per-pair noise seed: hash of (seed, distance index, power index,
// tx index, rx index), so serial and parallel evaluation orders agree.
uint64_t pair_seed(uint64_t seed, size_t distance_index, size_t power_index,
                   uint16_t tx_index, uint16_t rx_index);

// One (f, w) measurement through the full pipeline; both sweep modes call
// exactly this, which is what makes them bit-comparable.
EvmReport measure_pair(const ChannelMatrix& channel, const Codebook& f_book,
                       const Codebook& w_book, uint16_t tx_index,
                       uint16_t rx_index, double power_dbm,
                       double noise_power_dbm, int64_t num_symbols,
                       int samples_per_symbol, uint64_t reference_seed,
                       uint64_t noise_seed, EvmLogBase log_base);

struct SweepResult {
  uint16_t num_tx = 0;
  uint16_t num_rx = 0;
  std::vector<EvmReport> evm_grid;  // row-major [tx][rx]
  int best_tx_index = 0;
  int best_rx_index = 0;
  std::vector<double> gain_grid;  // filled by oracle_search when requested

  const EvmReport& at(uint16_t tx, uint16_t rx) const {
    return evm_grid[static_cast<size_t>(tx) * num_rx + rx];
  }
};

struct OracleResult {
  int best_tx_index = 0;
  int best_rx_index = 0;
  std::vector<double> gain_grid;  // row-major [tx][rx]
};

// Reference implementation of the exhaustive search: evaluates
// beamforming_gain for every pair and returns the argmax, ties broken by
// lowest (tx, rx) lexicographically.
OracleResult oracle_search(const Codebook& f_book, const Codebook& w_book,
                           const ChannelMatrix& channel);

// Minimum-EVM selection over a measured grid, same tie rule as the oracle.
SweepResult select_best(const SweepRecord& record);

// Runs one sweep in-process without the control plane.
SweepResult run_direct_sweep(const MeasureFn& measure, uint16_t num_tx,
                             uint16_t num_rx);

// Runs one sweep as a two-node protocol session over the given transports
// (transmitter on transport_tx, receiver on transport_rx).
SweepResult run_protocol_sweep(const Codebook& f_book, const Codebook& w_book,
                               const MeasureFn& measure,
                               Transport& transport_tx,
                               Transport& transport_rx,
                               const ProtocolOptions& options = {});

// Loads or generates the configured codebook.
Codebook campaign_codebook(const CampaignConfig& config,
                           const std::string& path);

// Full campaign: for each (distance, power) builds the channel, sweeps,
// and appends CSV rows. Deterministic per config and seed.
void run_campaign(const CampaignConfig& config, SweepMode mode,
                  std::ostream& csv_out);
void run_campaign_to_file(const CampaignConfig& config, SweepMode mode,
                          const std::string& csv_path);

// Writes the per-point grid plus the best-pair summary row. Schema:
//   distance_m,power_dbm,tx_idx,rx_idx,e_error,e_ref,evm_db,is_best
void write_csv_header(std::ostream& out);
void write_sweep_csv(std::ostream& out, double distance_m, double power_dbm,
                     const SweepResult& result);

// Node entry points behind the tx-node / rx-node binaries. The receiver
// writes its sweep record as CSV to out_path.
SessionLog run_tx_node(const std::string& codebook_path,
                       const std::string& bind_addr,
                       const std::string& peer_addr,
                       const CampaignConfig& config);
SweepRecord run_rx_node(const std::string& codebook_path,
                        const std::string& bind_addr,
                        const std::string& peer_addr,
                        const CampaignConfig& config,
                        const std::string& out_path);

}  // namespace beamsweep
