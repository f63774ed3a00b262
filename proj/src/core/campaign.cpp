#include "core/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "core/errors.hpp"
#include "core/log.hpp"
#include "core/rng.hpp"

namespace beamsweep {

namespace {

constexpr uint64_t kReferenceStreamTag = 0x7265667374726d00ULL;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, int line_no) {
  char* end = nullptr;
  const double d = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw ParseError(line_no, "'" + value + "' is not a number");
  }
  return d;
}

int64_t parse_int(const std::string& value, int line_no) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw ParseError(line_no, "'" + value + "' is not an integer");
  }
  return v;
}

uint64_t parse_uint(const std::string& value, int line_no) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw ParseError(line_no, "'" + value + "' is not an unsigned integer");
  }
  return v;
}

std::vector<double> parse_list(const std::string& value, int line_no) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string token;
  while (std::getline(ss, token, ',')) {
    out.push_back(parse_double(trim(token), line_no));
  }
  return out;
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

void format_value(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  out << buf;
}

}  // namespace

void CampaignConfig::validate() const {
  geometry.validate();
  room.validate();
  if (phase_bits < 1 || phase_bits > 16) {
    throw DomainError("phase_bits must be between 1 and 16");
  }
  if (num_beams < 1) throw DomainError("num_beams must be >= 1");
  if (distances_m.empty()) throw DomainError("distances_m is empty");
  if (power_levels_dbm.empty()) throw DomainError("power_levels_dbm is empty");
  for (size_t i = 1; i < power_levels_dbm.size(); ++i) {
    if (!(power_levels_dbm[i] > power_levels_dbm[i - 1])) {
      throw DomainError("power_levels_dbm must be strictly increasing");
    }
  }
  for (double d : distances_m) {
    if (!(d > 0)) throw DomainError("distances_m must be positive");
  }
  if (num_symbols < 1) throw DomainError("num_symbols must be >= 1");
  if (samples_per_symbol < 1) {
    throw DomainError("samples_per_symbol must be >= 1");
  }
  if (!(carrier_hz > 0)) throw DomainError("carrier_hz must be positive");
  if (reflection_loss_db < 0) {
    throw DomainError("reflection_loss_db must be nonnegative");
  }
  if (max_bounces != 0 && max_bounces != 1) {
    throw DomainError("max_bounces must be 0 or 1");
  }
  if (drop_probability < 0 || drop_probability >= 1) {
    throw DomainError("drop_probability must lie in [0, 1)");
  }
  if (protocol.max_retries < 0) throw DomainError("max_retries must be >= 0");
}

CampaignConfig parse_campaign_config(std::istream& in) {
  CampaignConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected key=value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "num_elements") {
      cfg.geometry.num_elements = static_cast<int>(parse_int(value, line_no));
    } else if (key == "element_spacing_wavelengths") {
      cfg.geometry.element_spacing_wavelengths = parse_double(value, line_no);
    } else if (key == "phase_bits") {
      cfg.phase_bits = static_cast<int>(parse_int(value, line_no));
    } else if (key == "tx_codebook") {
      cfg.tx_codebook_path = value;
    } else if (key == "rx_codebook") {
      cfg.rx_codebook_path = value;
    } else if (key == "num_beams") {
      cfg.num_beams = static_cast<int>(parse_int(value, line_no));
    } else if (key == "span_lo_deg") {
      cfg.span_lo_rad = deg_to_rad(parse_double(value, line_no));
    } else if (key == "span_hi_deg") {
      cfg.span_hi_rad = deg_to_rad(parse_double(value, line_no));
    } else if (key == "room_width_m") {
      cfg.room.width_m = parse_double(value, line_no);
    } else if (key == "room_length_m") {
      cfg.room.length_m = parse_double(value, line_no);
    } else if (key == "ceiling_height_m") {
      cfg.room.ceiling_height_m = parse_double(value, line_no);
    } else if (key == "antenna_height_m") {
      cfg.room.antenna_height_m = parse_double(value, line_no);
    } else if (key == "rx_offset_from_back_wall_m") {
      cfg.room.rx_offset_from_back_wall_m = parse_double(value, line_no);
    } else if (key == "carrier_hz") {
      cfg.carrier_hz = parse_double(value, line_no);
    } else if (key == "reflection_loss_db") {
      cfg.reflection_loss_db = parse_double(value, line_no);
    } else if (key == "max_bounces") {
      cfg.max_bounces = static_cast<int>(parse_int(value, line_no));
    } else if (key == "channel_seed") {
      cfg.channel_seed = parse_uint(value, line_no);
    } else if (key == "distances_m") {
      cfg.distances_m = parse_list(value, line_no);
    } else if (key == "power_levels_dbm") {
      cfg.power_levels_dbm = parse_list(value, line_no);
    } else if (key == "noise_power_dbm") {
      cfg.noise_power_dbm = parse_double(value, line_no);
    } else if (key == "num_symbols") {
      cfg.num_symbols = parse_int(value, line_no);
    } else if (key == "samples_per_symbol") {
      cfg.samples_per_symbol = static_cast<int>(parse_int(value, line_no));
    } else if (key == "evm-log-base" || key == "evm_log_base") {
      if (value == "paper10") {
        cfg.evm_log_base = EvmLogBase::Paper10;
      } else if (value == "standard20") {
        cfg.evm_log_base = EvmLogBase::Standard20;
      } else {
        throw ParseError(line_no,
                         "evm-log-base must be paper10 or standard20");
      }
    } else if (key == "seed") {
      cfg.seed = parse_uint(value, line_no);
    } else if (key == "retry_timeout_ms") {
      cfg.protocol.retry_timeout =
          std::chrono::milliseconds(parse_int(value, line_no));
    } else if (key == "max_retries") {
      cfg.protocol.max_retries = static_cast<int>(parse_int(value, line_no));
    } else if (key == "drop_probability") {
      cfg.drop_probability = parse_double(value, line_no);
    } else if (key == "transport") {
      if (value == "memory") {
        cfg.transport = TransportKind::Memory;
      } else if (value == "udp") {
        cfg.transport = TransportKind::Udp;
      } else {
        throw ParseError(line_no, "transport must be memory or udp");
      }
    } else if (key == "udp_base_port") {
      cfg.udp_base_port = static_cast<uint16_t>(parse_int(value, line_no));
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

CampaignConfig load_campaign_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_campaign_config(in);
}

uint64_t pair_seed(uint64_t seed, size_t distance_index, size_t power_index,
                   uint16_t tx_index, uint16_t rx_index) {
  return derive_seed({seed, distance_index, power_index, tx_index, rx_index});
}

EvmReport measure_pair(const ChannelMatrix& channel, const Codebook& f_book,
                       const Codebook& w_book, uint16_t tx_index,
                       uint16_t rx_index, double power_dbm,
                       double noise_power_dbm, int64_t num_symbols,
                       int samples_per_symbol, uint64_t reference_seed,
                       uint64_t noise_seed, EvmLogBase log_base) {
  if (tx_index >= f_book.entries.size()) {
    throw DimensionError("tx index " + std::to_string(tx_index) +
                         " outside the transmit codebook");
  }
  if (rx_index >= w_book.entries.size()) {
    throw DimensionError("rx index " + std::to_string(rx_index) +
                         " outside the receive codebook");
  }
  const SymbolStream reference = make_bpsk_reference(
      num_symbols, transmit_power_to_amplitude(power_dbm), reference_seed,
      samples_per_symbol);
  const SymbolStream received =
      simulate_link(reference, f_book.entries[tx_index], channel,
                    w_book.entries[rx_index], noise_power_dbm, noise_seed);
  return compute_evm(received, reference, log_base);
}

OracleResult oracle_search(const Codebook& f_book, const Codebook& w_book,
                           const ChannelMatrix& channel) {
  f_book.validate();
  w_book.validate();
  OracleResult result;
  result.gain_grid.resize(static_cast<size_t>(f_book.size()) * w_book.size());
  double best = -1.0;
  for (int tx = 0; tx < f_book.size(); ++tx) {
    const Eigen::VectorXcd f = f_book.entries[tx].realize();
    for (int rx = 0; rx < w_book.size(); ++rx) {
      const double gain =
          beamforming_gain(w_book.entries[rx].realize(), channel.entries(), f);
      result.gain_grid[static_cast<size_t>(tx) * w_book.size() + rx] = gain;
      if (gain > best) {  // strict: ties keep the lexicographically first
        best = gain;
        result.best_tx_index = tx;
        result.best_rx_index = rx;
      }
    }
  }
  return result;
}

SweepResult select_best(const SweepRecord& record) {
  if (record.reports.empty()) throw DomainError("sweep record is empty");
  SweepResult result;
  result.num_tx = record.num_tx;
  result.num_rx = record.num_rx;
  result.evm_grid = record.reports;
  double best = std::numeric_limits<double>::infinity();
  for (uint16_t tx = 0; tx < record.num_tx; ++tx) {
    for (uint16_t rx = 0; rx < record.num_rx; ++rx) {
      const double evm = record.at(tx, rx).evm_db;
      if (evm < best) {  // strict: ties keep the lexicographically first
        best = evm;
        result.best_tx_index = tx;
        result.best_rx_index = rx;
      }
    }
  }
  return result;
}

SweepResult run_direct_sweep(const MeasureFn& measure, uint16_t num_tx,
                             uint16_t num_rx) {
  SweepRecord record;
  record.num_tx = num_tx;
  record.num_rx = num_rx;
  record.reports.reserve(static_cast<size_t>(num_tx) * num_rx);
  for (uint16_t tx = 0; tx < num_tx; ++tx) {
    for (uint16_t rx = 0; rx < num_rx; ++rx) {
      record.reports.push_back(measure(tx, rx));
    }
  }
  return select_best(record);
}

SweepResult run_protocol_sweep(const Codebook& f_book, const Codebook& w_book,
                               const MeasureFn& measure,
                               Transport& transport_tx,
                               Transport& transport_rx,
                               const ProtocolOptions& options) {
  std::exception_ptr tx_error;
  std::thread tx_thread([&] {
    try {
      run_transmitter(f_book, transport_tx, [](uint16_t) {}, options);
    } catch (...) {
      tx_error = std::current_exception();
      transport_tx.close();  // unblocks the receiver promptly
    }
  });

  SweepRecord record;
  std::exception_ptr rx_error;
  try {
    record = run_receiver(w_book, transport_rx, measure, options);
  } catch (...) {
    rx_error = std::current_exception();
    transport_rx.close();
  }
  tx_thread.join();
  if (rx_error) std::rethrow_exception(rx_error);
  if (tx_error) std::rethrow_exception(tx_error);
  return select_best(record);
}

Codebook campaign_codebook(const CampaignConfig& config,
                           const std::string& path) {
  if (!path.empty()) return load_codebook(path);
  return generate_beamsteering_codebook(config.geometry, config.phase_bits,
                                        config.num_beams, config.span_lo_rad,
                                        config.span_hi_rad);
}

void write_csv_header(std::ostream& out) {
  out << "distance_m,power_dbm,tx_idx,rx_idx,e_error,e_ref,evm_db,is_best\n";
}

namespace {
void write_csv_row(std::ostream& out, double distance_m, double power_dbm,
                   int tx, int rx, const EvmReport& report, int is_best) {
  format_value(out, distance_m);
  out << ',';
  format_value(out, power_dbm);
  out << ',' << tx << ',' << rx << ',';
  format_value(out, report.e_error);
  out << ',';
  format_value(out, report.e_ref);
  out << ',';
  format_value(out, report.evm_db);
  out << ',' << is_best << '\n';
}
}  // namespace

void write_sweep_csv(std::ostream& out, double distance_m, double power_dbm,
                     const SweepResult& result) {
  for (uint16_t tx = 0; tx < result.num_tx; ++tx) {
    for (uint16_t rx = 0; rx < result.num_rx; ++rx) {
      write_csv_row(out, distance_m, power_dbm, tx, rx, result.at(tx, rx), 0);
    }
  }
  // Summary row: the selected pair, flagged.
  write_csv_row(out, distance_m, power_dbm, result.best_tx_index,
                result.best_rx_index,
                result.at(static_cast<uint16_t>(result.best_tx_index),
                          static_cast<uint16_t>(result.best_rx_index)),
                1);
}

namespace {

// One sweep at a campaign grid point, in either mode.
SweepResult sweep_point(const CampaignConfig& config, SweepMode mode,
                        const Codebook& f_book, const Codebook& w_book,
                        const ChannelMatrix& channel, size_t distance_index,
                        size_t power_index, double power_dbm) {
  const uint64_t reference_seed = derive_seed(
      {config.seed, kReferenceStreamTag, distance_index, power_index});
  const MeasureFn measure = [&, reference_seed](uint16_t tx, uint16_t rx) {
    return measure_pair(channel, f_book, w_book, tx, rx, power_dbm,
                        config.noise_power_dbm, config.num_symbols,
                        config.samples_per_symbol, reference_seed,
                        pair_seed(config.seed, distance_index, power_index,
                                  tx, rx),
                        config.evm_log_base);
  };

  if (mode == SweepMode::Direct) {
    return run_direct_sweep(measure, static_cast<uint16_t>(f_book.size()),
                            static_cast<uint16_t>(w_book.size()));
  }

  if (config.transport == TransportKind::Memory) {
    auto [tx_end, rx_end] = make_memory_link(
        {config.drop_probability,
         derive_seed({config.seed, distance_index, power_index})});
    return run_protocol_sweep(f_book, w_book, measure, *tx_end, *rx_end,
                              config.protocol);
  }

  // Loopback UDP pair.
  const std::string host = "127.0.0.1:";
  UdpTransport tx_end(host + std::to_string(config.udp_base_port));
  UdpTransport rx_end(host + std::to_string(
                                 config.udp_base_port == 0
                                     ? 0
                                     : config.udp_base_port + 1));
  tx_end.set_peer(host + std::to_string(rx_end.local_port()));
  rx_end.set_peer(host + std::to_string(tx_end.local_port()));
  return run_protocol_sweep(f_book, w_book, measure, tx_end, rx_end,
                            config.protocol);
}

}  // namespace

void run_campaign(const CampaignConfig& config, SweepMode mode,
                  std::ostream& csv_out) {
  config.validate();
  const Codebook f_book = campaign_codebook(config, config.tx_codebook_path);
  const Codebook w_book = campaign_codebook(config, config.rx_codebook_path);

  write_csv_header(csv_out);
  for (size_t di = 0; di < config.distances_m.size(); ++di) {
    const double distance = config.distances_m[di];
    const ChannelMatrix channel = build_channel(
        config.room, distance, config.carrier_hz, config.reflection_loss_db,
        config.max_bounces, config.channel_seed, config.geometry);
    for (size_t pi = 0; pi < config.power_levels_dbm.size(); ++pi) {
      const double power = config.power_levels_dbm[pi];
      logf(LogLevel::Info, "campaign point: distance=", distance,
           " m, power=", power, " dBm");
      try {
        const SweepResult result =
            sweep_point(config, mode, f_book, w_book, channel, di, pi, power);
        write_sweep_csv(csv_out, distance, power, result);
      } catch (const PeerUnreachableError& e) {
        throw PeerUnreachableError(
            "at distance=" + std::to_string(distance) +
            " m, power=" + std::to_string(power) + " dBm: " + e.what());
      }
    }
  }
}

void run_campaign_to_file(const CampaignConfig& config, SweepMode mode,
                          const std::string& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw IoError("cannot open " + csv_path + " for writing");
  run_campaign(config, mode, out);
  out.flush();
  if (!out) throw IoError("failed writing " + csv_path);
}

SessionLog run_tx_node(const std::string& codebook_path,
                       const std::string& bind_addr,
                       const std::string& peer_addr,
                       const CampaignConfig& config) {
  const Codebook f_book = load_codebook(codebook_path);
  UdpTransport transport(bind_addr);
  transport.set_peer(peer_addr);
  logf(LogLevel::Info, "tx-node: ", f_book.size(), " codebook entries, bound ",
       bind_addr, ", peer ", peer_addr);
  return run_transmitter(
      f_book, transport,
      [](uint16_t tx_index) {
        logf(LogLevel::Info, "tx-node: array programmed with codeword ",
             tx_index);
      },
      config.protocol);
}

SweepRecord run_rx_node(const std::string& codebook_path,
                        const std::string& bind_addr,
                        const std::string& peer_addr,
                        const CampaignConfig& config,
                        const std::string& out_path) {
  const Codebook w_book = load_codebook(codebook_path);
  const Codebook f_book = campaign_codebook(config, config.tx_codebook_path);

  // The node measures one link geometry: the first configured point.
  const double distance = config.distances_m.front();
  const double power = config.power_levels_dbm.front();
  const ChannelMatrix channel = build_channel(
      config.room, distance, config.carrier_hz, config.reflection_loss_db,
      config.max_bounces, config.channel_seed, config.geometry);
  const uint64_t reference_seed =
      derive_seed({config.seed, kReferenceStreamTag, 0, 0});

  UdpTransport transport(bind_addr);
  transport.set_peer(peer_addr);
  logf(LogLevel::Info, "rx-node: ", w_book.size(), " codebook entries, bound ",
       bind_addr, ", peer ", peer_addr);

  const MeasureFn measure = [&](uint16_t tx, uint16_t rx) {
    return measure_pair(channel, f_book, w_book, tx, rx, power,
                        config.noise_power_dbm, config.num_symbols,
                        config.samples_per_symbol, reference_seed,
                        pair_seed(config.seed, 0, 0, tx, rx),
                        config.evm_log_base);
  };
  SweepRecord record = run_receiver(w_book, transport, measure,
                                    config.protocol);

  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open " + out_path + " for writing");
  write_csv_header(out);
  write_sweep_csv(out, distance, power, select_best(record));
  out.flush();
  if (!out) throw IoError("failed writing " + out_path);
  return record;
}

}  // namespace beamsweep
