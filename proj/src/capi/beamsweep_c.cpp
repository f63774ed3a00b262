// extern "C" surface of the library: translates the C++ core's exceptions
// into bs_status codes and a thread-local error message.
#include "beamsweep/beamsweep.h"

#include <algorithm>
#include <cstring>
#include <string>

#include "core/campaign.hpp"
#include "core/errors.hpp"

namespace {

thread_local char tl_error[512] = "";

void set_error(const char* what) {
  std::strncpy(tl_error, what, sizeof tl_error - 1);
  tl_error[sizeof tl_error - 1] = '\0';
}

// Runs fn, mapping exceptions onto status codes.
template <typename Fn>
bs_status guarded(Fn&& fn) {
  try {
    fn();
    return BS_OK;
  } catch (const beamsweep::DimensionError& e) {
    set_error(e.what());
    return BS_ERR_DIMENSION_MISMATCH;
  } catch (const beamsweep::GeometryError& e) {
    set_error(e.what());
    return BS_ERR_GEOMETRY;
  } catch (const beamsweep::ParseError& e) {
    set_error(e.what());
    return BS_ERR_PARSE;
  } catch (const beamsweep::IoError& e) {
    set_error(e.what());
    return BS_ERR_IO;
  } catch (const beamsweep::PeerUnreachableError& e) {
    set_error(e.what());
    return BS_ERR_PEER_UNREACHABLE;
  } catch (const beamsweep::ProtocolError& e) {
    set_error(e.what());
    return BS_ERR_PROTOCOL;
  } catch (const beamsweep::DomainError& e) {
    set_error(e.what());
    return BS_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return BS_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return BS_ERR_INTERNAL;
  }
}

bs_status require(bool ok, const char* what) {
  if (ok) return BS_OK;
  set_error(what);
  return BS_ERR_NULL_POINTER;
}

Eigen::VectorXcd from_iq(const double* iq, int n) {
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = {iq[2 * i], iq[2 * i + 1]};
  return v;
}

beamsweep::EvmLogBase log_base_of(int log_base) {
  if (log_base == 10) return beamsweep::EvmLogBase::Paper10;
  if (log_base == 20) return beamsweep::EvmLogBase::Standard20;
  throw beamsweep::DomainError("log_base must be 10 or 20");
}

beamsweep::CampaignConfig config_or_defaults(const char* config_path) {
  if (config_path == nullptr || config_path[0] == '\0') {
    return beamsweep::CampaignConfig{};
  }
  return beamsweep::load_campaign_config(config_path);
}

}  // namespace

struct bs_codebook {
  beamsweep::Codebook value;
};

struct bs_channel {
  beamsweep::ChannelMatrix value;
};

extern "C" {

const char* bs_version(void) { return "beamsweep 1.0.0"; }

const char* bs_last_error(void) { return tl_error; }

bs_status bs_steering_vector(int num_elements, double spacing_wavelengths,
                             double theta_rad, double* out_iq) {
  if (bs_status s = require(out_iq != nullptr, "out_iq is null")) return s;
  return guarded([&] {
    const Eigen::VectorXcd a = beamsweep::steering_vector(
        {num_elements, spacing_wavelengths},
        beamsweep::SteeringAngle(theta_rad));
    for (int n = 0; n < num_elements; ++n) {
      out_iq[2 * n] = a(n).real();
      out_iq[2 * n + 1] = a(n).imag();
    }
  });
}

bs_status bs_quantize_weights(const double* ideal_iq, int num_elements,
                              int bits, uint16_t* out_indices) {
  if (bs_status s = require(ideal_iq && out_indices, "null buffer")) return s;
  return guarded([&] {
    if (num_elements < 1) {
      throw beamsweep::DomainError("num_elements must be >= 1");
    }
    const beamsweep::PhaseWeights w =
        beamsweep::quantize_weights(from_iq(ideal_iq, num_elements), bits);
    for (int n = 0; n < num_elements; ++n) out_indices[n] = w.phases[n];
  });
}

bs_status bs_beamforming_gain_raw(const double* w_iq, int n_rx,
                                  const double* h_iq, const double* f_iq,
                                  int n_tx, double* out_gain) {
  if (bs_status s = require(w_iq && h_iq && f_iq && out_gain, "null buffer")) {
    return s;
  }
  return guarded([&] {
    if (n_rx < 1 || n_tx < 1) {
      throw beamsweep::DomainError("dimensions must be >= 1");
    }
    Eigen::MatrixXcd h(n_rx, n_tx);
    for (int r = 0; r < n_rx; ++r) {
      for (int c = 0; c < n_tx; ++c) {
        const int k = 2 * (r * n_tx + c);
        h(r, c) = {h_iq[k], h_iq[k + 1]};
      }
    }
    *out_gain = beamsweep::beamforming_gain(from_iq(w_iq, n_rx), h,
                                            from_iq(f_iq, n_tx));
  });
}

bs_status bs_friis_pathloss_db(double distance_m, double carrier_hz,
                               double* out_db) {
  if (bs_status s = require(out_db != nullptr, "out_db is null")) return s;
  return guarded(
      [&] { *out_db = beamsweep::friis_pathloss_db(distance_m, carrier_hz); });
}

bs_status bs_channel_build(double room_width_m, double room_length_m,
                           double ceiling_height_m, double antenna_height_m,
                           double rx_offset_from_back_wall_m,
                           double tx_rx_distance_m, double carrier_hz,
                           double reflection_loss_db, int max_bounces,
                           uint64_t seed, int num_elements,
                           double spacing_wavelengths, bs_channel** out) {
  if (bs_status s = require(out != nullptr, "out is null")) return s;
  *out = nullptr;
  return guarded([&] {
    beamsweep::RoomGeometry room{room_width_m, room_length_m,
                                 ceiling_height_m, antenna_height_m,
                                 rx_offset_from_back_wall_m};
    *out = new bs_channel{beamsweep::build_channel(
        room, tx_rx_distance_m, carrier_hz, reflection_loss_db, max_bounces,
        seed, {num_elements, spacing_wavelengths})};
  });
}

void bs_channel_free(bs_channel* channel) { delete channel; }

bs_status bs_channel_dims(const bs_channel* channel, int* rows, int* cols) {
  if (bs_status s = require(channel && rows && cols, "null argument")) {
    return s;
  }
  *rows = static_cast<int>(channel->value.entries().rows());
  *cols = static_cast<int>(channel->value.entries().cols());
  return BS_OK;
}

bs_status bs_channel_entries(const bs_channel* channel, double* out_iq) {
  if (bs_status s = require(channel && out_iq, "null argument")) return s;
  const Eigen::MatrixXcd& h = channel->value.entries();
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      const Eigen::Index k = 2 * (r * h.cols() + c);
      out_iq[k] = h(r, c).real();
      out_iq[k + 1] = h(r, c).imag();
    }
  }
  return BS_OK;
}

bs_status bs_channel_num_paths(const bs_channel* channel, int* out) {
  if (bs_status s = require(channel && out, "null argument")) return s;
  *out = static_cast<int>(channel->value.paths().size());
  return BS_OK;
}

bs_status bs_codebook_generate(int num_elements, double spacing_wavelengths,
                               int bits, int num_beams, double span_lo_rad,
                               double span_hi_rad, bs_codebook** out) {
  if (bs_status s = require(out != nullptr, "out is null")) return s;
  *out = nullptr;
  return guarded([&] {
    *out = new bs_codebook{beamsweep::generate_beamsteering_codebook(
        {num_elements, spacing_wavelengths}, bits, num_beams, span_lo_rad,
        span_hi_rad)};
  });
}

bs_status bs_codebook_load(const char* path, bs_codebook** out) {
  if (bs_status s = require(path && out, "null argument")) return s;
  *out = nullptr;
  return guarded([&] {
    *out = new bs_codebook{beamsweep::load_codebook(std::string(path))};
  });
}

bs_status bs_codebook_save(const bs_codebook* codebook, const char* path) {
  if (bs_status s = require(codebook && path, "null argument")) return s;
  return guarded(
      [&] { beamsweep::save_codebook(codebook->value, std::string(path)); });
}

void bs_codebook_free(bs_codebook* codebook) { delete codebook; }

bs_status bs_codebook_info(const bs_codebook* codebook, int* num_entries,
                           int* num_elements, int* bits) {
  if (bs_status s = require(codebook != nullptr, "codebook is null")) return s;
  if (num_entries) *num_entries = codebook->value.size();
  if (num_elements) *num_elements = codebook->value.geometry.num_elements;
  if (bits) *bits = codebook->value.bits;
  return BS_OK;
}

bs_status bs_codebook_entry(const bs_codebook* codebook, int entry,
                            uint16_t* out_indices) {
  if (bs_status s = require(codebook && out_indices, "null argument")) {
    return s;
  }
  return guarded([&] {
    if (entry < 0 || entry >= codebook->value.size()) {
      throw beamsweep::DomainError("entry " + std::to_string(entry) +
                                   " outside the codebook");
    }
    const beamsweep::PhaseWeights& w = codebook->value.entries[entry];
    for (int n = 0; n < w.num_elements(); ++n) out_indices[n] = w.phases[n];
  });
}

bs_status bs_beamforming_gain(const bs_channel* channel,
                              const bs_codebook* codebook_f, int tx_index,
                              const bs_codebook* codebook_w, int rx_index,
                              double* out_gain) {
  if (bs_status s = require(channel && codebook_f && codebook_w && out_gain,
                            "null argument")) {
    return s;
  }
  return guarded([&] {
    if (tx_index < 0 || tx_index >= codebook_f->value.size() ||
        rx_index < 0 || rx_index >= codebook_w->value.size()) {
      throw beamsweep::DomainError("codebook index out of range");
    }
    *out_gain = beamsweep::beamforming_gain(
        codebook_w->value.entries[rx_index], channel->value,
        codebook_f->value.entries[tx_index]);
  });
}

bs_status bs_transmit_power_to_amplitude(double power_dbm, double* out) {
  if (bs_status s = require(out != nullptr, "out is null")) return s;
  return guarded(
      [&] { *out = beamsweep::transmit_power_to_amplitude(power_dbm); });
}

bs_status bs_compute_evm(const double* received_iq, const double* reference_iq,
                         int64_t num_symbols, int log_base,
                         bs_evm_report* out) {
  if (bs_status s =
          require(received_iq && reference_iq && out, "null argument")) {
    return s;
  }
  return guarded([&] {
    if (num_symbols < 1) {
      throw beamsweep::DomainError("num_symbols must be >= 1");
    }
    beamsweep::SymbolStream received, reference;
    received.symbols.reserve(num_symbols);
    reference.symbols.reserve(num_symbols);
    for (int64_t k = 0; k < num_symbols; ++k) {
      received.symbols.emplace_back(received_iq[2 * k], received_iq[2 * k + 1]);
      reference.symbols.emplace_back(reference_iq[2 * k],
                                     reference_iq[2 * k + 1]);
    }
    const beamsweep::EvmReport r =
        beamsweep::compute_evm(received, reference, log_base_of(log_base));
    *out = {r.e_error, r.e_ref, r.evm_db, r.num_symbols};
  });
}

bs_status bs_measure_pair(const bs_channel* channel,
                          const bs_codebook* codebook_f, int tx_index,
                          const bs_codebook* codebook_w, int rx_index,
                          double power_dbm, double noise_power_dbm,
                          int64_t num_symbols, uint64_t reference_seed,
                          uint64_t noise_seed, int log_base,
                          bs_evm_report* out) {
  if (bs_status s =
          require(channel && codebook_f && codebook_w && out, "null argument")) {
    return s;
  }
  return guarded([&] {
    if (tx_index < 0 || rx_index < 0) {
      throw beamsweep::DomainError("codebook indices must be nonnegative");
    }
    const beamsweep::EvmReport r = beamsweep::measure_pair(
        channel->value, codebook_f->value, codebook_w->value,
        static_cast<uint16_t>(tx_index), static_cast<uint16_t>(rx_index),
        power_dbm, noise_power_dbm, num_symbols, 4, reference_seed, noise_seed,
        log_base_of(log_base));
    *out = {r.e_error, r.e_ref, r.evm_db, r.num_symbols};
  });
}

bs_status bs_oracle_search(const bs_channel* channel,
                           const bs_codebook* codebook_f,
                           const bs_codebook* codebook_w, int* best_tx_index,
                           int* best_rx_index, double* gain_grid) {
  if (bs_status s = require(channel && codebook_f && codebook_w &&
                                best_tx_index && best_rx_index,
                            "null argument")) {
    return s;
  }
  return guarded([&] {
    const beamsweep::OracleResult r = beamsweep::oracle_search(
        codebook_f->value, codebook_w->value, channel->value);
    *best_tx_index = r.best_tx_index;
    *best_rx_index = r.best_rx_index;
    if (gain_grid != nullptr) {
      std::copy(r.gain_grid.begin(), r.gain_grid.end(), gain_grid);
    }
  });
}

bs_status bs_campaign_run(const char* config_path, const char* mode,
                          const char* out_csv_path) {
  if (bs_status s =
          require(config_path && mode && out_csv_path, "null argument")) {
    return s;
  }
  return guarded([&] {
    const std::string mode_str(mode);
    beamsweep::SweepMode sweep_mode;
    if (mode_str == "protocol") {
      sweep_mode = beamsweep::SweepMode::Protocol;
    } else if (mode_str == "direct") {
      sweep_mode = beamsweep::SweepMode::Direct;
    } else {
      throw beamsweep::DomainError("mode must be protocol or direct, got '" +
                                   mode_str + "'");
    }
    beamsweep::run_campaign_to_file(
        beamsweep::load_campaign_config(config_path), sweep_mode,
        out_csv_path);
  });
}

bs_status bs_run_tx_node(const char* codebook_path, const char* bind_addr,
                         const char* peer_addr, const char* config_path) {
  if (bs_status s = require(codebook_path && bind_addr && peer_addr,
                            "null argument")) {
    return s;
  }
  return guarded([&] {
    beamsweep::run_tx_node(codebook_path, bind_addr, peer_addr,
                           config_or_defaults(config_path));
  });
}

bs_status bs_run_rx_node(const char* codebook_path, const char* bind_addr,
                         const char* peer_addr, const char* config_path,
                         const char* out_record_path) {
  if (bs_status s = require(codebook_path && bind_addr && peer_addr &&
                                out_record_path,
                            "null argument")) {
    return s;
  }
  return guarded([&] {
    beamsweep::run_rx_node(codebook_path, bind_addr, peer_addr,
                           config_or_defaults(config_path), out_record_path);
  });
}

}  // extern "C"
