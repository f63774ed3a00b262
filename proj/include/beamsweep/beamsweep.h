/*
 * beamsweep: 60 GHz analog beam-training testbed.
 *
 * C interface to the simulation core. All entry points return a bs_status
 * (BS_OK on success); on failure bs_last_error() describes what went wrong
 * for the calling thread. Objects returned through bs_*_create/load/build
 * calls are opaque and must be released with the matching bs_*_free.
 */
#ifndef BEAMSWEEP_H
#define BEAMSWEEP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bs_status {
  BS_OK = 0,
  BS_ERR_NULL_POINTER = -1,
  BS_ERR_INVALID_ARGUMENT = -2,  /* domain violations, bad enum values   */
  BS_ERR_DIMENSION_MISMATCH = -3,
  BS_ERR_GEOMETRY = -4,          /* placement outside the room           */
  BS_ERR_PARSE = -5,             /* malformed codebook/config/datagram   */
  BS_ERR_IO = -6,
  BS_ERR_PEER_UNREACHABLE = -7,  /* retransmission budget exhausted      */
  BS_ERR_PROTOCOL = -8,          /* peer violated the session contract   */
  BS_ERR_INTERNAL = -9
} bs_status;

const char* bs_version(void);

/* Thread-local message for the most recent failure on this thread. */
const char* bs_last_error(void);

typedef struct bs_codebook bs_codebook;
typedef struct bs_channel bs_channel;

/* ------------------------------------------------------------------ */
/* Phased array                                                        */

/* Ideal steering vector toward theta_rad; out_iq holds num_elements
 * interleaved (re, im) pairs. */
bs_status bs_steering_vector(int num_elements, double spacing_wavelengths,
                             double theta_rad, double* out_iq);

/* Nearest-grid phase quantization of num_elements interleaved weights;
 * out_indices receives one index in [0, 2^bits) per element. */
bs_status bs_quantize_weights(const double* ideal_iq, int num_elements,
                              int bits, uint16_t* out_indices);

/* |w^H H f| for raw interleaved buffers; h_iq is row-major n_rx x n_tx. */
bs_status bs_beamforming_gain_raw(const double* w_iq, int n_rx,
                                  const double* h_iq, const double* f_iq,
                                  int n_tx, double* out_gain);

/* ------------------------------------------------------------------ */
/* Channel                                                             */

/* Free-space pathloss 20*log10(4*pi*d/lambda) in dB. */
bs_status bs_friis_pathloss_db(double distance_m, double carrier_hz,
                               double* out_db);

/* Geometric room channel. max_bounces 0 -> direct ray only; 1 adds the four
 * first-order reflections. seed 0 places the transmitter on the room's
 * center line; nonzero seeds draw a deterministic transverse offset. */
bs_status bs_channel_build(double room_width_m, double room_length_m,
                           double ceiling_height_m, double antenna_height_m,
                           double rx_offset_from_back_wall_m,
                           double tx_rx_distance_m, double carrier_hz,
                           double reflection_loss_db, int max_bounces,
                           uint64_t seed, int num_elements,
                           double spacing_wavelengths, bs_channel** out);
void bs_channel_free(bs_channel* channel);

bs_status bs_channel_dims(const bs_channel* channel, int* rows, int* cols);
/* Row-major interleaved entries; out_iq needs 2*rows*cols doubles. */
bs_status bs_channel_entries(const bs_channel* channel, double* out_iq);
bs_status bs_channel_num_paths(const bs_channel* channel, int* out);

/* ------------------------------------------------------------------ */
/* Codebook                                                            */

bs_status bs_codebook_generate(int num_elements, double spacing_wavelengths,
                               int bits, int num_beams, double span_lo_rad,
                               double span_hi_rad, bs_codebook** out);
bs_status bs_codebook_load(const char* path, bs_codebook** out);
bs_status bs_codebook_save(const bs_codebook* codebook, const char* path);
void bs_codebook_free(bs_codebook* codebook);

bs_status bs_codebook_info(const bs_codebook* codebook, int* num_entries,
                           int* num_elements, int* bits);
/* Phase indices of one entry; out_indices needs num_elements slots. */
bs_status bs_codebook_entry(const bs_codebook* codebook, int entry,
                            uint16_t* out_indices);

/* |w^H H f| for a codebook entry pair. */
bs_status bs_beamforming_gain(const bs_channel* channel,
                              const bs_codebook* codebook_f, int tx_index,
                              const bs_codebook* codebook_w, int rx_index,
                              double* out_gain);

/* ------------------------------------------------------------------ */
/* Baseband / EVM                                                      */

bs_status bs_transmit_power_to_amplitude(double power_dbm, double* out);

typedef struct bs_evm_report {
  double e_error; /* RMS error-vector amplitude (linear)        */
  double e_ref;   /* RMS equalized-reference amplitude (linear) */
  double evm_db;
  int64_t num_symbols;
} bs_evm_report;

/* EVM of received against reference (interleaved IQ, num_symbols each).
 * log_base selects the dB convention: 10 (campaign) or 20 (conventional). */
bs_status bs_compute_evm(const double* received_iq, const double* reference_iq,
                         int64_t num_symbols, int log_base,
                         bs_evm_report* out);

/* Full single-pair measurement: BPSK reference at power_dbm through the
 * channel with the given codebook entries and AWGN at noise_power_dbm
 * (-INFINITY for a noiseless link), deterministic per seed pair. */
bs_status bs_measure_pair(const bs_channel* channel,
                          const bs_codebook* codebook_f, int tx_index,
                          const bs_codebook* codebook_w, int rx_index,
                          double power_dbm, double noise_power_dbm,
                          int64_t num_symbols, uint64_t reference_seed,
                          uint64_t noise_seed, int log_base,
                          bs_evm_report* out);

/* ------------------------------------------------------------------ */
/* Campaign and nodes                                                  */

/* Exhaustive |w^H H f| search. gain_grid may be NULL; otherwise it receives
 * |F| x |W| gains, row-major in tx. */
bs_status bs_oracle_search(const bs_channel* channel,
                           const bs_codebook* codebook_f,
                           const bs_codebook* codebook_w, int* best_tx_index,
                           int* best_rx_index, double* gain_grid);

/* Runs the campaign described by the config file and writes the result CSV.
 * mode is "protocol" or "direct". */
bs_status bs_campaign_run(const char* config_path, const char* mode,
                          const char* out_csv_path);

/* Blocking node entry points behind the tx-node / rx-node binaries.
 * Addresses are "host:port"; config_path may be NULL for defaults. */
bs_status bs_run_tx_node(const char* codebook_path, const char* bind_addr,
                         const char* peer_addr, const char* config_path);
bs_status bs_run_rx_node(const char* codebook_path, const char* bind_addr,
                         const char* peer_addr, const char* config_path,
                         const char* out_record_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BEAMSWEEP_H */
