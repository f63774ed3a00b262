#include <doctest.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "core/campaign.hpp"
#include "core/errors.hpp"

using namespace beamsweep;

namespace {

// Small, fast campaign used by the mode/determinism tests.
CampaignConfig small_config() {
  CampaignConfig cfg;
  cfg.num_beams = 4;
  cfg.distances_m = {2.0, 4.0};
  cfg.power_levels_dbm = {0.0, 10.0};
  cfg.num_symbols = 200;
  cfg.channel_seed = 5;
  cfg.seed = 33;
  cfg.protocol.retry_timeout = std::chrono::milliseconds(50);
  return cfg;
}

std::string campaign_csv(const CampaignConfig& cfg, SweepMode mode) {
  std::ostringstream os;
  run_campaign(cfg, mode, os);
  return os.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& contents)
      : path("/tmp/beamsweep_test_" + name + "_" +
             std::to_string(::getpid())) {
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("config parsing covers every key and rejects unknown ones") {
  std::stringstream file(
      "# campaign configuration\n"
      "num_elements = 12\n"
      "element_spacing_wavelengths = 0.5\n"
      "phase_bits = 3\n"
      "tx_codebook = /tmp/f.cb\n"
      "rx_codebook = /tmp/w.cb\n"
      "num_beams = 8\n"
      "span_lo_deg = -45\n"
      "span_hi_deg = 45\n"
      "room_width_m = 5\n"
      "room_length_m = 10\n"
      "ceiling_height_m = 3\n"
      "antenna_height_m = 1.6\n"
      "rx_offset_from_back_wall_m = 2\n"
      "carrier_hz = 60e9\n"
      "reflection_loss_db = 12\n"
      "max_bounces = 1\n"
      "channel_seed = 7\n"
      "distances_m = 1, 2, 4\n"
      "power_levels_dbm = -5, 0, 5\n"
      "noise_power_dbm = -70\n"
      "num_symbols = 12500\n"
      "samples_per_symbol = 4\n"
      "evm-log-base = paper10\n"
      "seed = 42\n"
      "retry_timeout_ms = 100\n"
      "max_retries = 9\n"
      "drop_probability = 0.05\n"
      "transport = memory\n"
      "udp_base_port = 0\n");
  const CampaignConfig cfg = parse_campaign_config(file);
  CHECK(cfg.phase_bits == 3);
  CHECK(cfg.tx_codebook_path == "/tmp/f.cb");
  CHECK(cfg.span_lo_rad == doctest::Approx(-std::numbers::pi / 4));
  CHECK(cfg.distances_m == std::vector<double>{1, 2, 4});
  CHECK(cfg.power_levels_dbm == std::vector<double>{-5, 0, 5});
  CHECK(cfg.channel_seed == 7);
  CHECK(cfg.protocol.max_retries == 9);
  CHECK(cfg.drop_probability == 0.05);

  std::stringstream unknown("distances_m = 1\nbogus_key = 3\n");
  try {
    parse_campaign_config(unknown);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  std::stringstream noiseless("noise_power_dbm = -inf\n");
  CHECK(parse_campaign_config(noiseless).noise_power_dbm ==
        kNoiselessDbm);

  std::stringstream bad_powers("power_levels_dbm = 10, 10\n");
  CHECK_THROWS_AS(parse_campaign_config(bad_powers), DomainError);
}

TEST_CASE("per-pair seeds are stable and collision-free on a small grid") {
  CHECK(pair_seed(1, 0, 0, 0, 0) == pair_seed(1, 0, 0, 0, 0));
  std::vector<uint64_t> seen;
  for (uint16_t tx = 0; tx < 16; ++tx) {
    for (uint16_t rx = 0; rx < 16; ++rx) {
      seen.push_back(pair_seed(1, 0, 0, tx, rx));
    }
  }
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("oracle search on a single-candidate codebook returns (0, 0)") {
  const Codebook cb = generate_beamsteering_codebook({12, 0.5}, 2, 1, 0, 0);
  const ChannelMatrix h = build_channel({}, 4.0, kDefaultCarrierHz, 10, 1, 1);
  const OracleResult r = oracle_search(cb, cb, h);
  CHECK(r.best_tx_index == 0);
  CHECK(r.best_rx_index == 0);
  CHECK(r.gain_grid.size() == 1);
}

TEST_CASE("oracle selection is invariant to positive channel scaling") {
  const Codebook cb = generate_beamsteering_codebook(
      {12, 0.5}, 2, 8, -std::numbers::pi / 3, std::numbers::pi / 3);
  const ChannelMatrix h = build_channel({}, 3.0, kDefaultCarrierHz, 10, 1, 9);
  const OracleResult base = oracle_search(cb, cb, h);

  // Scale the same geometry by scaling every stored path gain.
  std::vector<PathComponent> scaled_paths = h.paths();
  for (auto& p : scaled_paths) p.gain *= 250.0;
  const ChannelMatrix scaled(h.rx_geometry(), h.tx_geometry(), scaled_paths);
  const OracleResult r = oracle_search(cb, cb, scaled);
  CHECK(r.best_tx_index == base.best_tx_index);
  CHECK(r.best_rx_index == base.best_rx_index);
  for (size_t i = 0; i < r.gain_grid.size(); ++i) {
    CHECK(r.gain_grid[i] ==
          doctest::Approx(250.0 * base.gain_grid[i]).epsilon(1e-9));
  }
}

TEST_CASE("a fine codebook pair brackets the LOS angle on both ends") {
  // Off-axis rank-one channel; with a dense codebook the oracle must pick
  // the beams whose labels are nearest the true departure/arrival angles.
  const ChannelMatrix h = build_channel({}, 4.0, kDefaultCarrierHz, 10, 0, 17);
  const double aoa = h.paths()[0].aoa.radians();
  const double aod = h.paths()[0].aod.radians();
  const Codebook fine = generate_beamsteering_codebook(
      {12, 0.5}, 8, 64, -std::numbers::pi / 3, std::numbers::pi / 3);
  const OracleResult r = oracle_search(fine, fine, h);

  auto nearest_label = [&](double angle) {
    int best = 0;
    for (int k = 1; k < fine.size(); ++k) {
      if (std::abs(fine.labels[k] - angle) <
          std::abs(fine.labels[best] - angle)) {
        best = k;
      }
    }
    return best;
  };
  CHECK(r.best_tx_index == nearest_label(aod));
  CHECK(r.best_rx_index == nearest_label(aoa));
}

TEST_CASE("counting contract: one point with 2x2 codebooks -> 5 data rows") {
  CampaignConfig cfg = small_config();
  cfg.num_beams = 2;
  cfg.distances_m = {3.0};
  cfg.power_levels_dbm = {10.0};
  const std::string csv = campaign_csv(cfg, SweepMode::Direct);
  CHECK(count_lines(csv) == 1 + 4 + 1);  // header + grid + summary
  CHECK(csv.rfind("distance_m,power_dbm,tx_idx,rx_idx,e_error,e_ref,evm_db,"
                  "is_best\n",
                  0) == 0);
  // Exactly one summary row.
  int best_rows = 0;
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) best_rows += line.ends_with(",1");
  CHECK(best_rows == 1);
}

TEST_CASE("protocol mode and direct mode produce identical CSV bytes") {
  const CampaignConfig cfg = small_config();
  const std::string direct = campaign_csv(cfg, SweepMode::Direct);
  const std::string protocol = campaign_csv(cfg, SweepMode::Protocol);
  CHECK(direct == protocol);
  CHECK(count_lines(direct) == 1 + 4 * (16 + 1));
}

TEST_CASE("campaign runs are deterministic, including across transports") {
  CampaignConfig cfg = small_config();
  const std::string first = campaign_csv(cfg, SweepMode::Protocol);
  const std::string second = campaign_csv(cfg, SweepMode::Protocol);
  CHECK(first == second);

  cfg.transport = TransportKind::Udp;
  const std::string udp = campaign_csv(cfg, SweepMode::Protocol);
  CHECK(udp == first);
}

TEST_CASE("lossy in-memory campaign still matches the lossless bytes") {
  CampaignConfig cfg = small_config();
  cfg.distances_m = {3.0};
  const std::string clean = campaign_csv(cfg, SweepMode::Protocol);
  cfg.drop_probability = 0.1;
  cfg.protocol.retry_timeout = std::chrono::milliseconds(5);
  const std::string lossy = campaign_csv(cfg, SweepMode::Protocol);
  CHECK(lossy == clean);
}

TEST_CASE("best-pair EVM degrades with distance through the full pipeline") {
  CampaignConfig cfg = small_config();
  cfg.max_bounces = 0;
  cfg.channel_seed = 0;
  cfg.num_beams = 4;
  cfg.distances_m = {1.0, 2.0, 4.0};
  cfg.power_levels_dbm = {10.0};
  cfg.num_symbols = 2000;
  const std::string csv = campaign_csv(cfg, SweepMode::Direct);

  // Pull the summary rows (is_best == 1) in order.
  std::vector<double> best_evm;
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    if (!line.ends_with(",1")) continue;
    double d, p, e_err, e_ref, evm;
    int tx, rx, best;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%d,%d,%lf,%lf,%lf,%d", &d, &p,
                        &tx, &rx, &e_err, &e_ref, &evm, &best) == 8);
    best_evm.push_back(evm);
  }
  REQUIRE(best_evm.size() == 3);
  CHECK(best_evm[0] < best_evm[1]);
  CHECK(best_evm[1] < best_evm[2]);
}

TEST_CASE("an unreachable peer names the failing campaign point") {
  CampaignConfig cfg = small_config();
  cfg.distances_m = {3.0};
  cfg.power_levels_dbm = {10.0};
  cfg.drop_probability = 0.97;
  cfg.protocol.retry_timeout = std::chrono::milliseconds(1);
  cfg.protocol.max_retries = 2;
  std::ostringstream os;
  try {
    run_campaign(cfg, SweepMode::Protocol, os);
    FAIL("expected PeerUnreachableError");
  } catch (const PeerUnreachableError& e) {
    CHECK(std::string(e.what()).find("distance=3.0") != std::string::npos);
  }
}

TEST_CASE("node runners complete a session over loopback UDP") {
  const Codebook cb = generate_beamsteering_codebook(
      {12, 0.5}, 2, 3, -std::numbers::pi / 4, std::numbers::pi / 4);
  const TempFile codebook_file("cb", [&] {
    std::ostringstream os;
    save_codebook(cb, os);
    return os.str();
  }());

  CampaignConfig cfg;
  cfg.tx_codebook_path = codebook_file.path;
  cfg.num_symbols = 100;
  cfg.distances_m = {3.0};
  cfg.power_levels_dbm = {10.0};
  cfg.protocol.retry_timeout = std::chrono::milliseconds(100);

  const std::string record_path =
      "/tmp/beamsweep_test_record_" + std::to_string(::getpid()) + ".csv";

  std::atomic<bool> tx_ok{false};
  std::thread tx_thread([&] {
    try {
      run_tx_node(codebook_file.path, "127.0.0.1:47611", "127.0.0.1:47612",
                  cfg);
      tx_ok = true;
    } catch (...) {
    }
  });
  const SweepRecord record =
      run_rx_node(codebook_file.path, "127.0.0.1:47612", "127.0.0.1:47611",
                  cfg, record_path);
  tx_thread.join();
  CHECK(tx_ok.load());

  CHECK(record.num_tx == 3);
  CHECK(record.num_rx == 3);

  std::ifstream in(record_path);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(count_lines(text) == 1 + 9 + 1);
  std::remove(record_path.c_str());
}
