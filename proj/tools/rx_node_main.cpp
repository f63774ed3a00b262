// rx-node: receiver side of the beam-training session over UDP. Sweeps its
// codebook for every transmit epoch, measures EVM per pair, and writes the
// sweep record CSV.
#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "beamsweep/beamsweep.h"

int main(int argc, char** argv) {
  CLI::App app{"Beam-training receiver node"};
  std::string codebook_path, bind_addr, peer_addr, config_path, out_path;
  app.add_option("--codebook", codebook_path, "receive codebook file")
      ->required();
  app.add_option("--bind", bind_addr, "local address host:port")->required();
  app.add_option("--peer", peer_addr, "transmitter address host:port")
      ->required();
  app.add_option("--config", config_path, "config file (key=value)");
  app.add_option("--out", out_path, "sweep record CSV path")->required();
  CLI11_PARSE(app, argc, argv);

  const bs_status status = bs_run_rx_node(
      codebook_path.c_str(), bind_addr.c_str(), peer_addr.c_str(),
      config_path.empty() ? nullptr : config_path.c_str(), out_path.c_str());
  if (status != BS_OK) {
    std::fprintf(stderr, "rx-node failed (%d): %s\n", status, bs_last_error());
    return 1;
  }
  std::printf("rx-node sweep record written to %s\n", out_path.c_str());
  return 0;
}
