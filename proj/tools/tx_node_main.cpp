// tx-node: transmitter side of the beam-training session over UDP. Walks its
// codebook, programming one entry per receiver pass, until the sweep is done.
#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "beamsweep/beamsweep.h"

int main(int argc, char** argv) {
  CLI::App app{"Beam-training transmitter node"};
  std::string codebook_path, bind_addr, peer_addr, config_path;
  app.add_option("--codebook", codebook_path, "transmit codebook file")
      ->required();
  app.add_option("--bind", bind_addr, "local address host:port")->required();
  app.add_option("--peer", peer_addr, "receiver address host:port")
      ->required();
  app.add_option("--config", config_path, "config file (key=value)");
  CLI11_PARSE(app, argc, argv);

  const bs_status status =
      bs_run_tx_node(codebook_path.c_str(), bind_addr.c_str(),
                     peer_addr.c_str(),
                     config_path.empty() ? nullptr : config_path.c_str());
  if (status != BS_OK) {
    std::fprintf(stderr, "tx-node failed (%d): %s\n", status, bs_last_error());
    return 1;
  }
  std::printf("tx-node session complete\n");
  return 0;
}
