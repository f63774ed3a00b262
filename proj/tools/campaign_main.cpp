// campaign: run the full sweep campaign described by a config file and
// write the result CSV.
#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "beamsweep/beamsweep.h"

int main(int argc, char** argv) {
  CLI::App app{"Beam-training measurement campaign"};
  std::string config_path;
  std::string mode = "direct";
  std::string out_path;
  app.add_option("--config", config_path, "campaign config file (key=value)")
      ->required();
  app.add_option("--mode", mode, "sweep mode: protocol or direct")
      ->check(CLI::IsMember({"protocol", "direct"}));
  app.add_option("--out", out_path, "output CSV path")->required();
  CLI11_PARSE(app, argc, argv);

  const bs_status status =
      bs_campaign_run(config_path.c_str(), mode.c_str(), out_path.c_str());
  if (status != BS_OK) {
    std::fprintf(stderr, "campaign failed (%d): %s\n", status,
                 bs_last_error());
    return 1;
  }
  std::printf("campaign results written to %s\n", out_path.c_str());
  return 0;
}
