// Geometric indoor channel: a line-of-sight ray plus optional first-order
// image-method reflections off the side walls, floor and ceiling, with
// free-space pathloss at the carrier frequency.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "core/array.hpp"

namespace beamsweep {

constexpr double kSpeedOfLight = 299792458.0;  // m/s
constexpr double kDefaultCarrierHz = 60e9;

// Rectangular lecture-room dimensions and antenna placement. The receiver
// sits on the room's center line, rx_offset_from_back_wall_m from the back
// wall; the transmitter faces it down the long axis.
struct RoomGeometry {
  double width_m = 5.0;
  double length_m = 10.0;
  double ceiling_height_m = 3.0;
  double antenna_height_m = 1.6;
  double rx_offset_from_back_wall_m = 2.0;

  void validate() const;  // throws DomainError
};

// One propagation ray: complex amplitude, departure/arrival azimuths, and
// excess path length relative to the direct ray.
struct PathComponent {
  std::complex<double> gain;
  SteeringAngle aod;  // departure azimuth at the transmit array
  SteeringAngle aoa;  // arrival azimuth at the receive array
  double delay_m = 0.0;
};

// H = sum_l gain_l * a_rx(aoa_l) * a_tx(aod_l)^H, kept together with the
// rays it was built from. Immutable after construction.
class ChannelMatrix {
 public:
  ChannelMatrix(ArrayGeometry rx_geometry, ArrayGeometry tx_geometry,
                std::vector<PathComponent> paths);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  const std::vector<PathComponent>& paths() const { return paths_; }
  const ArrayGeometry& rx_geometry() const { return rx_geometry_; }
  const ArrayGeometry& tx_geometry() const { return tx_geometry_; }

 private:
  ArrayGeometry rx_geometry_;
  ArrayGeometry tx_geometry_;
  std::vector<PathComponent> paths_;
  Eigen::MatrixXcd entries_;
};

// Free-space pathloss 20*log10(4*pi*d / lambda) in dB.
double friis_pathloss_db(double distance_m, double carrier_hz);

// Builds the channel for a transmitter placed tx_rx_distance_m down the room
// from the receiver. max_bounces 0 keeps only the direct ray; 1 adds the four
// first-order images (two side walls, floor, ceiling), each attenuated by
// reflection_loss_db on top of its free-space loss. seed 0 places the
// transmitter on the room's center line; a nonzero seed draws a deterministic
// transverse offset so repeated seeds explore distinct geometries.
ChannelMatrix build_channel(const RoomGeometry& room, double tx_rx_distance_m,
                            double carrier_hz, double reflection_loss_db,
                            int max_bounces, uint64_t seed,
                            const ArrayGeometry& geometry = {});

}  // namespace beamsweep
