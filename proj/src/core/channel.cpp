#include "core/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace beamsweep {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double db_to_amplitude(double loss_db) { return std::pow(10.0, -loss_db / 20.0); }

// Complex ray amplitude: free-space loss plus any reflection loss, with the
// carrier phase taken from the path length modulo one wavelength.
std::complex<double> ray_gain(double path_length_m, double wavelength_m,
                              double extra_loss_db, double carrier_hz) {
  const double amplitude =
      db_to_amplitude(friis_pathloss_db(path_length_m, carrier_hz) +
                      extra_loss_db);
  const double phase =
      -kTwoPi * std::fmod(path_length_m, wavelength_m) / wavelength_m;
  return std::polar(amplitude, phase);
}
}  // namespace

void RoomGeometry::validate() const {
  if (!(width_m > 0) || !(length_m > 0) || !(ceiling_height_m > 0) ||
      !(antenna_height_m > 0) || !(rx_offset_from_back_wall_m > 0)) {
    throw DomainError("all room dimensions must be positive");
  }
  if (antenna_height_m >= ceiling_height_m) {
    throw DomainError("antenna height must be below the ceiling");
  }
  if (rx_offset_from_back_wall_m >= length_m) {
    throw DomainError("receiver offset places it outside the room");
  }
}

ChannelMatrix::ChannelMatrix(ArrayGeometry rx_geometry,
                             ArrayGeometry tx_geometry,
                             std::vector<PathComponent> paths)
    : rx_geometry_(rx_geometry),
      tx_geometry_(tx_geometry),
      paths_(std::move(paths)) {
  rx_geometry_.validate();
  tx_geometry_.validate();
  if (paths_.empty()) throw DomainError("a channel needs at least one path");
  entries_ = Eigen::MatrixXcd::Zero(rx_geometry_.num_elements,
                                    tx_geometry_.num_elements);
  for (const PathComponent& p : paths_) {
    entries_ += p.gain * steering_vector(rx_geometry_, p.aoa) *
                steering_vector(tx_geometry_, p.aod).adjoint();
  }
}

double friis_pathloss_db(double distance_m, double carrier_hz) {
  if (!(distance_m > 0) || !std::isfinite(distance_m)) {
    throw DomainError("distance must be positive, got " +
                      std::to_string(distance_m));
  }
  if (!(carrier_hz > 0) || !std::isfinite(carrier_hz)) {
    throw DomainError("carrier frequency must be positive");
  }
  const double wavelength_m = kSpeedOfLight / carrier_hz;
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m / wavelength_m);
}

ChannelMatrix build_channel(const RoomGeometry& room, double tx_rx_distance_m,
                            double carrier_hz, double reflection_loss_db,
                            int max_bounces, uint64_t seed,
                            const ArrayGeometry& geometry) {
  room.validate();
  geometry.validate();
  if (!(carrier_hz > 0)) throw DomainError("carrier frequency must be positive");
  if (reflection_loss_db < 0) {
    throw DomainError("reflection loss must be nonnegative");
  }
  if (max_bounces != 0 && max_bounces != 1) {
    throw DomainError("max_bounces must be 0 or 1");
  }
  if (!(tx_rx_distance_m > 0)) {
    throw GeometryError("transmitter distance must be positive");
  }
  if (tx_rx_distance_m >
      room.length_m - room.rx_offset_from_back_wall_m + 1e-12) {
    throw GeometryError("transmitter at " + std::to_string(tx_rx_distance_m) +
                        " m would sit outside the " +
                        std::to_string(room.length_m) + " m room");
  }

  // Receiver on the center line at the back of the room; transmitter
  // tx_rx_distance_m further down the long axis, optionally offset sideways.
  const double rx_x = room.width_m / 2.0;
  double tx_x = rx_x;
  if (seed != 0) {
    RandomStream jitter(derive_seed({seed, 0x706c6163656d656eULL}));
    const double margin = std::min(0.5, room.width_m / 4.0);
    const double half_span = room.width_m / 2.0 - margin;
    tx_x = rx_x + jitter.uniform_range(-half_span, half_span);
  }

  const double d = tx_rx_distance_m;   // longitudinal separation
  const double dx = tx_x - rx_x;       // transverse offset of the TX
  const double wavelength_m = kSpeedOfLight / carrier_hz;

  std::vector<PathComponent> paths;

  // Each array is a ULA along the transverse axis, so it resolves the
  // transverse component of a ray's direction: azimuth = asin(t / L) where
  // t is the transverse offset of the (imaged) far end and L the unfolded
  // ray length. Vertical offsets lengthen the ray without leaving azimuth.
  const auto azimuth = [](double transverse, double length) {
    return SteeringAngle(std::asin(transverse / length));
  };

  // Direct ray: a transmitter offset of +dx appears at a positive azimuth
  // to the receiver and at the mirrored azimuth looking back.
  const double los_length = std::hypot(dx, d);
  paths.push_back({ray_gain(los_length, wavelength_m, 0.0, carrier_hz),
                   azimuth(-dx, los_length), azimuth(dx, los_length), 0.0});

  if (max_bounces == 1) {
    const double h = room.antenna_height_m;
    const double headroom = room.ceiling_height_m - room.antenna_height_m;

    // Image-method rays. Side-wall bounces are seen on the same side by
    // both ends (both look toward the wall); floor/ceiling bounces keep the
    // direct ray's mirrored transverse geometry.
    struct Image {
      double arrival_transverse;    // image-of-TX x minus receiver x
      double departure_transverse;  // image-of-RX x minus transmitter x
      double vertical;
    };
    const Image images[] = {
        {-(tx_x + rx_x), -(tx_x + rx_x), 0.0},  // side wall at x = 0
        {2.0 * room.width_m - tx_x - rx_x, 2.0 * room.width_m - tx_x - rx_x,
         0.0},                                  // side wall at x = width
        {dx, -dx, -2.0 * h},                    // floor
        {dx, -dx, 2.0 * headroom},              // ceiling
    };
    for (const Image& img : images) {
      const double length =
          std::sqrt(img.arrival_transverse * img.arrival_transverse + d * d +
                    img.vertical * img.vertical);
      paths.push_back(
          {ray_gain(length, wavelength_m, reflection_loss_db, carrier_hz),
           azimuth(img.departure_transverse, length),
           azimuth(img.arrival_transverse, length), length - los_length});
    }
  }

  return ChannelMatrix(geometry, geometry, std::move(paths));
}

}  // namespace beamsweep
