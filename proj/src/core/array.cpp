#include "core/array.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "core/channel.hpp"
#include "core/errors.hpp"

namespace beamsweep {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxPhaseBits = 16;

void check_bits(int bits) {
  if (bits < 1 || bits > kMaxPhaseBits) {
    throw DomainError("phase resolution must be between 1 and " +
                      std::to_string(kMaxPhaseBits) + " bits, got " +
                      std::to_string(bits));
  }
}
}  // namespace

void ArrayGeometry::validate() const {
  if (num_elements < 1) {
    throw DomainError("array needs at least one element, got " +
                      std::to_string(num_elements));
  }
  if (!(element_spacing_wavelengths > 0.0) ||
      !std::isfinite(element_spacing_wavelengths)) {
    throw DomainError("element spacing must be a positive finite fraction "
                      "of a wavelength");
  }
}

SteeringAngle::SteeringAngle(double theta_rad) : theta_(theta_rad) {
  if (!std::isfinite(theta_rad) || theta_rad <= -std::numbers::pi / 2 ||
      theta_rad >= std::numbers::pi / 2) {
    throw DomainError("steering angle must lie inside (-pi/2, pi/2), got " +
                      std::to_string(theta_rad));
  }
}

Eigen::VectorXcd PhaseWeights::realize() const {
  validate();
  Eigen::VectorXcd w(num_elements());
  const double step = kTwoPi / levels();
  for (int n = 0; n < num_elements(); ++n) {
    w(n) = phases[n] == 0 ? std::complex<double>(1.0, 0.0)
                          : std::polar(1.0, step * phases[n]);
  }
  return w;
}

void PhaseWeights::validate() const {
  check_bits(bits);
  if (phases.empty()) throw DomainError("phase weights are empty");
  for (uint16_t p : phases) {
    if (p >= levels()) {
      throw DomainError("phase index " + std::to_string(p) +
                        " out of range for " + std::to_string(bits) +
                        "-bit resolution");
    }
  }
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geometry,
                                 const SteeringAngle& angle) {
  geometry.validate();
  const double progression = kTwoPi * geometry.element_spacing_wavelengths *
                             std::sin(angle.radians());
  Eigen::VectorXcd a(geometry.num_elements);
  a(0) = std::complex<double>(1.0, 0.0);  // element 0 is the phase reference
  for (int n = 1; n < geometry.num_elements; ++n) {
    a(n) = std::polar(1.0, progression * n);
  }
  return a;
}

PhaseWeights quantize_weights(const Eigen::VectorXcd& ideal, int bits) {
  check_bits(bits);
  if (ideal.size() == 0) throw DomainError("cannot quantize an empty vector");

  const int levels = 1 << bits;
  const double step = kTwoPi / levels;
  PhaseWeights out;
  out.bits = bits;
  out.phases.resize(ideal.size());
  for (Eigen::Index n = 0; n < ideal.size(); ++n) {
    if (std::abs(ideal(n)) == 0.0) {
      throw DomainError("weight " + std::to_string(n) +
                        " has zero magnitude; phase is undefined");
    }
    double phase = std::arg(ideal(n));  // (-pi, pi]
    if (phase < 0.0) phase += kTwoPi;   // [0, 2*pi)
    const double k = phase / step;
    const double k_low = std::floor(k);
    // Nearest grid point; an exact midpoint keeps the lower index.
    const double idx = (k - k_low <= (k_low + 1.0) - k) ? k_low : k_low + 1.0;
    out.phases[n] = static_cast<uint16_t>(
        static_cast<long>(idx) % levels);
  }
  return out;
}

std::complex<double> effective_gain(const Eigen::VectorXcd& w,
                                    const Eigen::MatrixXcd& h,
                                    const Eigen::VectorXcd& f) {
  if (w.size() != h.rows() || f.size() != h.cols()) {
    throw DimensionError(
        "combiner/channel/precoder dimensions disagree: w has " +
        std::to_string(w.size()) + " elements, H is " +
        std::to_string(h.rows()) + "x" + std::to_string(h.cols()) +
        ", f has " + std::to_string(f.size()));
  }
  return w.adjoint() * h * f;
}

std::complex<double> effective_gain(const PhaseWeights& w,
                                    const ChannelMatrix& h,
                                    const PhaseWeights& f) {
  return effective_gain(w.realize(), h.entries(), f.realize());
}

double beamforming_gain(const Eigen::VectorXcd& w, const Eigen::MatrixXcd& h,
                        const Eigen::VectorXcd& f) {
  return std::abs(effective_gain(w, h, f));
}

double beamforming_gain(const PhaseWeights& w, const ChannelMatrix& h,
                        const PhaseWeights& f) {
  return std::abs(effective_gain(w, h, f));
}

}  // namespace beamsweep
