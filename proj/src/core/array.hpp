// Phased-array model: geometry, steering vectors, quantized phase weights,
// and the scalar gain |w^H H f| of a combiner/channel/precoder triple.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace beamsweep {

class ChannelMatrix;

enum class ArrayLayout { UniformLinear };

// Physical description of one phased array.
struct ArrayGeometry {
  int num_elements = 12;
  double element_spacing_wavelengths = 0.5;
  ArrayLayout layout = ArrayLayout::UniformLinear;

  void validate() const;  // throws DomainError
  bool operator==(const ArrayGeometry&) const = default;
};

// Azimuth pointing direction in radians from array broadside, restricted to
// the open interval (-pi/2, pi/2).
class SteeringAngle {
 public:
  SteeringAngle() = default;
  explicit SteeringAngle(double theta_rad);
  double radians() const { return theta_; }

 private:
  double theta_ = 0.0;
};

// Per-element quantized phase indices. Element n realizes the unit-modulus
// weight exp(i * 2*pi * phases[n] / 2^bits); the representation cannot
// express an amplitude taper.
struct PhaseWeights {
  std::vector<uint16_t> phases;
  int bits = 2;

  int num_elements() const { return static_cast<int>(phases.size()); }
  int levels() const { return 1 << bits; }
  Eigen::VectorXcd realize() const;
  void validate() const;
  bool operator==(const PhaseWeights&) const = default;
};

// Ideal (unquantized) array response: element n carries phase
// 2*pi * spacing * n * sin(theta), with element 0 the phase reference.
Eigen::VectorXcd steering_vector(const ArrayGeometry& geometry,
                                 const SteeringAngle& angle);

// Snaps each weight's phase onto the 2^bits-point grid {2*pi*k / 2^bits},
// nearest neighbor with ties broken toward the lower grid index.
// Zero-magnitude weights are rejected.
PhaseWeights quantize_weights(const Eigen::VectorXcd& ideal, int bits);

// Complex bilinear form w^H H f (the signal-path gain used by the link
// simulator) and its modulus, the quantity the exhaustive search maximizes.
std::complex<double> effective_gain(const Eigen::VectorXcd& w,
                                    const Eigen::MatrixXcd& h,
                                    const Eigen::VectorXcd& f);
std::complex<double> effective_gain(const PhaseWeights& w,
                                    const ChannelMatrix& h,
                                    const PhaseWeights& f);

double beamforming_gain(const Eigen::VectorXcd& w, const Eigen::MatrixXcd& h,
                        const Eigen::VectorXcd& f);
double beamforming_gain(const PhaseWeights& w, const ChannelMatrix& h,
                        const PhaseWeights& f);

}  // namespace beamsweep
