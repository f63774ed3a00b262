// Codebook generation and file I/O. A codebook is an ordered set of
// quantized phase-weight vectors; entry order is the sweep order.
//
// File format (plain text):
//   line 1:   N=<elements> B=<bits> K=<entries>
//   K lines:  N comma-separated integer phase indices
//   '#' starts a comment; generated files carry each entry's steering angle
//   as a trailing "# theta_rad=<value>" comment, which load() reads back.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "core/array.hpp"

namespace beamsweep {

struct Codebook {
  ArrayGeometry geometry;
  int bits = 2;
  std::vector<PhaseWeights> entries;
  std::vector<double> labels;  // steering angle per entry (rad); may be empty

  int size() const { return static_cast<int>(entries.size()); }
  void validate() const;
  bool operator==(const Codebook&) const = default;
};

// Entry k steers toward theta_k where sin(theta_k) is uniformly spaced over
// [sin(span_lo), sin(span_hi)] (a single beam takes the midpoint); each entry
// is the quantized steering vector and its label records theta_k.
Codebook generate_beamsteering_codebook(const ArrayGeometry& geometry,
                                        int bits, int num_beams,
                                        double span_lo_rad,
                                        double span_hi_rad);

void save_codebook(const Codebook& cb, std::ostream& out);
void save_codebook(const Codebook& cb, const std::string& path);

// Throws ParseError naming the offending line for malformed headers, ragged
// rows, out-of-range indices, or trailing garbage.
Codebook load_codebook(std::istream& in);
Codebook load_codebook(const std::string& path);

}  // namespace beamsweep
