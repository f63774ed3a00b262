#include "core/codebook.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "core/errors.hpp"

namespace beamsweep {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Strips a trailing comment, returning (content, comment).
std::pair<std::string, std::string> split_comment(const std::string& line) {
  const auto pos = line.find('#');
  if (pos == std::string::npos) return {trim(line), ""};
  return {trim(line.substr(0, pos)), trim(line.substr(pos + 1))};
}

long parse_header_field(const std::string& content, const std::string& key,
                        int line_no) {
  const auto pos = content.find(key + "=");
  if (pos == std::string::npos) {
    throw ParseError(line_no, "malformed header: missing " + key +
                                  "= (expected N=<elements> B=<bits> "
                                  "K=<entries>)");
  }
  const char* start = content.c_str() + pos + key.size() + 1;
  char* end = nullptr;
  const long value = std::strtol(start, &end, 10);
  if (end == start) {
    throw ParseError(line_no, "malformed header: " + key + " has no value");
  }
  return value;
}

}  // namespace

void Codebook::validate() const {
  geometry.validate();
  if (entries.empty()) throw DomainError("codebook has no entries");
  if (!labels.empty() && labels.size() != entries.size()) {
    throw DomainError("codebook labels do not match its entries");
  }
  for (const PhaseWeights& w : entries) {
    w.validate();
    if (w.bits != bits) {
      throw DomainError("codebook entries disagree on phase resolution");
    }
    if (w.num_elements() != geometry.num_elements) {
      throw DomainError("codebook entry length does not match the array");
    }
  }
}

Codebook generate_beamsteering_codebook(const ArrayGeometry& geometry,
                                        int bits, int num_beams,
                                        double span_lo_rad,
                                        double span_hi_rad) {
  geometry.validate();
  if (num_beams < 1) throw DomainError("a codebook needs at least one beam");
  if (span_lo_rad > span_hi_rad) {
    throw DomainError("angular span is reversed: " +
                      std::to_string(span_lo_rad) + " > " +
                      std::to_string(span_hi_rad));
  }
  // Validates both ends against (-pi/2, pi/2).
  const double sin_lo = std::sin(SteeringAngle(span_lo_rad).radians());
  const double sin_hi = std::sin(SteeringAngle(span_hi_rad).radians());

  Codebook cb;
  cb.geometry = geometry;
  cb.bits = bits;
  cb.entries.reserve(num_beams);
  cb.labels.reserve(num_beams);
  for (int k = 0; k < num_beams; ++k) {
    const double s =
        num_beams == 1
            ? (sin_lo + sin_hi) / 2.0
            : sin_lo + (sin_hi - sin_lo) * k / (num_beams - 1);
    const SteeringAngle theta(std::asin(s));
    cb.entries.push_back(quantize_weights(steering_vector(geometry, theta),
                                          bits));
    cb.labels.push_back(theta.radians());
  }
  return cb;
}

void save_codebook(const Codebook& cb, std::ostream& out) {
  cb.validate();
  out << "N=" << cb.geometry.num_elements << " B=" << cb.bits
      << " K=" << cb.size() << "\n";
  char buf[64];
  for (int k = 0; k < cb.size(); ++k) {
    const PhaseWeights& w = cb.entries[k];
    for (int n = 0; n < w.num_elements(); ++n) {
      if (n > 0) out << ',';
      out << w.phases[n];
    }
    if (!cb.labels.empty()) {
      std::snprintf(buf, sizeof buf, "%.17g", cb.labels[k]);
      out << "  # theta_rad=" << buf;
    }
    out << "\n";
  }
}

void save_codebook(const Codebook& cb, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  save_codebook(cb, out);
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

Codebook load_codebook(std::istream& in) {
  Codebook cb;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  long want_elements = 0, want_bits = 0, want_entries = 0;

  while (std::getline(in, line)) {
    ++line_no;
    auto [content, comment] = split_comment(line);
    if (content.empty()) continue;

    if (!have_header) {
      want_elements = parse_header_field(content, "N", line_no);
      want_bits = parse_header_field(content, "B", line_no);
      want_entries = parse_header_field(content, "K", line_no);
      if (want_elements < 1) throw ParseError(line_no, "N must be >= 1");
      if (want_bits < 1 || want_bits > 16) {
        throw ParseError(line_no, "B must be between 1 and 16");
      }
      if (want_entries < 1) throw ParseError(line_no, "K must be >= 1");
      cb.geometry.num_elements = static_cast<int>(want_elements);
      cb.bits = static_cast<int>(want_bits);
      have_header = true;
      continue;
    }

    if (cb.size() == static_cast<int>(want_entries)) {
      throw ParseError(line_no, "more than the declared K=" +
                                    std::to_string(want_entries) +
                                    " entries");
    }

    PhaseWeights w;
    w.bits = cb.bits;
    std::stringstream row(content);
    std::string token;
    while (std::getline(row, token, ',')) {
      token = trim(token);
      char* end = nullptr;
      const long idx = std::strtol(token.c_str(), &end, 10);
      if (end == token.c_str() || *end != '\0') {
        throw ParseError(line_no, "'" + token + "' is not a phase index");
      }
      if (idx < 0 || idx >= (1L << cb.bits)) {
        throw ParseError(line_no, "phase index " + std::to_string(idx) +
                                      " out of range for " +
                                      std::to_string(cb.bits) +
                                      "-bit resolution");
      }
      w.phases.push_back(static_cast<uint16_t>(idx));
    }
    if (w.num_elements() != cb.geometry.num_elements) {
      throw ParseError(line_no, "row has " + std::to_string(w.num_elements()) +
                                    " indices, expected " +
                                    std::to_string(cb.geometry.num_elements));
    }
    cb.entries.push_back(std::move(w));

    // Generated files record each beam's steering angle in a comment.
    const std::string tag = "theta_rad=";
    if (const auto pos = comment.find(tag); pos != std::string::npos) {
      cb.labels.push_back(std::strtod(comment.c_str() + pos + tag.size(),
                                      nullptr));
    }
  }

  if (!have_header) throw ParseError(line_no + 1, "missing header line");
  if (cb.size() != static_cast<int>(want_entries)) {
    throw ParseError(line_no + 1,
                     "expected K=" + std::to_string(want_entries) +
                         " entries, found " + std::to_string(cb.size()));
  }
  if (!cb.labels.empty() && cb.labels.size() != cb.entries.size()) {
    throw ParseError(line_no + 1, "only some entries carry theta_rad labels");
  }
  cb.validate();
  return cb;
}

Codebook load_codebook(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load_codebook(in);
}

}  // namespace beamsweep
