#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace halfheavy {

using cplx = std::complex<double>;

enum class SymmetryClass { real, complex };
enum class EntryMode { raw, truncated };

std::string to_string(SymmetryClass s);
std::string to_string(EntryMode m);
SymmetryClass parse_symmetry_class(const std::string& s);
EntryMode parse_entry_mode(const std::string& s);

/// Raised when an argument lies outside the mathematical domain of an
/// operation (alpha outside (2,4), z on the real axis, t <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or insufficient input (too few replicates, non-finite matrix
/// entries, bad configuration values).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Complex powers use the determination of the argument that vanishes on
// (0, +inf), i.e. the principal logarithm.
inline cplx principal_pow(cplx z, double p) {
  if (z == cplx{0.0, 0.0}) return p > 0 ? cplx{0.0, 0.0} : cplx{INFINITY, 0.0};
  return std::exp(p * std::log(z));
}

inline double sgn_im(cplx z) { return z.imag() > 0 ? 1.0 : -1.0; }

}  // namespace halfheavy
