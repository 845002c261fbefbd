#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace berggren {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (cut, r <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration (contour, rotation policy, bracket).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Every evaluation strategy for a special function failed.
class EvaluationFailure : public Error {
 public:
  EvaluationFailure(const std::string& what, int ell, std::complex<double> eta,
                    std::complex<double> z)
      : Error(what), ell_(ell), eta_(eta), z_(z) {}

  int ell() const { return ell_; }
  std::complex<double> eta() const { return eta_; }
  std::complex<double> z() const { return z_; }

 private:
  int ell_;
  std::complex<double> eta_;
  std::complex<double> z_;
};

/// Pole search did not converge.
class SearchFailure : public Error {
 public:
  using Error::Error;
};

/// Pole search converged far away from the seeded energy.
class WrongPoleError : public Error {
 public:
  using Error::Error;
};

/// A scattering momentum sits (numerically) on a pole: |C+ C-| vanishes.
class NearPoleError : public Error {
 public:
  using Error::Error;
};

/// A complex-rotated ray would cross the Coulomb cut for a state that must not.
class ContourConfigurationError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

/// No rotation angle makes an exterior integral converge (diagonal hit).
class SingularPairError : public Error {
 public:
  using Error::Error;
};

/// Regularized diagonal integrand does not decay as a normalized state must.
class NormalizationInconsistency : public Error {
 public:
  using Error::Error;
};

/// A self-validating quadrature refinement failed to stabilize.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// Dense eigensolver failure.
class EigensolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace berggren
