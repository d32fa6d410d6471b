#pragma once

#include <stdexcept>
#include <string>

namespace lgcn {

/// Usage / configuration problems (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File access or malformed input files (CLI exit code 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failures (CLI exit code 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A random-walk style operator needs D^{-1} but some node has zero degree.
class ZeroDegreeNodeError : public NumericalError {
public:
    explicit ZeroDegreeNodeError(const std::string& what) : NumericalError(what) {}
};

/// The Theorem-style approximation bound is undefined for this spectrum
/// (repeated eigenvalues at the probed gaps, or a start vector orthogonal
/// to an eigenvector). Callers skip rather than fabricate a value.
class DegenerateSpectrumError : public NumericalError {
public:
    explicit DegenerateSpectrumError(const std::string& what) : NumericalError(what) {}
};

/// An iterative eigensolver hit its sweep cap.
class ConvergenceError : public NumericalError {
public:
    explicit ConvergenceError(const std::string& what) : NumericalError(what) {}
};

/// Training loss became non-finite.
class DivergenceError : public NumericalError {
public:
    explicit DivergenceError(const std::string& what) : NumericalError(what) {}
};

} // namespace lgcn
