#ifndef FSLAB_COMMON_HPP
#define FSLAB_COMMON_HPP

#include <Eigen/Dense>

#include <random>
#include <stdexcept>
#include <string>

namespace fslab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Invalid user input: bad geometry, bad potential parameters, malformed config.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A solver or iteration failed to produce a usable result.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature or matrix assembly could not meet its accuracy contract.
struct AssemblyError : std::runtime_error {
    explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

/// Seeded generator for probe vectors. All probe-based checks draw from this
/// so that a fixed seed reproduces every random sweep bit for bit.
class ProbeRng {
  public:
    explicit ProbeRng(std::uint64_t seed) : gen_(seed) {}

    Vector gaussian(Index n) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v[i] = normal_(gen_);
        return v;
    }

    Vector positive(Index n) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v[i] = std::abs(normal_(gen_));
        return v;
    }

  private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double relative_gap(double lhs, double rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return (lhs - rhs) / scale;
}

}  // namespace fslab

#endif
