#pragma once

#include "spdc/biphoton.hpp"

#include <string>
#include <vector>

namespace spdc {

// Fit of S to A exp(-a ws^2 - b wi^2 - 2 c ws wi); detunings in rad/fs, coefficients in fs^2.
struct GaussianFitResult {
  double amplitude = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double metric = 0.0;   // c^2 / (a b)
  double overlap = 0.0;  // cosine similarity of S and the fitted surface over the grid
  double r = 0.0;        // -c / sqrt(a b)
  std::size_t fitted_nodes = 0;
  int iterations = 0;
};

inline constexpr double kFitMaskThreshold = 1e-3;

GaussianFitResult fit_gaussian(const JointSpectrumGrid& grid);

struct SchmidtResult {
  std::vector<double> coefficients;  // descending, sum 1
  double entropy_bits = 0.0;
  double schmidt_number = 1.0;
  bool approximate = false;  // computed from sqrt(S) under a zero-phase assumption
};

SchmidtResult schmidt_decompose(const JointSpectrumGrid& grid);

// Schmidt spectrum of an arbitrary matrix; weights are per-row / per-column measures.
SchmidtResult schmidt_from_matrix(const std::vector<std::complex<double>>& m, std::size_t rows,
                                  std::size_t cols, const std::vector<double>& row_weights,
                                  const std::vector<double>& col_weights);

enum class Regime { Anticorrelated, Uncorrelated, Correlated, Asymmetric };

const char* to_string(Regime r) noexcept;

struct RegimeThresholds {
  double r_min = 0.5;
  double metric_max = 0.05;
};

Regime classify_regime(const GaussianFitResult& fit, const RegimeThresholds& t = {});

// Trapezoid measure of a (possibly non-uniform) axis.
std::vector<double> axis_weights(const std::vector<double>& axis);

}  // namespace spdc
