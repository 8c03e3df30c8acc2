#include "spdc/analysis.hpp"

#include "spdc/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace spdc {

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Anticorrelated: return "anticorrelated";
    case Regime::Uncorrelated: return "uncorrelated";
    case Regime::Correlated: return "correlated";
    case Regime::Asymmetric: return "asymmetric";
  }
  return "unknown";
}

Regime classify_regime(const GaussianFitResult& fit, const RegimeThresholds& t) {
  if (fit.r <= -t.r_min) return Regime::Anticorrelated;
  if (fit.r >= t.r_min) return Regime::Correlated;
  if (fit.metric <= t.metric_max) return Regime::Uncorrelated;
  return Regime::Asymmetric;
}

std::vector<double> axis_weights(const std::vector<double>& axis) {
  const std::size_t n = axis.size();
  std::vector<double> w(n, 0.0);
  if (n < 2) return std::vector<double>(n, 1.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = 0.5 * std::abs(axis[k + 1] - axis[k]);
    w[k] += h;
    w[k + 1] += h;
  }
  return w;
}

namespace {

struct MaskedData {
  Eigen::VectorXd x, y, s;  // normalized detunings and intensities
  double sx = 1.0, sy = 1.0;
};

MaskedData masked_nodes(const JointSpectrumGrid& grid) {
  std::vector<double> xs, ys, ss;
  std::set<std::size_t> rows_half, cols_half;
  for (std::size_t is = 0; is < grid.n_s(); ++is)
    for (std::size_t ii = 0; ii < grid.n_i(); ++ii) {
      const double s = grid.S(is, ii);
      if (s >= 0.5) {
        rows_half.insert(is);
        cols_half.insert(ii);
      }
      if (s >= kFitMaskThreshold) {
        xs.push_back(grid.omega_s[is]);
        ys.push_back(grid.omega_i[ii]);
        ss.push_back(s);
      }
    }
  if (rows_half.size() < 3 || cols_half.size() < 3)
    throw_domain("Gaussian fit needs >= 3 grid points above half maximum along each axis (grid " +
                 grid.meta.grid_hash + ")");

  MaskedData d;
  const auto n = static_cast<Eigen::Index>(ss.size());
  d.x = Eigen::Map<Eigen::VectorXd>(xs.data(), n);
  d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  d.s = Eigen::Map<Eigen::VectorXd>(ss.data(), n);
  d.sx = std::sqrt(d.x.squaredNorm() / n);
  d.sy = std::sqrt(d.y.squaredNorm() / n);
  if (!(d.sx > 0.0) || !(d.sy > 0.0)) throw_numeric("degenerate fit support");
  d.x /= d.sx;
  d.y /= d.sy;
  return d;
}

// params: log A, a', b', c' in normalized coordinates
Eigen::VectorXd model(const MaskedData& d, const Eigen::Vector4d& p) {
  return (p[0] - p[1] * d.x.array().square() - p[2] * d.y.array().square() -
          2.0 * p[3] * d.x.array() * d.y.array())
      .exp()
      .matrix();
}

}  // namespace

GaussianFitResult fit_gaussian(const JointSpectrumGrid& grid) {
  const auto d = masked_nodes(grid);
  const Eigen::Index n = d.s.size();

  // Log-linear start: weighted least squares on log S with squared-residual weights S^2.
  Eigen::MatrixXd A(n, 4);
  A.col(0) = d.s;
  A.col(1) = -(d.s.array() * d.x.array().square()).matrix();
  A.col(2) = -(d.s.array() * d.y.array().square()).matrix();
  A.col(3) = -(2.0 * d.s.array() * d.x.array() * d.y.array()).matrix();
  const Eigen::VectorXd rhs = (d.s.array() * d.s.array().log()).matrix();
  Eigen::Vector4d p = A.colPivHouseholderQr().solve(rhs);

  // Levenberg-Marquardt refinement on the intensity residuals.
  auto cost_of = [&](const Eigen::Vector4d& q) { return (model(d, q) - d.s).squaredNorm(); };
  double cost = cost_of(p);
  double lambda = 1e-3;
  int it = 0;
  bool converged = false;
  for (; it < 200 && !converged; ++it) {
    const Eigen::VectorXd f = model(d, p);
    const Eigen::VectorXd res = f - d.s;
    Eigen::MatrixXd J(n, 4);
    J.col(0) = f;
    J.col(1) = -(d.x.array().square() * f.array()).matrix();
    J.col(2) = -(d.y.array().square() * f.array()).matrix();
    J.col(3) = -(2.0 * d.x.array() * d.y.array() * f.array()).matrix();
    const Eigen::Matrix4d JtJ = J.transpose() * J;
    const Eigen::Vector4d g = J.transpose() * res;
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      Eigen::Matrix4d H = JtJ;
      H.diagonal() += lambda * JtJ.diagonal();
      const Eigen::Vector4d step = H.ldlt().solve(-g);
      const Eigen::Vector4d trial = p + step;
      const double c = cost_of(trial);
      if (std::isfinite(c) && c <= cost) {
        const double rel = (cost - c) / std::max(cost, 1e-300);
        p = trial;
        cost = c;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        converged = rel < 1e-14 || step.norm() < 1e-13 * (1.0 + p.norm());
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) converged = true;
  }

  GaussianFitResult r;
  r.amplitude = std::exp(p[0]);
  r.a = p[1] / (d.sx * d.sx);
  r.b = p[2] / (d.sy * d.sy);
  r.c = p[3] / (d.sx * d.sy);
  r.fitted_nodes = static_cast<std::size_t>(n);
  r.iterations = it;
  if (!(r.a > 0.0)) throw_numeric("Gaussian fit violates a > 0 (grid " + grid.meta.grid_hash + ")");
  if (!(r.b > 0.0)) throw_numeric("Gaussian fit violates b > 0 (grid " + grid.meta.grid_hash + ")");
  if (!(r.a * r.b - r.c * r.c > 0.0))
    throw_numeric("Gaussian fit violates a*b - c^2 > 0 (grid " + grid.meta.grid_hash + ")");
  r.r = -r.c / std::sqrt(r.a * r.b);
  r.metric = r.r * r.r;

  double sf = 0.0, ss = 0.0, ff = 0.0;
  for (std::size_t is = 0; is < grid.n_s(); ++is)
    for (std::size_t ii = 0; ii < grid.n_i(); ++ii) {
      const double ws = grid.omega_s[is], wi = grid.omega_i[ii];
      const double f =
          r.amplitude * std::exp(-r.a * ws * ws - r.b * wi * wi - 2.0 * r.c * ws * wi);
      const double s = grid.S(is, ii);
      sf += s * f;
      ss += s * s;
      ff += f * f;
    }
  r.overlap = sf / std::sqrt(ss * ff);
  return r;
}

SchmidtResult schmidt_from_matrix(const std::vector<std::complex<double>>& m, std::size_t rows,
                                  std::size_t cols, const std::vector<double>& row_weights,
                                  const std::vector<double>& col_weights) {
  if (m.size() != rows * cols || row_weights.size() != rows || col_weights.size() != cols)
    throw_domain("Schmidt decomposition: matrix and weight sizes disagree");
  Eigen::MatrixXcd M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      M(i, j) = m[i * cols + j] * std::sqrt(row_weights[i] * col_weights[j]);
  if (!M.allFinite()) throw_numeric("Schmidt decomposition: non-finite amplitude");

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
  if (svd.info() != Eigen::Success) throw_numeric("singular value decomposition failed");
  const Eigen::VectorXd sv = svd.singularValues();

  SchmidtResult out;
  const double total = sv.squaredNorm();
  if (!(total > 0.0)) throw_numeric("Schmidt decomposition of a zero amplitude");
  out.coefficients.resize(static_cast<std::size_t>(sv.size()));
  double purity = 0.0, entropy = 0.0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    const double lam = sv[k] * sv[k] / total;
    out.coefficients[static_cast<std::size_t>(k)] = lam;
    purity += lam * lam;
    if (lam > 0.0) entropy -= lam * std::log2(lam);
  }
  out.entropy_bits = std::max(entropy, 0.0);
  out.schmidt_number = 1.0 / purity;
  return out;
}

SchmidtResult schmidt_decompose(const JointSpectrumGrid& grid) {
  try {
    auto r = schmidt_from_matrix(grid.amplitude, grid.n_s(), grid.n_i(),
                                 axis_weights(grid.omega_s), axis_weights(grid.omega_i));
    r.approximate = grid.meta.intensity_only;
    return r;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Numeric)
      throw_numeric(std::string(e.what()) + " (grid " + grid.meta.grid_hash + ")");
    throw;
  }
}

}  // namespace spdc
