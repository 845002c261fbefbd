#include "berggren/eig.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "berggren/errors.hpp"

namespace berggren {

namespace {

Eigen::MatrixXcd hamiltonian(const KernelMatrix& kernel) {
  Eigen::MatrixXcd h = kernel.elements;
  for (int i = 0; i < kernel.n; ++i) h(i, i) += kernel.basis_energies[i];
  return h;
}

[[noreturn]] void fail(const KernelMatrix& kernel, const DiagOptions& options,
                       const std::string& why) {
  std::string path = options.failure_dump;
  if (path.empty()) {
    path = (std::filesystem::temp_directory_path() / "berggren_failed_matrix.txt").string();
  }
  std::ofstream out(path);
  if (out) write_matrix(kernel, out);
  throw EigensolverError(why + " (matrix written to " + path + ")");
}

}  // namespace

Decomposition diagonalize(const KernelMatrix& kernel, const DiagOptions& options) {
  const Eigen::MatrixXcd h = hamiltonian(kernel);
  if (!h.allFinite()) fail(kernel, options, "non-finite matrix entries");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h, true);
  if (solver.info() != Eigen::Success) fail(kernel, options, "eigensolver did not converge");
  Decomposition d;
  d.eigenvalues = solver.eigenvalues();
  d.vectors = solver.eigenvectors();
  d.matrix_norm = h.norm();
  for (int c = 0; c < d.vectors.cols(); ++c) {
    const cplx norm2 = d.vectors.col(c).transpose() * d.vectors.col(c);
    if (std::abs(norm2) < 1e-14) {
      fail(kernel, options, "eigenvector " + std::to_string(c) + " has vanishing Berggren norm");
    }
    d.vectors.col(c) /= std::sqrt(norm2);
  }
  return d;
}

double eigen_residual(const KernelMatrix& kernel, const Decomposition& d, int index) {
  const Eigen::MatrixXcd h = hamiltonian(kernel);
  const Eigen::VectorXcd v = d.vectors.col(index);
  const double scale = d.matrix_norm > 0.0 ? d.matrix_norm : 1.0;
  return (h * v - d.eigenvalues(index) * v).norm() / (scale * v.norm());
}

Selection select_state(const Decomposition& d, int pole_index,
                       std::optional<cplx> reference_energy) {
  const int n = static_cast<int>(d.eigenvalues.size());
  if (pole_index < 0 || pole_index >= d.vectors.rows()) {
    throw DomainError("select_state: pole index out of range");
  }
  std::vector<double> weight(n);
  for (int c = 0; c < n; ++c) weight[c] = std::norm(d.vectors(pole_index, c));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto distance = [&](int c) {
    return reference_energy ? std::abs(d.eigenvalues(c) - *reference_energy) : 0.0;
  };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(weight[a] - weight[b]) > 1e-12 * std::max(weight[a], weight[b])) {
      return weight[a] > weight[b];
    }
    return distance(a) < distance(b);
  });
  Selection s;
  s.index = order.front();
  s.weight = weight[s.index];
  s.candidates.assign(order.begin(), order.begin() + std::min(n, 3));
  if (s.weight < 0.5) {
    s.ambiguous = true;
    std::ostringstream os;
    os << "ambiguous selection: largest |c_pole|^2 = " << s.weight << "; candidates";
    for (int c : s.candidates) os << " [E = " << d.eigenvalues(c) << ", w = " << weight[c] << "]";
    s.warning = os.str();
  }
  return s;
}

std::vector<cplx> reconstruct(const Eigen::VectorXcd& coefficients, const DiscretizedBasis& basis,
                              bool on_nodes) {
  if (coefficients.size() != basis.size()) {
    throw DomainError("reconstruct: coefficient count does not match the basis");
  }
  const std::size_t m = on_nodes ? basis.grid.nodes.size() : basis.grid.probe.size();
  std::vector<cplx> u(m, 0.0);
  for (int i = 0; i < basis.size(); ++i) {
    const BerggrenState& s = basis.states[i];
    const cplx c = coefficients(i) * std::sqrt(s.w);
    const std::vector<cplx>& samples = on_nodes ? s.u_interior : s.u_probe;
    for (std::size_t j = 0; j < m; ++j) u[j] += c * samples[j];
  }
  return u;
}

std::pair<double, double> rms_compare(const std::vector<cplx>& u,
                                      const std::vector<cplx>& u_exact) {
  if (u.size() != u_exact.size() || u.empty()) {
    throw DomainError("rms_compare: samples are not on the same grid");
  }
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const cplx d = u[i] - u_exact[i];
    re += d.real() * d.real();
    im += d.imag() * d.imag();
  }
  const double n = static_cast<double>(u.size());
  return {std::sqrt(re / n), std::sqrt(im / n)};
}

cplx alignment_factor(const std::vector<cplx>& u_nodes, const std::vector<cplx>& ref_nodes,
                      const RadialGrid& grid) {
  if (u_nodes.size() != grid.nodes.size() || ref_nodes.size() != grid.nodes.size()) {
    throw DomainError("alignment_factor: samples are not on the interior grid");
  }
  cplx norm = 0.0;
  cplx overlap = 0.0;
  for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
    norm += grid.weights[j] * u_nodes[j] * u_nodes[j];
    overlap += grid.weights[j] * u_nodes[j] * ref_nodes[j];
  }
  if (norm == 0.0) throw DomainError("alignment_factor: zero wave function");
  cplx f = 1.0 / std::sqrt(norm);
  if ((f * overlap).real() < 0.0) f = -f;
  return f;
}

DiagResult solve(const DiscretizedBasis& basis, const KernelMatrix& kernel, int pole_index,
                 const BerggrenState& exact, const DiagOptions& options) {
  const Decomposition d = diagonalize(kernel, options);
  const Selection sel = select_state(d, pole_index, exact.e);
  DiagResult r;
  r.eigenvalues.assign(d.eigenvalues.data(), d.eigenvalues.data() + d.eigenvalues.size());
  r.selected_index = sel.index;
  r.coefficients = d.vectors.col(sel.index);
  // Fix the overall sign so the pole coefficient has a positive real part.
  if (r.coefficients(pole_index).real() < 0.0) r.coefficients = -r.coefficients;
  const cplx lambda = d.eigenvalues(sel.index);
  r.E = lambda.real();
  r.Gamma = -2000.0 * lambda.imag();
  r.pole_weight = sel.weight;
  r.warning = sel.warning;
  r.residual = eigen_residual(kernel, d, sel.index);
  if (!(r.residual <= options.residual_tolerance)) {
    fail(kernel, options, "selected eigenpair residual " + std::to_string(r.residual));
  }

  // Both wave functions normalized on [0, R] and sign-aligned.
  const std::vector<cplx> nodes = reconstruct(r.coefficients, basis, true);
  const cplx f_exact = alignment_factor(exact.u_interior, exact.u_interior, basis.grid);
  std::vector<cplx> exact_nodes = exact.u_interior;
  for (auto& v : exact_nodes) v *= f_exact;
  const cplx f = alignment_factor(nodes, exact_nodes, basis.grid);
  r.u_reconstructed = reconstruct(r.coefficients, basis, false);
  for (auto& v : r.u_reconstructed) v *= f;
  std::vector<cplx> exact_probe = exact.u_probe;
  for (auto& v : exact_probe) v *= f_exact;
  std::tie(r.rms_re, r.rms_im) = rms_compare(r.u_reconstructed, exact_probe);
  return r;
}

}  // namespace berggren
