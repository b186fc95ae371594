#include "inharmonica/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "inharmonica/format.hpp"
#include "inharmonica/model.hpp"

namespace inharmonica {

namespace {

constexpr double kConditionLimit = 1e12;

// Inverse of a symmetric matrix through its eigendecomposition, guarded by a
// condition estimate.
Eigen::MatrixXd guarded_symmetric_inverse(const Eigen::MatrixXd& m,
                                          const char* label) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) {
    throw NumericalError(std::string(label) + ": eigendecomposition failed");
  }
  const Eigen::VectorXd abs_eigs = eig.eigenvalues().cwiseAbs();
  const double lo = abs_eigs.minCoeff();
  const double hi = abs_eigs.maxCoeff();
  if (!(lo > 0.0) || hi / lo > kConditionLimit) {
    std::ostringstream msg;
    msg << label << ": condition estimate "
        << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity())
        << " exceeds 1e12; refusing to invert";
    throw NumericalError(msg.str());
  }
  return eig.eigenvectors() *
         eig.eigenvalues().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

void check_matching_order(const HarmonicParams& theta,
                          const TrueSignalSpec& spec) {
  if (theta.harmonic_count() != spec.component_count()) {
    throw std::invalid_argument(
        "harmonic order does not match the number of true components");
  }
}

struct OffsetTables {
  std::vector<double> phase_offsets;
  std::vector<double> freq_offsets;
};

OffsetTables make_offsets(const HarmonicParams& theta,
                          const TrueSignalSpec& spec) {
  const std::size_t k_count = theta.harmonic_count();
  OffsetTables tables;
  tables.phase_offsets.resize(k_count);
  tables.freq_offsets.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    tables.phase_offsets[k] = std::remainder(
        theta.phases()[k] - spec.phases()[k], kTwoPi);
    tables.freq_offsets[k] =
        theta.omega() * static_cast<double>(k + 1) - spec.frequencies()[k];
  }
  return tables;
}

}  // namespace

SandwichMatrices build_sandwich(const HarmonicParams& theta,
                                const TrueSignalSpec& spec,
                                std::size_t n_samples) {
  check_matching_order(theta, spec);
  if (n_samples == 0) throw std::invalid_argument("n_samples must be >= 1");
  const auto dim = static_cast<Eigen::Index>(2 * theta.harmonic_count() + 1);
  const ComplexSeries eps = waveform_diff(theta, spec, n_samples);

  Eigen::MatrixXcd outer = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd weighted_hessian = Eigen::MatrixXcd::Zero(dim, dim);
  double mismatch_energy = 0.0;
  for (std::size_t t = 0; t < n_samples; ++t) {
    const double time = static_cast<double>(t);
    const Eigen::VectorXcd grad = model_gradient(theta, time);
    outer.noalias() += grad.conjugate() * grad.transpose();
    weighted_hessian.noalias() +=
        std::conj(eps[t]) * model_hessian(theta, time);
    mismatch_energy += std::norm(eps[t]);
  }

  SandwichMatrices out;
  out.noise_variance = spec.noise_variance();
  out.pseudo_variance =
      spec.noise_variance() + mismatch_energy / static_cast<double>(n_samples);
  const double s2 = out.pseudo_variance;
  if (!(s2 > 0.0)) {
    throw NumericalError("pseudo variance is zero; sandwich undefined");
  }
  const Eigen::MatrixXd s = outer.real();
  out.score_info = (2.0 * out.noise_variance / (s2 * s2)) * s;
  out.mismatch_curvature = (2.0 / s2) * weighted_hessian.real();
  out.expected_hessian = -(2.0 / s2) * s - out.mismatch_curvature;
  return out;
}

Eigen::VectorXd mcrlb_exact(const SandwichMatrices& matrices) {
  const Eigen::MatrixXd inv_hessian = guarded_symmetric_inverse(
      matrices.expected_hessian, "expected hessian");
  return (inv_hessian * matrices.score_info * inv_hessian).diagonal();
}

Eigen::VectorXd crlb_harmonic(const HarmonicParams& theta,
                              double noise_variance, std::size_t n_samples) {
  if (!(noise_variance > 0.0)) {
    throw std::invalid_argument("noise variance must be positive for a CRLB");
  }
  const auto dim = static_cast<Eigen::Index>(2 * theta.harmonic_count() + 1);
  Eigen::MatrixXcd outer = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t t = 0; t < n_samples; ++t) {
    const Eigen::VectorXcd grad =
        model_gradient(theta, static_cast<double>(t));
    outer.noalias() += grad.conjugate() * grad.transpose();
  }
  const Eigen::MatrixXd fisher = (2.0 / noise_variance) * outer.real();
  return guarded_symmetric_inverse(fisher, "harmonic Fisher matrix")
      .diagonal();
}

AsymptoticBound mcrlb_asymptotic(const HarmonicParams& theta,
                                 const TrueSignalSpec& spec,
                                 std::size_t n_samples) {
  check_matching_order(theta, spec);
  const std::size_t k_count = theta.harmonic_count();
  const double n = static_cast<double>(n_samples);
  const double sum_t = n * (n - 1.0) / 2.0;
  const double sum_t2 = n * (n - 1.0) * (2.0 * n - 1.0) / 6.0;

  OffsetTables tables = make_offsets(theta, spec);

  double sk2r2 = 0.0;
  double z_term = 0.0;
  double d_cos = 0.0;
  double e_term = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double dk = static_cast<double>(k + 1);
    const double r = theta.amplitudes()[k];
    const double rb = spec.amplitudes()[k];
    const double phase = tables.phase_offsets[k];
    const double dnu = tables.freq_offsets[k];
    sk2r2 += dk * dk * r * r;

    double t_cos = 0.0, t2_cos = 0.0, t_sin = 0.0;
    for (std::size_t t = 0; t < n_samples; ++t) {
      const double time = static_cast<double>(t);
      const double angle = phase + dnu * time;
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      t_cos += time * c;
      t2_cos += time * time * c;
      t_sin += time * s;
    }
    z_term += 2.0 * dk * dk * r * rb * t2_cos;
    d_cos += dk * dk * r * rb * t_cos;
    const double in_phase = r * sum_t - rb * t_cos;
    e_term += (2.0 / n) * dk * dk *
              (in_phase * in_phase + rb * rb * t_sin * t_sin);
  }

  AsymptoticBound out;
  out.terms.curvature = n * (n * n - 1.0) / 6.0 * sk2r2;
  out.terms.mismatch_hessian = -2.0 * sk2r2 * sum_t2 + z_term;
  out.terms.mismatch_cross = 2.0 * (n - 1.0) * (sum_t * sk2r2 - d_cos);
  out.terms.mismatch_score = e_term;
  out.terms.phase_offsets = std::move(tables.phase_offsets);
  out.terms.freq_offsets = std::move(tables.freq_offsets);

  const double denom = out.terms.curvature - out.terms.mismatch_score +
                       out.terms.mismatch_hessian + out.terms.mismatch_cross;
  if (std::abs(denom) <= 1e-12 * std::max(1.0, out.terms.curvature)) {
    throw NumericalError(
        "asymptotic bound denominator vanishes; geometry is degenerate");
  }
  out.value = spec.noise_variance() *
              (out.terms.curvature + out.terms.mismatch_score) /
              (denom * denom);
  return out;
}

ArrowheadDecomposition arrowhead_decomposition(const HarmonicParams& theta,
                                               const TrueSignalSpec& spec,
                                               std::size_t n_samples) {
  check_matching_order(theta, spec);
  const std::size_t k_count = theta.harmonic_count();
  const auto nuisance = static_cast<Eigen::Index>(2 * k_count);
  const ComplexSeries eps = waveform_diff(theta, spec, n_samples);

  ArrowheadDecomposition out;
  out.z_model = Eigen::VectorXd::Zero(nuisance);
  out.z_mismatch = Eigen::VectorXd::Zero(nuisance);
  out.d = Eigen::VectorXd::Zero(nuisance);
  for (std::size_t t = 0; t < n_samples; ++t) {
    const double time = static_cast<double>(t);
    const Eigen::VectorXcd grad = model_gradient(theta, time);
    const Eigen::MatrixXcd hess = model_hessian(theta, time);
    out.eta_model += 2.0 * std::norm(grad(0));
    out.eta_mismatch += 2.0 * (std::conj(eps[t]) * hess(0, 0)).real();
    for (Eigen::Index a = 0; a < nuisance; ++a) {
      out.z_model(a) += 2.0 * (std::conj(grad(a + 1)) * grad(0)).real();
      out.z_mismatch(a) +=
          2.0 * (std::conj(eps[t]) * hess(a + 1, 0)).real();
      out.d(a) += 2.0 * std::norm(grad(a + 1));
    }
  }
  if (!(out.d.minCoeff() > 0.0)) {
    throw NumericalError("nuisance diagonal has a non-positive entry");
  }

  const Eigen::VectorXd zm_over_d = out.z_model.cwiseQuotient(out.d);
  const Eigen::VectorXd ze_over_d = out.z_mismatch.cwiseQuotient(out.d);
  out.terms.curvature = out.eta_model - out.z_model.dot(zm_over_d);
  out.terms.mismatch_score = out.z_mismatch.dot(ze_over_d);
  out.terms.mismatch_cross = -2.0 * out.z_model.dot(ze_over_d);
  out.terms.mismatch_hessian = out.eta_mismatch;
  OffsetTables tables = make_offsets(theta, spec);
  out.terms.phase_offsets = std::move(tables.phase_offsets);
  out.terms.freq_offsets = std::move(tables.freq_offsets);

  out.rho = out.terms.curvature - out.terms.mismatch_score +
            out.terms.mismatch_hessian + out.terms.mismatch_cross;
  out.u = Eigen::VectorXd::Zero(nuisance + 1);
  out.u(0) = -1.0;
  out.u.tail(nuisance) = zm_over_d + ze_over_d;
  if (std::abs(out.rho) <= 1e-12 * std::max(1.0, out.terms.curvature)) {
    throw NumericalError(
        "concentrated denominator vanishes; geometry is degenerate");
  }
  out.bound = spec.noise_variance() *
              (out.terms.curvature + out.terms.mismatch_score) /
              (out.rho * out.rho);
  return out;
}

Eigen::VectorXd crlb_unstructured(const TrueSignalSpec& spec,
                                  std::size_t n_samples, bool decoupled) {
  if (!(spec.noise_variance() > 0.0)) {
    throw std::invalid_argument("noise variance must be positive for a CRLB");
  }
  const std::size_t k_count = spec.component_count();
  const auto kc = static_cast<Eigen::Index>(k_count);
  if (decoupled) {
    if (n_samples < 2) {
      throw std::invalid_argument("decoupled bound needs n_samples >= 2");
    }
    const double n = static_cast<double>(n_samples);
    Eigen::VectorXd out(kc);
    for (Eigen::Index k = 0; k < kc; ++k) {
      const double r = spec.amplitudes()[static_cast<std::size_t>(k)];
      out(k) = 6.0 * spec.noise_variance() / (r * r * n * (n * n - 1.0));
    }
    return out;
  }

  // Parameter order [r_1..r_K, phi_1..phi_K, nu_1..nu_K].
  const auto dim = static_cast<Eigen::Index>(3 * k_count);
  Eigen::MatrixXcd outer = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::VectorXcd grad(dim);
  for (std::size_t t = 0; t < n_samples; ++t) {
    const double time = static_cast<double>(t);
    for (Eigen::Index k = 0; k < kc; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      const double r = spec.amplitudes()[ks];
      const Complex tone = std::polar(
          1.0, spec.phases()[ks] + spec.frequencies()[ks] * time);
      const Complex i_r_tone = Complex(0.0, 1.0) * r * tone;
      grad(k) = tone;
      grad(kc + k) = i_r_tone;
      grad(2 * kc + k) = time * i_r_tone;
    }
    outer.noalias() += grad.conjugate() * grad.transpose();
  }
  const Eigen::MatrixXd fisher =
      (2.0 / spec.noise_variance()) * outer.real();
  Eigen::MatrixXd inverse;
  try {
    inverse = guarded_symmetric_inverse(fisher, "unstructured Fisher matrix");
  } catch (const NumericalError& err) {
    throw NumericalError(std::string(err.what()) +
                        " (partial frequencies too close to resolve?)");
  }
  return inverse.diagonal().segment(2 * kc, kc);
}

std::vector<double> mse_lower_bound(const std::vector<double>& bias,
                                    double mcrlb_omega) {
  if (!(mcrlb_omega >= 0.0) || !std::isfinite(mcrlb_omega)) {
    throw std::invalid_argument("mcrlb_omega must be finite and >= 0");
  }
  std::vector<double> out(bias.size());
  for (std::size_t k = 0; k < bias.size(); ++k) {
    const double dk = static_cast<double>(k + 1);
    out[k] = bias[k] * bias[k] + dk * dk * mcrlb_omega;
  }
  return out;
}

BoundReport compute_bound_report(const TrueSignalSpec& spec,
                                 std::size_t n_samples,
                                 const SearchConfig& search,
                                 bool decoupled_sine) {
  const PseudoTrueResult pt = solve_pseudo_true(spec, n_samples, search);
  const SandwichMatrices matrices =
      build_sandwich(pt.params, spec, n_samples);
  const Eigen::VectorXd exact = mcrlb_exact(matrices);
  const AsymptoticBound asymp =
      mcrlb_asymptotic(pt.params, spec, n_samples);
  const Eigen::VectorXd sine =
      crlb_unstructured(spec, n_samples, decoupled_sine);

  BoundReport report;
  report.n_samples = n_samples;
  report.harmonic_count = spec.component_count();
  report.noise_variance = spec.noise_variance();
  report.omega0 = pt.params.omega();
  report.pseudo_variance = pt.pseudo_variance;
  report.mcrlb_exact_omega = exact(0);
  report.mcrlb_asymp_omega = asymp.value;
  report.crlb_harmonic_omega =
      spec.noise_variance() / asymp.terms.curvature;
  report.crlb_sine.assign(sine.data(), sine.data() + sine.size());
  report.bias = asymp.terms.freq_offsets;
  report.mse_lb = mse_lower_bound(report.bias, report.mcrlb_exact_omega);
  return report;
}

std::string bound_report_json(const BoundReport& report) {
  nlohmann::json doc;
  doc["n_samples"] = report.n_samples;
  doc["harmonic_count"] = report.harmonic_count;
  doc["noise_variance"] = report.noise_variance;
  doc["omega0"] = report.omega0;
  doc["pseudo_variance"] = report.pseudo_variance;
  doc["mcrlb_exact_omega"] = report.mcrlb_exact_omega;
  doc["mcrlb_asymp_omega"] = report.mcrlb_asymp_omega;
  doc["crlb_harmonic_omega"] = report.crlb_harmonic_omega;
  doc["crlb_sine_k"] = report.crlb_sine;
  doc["bias_k"] = report.bias;
  doc["mse_lb_k"] = report.mse_lb;
  return doc.dump(2) + "\n";
}

std::string bound_report_csv(const BoundReport& report) {
  using detail::format_full;
  std::ostringstream header;
  std::ostringstream row;
  header << "n_samples,harmonic_count,noise_variance,omega0,pseudo_variance,"
            "mcrlb_exact_omega,mcrlb_asymp_omega,crlb_harmonic_omega";
  row << report.n_samples << ',' << report.harmonic_count << ','
      << format_full(report.noise_variance) << ','
      << format_full(report.omega0) << ','
      << format_full(report.pseudo_variance) << ','
      << format_full(report.mcrlb_exact_omega) << ','
      << format_full(report.mcrlb_asymp_omega) << ','
      << format_full(report.crlb_harmonic_omega);
  for (std::size_t k = 0; k < report.crlb_sine.size(); ++k) {
    header << ",crlb_sine_" << (k + 1);
    row << ',' << format_full(report.crlb_sine[k]);
  }
  for (std::size_t k = 0; k < report.bias.size(); ++k) {
    header << ",bias_" << (k + 1);
    row << ',' << format_full(report.bias[k]);
  }
  for (std::size_t k = 0; k < report.mse_lb.size(); ++k) {
    header << ",mse_lb_" << (k + 1);
    row << ',' << format_full(report.mse_lb[k]);
  }
  return header.str() + "\n" + row.str() + "\n";
}

}  // namespace inharmonica
