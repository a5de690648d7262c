#include "risuav/ris_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace risuav {

namespace {

cdouble unit_phase(cdouble z) {
  const double mag = std::abs(z);
  return mag > 0.0 ? z / mag : cdouble{1.0, 0.0};
}

void normalize_rows(Eigen::MatrixXcd& u) {
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    const double norm = u.row(k).norm();
    if (norm > 0.0) {
      u.row(k) /= norm;
    } else {
      u.row(k).setZero();
      u(k, 0) = 1.0;
    }
  }
}

/// Pivoted Cholesky R ~ L L^H, stopping once the largest residual pivot is
/// below trunc_tol. Throws DomainError if R turns out indefinite.
Eigen::MatrixXcd pivoted_cholesky(const Eigen::MatrixXcd& r, double trunc_tol, double psd_tol) {
  const Eigen::Index n = r.rows();
  Eigen::VectorXd diag = r.diagonal().real();
  Eigen::MatrixXcd l(n, n);
  Eigen::Index rank = 0;
  while (rank < n) {
    Eigen::Index p = 0;
    const double pivot = diag.maxCoeff(&p);
    if (diag.minCoeff() < -psd_tol) throw DomainError("sdr_solve: matrix is not positive semidefinite");
    if (pivot <= trunc_tol) break;
    Eigen::VectorXcd col = r.col(p);
    if (rank > 0) col -= l.leftCols(rank) * l.leftCols(rank).row(p).adjoint();
    col /= std::sqrt(pivot);
    l.col(rank) = col;
    diag -= col.cwiseAbs2();
    diag[p] = 0.0;
    ++rank;
  }
  Eigen::MatrixXcd factor = l.leftCols(rank);
  // Small residual diagonal only bounds the off-diagonal residual for PSD input.
  const Eigen::MatrixXcd residual = r - factor * factor.adjoint();
  if (residual.cwiseAbs().maxCoeff() > psd_tol) {
    throw DomainError("sdr_solve: matrix is not positive semidefinite");
  }
  return factor;
}

/// Orthonormal compression of the full-band objective: f(theta) ~ ||T [theta; 1]||^2,
/// built by column-pivoted Gram-Schmidt on [cascade | direct].
Eigen::MatrixXcd compress_objective(const FrequencyChannel& freq) {
  const Eigen::Index k = freq.direct.size();
  const Eigen::Index n = freq.cascade.cols() + 1;
  Eigen::MatrixXcd c(k, n);
  c.leftCols(n - 1) = freq.cascade;
  c.col(n - 1) = freq.direct;

  Eigen::MatrixXcd w = c;
  Eigen::VectorXd norms = w.colwise().squaredNorm().transpose();
  const double scale = norms.maxCoeff();
  const Eigen::Index max_rank = std::min(k, n);
  Eigen::MatrixXcd q(k, max_rank);
  Eigen::Index rank = 0;
  while (rank < max_rank && scale > 0.0) {
    Eigen::Index p = 0;
    if (norms.maxCoeff(&p) <= 1e-28 * scale) break;
    Eigen::VectorXcd v = w.col(p);
    for (int pass = 0; pass < 2 && rank > 0; ++pass) {
      v -= q.leftCols(rank) * (q.leftCols(rank).adjoint() * v);
    }
    const double vn = v.norm();
    if (!(vn > 0.0)) break;
    v /= vn;
    q.col(rank) = v;
    ++rank;
    w -= v * (v.adjoint() * w);
    norms = w.colwise().squaredNorm().transpose();
  }
  return q.leftCols(rank).adjoint() * c;
}

double check_hermitian(const Eigen::MatrixXcd& r) {
  if (r.rows() != r.cols() || r.rows() == 0) throw DomainError("sdr_solve: matrix must be square and non-empty");
  const double scale = r.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) throw DomainError("sdr_solve: matrix has non-finite entries");
  if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, std::numeric_limits<double>::min())) {
    throw DomainError("sdr_solve: matrix is not Hermitian");
  }
  return scale;
}

}  // namespace

RisPhaseVector::RisPhaseVector(Eigen::VectorXcd coefficients) : coefficients_(std::move(coefficients)) {
  for (Eigen::Index i = 0; i < coefficients_.size(); ++i) {
    if (std::abs(std::abs(coefficients_[i]) - 1.0) > kModulusTolerance) {
      throw DomainError("RisPhaseVector: coefficient " + std::to_string(i) + " is not unit-modulus");
    }
  }
}

RisPhaseVector RisPhaseVector::from_phases(const Eigen::VectorXd& phases) {
  Eigen::VectorXcd c(phases.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) c[i] = std::polar(1.0, phases[i]);
  return RisPhaseVector(std::move(c));
}

double power_objective(const FrequencyChannel& freq, const Eigen::VectorXcd& theta) {
  if (theta.size() != freq.cascade.cols()) throw DomainError("power_objective: dimension mismatch");
  return (freq.direct + freq.cascade * theta).squaredNorm();
}

double power_objective(const FrequencyChannel& freq, const RisPhaseVector& theta) {
  return power_objective(freq, theta.coefficients());
}

double lifted_value(const QuadraticForm& form, const Eigen::VectorXcd& extended) {
  if (extended.size() != form.matrix.rows()) throw DomainError("lifted_value: dimension mismatch");
  return extended.dot(form.matrix * extended).real();
}

std::vector<int> uniform_subset(int num_subcarriers, int count) {
  if (count < 1 || count > num_subcarriers) throw DomainError("uniform_subset: need 1 <= count <= K");
  std::vector<int> idx(count);
  for (int j = 0; j < count; ++j) {
    idx[j] = static_cast<int>((static_cast<long long>(j) * num_subcarriers) / count);
  }
  return idx;
}

QuadraticForm build_quadratic(const FrequencyChannel& freq, int subset_size) {
  if (subset_size < 1) throw DomainError("build_quadratic: empty subcarrier subset");
  QuadraticForm form;
  form.subcarrier_subset = uniform_subset(freq.num_subcarriers(), subset_size);
  const Eigen::Index n = freq.num_elements() + 1;

  // Rows are [a_n^T, H_d,n]; R = C^H C = sum_n c_n c_n^H with c_n = conj(row).
  Eigen::MatrixXcd rows(subset_size, n);
  for (int j = 0; j < subset_size; ++j) {
    const int sc = form.subcarrier_subset[j];
    rows.row(j).head(n - 1) = freq.cascade.row(sc);
    rows(j, n - 1) = freq.direct[sc];
  }
  form.matrix = rows.adjoint() * rows;
  // Exact Hermitian symmetry regardless of GEMM rounding.
  form.matrix = (0.5 * (form.matrix + form.matrix.adjoint())).eval();
  return form;
}

SdrSolution sdr_solve(const QuadraticForm& form, const SolverOptions& opts) {
  const Eigen::MatrixXcd& r = form.matrix;
  check_hermitian(r);
  const double trace = r.diagonal().real().sum();
  const double psd_tol = 1e-9 * std::max(std::abs(trace), std::numeric_limits<double>::min());
  const Eigen::MatrixXcd l = pivoted_cholesky(r, 1e-14 * std::abs(trace), psd_tol);

  const Eigen::Index n = r.rows();
  const Eigen::Index rank = std::min<Eigen::Index>(
      n, opts.rank > 0 ? opts.rank : static_cast<Eigen::Index>(std::ceil(std::sqrt(2.0 * n))));

  Rng rng(opts.seed);
  SdrSolution best;
  best.objective = -1.0;

  // Spectral norm of R equals that of the small Gram matrix L^H L.
  double spectral = 0.0;
  if (l.cols() > 0) {
    const Eigen::MatrixXcd gram = l.adjoint() * l;
    spectral = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  }

  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    Eigen::MatrixXcd u(n, rank);
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index c = 0; c < rank; ++c) u(k, c) = complex_gaussian(rng);
    }
    normalize_rows(u);

    SdrSolution run;
    if (l.cols() == 0 || !(spectral > 0.0)) {
      run.gram_factor = u;
      run.objective = 0.0;
      run.converged = true;
    } else {
      Eigen::MatrixXcd proj = l.adjoint() * u;
      double obj = proj.squaredNorm();
      const double base_step = 1.0 / (2.0 * spectral);
      double step = base_step;
      int it = 0;
      bool converged = false;
      for (; it < opts.max_iterations; ++it) {
        const Eigen::MatrixXcd grad = 2.0 * (l * proj);
        Eigen::MatrixXcd trial;
        Eigen::MatrixXcd trial_proj;
        double trial_obj = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
          trial = u + step * grad;
          normalize_rows(trial);
          trial_proj = l.adjoint() * trial;
          trial_obj = trial_proj.squaredNorm();
          if (trial_obj >= obj) {
            accepted = true;
            break;
          }
          step *= 0.5;
        }
        if (!accepted) {
          converged = true;
          break;
        }
        const double change = trial_obj - obj;
        u = std::move(trial);
        proj = std::move(trial_proj);
        obj = trial_obj;
        if (change <= opts.tolerance * obj) {
          converged = true;
          ++it;
          break;
        }
        // Step grows back after every accepted move; backtracking shrinks it.
        step = std::min(2.0 * step, 1e8 * base_step);
      }
      run.gram_factor = u;
      run.objective = (u.adjoint() * r * u).trace().real();
      run.iterations = it;
      run.converged = converged;
    }
    if (run.objective > best.objective) best = std::move(run);
  }
  best.objective = std::max(best.objective, 0.0);
  return best;
}

RisPhaseVector randomize_extract(const SdrSolution& solution, const QuadraticForm& form,
                                 const FrequencyChannel& freq, int num_samples, Rng& rng,
                                 const SolverOptions& opts) {
  const Eigen::Index n_elem = freq.num_elements();
  const Eigen::MatrixXcd& u = solution.gram_factor;
  if (u.rows() != n_elem + 1 || form.matrix.rows() != n_elem + 1) {
    throw DomainError("randomize_extract: solution and channel dimensions differ");
  }
  if (num_samples < 1) throw DomainError("randomize_extract: num_samples must be >= 1");

  const Eigen::MatrixXcd t = compress_objective(freq);
  const Eigen::Index rank = u.cols();

  Eigen::MatrixXcd g(rank, num_samples);
  for (int s = 0; s < num_samples; ++s) {
    for (Eigen::Index c = 0; c < rank; ++c) g(c, s) = complex_gaussian(rng);
  }
  const Eigen::MatrixXcd xi = u * g;

  Eigen::MatrixXcd thetas(n_elem, num_samples);
  for (int s = 0; s < num_samples; ++s) {
    const cdouble ref = std::conj(unit_phase(xi(n_elem, s)));
    for (Eigen::Index i = 0; i < n_elem; ++i) thetas(i, s) = unit_phase(unit_phase(xi(i, s)) * ref);
  }

  Eigen::Index best_sample = 0;
  if (t.rows() > 0) {
    Eigen::MatrixXcd values = t.leftCols(n_elem) * thetas;
    values.colwise() += t.col(n_elem);
    values.colwise().squaredNorm().maxCoeff(&best_sample);
  }

  const RisPhaseVector gaussian_best(thetas.col(best_sample));
  const RisPhaseVector refined = coordinate_ascent(gaussian_best, freq, opts.ascent_max_passes);

  RisPhaseVector best = unconfigured(static_cast<int>(n_elem));
  double best_value = power_objective(freq, best);
  for (const RisPhaseVector* cand : {&gaussian_best, &refined}) {
    const double value = power_objective(freq, *cand);
    if (value > best_value) {
      best = *cand;
      best_value = value;
    }
  }
  return best;
}

AscentTrace coordinate_ascent_traced(const RisPhaseVector& theta0, const FrequencyChannel& freq,
                                     int max_passes, double rel_tolerance) {
  const Eigen::Index n_elem = freq.num_elements();
  if (theta0.size() != n_elem) throw DomainError("coordinate_ascent: dimension mismatch");

  Eigen::VectorXcd theta = theta0.coefficients();
  Eigen::VectorXcd composite = freq.direct + freq.cascade * theta;
  AscentTrace out{theta0, {composite.squaredNorm()}, 0};

  for (int pass = 0; pass < max_passes; ++pass) {
    for (Eigen::Index i = 0; i < n_elem; ++i) {
      const auto col = freq.cascade.col(i);
      composite -= col * theta[i];
      // s = sum_n a_{n,i} conj(u_n)
      const cdouble s = composite.dot(col);
      if (std::abs(s) > 0.0) theta[i] = std::conj(s) / std::abs(s);
      composite += col * theta[i];
    }
    // Fresh evaluation so rounding drift cannot accumulate across passes.
    composite = freq.direct + freq.cascade * theta;
    const double value = composite.squaredNorm();
    const double previous = out.objective.back();
    out.objective.push_back(value);
    out.passes = pass + 1;
    if (value - previous < rel_tolerance * std::abs(previous)) break;
  }
  out.theta = RisPhaseVector(theta);
  return out;
}

RisPhaseVector coordinate_ascent(const RisPhaseVector& theta0, const FrequencyChannel& freq, int max_passes) {
  return coordinate_ascent_traced(theta0, freq, max_passes).theta;
}

RisPhaseVector brute_force(const FrequencyChannel& freq, int levels) {
  const int n_elem = freq.num_elements();
  if (levels < 1) throw DomainError("brute_force: levels must be >= 1");
  if (std::pow(static_cast<double>(levels), n_elem) > kBruteForceBudget) {
    throw DomainError("brute_force: levels^N exceeds the search budget");
  }

  Eigen::VectorXcd alphabet(levels);
  for (int q = 0; q < levels; ++q) alphabet[q] = std::polar(1.0, 2.0 * kPi * q / levels);

  // Odometer over phase indices, element 0 most significant, so the first
  // maximizer met is the lexicographically smallest.
  std::vector<int> idx(n_elem, 0);
  Eigen::VectorXcd theta = Eigen::VectorXcd::Constant(n_elem, alphabet[0]);
  Eigen::VectorXcd best = theta;
  double best_value = -1.0;
  while (true) {
    const double value = power_objective(freq, theta);
    if (value > best_value) {
      best_value = value;
      best = theta;
    }
    int pos = n_elem - 1;
    while (pos >= 0 && idx[pos] == levels - 1) {
      idx[pos] = 0;
      theta[pos] = alphabet[0];
      --pos;
    }
    if (pos < 0) break;
    theta[pos] = alphabet[++idx[pos]];
  }
  return RisPhaseVector(best);
}

RisPhaseVector unconfigured(int n_elements) {
  if (n_elements < 1) throw DomainError("unconfigured: n_elements must be >= 1");
  return RisPhaseVector(Eigen::VectorXcd::Ones(n_elements));
}

SdrOutcome configure_sdr(const FrequencyChannel& freq, const SolverOptions& opts, Rng& rng) {
  const int n_elem = freq.num_elements();
  if (freq.cascade.cwiseAbs().maxCoeff() == 0.0) {
    return SdrOutcome{unconfigured(n_elem), 0.0, true, true};
  }
  const int subset = std::min(freq.num_subcarriers(), std::max(1, opts.subset_size));
  const QuadraticForm form = build_quadratic(freq, subset);

  SolverOptions solve_opts = opts;
  solve_opts.seed = rng();
  const SdrSolution solution = sdr_solve(form, solve_opts);
  RisPhaseVector theta = randomize_extract(solution, form, freq, opts.randomization_samples, rng, opts);
  return SdrOutcome{std::move(theta), solution.objective, solution.converged, false};
}

}  // namespace risuav
