#pragma once

// Right-censored survival estimation: product-limit curves, log-rank family,
// Cox proportional hazards (Breslow ties) and censored parametric fits.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "satd/common.hpp"
#include "satd/special_functions.hpp"

namespace satd::survival {

struct SurvivalSample {
  double duration = 0.0; // days
  bool event = false;    // true = removal observed
  std::vector<double> covariates;
};

/// Samples plus the names of their covariate columns.
struct SurvivalData {
  std::vector<std::string> covariate_names;
  std::vector<SurvivalSample> samples;
};

inline void validate(std::span<const SurvivalSample> samples) {
  for (const auto& s : samples)
    if (!std::isfinite(s.duration) || s.duration < 0.0)
      throw Error(ErrorKind::Data, "survival sample has negative or non-finite duration");
}

// ---------------------------------------------------------------------------
// Kaplan-Meier

struct CurveStep {
  double time = 0.0;
  double survival = 1.0;
  std::size_t at_risk = 0;
  std::size_t deaths = 0;
  std::size_t censored = 0;
};

struct SurvivalCurve {
  std::vector<CurveStep> steps; // steps[0] is the t=0 origin with S=1
  std::optional<double> median; // nullopt = never reaches 0.5 (infinite)

  /// S(t), right-continuous.
  double at(double t) const {
    double s = 1.0;
    for (std::size_t i = 1; i < steps.size(); ++i) {
      if (steps[i].time > t) break;
      s = steps[i].survival;
    }
    return s;
  }
};

/// Product-limit estimate. At tied times deaths leave the risk set with the censorings,
/// but only deaths reduce S (censored units count as at risk at their own time).
inline SurvivalCurve km_estimate(std::span<const SurvivalSample> samples) {
  if (samples.empty()) throw Error(ErrorKind::Data, "km_estimate: empty input");
  validate(samples);
  std::vector<std::size_t> idx(samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].duration < samples[b].duration;
  });
  SurvivalCurve curve;
  curve.steps.push_back({0.0, 1.0, samples.size(), 0, 0});
  std::size_t at_risk = samples.size();
  double s = 1.0;
  bool censored_before = false;
  for (std::size_t i = 0; i < idx.size();) {
    const double t = samples[idx[i]].duration;
    std::size_t d = 0, c = 0;
    while (i < idx.size() && samples[idx[i]].duration == t) {
      if (samples[idx[i]].event) ++d; else ++c;
      ++i;
    }
    if (d > 0) {
      // telescoped product while nothing has been censored yet
      if (!censored_before) s = static_cast<double>(at_risk - d) / static_cast<double>(samples.size());
      else s *= 1.0 - static_cast<double>(d) / static_cast<double>(at_risk);
    }
    curve.steps.push_back({t, s, at_risk, d, c});
    if (d > 0 && !curve.median && s <= 0.5) curve.median = t;
    at_risk -= d + c;
    censored_before = censored_before || c > 0;
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Log-rank family

struct ChiSquareResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  std::string method;
};

/// k-sample log-rank test. Uses the (k-1)-dimensional observed-minus-expected vector
/// and its hypergeometric covariance; k = 2 is the Mantel-Cox test.
inline ChiSquareResult k_sample_logrank(const std::vector<std::vector<SurvivalSample>>& groups) {
  const std::size_t k = groups.size();
  if (k < 2) throw Error(ErrorKind::Data, "log-rank: need at least 2 groups");
  struct Obs { double t; bool e; std::size_t g; };
  std::vector<Obs> all;
  std::size_t events = 0;
  for (std::size_t g = 0; g < k; ++g) {
    validate(groups[g]);
    for (const auto& s : groups[g]) {
      all.push_back({s.duration, s.event, g});
      if (s.event) ++events;
    }
  }
  if (events == 0) throw Error(ErrorKind::Data, "log-rank: no events in any group");
  std::sort(all.begin(), all.end(), [](const Obs& a, const Obs& b) { return a.t < b.t; });

  std::vector<double> n_risk(k, 0.0);
  for (const auto& o : all) n_risk[o.g] += 1.0;
  Eigen::VectorXd o_minus_e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < all.size();) {
    const double t = all[i].t;
    std::vector<double> d(k, 0.0), leaving(k, 0.0);
    while (i < all.size() && all[i].t == t) {
      if (all[i].e) d[all[i].g] += 1.0;
      leaving[all[i].g] += 1.0;
      ++i;
    }
    const double dt = std::accumulate(d.begin(), d.end(), 0.0);
    const double nt = std::accumulate(n_risk.begin(), n_risk.end(), 0.0);
    if (dt > 0.0) {
      for (std::size_t g = 0; g < k; ++g)
        o_minus_e(static_cast<Eigen::Index>(g)) += d[g] - dt * n_risk[g] / nt;
      if (nt > 1.0) {
        const double f = dt * (nt - dt) / (nt - 1.0);
        for (std::size_t a = 0; a < k; ++a)
          for (std::size_t b = 0; b < k; ++b) {
            const double pa = n_risk[a] / nt, pb = n_risk[b] / nt;
            cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                f * pa * ((a == b ? 1.0 : 0.0) - pb);
          }
      }
    }
    for (std::size_t g = 0; g < k; ++g) n_risk[g] -= leaving[g];
  }
  const auto m = static_cast<Eigen::Index>(k - 1);
  Eigen::VectorXd u = o_minus_e.head(m);
  Eigen::MatrixXd v = cov.topLeftCorner(m, m);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(v);
  cod.setThreshold(1e-12);
  ChiSquareResult r;
  r.method = k == 2 ? "mantel_cox_logrank" : "k_sample_logrank";
  const auto rank = cod.rank();
  if (rank == 0) {
    r.statistic = 0.0;
    r.df = static_cast<double>(k - 1);
    r.p_value = 1.0;
    return r;
  }
  r.statistic = std::max(0.0, u.dot(cod.solve(u)));
  r.df = static_cast<double>(rank);
  r.p_value = special::chi2_sf(r.statistic, r.df);
  return r;
}

inline ChiSquareResult logrank_test(std::span<const SurvivalSample> a, std::span<const SurvivalSample> b) {
  return k_sample_logrank({std::vector<SurvivalSample>(a.begin(), a.end()),
                           std::vector<SurvivalSample>(b.begin(), b.end())});
}

/// Omnibus comparison of k >= 2 groups, realized as the k-sample log-rank statistic.
inline ChiSquareResult omnibus_survival_test(const std::vector<std::vector<SurvivalSample>>& groups) {
  auto r = k_sample_logrank(groups);
  r.method = "k_sample_logrank (omnibus)";
  return r;
}

// ---------------------------------------------------------------------------
// Cox proportional hazards

struct CoxFit {
  std::vector<std::string> names;
  std::vector<double> coefficients;
  std::vector<double> hazard_ratios;
  std::vector<double> std_errors;
  std::vector<double> z;
  std::vector<double> p_values;
  Eigen::MatrixXd variance; // inverse information at the optimum
  double log_partial_likelihood = 0.0;
  double null_log_partial_likelihood = 0.0;
  std::vector<double> loglik_trace; // one entry per accepted iterate, starting at beta = 0
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::size_t events = 0;
};

struct CoxOptions {
  double tolerance = 1e-9;
  int max_iterations = 100;
  double separation_bound = 25.0;
};

namespace detail {

struct CoxProblem {
  Eigen::MatrixXd x; // centered covariates, rows sorted by descending time
  Eigen::VectorXd time;
  std::vector<bool> event;
};

inline CoxProblem make_cox_problem(const SurvivalData& data) {
  const auto& s = data.samples;
  const std::size_t p = data.covariate_names.size();
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return s[a].duration > s[b].duration; });
  CoxProblem pr;
  const auto n = static_cast<Eigen::Index>(s.size());
  pr.x.resize(n, static_cast<Eigen::Index>(p));
  pr.time.resize(n);
  pr.event.resize(s.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = s[idx[static_cast<std::size_t>(r)]];
    if (row.covariates.size() != p)
      throw Error(ErrorKind::Data, "cox_fit: covariate vector length mismatch");
    for (std::size_t c = 0; c < p; ++c) pr.x(r, static_cast<Eigen::Index>(c)) = row.covariates[c];
    pr.time(r) = row.duration;
    pr.event[static_cast<std::size_t>(r)] = row.event;
  }
  Eigen::RowVectorXd mean = pr.x.colwise().mean();
  pr.x.rowwise() -= mean;
  return pr;
}

struct CoxEval {
  double loglik = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd info;
};

/// Breslow log partial likelihood with gradient and information.
inline CoxEval cox_evaluate(const CoxProblem& pr, const Eigen::VectorXd& beta, bool derivatives = true) {
  const auto n = pr.x.rows();
  const auto p = pr.x.cols();
  CoxEval ev;
  ev.score = Eigen::VectorXd::Zero(p);
  ev.info = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd eta = pr.x * beta;
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < n;) {
    const double t = pr.time(i);
    Eigen::Index j = i;
    // add everyone tied at t to the risk set first
    for (; j < n && pr.time(j) == t; ++j) {
      const double w = std::exp(eta(j));
      s0 += w;
      if (derivatives) {
        s1 += w * pr.x.row(j).transpose();
        s2.noalias() += w * pr.x.row(j).transpose() * pr.x.row(j);
      }
    }
    double d = 0.0;
    for (Eigen::Index r = i; r < j; ++r) {
      if (!pr.event[static_cast<std::size_t>(r)]) continue;
      d += 1.0;
      ev.loglik += eta(r);
      if (derivatives) ev.score += pr.x.row(r).transpose();
    }
    if (d > 0.0) {
      ev.loglik -= d * std::log(s0);
      if (derivatives) {
        Eigen::VectorXd mean = s1 / s0;
        ev.score -= d * mean;
        ev.info += d * (s2 / s0 - mean * mean.transpose());
      }
    }
    i = j;
  }
  return ev;
}

} // namespace detail

/// Cox model by Newton-Raphson with step-halving. Converges when successive
/// log partial likelihoods differ by less than options.tolerance and the Newton step has settled.
inline CoxFit cox_fit(const SurvivalData& data, CoxOptions options = {}) {
  validate(data.samples);
  const std::size_t p = data.covariate_names.size();
  if (p == 0) throw Error(ErrorKind::Data, "cox_fit: no covariates");
  std::size_t events = 0;
  for (const auto& s : data.samples) events += s.event ? 1 : 0;
  if (events == 0) throw Error(ErrorKind::Data, "cox_fit: no events");
  auto pr = detail::make_cox_problem(data);

  // Rank check on the centered design.
  {
    Eigen::MatrixXd gram = pr.x.transpose() * pr.x;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    lu.setThreshold(1e-10);
    if (lu.rank() < static_cast<Eigen::Index>(p))
      throw Error(ErrorKind::Data, "cox_fit: covariate matrix is rank-deficient");
  }

  CoxFit fit;
  fit.names = data.covariate_names;
  fit.events = events;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  auto ev = detail::cox_evaluate(pr, beta);
  fit.null_log_partial_likelihood = ev.loglik;
  fit.loglik_trace.push_back(ev.loglik);

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    fit.iterations = iter;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(ev.info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      fit.message = "information matrix not positive definite";
      break;
    }
    Eigen::VectorXd step = ldlt.solve(ev.score);
    Eigen::VectorXd candidate = beta + step;
    auto next = detail::cox_evaluate(pr, candidate);
    int halvings = 0;
    while (!(next.loglik >= ev.loglik) && halvings < 30) {
      step *= 0.5;
      candidate = beta + step;
      next = detail::cox_evaluate(pr, candidate);
      ++halvings;
    }
    if (!(next.loglik >= ev.loglik)) {
      fit.message = "step-halving failed to improve the partial likelihood";
      break;
    }
    const double change = next.loglik - ev.loglik;
    beta = candidate;
    ev = std::move(next);
    fit.loglik_trace.push_back(ev.loglik);
    if (beta.cwiseAbs().maxCoeff() > options.separation_bound) {
      fit.message = "coefficients diverging (likely separation)";
      break;
    }
    // a flat likelihood with steps still of order one is separation, not convergence
    const double step_size = step.cwiseAbs().maxCoeff();
    if (change < options.tolerance && step_size < 1e-4 * (1.0 + beta.cwiseAbs().maxCoeff())) {
      fit.converged = true;
      fit.message = "converged";
      break;
    }
  }
  if (!fit.converged && fit.message.empty()) fit.message = "iteration limit reached";

  fit.log_partial_likelihood = ev.loglik;
  fit.variance = ev.info.ldlt().solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p),
                                                                static_cast<Eigen::Index>(p)));
  for (std::size_t c = 0; c < p; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    const double b = beta(ci);
    const double se = std::sqrt(std::max(0.0, fit.variance(ci, ci)));
    fit.coefficients.push_back(b);
    fit.hazard_ratios.push_back(std::exp(b));
    fit.std_errors.push_back(se);
    const double z = se > 0.0 ? b / se : 0.0;
    fit.z.push_back(z);
    fit.p_values.push_back(se > 0.0 ? std::min(1.0, 2.0 * special::normal_sf(std::fabs(z))) : 1.0);
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Proportional-hazards check from scaled Schoenfeld residuals

struct PhTerm {
  std::string name;
  double correlation = 0.0;
  double chi_square = 0.0;
  double p_value = 1.0;
};

struct PhCheck {
  std::vector<PhTerm> terms;
  double global_chi_square = 0.0;
  double global_df = 0.0;
  double global_p = 1.0;
};

/// Correlates Schoenfeld residuals, scaled by the fit variance, with
/// 1 - KM(t-) at each event time. One-df chi-square per covariate plus a global test.
inline PhCheck ph_check(const CoxFit& fit, const SurvivalData& data) {
  if (!fit.converged) throw Error(ErrorKind::Data, "ph_check: fit did not converge");
  std::size_t events = 0;
  for (const auto& s : data.samples) events += s.event ? 1 : 0;
  if (events < 3) throw Error(ErrorKind::Data, "ph_check: fewer than 3 events");
  auto pr = detail::make_cox_problem(data);
  const auto n = pr.x.rows();
  const auto p = pr.x.cols();
  Eigen::VectorXd beta(p);
  for (Eigen::Index c = 0; c < p; ++c) beta(c) = fit.coefficients[static_cast<std::size_t>(c)];
  Eigen::VectorXd eta = pr.x * beta;

  // Schoenfeld residuals, collected in descending time then reversed.
  struct Row { double t; Eigen::VectorXd r; };
  std::vector<Row> rows;
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < n;) {
    const double t = pr.time(i);
    Eigen::Index j = i;
    for (; j < n && pr.time(j) == t; ++j) {
      const double w = std::exp(eta(j));
      s0 += w;
      s1 += w * pr.x.row(j).transpose();
    }
    Eigen::VectorXd mean = s1 / s0;
    for (Eigen::Index r = i; r < j; ++r)
      if (pr.event[static_cast<std::size_t>(r)])
        rows.push_back({t, pr.x.row(r).transpose() - mean});
    i = j;
  }
  std::reverse(rows.begin(), rows.end());

  // Left-continuous KM at each event time.
  auto curve = km_estimate(data.samples);
  std::vector<double> g;
  g.reserve(rows.size());
  {
    std::size_t step = 0;
    double prev = 1.0;
    for (const auto& row : rows) {
      while (step + 1 < curve.steps.size() && curve.steps[step + 1].time < row.t) {
        ++step;
        prev = curve.steps[step].survival;
      }
      g.push_back(1.0 - prev);
    }
  }
  const double d = static_cast<double>(rows.size());
  const double gbar = std::accumulate(g.begin(), g.end(), 0.0) / d;
  double sxx = 0.0;
  for (double v : g) sxx += (v - gbar) * (v - gbar);

  Eigen::MatrixXd resid(static_cast<Eigen::Index>(rows.size()), p);
  for (std::size_t k = 0; k < rows.size(); ++k) resid.row(static_cast<Eigen::Index>(k)) = rows[k].r.transpose();
  Eigen::VectorXd xx(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) xx(static_cast<Eigen::Index>(k)) = g[k] - gbar;

  Eigen::MatrixXd scaled = resid * fit.variance * d;
  Eigen::VectorXd test = scaled.transpose() * xx;

  PhCheck out;
  for (Eigen::Index c = 0; c < p; ++c) {
    PhTerm term;
    term.name = fit.names[static_cast<std::size_t>(c)];
    const Eigen::VectorXd col = scaled.col(c);
    const double cm = col.mean();
    double sxy = 0.0, syy = 0.0;
    for (Eigen::Index k = 0; k < col.size(); ++k) {
      sxy += xx(k) * (col(k) - cm);
      syy += (col(k) - cm) * (col(k) - cm);
    }
    term.correlation = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
    const double denom = fit.variance(c, c) * d * sxx;
    term.chi_square = denom > 0.0 ? test(c) * test(c) / denom : 0.0;
    term.p_value = special::chi2_sf(term.chi_square, 1.0);
    out.terms.push_back(term);
  }
  Eigen::VectorXd u = resid.transpose() * xx;
  out.global_chi_square = sxx > 0.0 ? u.dot(fit.variance * u) * d / sxx : 0.0;
  out.global_df = static_cast<double>(p);
  out.global_p = special::chi2_sf(out.global_chi_square, out.global_df);
  return out;
}

// ---------------------------------------------------------------------------
// Parametric fits

enum class Family { Exponential, Weibull, LogNormal, Gamma };

inline const char* to_string(Family f) {
  switch (f) {
  case Family::Exponential: return "exponential";
  case Family::Weibull: return "weibull";
  case Family::LogNormal: return "lognormal";
  case Family::Gamma: return "gamma";
  }
  return "exponential";
}

struct ParametricFit {
  Family family = Family::Exponential;
  // exponential: {rate}; weibull: {shape, scale}; lognormal: {mu, sigma}; gamma: {shape, rate}
  std::vector<std::string> parameter_names;
  std::vector<double> parameters;
  double log_likelihood = 0.0;
  double aic = 0.0;
  bool converged = false;
  int evaluations = 0;
  std::string message;
};

inline double aic(std::size_t k, double log_likelihood) {
  return 2.0 * static_cast<double>(k) - 2.0 * log_likelihood;
}

/// Durations are floored at one second before entering log densities.
inline constexpr double kMinParametricDuration = 1.0 / kSecondsPerDay;

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Deterministic Nelder-Mead minimizer (standard coefficients 1, 2, 0.5, 0.5).
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start, double step = 0.5,
                                    double ftol = 1e-12, int max_evals = 20000) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  std::vector<double> fv(n + 1);
  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);
  std::vector<std::size_t> order(n + 1);
  while (res.evaluations < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    if (std::fabs(fv[worst] - fv[best]) <= ftol * (std::fabs(fv[best]) + 1e-30) + 1e-300) {
      res.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i : order)
      if (i != worst)
        for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / static_cast<double>(n);
    auto along = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + coef * (simplex[worst][d] - centroid[d]);
      return x;
    };
    auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) { simplex[worst] = xe; fv[worst] = fe; }
      else { simplex[worst] = xr; fv[worst] = fr; }
    } else if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
    } else {
      auto xc = fr < fv[worst] ? along(-0.5) : along(0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, fv[worst])) {
        simplex[worst] = xc;
        fv[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t d = 0; d < n; ++d)
            simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
          fv[i] = eval(simplex[i]);
        }
      }
    }
  }
  std::size_t best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = simplex[best];
  res.value = fv[best];
  return res;
}

/// Censored log-likelihood of a family at natural parameters.
inline double parametric_loglik(Family family, std::span<const double> params,
                                std::span<const SurvivalSample> samples) {
  double ll = 0.0;
  for (const auto& s : samples) {
    const double t = std::max(s.duration, kMinParametricDuration);
    switch (family) {
    case Family::Exponential: {
      const double rate = params[0];
      ll += (s.event ? std::log(rate) : 0.0) - rate * t;
      break;
    }
    case Family::Weibull: {
      const double k = params[0], lambda = params[1];
      const double z = std::pow(t / lambda, k);
      if (s.event) ll += std::log(k / lambda) + (k - 1.0) * std::log(t / lambda);
      ll -= z;
      break;
    }
    case Family::LogNormal: {
      const double mu = params[0], sigma = params[1];
      const double z = (std::log(t) - mu) / sigma;
      if (s.event) ll += -std::log(t * sigma) - 0.5 * std::log(2.0 * M_PI) - 0.5 * z * z;
      else ll += special::log_normal_sf(z);
      break;
    }
    case Family::Gamma: {
      const double a = params[0], b = params[1];
      if (s.event) ll += a * std::log(b) + (a - 1.0) * std::log(t) - b * t - std::lgamma(a);
      else ll += special::log_gamma_q(a, b * t);
      break;
    }
    }
  }
  return ll;
}

/// Censoring-aware maximum likelihood fit. Exponential is closed form; the other
/// families run Nelder-Mead on log-parameters (mu stays on its natural scale)
/// from method-of-moments starting points, with one restart at the optimum.
inline ParametricFit parametric_fit(std::span<const SurvivalSample> samples, Family family) {
  validate(samples);
  std::size_t events = 0;
  double total_time = 0.0;
  std::vector<double> times;
  for (const auto& s : samples) {
    const double t = std::max(s.duration, kMinParametricDuration);
    total_time += t;
    times.push_back(t);
    if (s.event) ++events;
  }
  if (events < 2) throw Error(ErrorKind::Data, "parametric_fit: need at least 2 events");

  ParametricFit fit;
  fit.family = family;
  if (family == Family::Exponential) {
    const double rate = static_cast<double>(events) / total_time;
    fit.parameter_names = {"rate"};
    fit.parameters = {rate};
    fit.log_likelihood = parametric_loglik(family, fit.parameters, samples);
    fit.aic = aic(1, fit.log_likelihood);
    fit.converged = true;
    fit.message = "closed form";
    return fit;
  }

  double mean = 0.0, logmean = 0.0;
  for (double t : times) { mean += t; logmean += std::log(t); }
  mean /= static_cast<double>(times.size());
  logmean /= static_cast<double>(times.size());
  double var = 0.0, logvar = 0.0;
  for (double t : times) {
    var += (t - mean) * (t - mean);
    logvar += (std::log(t) - logmean) * (std::log(t) - logmean);
  }
  var /= static_cast<double>(times.size());
  logvar /= static_cast<double>(times.size());
  if (!(var > 0.0)) var = mean * mean;
  if (!(logvar > 0.0)) logvar = 1.0;

  std::vector<double> start;
  std::function<std::vector<double>(const std::vector<double>&)> to_natural;
  switch (family) {
  case Family::Weibull:
    fit.parameter_names = {"shape", "scale"};
    start = {0.0, std::log(mean)};
    to_natural = [](const std::vector<double>& x) { return std::vector<double>{std::exp(x[0]), std::exp(x[1])}; };
    break;
  case Family::LogNormal:
    fit.parameter_names = {"mu", "sigma"};
    start = {logmean, 0.5 * std::log(logvar)};
    to_natural = [](const std::vector<double>& x) { return std::vector<double>{x[0], std::exp(x[1])}; };
    break;
  case Family::Gamma:
    fit.parameter_names = {"shape", "rate"};
    start = {std::log(mean * mean / var), std::log(mean / var)};
    to_natural = [](const std::vector<double>& x) { return std::vector<double>{std::exp(x[0]), std::exp(x[1])}; };
    break;
  case Family::Exponential: break;
  }
  auto objective = [&](const std::vector<double>& x) {
    return -parametric_loglik(family, to_natural(x), samples);
  };
  auto r = nelder_mead(objective, start);
  auto r2 = nelder_mead(objective, r.x, 0.05);
  fit.evaluations = r.evaluations + r2.evaluations;
  const auto& best = r2.value <= r.value ? r2 : r;
  fit.parameters = to_natural(best.x);
  fit.log_likelihood = -best.value;
  fit.aic = aic(2, fit.log_likelihood);
  fit.converged = r2.converged && std::isfinite(fit.aic);
  fit.message = fit.converged ? "converged" : "optimizer did not converge";
  return fit;
}

} // namespace satd::survival
