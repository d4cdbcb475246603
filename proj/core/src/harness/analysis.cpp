#include "dynmed/harness/analysis.hpp"

#include <ostream>

#include <json.hpp>

#include "dynmed/effects_finite.hpp"
#include "dynmed/harness/csv.hpp"
#include "dynmed/harness/spline.hpp"
#include "dynmed/rng.hpp"
#include "dynmed/simulator.hpp"

namespace dynmed {

namespace {

Eigen::MatrixXd smooth_columns(const Eigen::MatrixXd& m, int df) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.col(j) = smooth_trajectory(m.col(j), df);
  return out;
}

nlohmann::json columns_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    std::vector<double> col(m.rows());
    for (Eigen::Index t = 0; t < m.rows(); ++t) col[t] = m(t, j);
    out.push_back(col);
  }
  return out;
}

}  // namespace

AnalysisResult analyze_real(const Panel& input, const AnalysisOptions& opt) {
  const Panel panel = opt.standardize ? input.standardized() : input;
  FiniteOptions fo;
  fo.dag = opt.dag;
  const FiniteFit fit = fit_finite(panel, fo);

  const int T = panel.T(), d = panel.d();
  AnalysisResult res;
  res.report = fit.report;
  res.immediate.resize(T, d);
  res.delayed.resize(T, d);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < d; ++j) {
      const auto [imm, del] = treatment_to_mediator_decomposition(fit.table, t, j);
      res.immediate(t, j) = imm;
      res.delayed(t, j) = del;
    }
  }
  res.eta_smooth = smooth_columns(res.report.eta, opt.spline_df);
  res.iime_smooth = smooth_columns(res.report.iime, opt.spline_df);
  res.dime_smooth = smooth_columns(res.report.dime, opt.spline_df);
  res.immediate_smooth = smooth_columns(res.immediate, opt.spline_df);
  res.delayed_smooth = smooth_columns(res.delayed, opt.spline_df);

  if (opt.bootstrap_reps > 0) {
    const DagLearnConfig dag = opt.dag;
    res.bootstrap = bootstrap(
        panel, [dag](const Panel& p) { return estimate_finite(p, dag); },
        opt.bootstrap_reps, opt.seed, opt.threads);
    res.report.bootstrap_se = res.bootstrap->se;
  }
  return res;
}

void write_analysis_csv(std::ostream& out, const MediationReport& rep) {
  out << "t,mediator,eta,iime,dime,se_eta\n";
  for (int t = 0; t < rep.stages(); ++t) {
    for (int j = 0; j < rep.d(); ++j) {
      if (rep.horizon == Horizon::infinite) {
        out << "inf";
      } else {
        out << t + 1;
      }
      out << ',' << j + 1 << ',' << format_double(rep.eta(t, j)) << ','
          << format_double(rep.iime(t, j)) << ',' << format_double(rep.dime(t, j)) << ',';
      if (rep.bootstrap_se) out << format_double(rep.bootstrap_se->eta(t, j));
      out << '\n';
    }
  }
}

void write_analysis_json(std::ostream& out, const AnalysisResult& r) {
  nlohmann::json j;
  j["stages"] = r.report.stages();
  j["mediators"] = r.report.d();
  j["eta"] = columns_json(r.report.eta);
  j["delta"] = columns_json(r.report.delta);
  j["iime"] = columns_json(r.report.iime);
  j["dime"] = columns_json(r.report.dime);
  j["treatment_to_mediator_immediate"] = columns_json(r.immediate);
  j["treatment_to_mediator_delayed"] = columns_json(r.delayed);
  j["smoothed"] = {
      {"eta", columns_json(r.eta_smooth)},
      {"iime", columns_json(r.iime_smooth)},
      {"dime", columns_json(r.dime_smooth)},
      {"treatment_to_mediator_immediate", columns_json(r.immediate_smooth)},
      {"treatment_to_mediator_delayed", columns_json(r.delayed_smooth)},
  };
  if (r.bootstrap) {
    j["bootstrap"] = {
        {"reps", r.bootstrap->reps},
        {"failures", r.bootstrap->failures},
        {"se_eta", columns_json(r.bootstrap->se.eta)},
        {"se_iime", columns_json(r.bootstrap->se.iime)},
        {"se_dime", columns_json(r.bootstrap->se.dime)},
        {"lower_eta", columns_json(r.bootstrap->lower.eta)},
        {"upper_eta", columns_json(r.bootstrap->upper.eta)},
    };
  }
  out << j.dump(2) << '\n';
}

Panel ihs_like_panel(std::uint64_t seed, int n, int T, int d) {
  std::vector<SemParams> params = sample_params(d, T, true, seed);
  // Halve the carryover so 26 weekly stages stay on a stable scale.
  for (auto& p : params) {
    p.Gamma1 *= 0.5;
    p.zeta1 *= 0.5;
    p.gamma2 *= 0.5;
    p.zeta2 *= 0.5;
  }
  SimConfig cfg;
  cfg.n = n;
  cfg.T = T;
  cfg.d = d;
  cfg.params = std::move(params);
  cfg.seed = derive_seed(seed, 7);
  return simulate(cfg);
}

}  // namespace dynmed
