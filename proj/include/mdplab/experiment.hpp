#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mdplab/dp.hpp"
#include "mdplab/incomplete.hpp"
#include "mdplab/mdp.hpp"
#include "mdplab/multi.hpp"
#include "mdplab/perturb.hpp"
#include "mdplab/scenario.hpp"
#include "mdplab/soft.hpp"
#include "mdplab/version.hpp"

namespace mdplab {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shortest round-trip decimal form; NaN renders empty.
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

// One sweep point. Bound-check records always carry both sides of their
// inequality in lhs/rhs; fields that do not apply stay NaN.
struct RunRecord {
  std::string id;
  double param = kNaN;
  double alpha = kNaN;
  double lhs = kNaN;
  double rhs = kNaN;
  double tv_jump = kNaN;
  double value_gap = kNaN;
  bool holds = false;
  bool failed = false;
  std::string error;
  ordered_json detail = ordered_json::object();
};

struct ExperimentReport {
  std::string scenario;
  std::string kind;
  std::uint64_t seed = 0;
  std::string tool_version = kVersion;
  std::string notes;
  std::vector<RunRecord> runs;
  bool expected_checked = false;
  bool expected_pass = true;
  std::vector<std::string> expected_failures;
  double wall_clock_ms = 0.0;

  int n_runs() const { return static_cast<int>(runs.size()); }
  int n_holds() const {
    int n = 0;
    for (const auto& r : runs) n += r.holds ? 1 : 0;
    return n;
  }
  int n_failed() const {
    int n = 0;
    for (const auto& r : runs) n += r.failed ? 1 : 0;
    return n;
  }
  bool all_hold() const {
    for (const auto& r : runs)
      if (!r.holds) return false;
    return true;
  }
  // Overall verdict: every run holds, nothing errored, self-test passed.
  bool ok() const {
    return n_failed() == 0 && all_hold() && (!expected_checked || expected_pass);
  }
};

namespace detail {

inline ordered_json double_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

inline double json_double(const ordered_json& j) {
  if (j.is_null()) return kNaN;
  return j.get<double>();
}

inline ordered_json action_set_json(const ActionSet& s) {
  return ordered_json(s.actions);
}

inline double run_tie_tolerance(const ExperimentSpec& spec, const QTable& q, int state) {
  return spec.tie_tolerance.value_or(default_tie_tolerance(q.values, state));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Runner. Sweep points are independent pure computations; they execute in
// grid order and a failure in one point marks only that record.
// ---------------------------------------------------------------------------

inline ExperimentReport run_experiment(const ScenarioFile& sc,
                                       std::optional<std::uint64_t> seed_override = {}) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentSpec& spec = sc.experiment;

  ExperimentReport report;
  report.scenario = sc.name;
  report.kind = to_string(spec.kind);
  report.seed = seed_override.value_or(spec.seed);
  report.notes = sc.notes;

  auto guarded = [&](RunRecord rec, auto&& body) {
    try {
      body(rec);
    } catch (const Error& e) {
      rec.failed = true;
      rec.holds = false;
      rec.error = e.what();
    }
    report.runs.push_back(std::move(rec));
  };

  switch (spec.kind) {
    case ExperimentKind::discontinuity_sweep: {
      const RewardTable& r0 = *sc.reward;
      for (double eps : spec.epsilons) {
        RunRecord rec;
        rec.id = "eps=" + fmt_double(eps);
        rec.param = eps;
        guarded(std::move(rec), [&](RunRecord& out) {
          QTable q0 = solve_q_star(sc.mdp, r0);
          const double tol = detail::run_tie_tolerance(spec, q0, spec.state);
          DiscontinuityCertificate cert =
              discontinuity_sequence(sc.mdp, r0, spec.state, spec.target, eps, tol);
          out.lhs = cert.reward_distance;
          out.rhs = eps * (1.0 + sc.mdp.discount());
          out.tv_jump = cert.tv_jump;
          out.holds = cert.reward_distance <= out.rhs &&
                      cert.switched_action_set.actions == std::vector<int>{spec.target} &&
                      std::abs(cert.q_gap - eps) <= 1e-9;
          out.detail["original"] = detail::action_set_json(cert.original_action_set);
          out.detail["switched"] = detail::action_set_json(cert.switched_action_set);
          out.detail["q_gap"] = cert.q_gap;
          out.detail["tie_tolerance"] = tol;
        });
      }
      break;
    }

    case ExperimentKind::tie_breaker_sweep: {
      const RewardTable& r0 = *sc.reward;
      for (double eps : spec.epsilons) {
        RunRecord rec;
        rec.id = "eps=" + fmt_double(eps);
        rec.param = eps;
        guarded(std::move(rec), [&](RunRecord& out) {
          QTable q0 = solve_q_star(sc.mdp, r0);
          const double tol = detail::run_tie_tolerance(spec, q0, spec.state);
          ActionSet before = optimal_action_set(q0, spec.state, tol);

          RewardTable r1 =
              tie_breaker(sc.mdp, r0, spec.state, spec.demoted, spec.target, eps);
          QTable q1 = solve_q_star(sc.mdp, r1);
          const double gap =
              q1.values(spec.state, spec.target) - q1.values(spec.state, spec.demoted);
          const double reward_distance = sup_diff(r1.values, r0.values);
          ActionSet after = optimal_action_set(q1, spec.state, tol);

          out.lhs = gap;
          out.rhs = eps / (1.0 + sc.mdp.discount());
          out.holds = std::abs(gap - out.rhs) <= 1e-8 &&
                      after.actions == std::vector<int>{spec.target} &&
                      reward_distance <= eps + 1e-12;
          std::vector<double> row_before(sc.mdp.n_actions(), 0.0);
          const double mass = 1.0 / static_cast<double>(before.size());
          for (int a : before.actions) row_before[a] = mass;
          std::vector<double> row_after(sc.mdp.n_actions(), 0.0);
          row_after[spec.target] = 1.0;
          out.tv_jump = tv_distance(row_before, row_after);
          out.detail["original"] = detail::action_set_json(before);
          out.detail["switched"] = detail::action_set_json(after);
          out.detail["reward_distance"] = reward_distance;
        });
      }
      break;
    }

    case ExperimentKind::soft_stability_sweep: {
      const RewardTable& r0 = *sc.reward;
      for (double eps : spec.epsilons) {
        for (double alpha : spec.alphas) {
          RunRecord rec;
          rec.id = "eps=" + fmt_double(eps) + ";alpha=" + fmt_double(alpha);
          rec.param = eps;
          rec.alpha = alpha;
          guarded(std::move(rec), [&](RunRecord& out) {
            QTable q0 = solve_q_star(sc.mdp, r0);
            const double tol = detail::run_tie_tolerance(spec, q0, spec.state);
            DiscontinuityCertificate cert =
                discontinuity_sequence(sc.mdp, r0, spec.state, spec.target, eps, tol);
            SoftStabilityReport soft = soft_policy_stability_report(
                sc.mdp, r0, cert.perturbed_reward, Temperature(alpha));
            out.lhs = soft.max_tv;
            out.rhs = soft.bound;
            out.holds = soft.holds;
            out.detail["hard_tv_jump"] = cert.tv_jump;
            out.detail["reward_distance"] = cert.reward_distance;
          });
        }
      }
      std::mt19937_64 rng(report.seed);
      for (int k = 0; k < spec.random_perturbations; ++k) {
        Grid noise(sc.mdp.n_states(), sc.mdp.n_actions());
        for (double& v : noise.data()) {
          const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
          v = (2.0 * u - 1.0) * spec.perturbation_magnitude;
        }
        for (double alpha : spec.alphas) {
          RunRecord rec;
          rec.id = "rand=" + std::to_string(k) + ";alpha=" + fmt_double(alpha);
          rec.param = spec.perturbation_magnitude;
          rec.alpha = alpha;
          guarded(std::move(rec), [&](RunRecord& out) {
            Grid perturbed = r0.values;
            for (std::size_t i = 0; i < perturbed.data().size(); ++i)
              perturbed.data()[i] += noise.data()[i];
            SoftStabilityReport soft = soft_policy_stability_report(
                sc.mdp, r0, RewardTable(std::move(perturbed)), Temperature(alpha));
            out.lhs = soft.max_tv;
            out.rhs = soft.bound;
            out.holds = soft.holds;
          });
        }
      }
      break;
    }

    case ExperimentKind::slacker_check: {
      const RewardTable& r_train = *sc.reward;
      const RewardTable& r_missing = *sc.reward_missing;

      auto slacker_run = [&](const std::string& id, const RewardTable& missing,
                             bool expect_witness) {
        RunRecord rec;
        rec.id = id;
        guarded(std::move(rec), [&](RunRecord& out) {
          SlackerCertificate cert = slacker_certificate(
              sc.mdp, r_train, missing, sc.initial_distribution, spec.selection,
              spec.tie_tolerance);
          out.value_gap = cert.true_value_gap;
          const bool witnessed =
              cert.conditions_met == std::array<bool, 3>{true, true, true};
          out.holds = expect_witness ? (witnessed && cert.true_value_gap > 1e-12)
                                     : (!witnessed && std::abs(cert.true_value_gap) <= 1e-9);
          out.detail["witness_found"] = witnessed;
          out.detail["witness_count"] = cert.witness_count;
          if (witnessed) {
            out.detail["witness_state"] = cert.state;
            out.detail["witness_action"] = cert.action;
            out.detail["advantage_missing"] = cert.advantage_missing;
            out.detail["reachability"] = cert.reachability;
            out.lhs = cert.advantage_missing;
            out.rhs = 0.0;
          }

          if (spec.probe_state >= 0) {
            Grid full = r_train.values;
            for (std::size_t i = 0; i < full.data().size(); ++i)
              full.data()[i] += missing.values.data()[i];
            RewardTable r_full(std::move(full));
            QTable q_train = solve_q_star(sc.mdp, r_train);
            QTable q_full = solve_q_star(sc.mdp, r_full);
            ActionSet set_train = optimal_action_set(
                q_train, spec.probe_state,
                detail::run_tie_tolerance(spec, q_train, spec.probe_state));
            ActionSet set_full = optimal_action_set(
                q_full, spec.probe_state,
                detail::run_tie_tolerance(spec, q_full, spec.probe_state));
            out.detail["optimal_with_train"] = detail::action_set_json(set_train);
            out.detail["optimal_with_full"] = detail::action_set_json(set_full);

            // Cross-check both argmax sets against policy enumeration when
            // the instance is small enough.
            if (std::pow(sc.mdp.n_actions(), sc.mdp.n_states()) <= 100000.0) {
              QTable bf_train = brute_force_q_star(sc.mdp, r_train);
              QTable bf_full = brute_force_q_star(sc.mdp, r_full);
              const bool agree =
                  optimal_action_set(bf_train, spec.probe_state,
                                     detail::run_tie_tolerance(spec, bf_train,
                                                               spec.probe_state))
                          .actions == set_train.actions &&
                  optimal_action_set(bf_full, spec.probe_state,
                                     detail::run_tie_tolerance(spec, bf_full,
                                                               spec.probe_state))
                          .actions == set_full.actions;
              out.detail["brute_force_agrees"] = agree;
              out.holds = out.holds && agree;
            }
          }
        });
      };

      slacker_run("main", r_missing, true);
      RewardTable zero(Grid(sc.mdp.n_states(), sc.mdp.n_actions(), 0.0));
      slacker_run("control", zero, false);
      break;
    }

    case ExperimentKind::mixture_perturbation: {
      const RewardTuple& tuple = *sc.reward_tuple;
      const WeightTable& weights = *sc.weights;
      for (double eps : spec.epsilons) {
        RunRecord rec;
        rec.id = "eps=" + fmt_double(eps);
        rec.param = eps;
        guarded(std::move(rec), [&](RunRecord& out) {
          RewardTable eff = effective_reward(tuple, weights);
          QTable q0 = solve_q_star(sc.mdp, eff);
          const double tol = detail::run_tie_tolerance(spec, q0, spec.state);
          MultiDiscontinuityCertificate cert = multi_discontinuity_sequence(
              sc.mdp, tuple, weights, spec.state, spec.target, eps, tol);
          out.lhs = cert.tuple_distance;
          out.rhs = eps * (1.0 + sc.mdp.discount());
          out.tv_jump = cert.tv_jump;
          out.holds = cert.tuple_distance <= out.rhs &&
                      cert.switched_action_set.actions == std::vector<int>{spec.target} &&
                      std::abs(cert.q_gap - eps) <= 1e-9 &&
                      cert.weight_identity_error <= 1e-12;
          out.detail["original"] = detail::action_set_json(cert.original_action_set);
          out.detail["switched"] = detail::action_set_json(cert.switched_action_set);
          out.detail["q_gap"] = cert.q_gap;
          out.detail["weight_identity_error"] = cert.weight_identity_error;
          out.detail["n_components"] = cert.perturbed_tuple.size();
        });
      }
      break;
    }
  }

  // Self-test against the embedded expected block.
  if (sc.expected.any()) {
    report.expected_checked = true;
    auto fail = [&](const std::string& msg) {
      report.expected_pass = false;
      report.expected_failures.push_back(msg);
    };

    if (sc.expected.all_hold && report.all_hold() != *sc.expected.all_hold)
      fail("all_hold: expected " + std::string(*sc.expected.all_hold ? "true" : "false"));
    for (const RunRecord& run : report.runs) {
      if (sc.expected.tv_jump && !std::isnan(run.tv_jump) &&
          std::abs(run.tv_jump - *sc.expected.tv_jump) > 1e-12)
        fail(run.id + ": tv_jump " + fmt_double(run.tv_jump) + " != expected " +
             fmt_double(*sc.expected.tv_jump));
      if (sc.expected.switched_actions && run.detail.contains("switched") &&
          run.detail["switched"] != ordered_json(*sc.expected.switched_actions))
        fail(run.id + ": switched set mismatch");
      if (run.id == "main") {
        if (sc.expected.witness_state &&
            (!run.detail.contains("witness_state") ||
             run.detail["witness_state"] != *sc.expected.witness_state))
          fail("main: witness state mismatch");
        if (sc.expected.witness_action &&
            (!run.detail.contains("witness_action") ||
             run.detail["witness_action"] != *sc.expected.witness_action))
          fail("main: witness action mismatch");
        if (sc.expected.gap_positive && (run.value_gap > 1e-12) != *sc.expected.gap_positive)
          fail("main: gap positivity mismatch");
        if (sc.expected.optimal_with_train &&
            (!run.detail.contains("optimal_with_train") ||
             run.detail["optimal_with_train"] != ordered_json(*sc.expected.optimal_with_train)))
          fail("main: optimal_with_train mismatch");
        if (sc.expected.optimal_with_full &&
            (!run.detail.contains("optimal_with_full") ||
             run.detail["optimal_with_full"] != ordered_json(*sc.expected.optimal_with_full)))
          fail("main: optimal_with_full mismatch");
      }
    }
  }

  report.wall_clock_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  return report;
}

// ---------------------------------------------------------------------------
// Serialization. wall_clock_ms is the one field excluded from replay
// determinism; everything else is a pure function of scenario + seed.
// ---------------------------------------------------------------------------

inline ordered_json report_to_json(const ExperimentReport& report) {
  ordered_json j;
  j["tool_version"] = report.tool_version;
  j["scenario"] = report.scenario;
  j["kind"] = report.kind;
  j["seed"] = report.seed;
  if (!report.notes.empty()) j["notes"] = report.notes;
  ordered_json runs = ordered_json::array();
  for (const RunRecord& run : report.runs) {
    ordered_json rj;
    rj["id"] = run.id;
    rj["inputs"] = {{"param", detail::double_or_null(run.param)},
                    {"alpha", detail::double_or_null(run.alpha)}};
    rj["results"] = {{"lhs", detail::double_or_null(run.lhs)},
                     {"rhs", detail::double_or_null(run.rhs)},
                     {"tv_jump", detail::double_or_null(run.tv_jump)},
                     {"value_gap", detail::double_or_null(run.value_gap)},
                     {"detail", run.detail}};
    rj["holds"] = run.holds;
    rj["failed"] = run.failed;
    rj["error"] = run.error;
    runs.push_back(std::move(rj));
  }
  j["runs"] = std::move(runs);
  j["summary"] = {{"n_runs", report.n_runs()},
                  {"n_holds", report.n_holds()},
                  {"n_failed", report.n_failed()},
                  {"all_hold", report.all_hold()},
                  {"expected_checked", report.expected_checked},
                  {"expected_pass", report.expected_pass},
                  {"expected_failures", report.expected_failures}};
  j["wall_clock_ms"] = report.wall_clock_ms;
  return j;
}

inline ExperimentReport report_from_json(const ordered_json& j) {
  ExperimentReport report;
  report.tool_version = j.at("tool_version").get<std::string>();
  report.scenario = j.at("scenario").get<std::string>();
  report.kind = j.at("kind").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("notes")) report.notes = j.at("notes").get<std::string>();
  for (const auto& rj : j.at("runs")) {
    RunRecord run;
    run.id = rj.at("id").get<std::string>();
    run.param = detail::json_double(rj.at("inputs").at("param"));
    run.alpha = detail::json_double(rj.at("inputs").at("alpha"));
    run.lhs = detail::json_double(rj.at("results").at("lhs"));
    run.rhs = detail::json_double(rj.at("results").at("rhs"));
    run.tv_jump = detail::json_double(rj.at("results").at("tv_jump"));
    run.value_gap = detail::json_double(rj.at("results").at("value_gap"));
    run.detail = rj.at("results").at("detail");
    run.holds = rj.at("holds").get<bool>();
    run.failed = rj.at("failed").get<bool>();
    run.error = rj.at("error").get<std::string>();
    report.runs.push_back(std::move(run));
  }
  const auto& summary = j.at("summary");
  report.expected_checked = summary.at("expected_checked").get<bool>();
  report.expected_pass = summary.at("expected_pass").get<bool>();
  report.expected_failures =
      summary.at("expected_failures").get<std::vector<std::string>>();
  report.wall_clock_ms = j.at("wall_clock_ms").get<double>();
  return report;
}

inline std::string report_json_string(const ExperimentReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace detail

// Flat per-run table. Column order is part of the report schema and is
// documented in docs/report_schema.md.
inline std::string report_csv_string(const ExperimentReport& report) {
  std::string out =
      "scenario,kind,run_id,param,alpha,lhs,rhs,holds,tv_jump,value_gap,failed,error\n";
  for (const RunRecord& run : report.runs) {
    out += detail::csv_escape(report.scenario) + ',';
    out += report.kind + ',';
    out += detail::csv_escape(run.id) + ',';
    out += fmt_double(run.param) + ',';
    out += fmt_double(run.alpha) + ',';
    out += fmt_double(run.lhs) + ',';
    out += fmt_double(run.rhs) + ',';
    out += run.holds ? "1," : "0,";
    out += fmt_double(run.tv_jump) + ',';
    out += fmt_double(run.value_gap) + ',';
    out += run.failed ? "1," : "0,";
    out += detail::csv_escape(run.error) + '\n';
  }
  return out;
}

enum class ReportFormat { json, csv };

inline void write_report(const ExperimentReport& report, ReportFormat format,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_report: cannot open '" + path + "' for writing");
  out << (format == ReportFormat::json ? report_json_string(report)
                                       : report_csv_string(report));
  if (!out) throw IoError("write_report: failed while writing '" + path + "'");
}

}  // namespace mdplab
