#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mdplab/dp.hpp"
#include "mdplab/mdp.hpp"
#include "mdplab/multi.hpp"

namespace mdplab {

using ordered_json = nlohmann::ordered_json;

enum class ExperimentKind {
  discontinuity_sweep,
  tie_breaker_sweep,
  soft_stability_sweep,
  slacker_check,
  mixture_perturbation,
};

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::discontinuity_sweep: return "discontinuity_sweep";
    case ExperimentKind::tie_breaker_sweep: return "tie_breaker_sweep";
    case ExperimentKind::soft_stability_sweep: return "soft_stability_sweep";
    case ExperimentKind::slacker_check: return "slacker_check";
    case ExperimentKind::mixture_perturbation: return "mixture_perturbation";
  }
  return "?";
}

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::discontinuity_sweep;
  int state = 0;    // probed state for perturbation kinds
  int target = 0;   // promoted / switched-to action
  int demoted = -1; // tie_breaker_sweep only
  int probe_state = -1;  // slacker_check: state whose optimal sets are reported
  std::vector<double> epsilons;
  std::vector<double> alphas;
  std::optional<double> tie_tolerance;  // absent: row-scaled default
  Selection selection = Selection::uniform_over_ties;
  std::uint64_t seed = 0;
  int random_perturbations = 0;        // soft_stability_sweep extra draws
  double perturbation_magnitude = 0.1; // sup-norm scale of those draws
};

// Optional self-test block; scenarios that carry one are checked against
// their own verdicts when run.
struct ExpectedBlock {
  std::optional<bool> all_hold;
  std::optional<double> tv_jump;
  std::optional<std::vector<int>> switched_actions;
  std::optional<int> witness_state;
  std::optional<int> witness_action;
  std::optional<bool> gap_positive;
  std::optional<std::vector<int>> optimal_with_train;
  std::optional<std::vector<int>> optimal_with_full;

  bool any() const {
    return all_hold || tv_jump || switched_actions || witness_state || witness_action ||
           gap_positive || optimal_with_train || optimal_with_full;
  }
};

struct ScenarioFile {
  explicit ScenarioFile(FiniteMdp m) : mdp(std::move(m)) {}

  std::string name;
  std::string description;
  std::string notes;
  std::vector<std::string> state_labels;
  FiniteMdp mdp;
  std::optional<RewardTable> reward;
  std::optional<RewardTable> reward_missing;
  std::optional<RewardTuple> reward_tuple;
  std::optional<WeightTable> weights;
  std::vector<double> initial_distribution;
  ExperimentSpec experiment;
  ExpectedBlock expected;
};

// ---------------------------------------------------------------------------
// Parsing. Strict: unknown fields are rejected, every semantic failure names
// the violated invariant.
// ---------------------------------------------------------------------------

namespace detail {

inline void check_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw ValidationError("scenario: unknown field '" + it.key() + "' in " + where);
  }
}

inline const ordered_json& require_key(const ordered_json& obj, const char* key,
                                       const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ValidationError("scenario: missing required field '" + std::string(key) + "' in " +
                          where);
  return *it;
}

inline Grid grid_from_json(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ValidationError("scenario: " + where + " must be a non-empty 2D array");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    if (!row.is_array())
      throw ValidationError("scenario: " + where + " must be a 2D array of numbers");
    rows.push_back(row.get<std::vector<double>>());
  }
  try {
    return Grid::from_rows(rows);
  } catch (const DimensionError& e) {
    throw ValidationError("scenario: " + where + ": " + e.what());
  }
}

inline ordered_json grid_to_json(const Grid& g) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < g.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < g.cols(); ++c) row.push_back(g(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline FiniteMdp mdp_from_json(const ordered_json& j, std::vector<std::string>& labels_out) {
  if (!j.is_object()) throw ValidationError("scenario: 'mdp' must be an object");
  check_keys(j, {"states", "n_states", "n_actions", "discount", "transitions", "absorbing"},
             "'mdp'");

  int n_states = 0;
  if (j.contains("states")) {
    labels_out = j.at("states").get<std::vector<std::string>>();
    n_states = static_cast<int>(labels_out.size());
    if (j.contains("n_states") && j.at("n_states").get<int>() != n_states)
      throw ValidationError("scenario: 'n_states' disagrees with the 'states' label list");
  } else {
    n_states = require_key(j, "n_states", "'mdp'").get<int>();
  }
  const int n_actions = require_key(j, "n_actions", "'mdp'").get<int>();
  const double discount = require_key(j, "discount", "'mdp'").get<double>();
  if (n_states <= 0 || n_actions <= 0)
    throw ValidationError("scenario: state and action counts must be positive");
  if (!(discount >= 0.0) || !(discount < 1.0))
    throw ValidationError("scenario: discount must lie in [0, 1), got " +
                          std::to_string(discount));

  MdpBuilder builder(n_states, n_actions, discount);
  for (const auto& entry : require_key(j, "transitions", "'mdp'")) {
    if (!entry.is_array() || entry.size() != 4)
      throw ValidationError("scenario: each transition must be [from, action, to, p]");
    try {
      builder.add(entry[0].get<int>(), entry[1].get<int>(), entry[2].get<int>(),
                  entry[3].get<double>());
    } catch (const ArgumentError& e) {
      throw ValidationError(std::string("scenario: transition entry: ") + e.what());
    }
  }
  if (j.contains("absorbing"))
    for (int s : j.at("absorbing").get<std::vector<int>>()) builder.absorbing(s);
  return builder.build();
}

inline ExperimentKind kind_from_string(const std::string& s) {
  if (s == "discontinuity_sweep") return ExperimentKind::discontinuity_sweep;
  if (s == "tie_breaker_sweep") return ExperimentKind::tie_breaker_sweep;
  if (s == "soft_stability_sweep") return ExperimentKind::soft_stability_sweep;
  if (s == "slacker_check") return ExperimentKind::slacker_check;
  if (s == "mixture_perturbation") return ExperimentKind::mixture_perturbation;
  throw ValidationError("scenario: unknown experiment kind '" + s + "'");
}

inline ExperimentSpec experiment_from_json(const ordered_json& j) {
  if (!j.is_object()) throw ValidationError("scenario: 'experiment' must be an object");
  check_keys(j,
             {"kind", "state", "target", "demoted", "probe_state", "epsilons", "alphas",
              "tie_tolerance", "selection", "seed", "random_perturbations",
              "perturbation_magnitude"},
             "'experiment'");

  ExperimentSpec spec;
  spec.kind = kind_from_string(require_key(j, "kind", "'experiment'").get<std::string>());
  if (j.contains("state")) spec.state = j.at("state").get<int>();
  if (j.contains("target")) spec.target = j.at("target").get<int>();
  if (j.contains("demoted")) spec.demoted = j.at("demoted").get<int>();
  if (j.contains("probe_state")) spec.probe_state = j.at("probe_state").get<int>();
  if (j.contains("epsilons")) spec.epsilons = j.at("epsilons").get<std::vector<double>>();
  if (j.contains("alphas")) spec.alphas = j.at("alphas").get<std::vector<double>>();
  if (j.contains("tie_tolerance")) {
    spec.tie_tolerance = j.at("tie_tolerance").get<double>();
    if (*spec.tie_tolerance < 0.0)
      throw ValidationError("scenario: tie_tolerance must be nonnegative");
  }
  if (j.contains("selection")) {
    const std::string s = j.at("selection").get<std::string>();
    if (s == "lowest_index")
      spec.selection = Selection::lowest_index;
    else if (s == "uniform_over_ties")
      spec.selection = Selection::uniform_over_ties;
    else
      throw ValidationError("scenario: unknown selection rule '" + s + "'");
  }
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("random_perturbations"))
    spec.random_perturbations = j.at("random_perturbations").get<int>();
  if (j.contains("perturbation_magnitude"))
    spec.perturbation_magnitude = j.at("perturbation_magnitude").get<double>();

  for (double eps : spec.epsilons)
    if (!(eps > 0.0)) throw ValidationError("scenario: epsilons must be positive");
  for (double a : spec.alphas)
    if (!(a > 0.0)) throw ValidationError("scenario: alphas must be positive");
  if (spec.random_perturbations < 0)
    throw ValidationError("scenario: random_perturbations must be nonnegative");
  return spec;
}

inline ExpectedBlock expected_from_json(const ordered_json& j) {
  check_keys(j,
             {"all_hold", "tv_jump", "switched_actions", "witness_state", "witness_action",
              "gap_positive", "optimal_with_train", "optimal_with_full"},
             "'expected'");
  ExpectedBlock e;
  if (j.contains("all_hold")) e.all_hold = j.at("all_hold").get<bool>();
  if (j.contains("tv_jump")) e.tv_jump = j.at("tv_jump").get<double>();
  if (j.contains("switched_actions"))
    e.switched_actions = j.at("switched_actions").get<std::vector<int>>();
  if (j.contains("witness_state")) e.witness_state = j.at("witness_state").get<int>();
  if (j.contains("witness_action")) e.witness_action = j.at("witness_action").get<int>();
  if (j.contains("gap_positive")) e.gap_positive = j.at("gap_positive").get<bool>();
  if (j.contains("optimal_with_train"))
    e.optimal_with_train = j.at("optimal_with_train").get<std::vector<int>>();
  if (j.contains("optimal_with_full"))
    e.optimal_with_full = j.at("optimal_with_full").get<std::vector<int>>();
  return e;
}

}  // namespace detail

inline ScenarioFile parse_scenario(const ordered_json& j) {
  if (!j.is_object()) throw ValidationError("scenario: top level must be an object");
  detail::check_keys(j,
                     {"name", "description", "notes", "mdp", "reward", "reward_missing",
                      "reward_tuple", "initial_distribution", "experiment", "expected"},
                     "the scenario");

  std::vector<std::string> labels;
  FiniteMdp mdp = detail::mdp_from_json(detail::require_key(j, "mdp", "the scenario"), labels);
  ScenarioFile sc(std::move(mdp));
  sc.state_labels = std::move(labels);
  sc.name = detail::require_key(j, "name", "the scenario").get<std::string>();
  if (j.contains("description")) sc.description = j.at("description").get<std::string>();
  if (j.contains("notes")) sc.notes = j.at("notes").get<std::string>();

  auto check_shape = [&](const Grid& g, const std::string& what) {
    if (!sc.mdp.matches(g))
      throw ValidationError("scenario: " + what + " shape does not match the MDP (" +
                            std::to_string(g.rows()) + "x" + std::to_string(g.cols()) + ")");
  };

  if (j.contains("reward")) {
    Grid g = detail::grid_from_json(j.at("reward"), "'reward'");
    check_shape(g, "'reward'");
    sc.reward = RewardTable(std::move(g));
  }
  if (j.contains("reward_missing")) {
    Grid g = detail::grid_from_json(j.at("reward_missing"), "'reward_missing'");
    check_shape(g, "'reward_missing'");
    sc.reward_missing = RewardTable(std::move(g));
  }
  if (j.contains("reward_tuple")) {
    const ordered_json& tj = j.at("reward_tuple");
    detail::check_keys(tj, {"components", "weights"}, "'reward_tuple'");
    std::vector<RewardTable> comps;
    for (const auto& cj : detail::require_key(tj, "components", "'reward_tuple'")) {
      Grid g = detail::grid_from_json(cj, "'reward_tuple.components'");
      check_shape(g, "'reward_tuple' component");
      comps.emplace_back(std::move(g));
    }
    if (comps.empty()) throw ValidationError("scenario: reward_tuple needs components");
    sc.reward_tuple = RewardTuple(std::move(comps));
    Grid w = detail::grid_from_json(detail::require_key(tj, "weights", "'reward_tuple'"),
                                    "'reward_tuple.weights'");
    if (w.rows() != sc.mdp.n_states() || w.cols() != sc.reward_tuple->size())
      throw ValidationError("scenario: weight table must be n_states x n_components");
    try {
      sc.weights = WeightTable(std::move(w));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("scenario: ") + e.what());
    }
  }

  if (j.contains("initial_distribution")) {
    sc.initial_distribution = j.at("initial_distribution").get<std::vector<double>>();
    if (static_cast<int>(sc.initial_distribution.size()) != sc.mdp.n_states() ||
        !is_distribution_row(sc.initial_distribution))
      throw ValidationError(
          "scenario: initial_distribution is not a distribution over the states");
  } else {
    sc.initial_distribution.assign(sc.mdp.n_states(), 0.0);
    sc.initial_distribution[0] = 1.0;
  }

  sc.experiment =
      detail::experiment_from_json(detail::require_key(j, "experiment", "the scenario"));
  if (j.contains("expected")) sc.expected = detail::expected_from_json(j.at("expected"));

  // Kind-specific requirements.
  const auto need_state_action = [&](const char* kind) {
    if (sc.experiment.state < 0 || sc.experiment.state >= sc.mdp.n_states())
      throw ValidationError(std::string("scenario: ") + kind + " state out of range");
    if (sc.experiment.target < 0 || sc.experiment.target >= sc.mdp.n_actions())
      throw ValidationError(std::string("scenario: ") + kind + " target action out of range");
  };
  switch (sc.experiment.kind) {
    case ExperimentKind::discontinuity_sweep:
    case ExperimentKind::soft_stability_sweep:
      if (!sc.reward) throw ValidationError("scenario: this experiment needs a 'reward' table");
      need_state_action(to_string(sc.experiment.kind));
      break;
    case ExperimentKind::tie_breaker_sweep:
      if (!sc.reward) throw ValidationError("scenario: this experiment needs a 'reward' table");
      need_state_action("tie_breaker_sweep");
      if (sc.experiment.demoted < 0 || sc.experiment.demoted >= sc.mdp.n_actions())
        throw ValidationError("scenario: tie_breaker_sweep needs a valid 'demoted' action");
      break;
    case ExperimentKind::slacker_check:
      if (!sc.reward || !sc.reward_missing)
        throw ValidationError(
            "scenario: slacker_check needs 'reward' (training) and 'reward_missing'");
      break;
    case ExperimentKind::mixture_perturbation:
      if (!sc.reward_tuple || !sc.weights)
        throw ValidationError("scenario: mixture_perturbation needs a 'reward_tuple'");
      need_state_action("mixture_perturbation");
      break;
  }
  return sc;
}

inline ScenarioFile parse_scenario(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  return parse_scenario(j);
}

inline ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("scenario: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// Canonical serialization; load(serialize(load(x))) is the identity.
inline ordered_json scenario_to_json(const ScenarioFile& sc) {
  ordered_json j;
  j["name"] = sc.name;
  if (!sc.description.empty()) j["description"] = sc.description;
  if (!sc.notes.empty()) j["notes"] = sc.notes;

  ordered_json mj;
  if (!sc.state_labels.empty())
    mj["states"] = sc.state_labels;
  else
    mj["n_states"] = sc.mdp.n_states();
  mj["n_actions"] = sc.mdp.n_actions();
  mj["discount"] = sc.mdp.discount();
  ordered_json trans = ordered_json::array();
  for (int s = 0; s < sc.mdp.n_states(); ++s)
    for (int a = 0; a < sc.mdp.n_actions(); ++a)
      for (int s2 = 0; s2 < sc.mdp.n_states(); ++s2)
        if (sc.mdp.p(s, a, s2) > 0.0)
          trans.push_back(ordered_json::array({s, a, s2, sc.mdp.p(s, a, s2)}));
  mj["transitions"] = std::move(trans);
  j["mdp"] = std::move(mj);

  if (sc.reward) j["reward"] = detail::grid_to_json(sc.reward->values);
  if (sc.reward_missing) j["reward_missing"] = detail::grid_to_json(sc.reward_missing->values);
  if (sc.reward_tuple) {
    ordered_json tj;
    ordered_json comps = ordered_json::array();
    for (const auto& c : sc.reward_tuple->components)
      comps.push_back(detail::grid_to_json(c.values));
    tj["components"] = std::move(comps);
    tj["weights"] = detail::grid_to_json(sc.weights->weights);
    j["reward_tuple"] = std::move(tj);
  }
  j["initial_distribution"] = sc.initial_distribution;

  ordered_json ej;
  ej["kind"] = to_string(sc.experiment.kind);
  ej["state"] = sc.experiment.state;
  ej["target"] = sc.experiment.target;
  if (sc.experiment.demoted >= 0) ej["demoted"] = sc.experiment.demoted;
  if (sc.experiment.probe_state >= 0) ej["probe_state"] = sc.experiment.probe_state;
  if (!sc.experiment.epsilons.empty()) ej["epsilons"] = sc.experiment.epsilons;
  if (!sc.experiment.alphas.empty()) ej["alphas"] = sc.experiment.alphas;
  if (sc.experiment.tie_tolerance) ej["tie_tolerance"] = *sc.experiment.tie_tolerance;
  ej["selection"] = to_string(sc.experiment.selection);
  ej["seed"] = sc.experiment.seed;
  if (sc.experiment.random_perturbations > 0) {
    ej["random_perturbations"] = sc.experiment.random_perturbations;
    ej["perturbation_magnitude"] = sc.experiment.perturbation_magnitude;
  }
  j["experiment"] = std::move(ej);

  if (sc.expected.any()) {
    ordered_json xj;
    if (sc.expected.all_hold) xj["all_hold"] = *sc.expected.all_hold;
    if (sc.expected.tv_jump) xj["tv_jump"] = *sc.expected.tv_jump;
    if (sc.expected.switched_actions) xj["switched_actions"] = *sc.expected.switched_actions;
    if (sc.expected.witness_state) xj["witness_state"] = *sc.expected.witness_state;
    if (sc.expected.witness_action) xj["witness_action"] = *sc.expected.witness_action;
    if (sc.expected.gap_positive) xj["gap_positive"] = *sc.expected.gap_positive;
    if (sc.expected.optimal_with_train)
      xj["optimal_with_train"] = *sc.expected.optimal_with_train;
    if (sc.expected.optimal_with_full) xj["optimal_with_full"] = *sc.expected.optimal_with_full;
    j["expected"] = std::move(xj);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Built-in scenario library.
// ---------------------------------------------------------------------------

inline const std::map<std::string, const char*>& builtin_scenario_sources() {
  static const std::map<std::string, const char*> builtins = {
      {"twopath", R"json({
  "name": "twopath",
  "description": "Branch state with two exactly tied optimal actions; an epsilon bump through the inverse Bellman map flips the optimum to the target branch.",
  "mdp": {
    "states": ["start", "left", "right", "done"],
    "n_actions": 2,
    "discount": 0.9,
    "transitions": [
      [0, 0, 1, 1.0], [0, 1, 2, 1.0],
      [1, 0, 3, 1.0], [1, 1, 3, 1.0],
      [2, 0, 3, 1.0], [2, 1, 3, 1.0]
    ],
    "absorbing": [3]
  },
  "reward": [[1.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
  "experiment": {
    "kind": "discontinuity_sweep",
    "state": 0,
    "target": 1,
    "epsilons": [1e-1, 1e-3, 1e-6],
    "selection": "uniform_over_ties"
  },
  "expected": {
    "all_hold": true,
    "tv_jump": 0.5,
    "switched_actions": [1]
  }
})json"},
      {"format_tiebreak", R"json({
  "name": "format_tiebreak",
  "description": "Two equally correct response styles (free-form vs structured). A bonus of size epsilon promotes the structured style with Q gap epsilon/(1+discount).",
  "mdp": {
    "states": ["prompt", "freeform", "structured", "done"],
    "n_actions": 2,
    "discount": 0.9,
    "transitions": [
      [0, 0, 1, 1.0], [0, 1, 2, 1.0],
      [1, 0, 3, 1.0], [1, 1, 3, 1.0],
      [2, 0, 3, 1.0], [2, 1, 3, 1.0]
    ],
    "absorbing": [3]
  },
  "reward": [[1.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
  "experiment": {
    "kind": "tie_breaker_sweep",
    "state": 0,
    "demoted": 0,
    "target": 1,
    "epsilons": [1e-1, 1e-2, 1e-3]
  },
  "expected": {
    "all_hold": true,
    "switched_actions": [1]
  }
})json"},
      {"lcpo_chain", R"json({
  "name": "lcpo_chain",
  "description": "Token chain with a 3-step and a 7-step route to the correct terminal. The training reward pays correctness alone at the commitment step, so both routes tie; the auxiliary component charges 0.0003 per token of deviation from the 3-token target and uniquely selects the short route.",
  "mdp": {
    "states": ["prompt", "s1", "s2", "l1", "l2", "l3", "l4", "l5", "l6", "gold"],
    "n_actions": 2,
    "discount": 0.9,
    "transitions": [
      [0, 0, 3, 1.0], [0, 1, 1, 1.0],
      [1, 0, 2, 1.0], [1, 1, 2, 1.0],
      [2, 0, 9, 1.0], [2, 1, 9, 1.0],
      [3, 0, 4, 1.0], [3, 1, 4, 1.0],
      [4, 0, 5, 1.0], [4, 1, 5, 1.0],
      [5, 0, 6, 1.0], [5, 1, 6, 1.0],
      [6, 0, 7, 1.0], [6, 1, 7, 1.0],
      [7, 0, 8, 1.0], [7, 1, 8, 1.0],
      [8, 0, 9, 1.0], [8, 1, 9, 1.0]
    ],
    "absorbing": [9]
  },
  "reward": [
    [1.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
    [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]
  ],
  "reward_missing": [
    [-0.0012, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
    [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]
  ],
  "initial_distribution": [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
  "experiment": {
    "kind": "slacker_check",
    "probe_state": 0,
    "selection": "lowest_index"
  },
  "expected": {
    "all_hold": true,
    "witness_state": 0,
    "witness_action": 1,
    "gap_positive": true,
    "optimal_with_train": [0, 1],
    "optimal_with_full": [1]
  }
})json"},
      {"grader", R"json({
  "name": "grader",
  "description": "A task can be passed honestly or by manipulating the checks. The training signal pays for passing either way, so both routes tie and the lowest-index trainer picks manipulation; the missing component charges for manipulation, certifying the slack and flipping the optimum to the honest route.",
  "mdp": {
    "states": ["task", "honest_work", "hacked_tests", "pass_honest", "pass_hacked"],
    "n_actions": 2,
    "discount": 0.9,
    "transitions": [
      [0, 0, 2, 1.0], [0, 1, 1, 1.0],
      [1, 0, 3, 1.0], [1, 1, 3, 1.0],
      [2, 0, 4, 1.0], [2, 1, 4, 1.0]
    ],
    "absorbing": [3, 4]
  },
  "reward": [[0.0, 0.0], [1.0, 1.0], [1.0, 1.0], [0.0, 0.0], [0.0, 0.0]],
  "reward_missing": [[0.0, 0.0], [0.0, 0.0], [-0.3, -0.3], [0.0, 0.0], [0.0, 0.0]],
  "initial_distribution": [1.0, 0.0, 0.0, 0.0, 0.0],
  "experiment": {
    "kind": "slacker_check",
    "probe_state": 0,
    "selection": "lowest_index"
  },
  "expected": {
    "all_hold": true,
    "witness_state": 0,
    "witness_action": 1,
    "gap_positive": true,
    "optimal_with_train": [0, 1],
    "optimal_with_full": [1]
  }
})json"},
      {"mixture2", R"json({
  "name": "mixture2",
  "description": "Two specialized reward components pull toward opposite branches; even fixed weights tie the aggregated optimum. Adding one small identical delta to every component flips the aggregated optimal set to the target branch.",
  "notes": "Desk-scale qualitative analogue only: a small perturbation of the component tuple flips the aggregated optimum. Magnitudes are fixture-specific and not calibrated to any external system.",
  "mdp": {
    "states": ["start", "left", "right", "done"],
    "n_actions": 2,
    "discount": 0.9,
    "transitions": [
      [0, 0, 1, 1.0], [0, 1, 2, 1.0],
      [1, 0, 3, 1.0], [1, 1, 3, 1.0],
      [2, 0, 3, 1.0], [2, 1, 3, 1.0]
    ],
    "absorbing": [3]
  },
  "reward_tuple": {
    "components": [
      [[2.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
      [[0.0, 2.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
    ],
    "weights": [[0.5, 0.5], [0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]
  },
  "experiment": {
    "kind": "mixture_perturbation",
    "state": 0,
    "target": 1,
    "epsilons": [1e-1, 1e-3, 1e-6]
  },
  "expected": {
    "all_hold": true,
    "tv_jump": 0.5,
    "switched_actions": [1]
  }
})json"},
  };
  return builtins;
}

inline std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : builtin_scenario_sources()) names.push_back(name);
  return names;
}

inline ScenarioFile load_builtin(const std::string& name) {
  const auto& builtins = builtin_scenario_sources();
  auto it = builtins.find(name);
  if (it == builtins.end())
    throw ArgumentError("unknown built-in scenario '" + name + "'");
  return parse_scenario(std::string(it->second));
}

}  // namespace mdplab
