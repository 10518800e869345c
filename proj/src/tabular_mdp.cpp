#include "svrpg/tabular_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace svrpg {

namespace {

constexpr double kSumTolerance = 1e-12;

void check_distribution(const double* p, int n, const std::string& what) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(p[i] >= 0.0)) throw std::invalid_argument(what + " has a negative or NaN entry");
    total += p[i];
  }
  if (std::abs(total - 1.0) > kSumTolerance)
    throw std::invalid_argument(what + " sums to " + std::to_string(total) + ", expected 1");
}

}  // namespace

double TabularMdp::max_reward() const {
  if (reward_bound > 0.0) return reward_bound;
  double r = 0.0;
  for (double x : rewards) r = std::max(r, x);
  return r > 0.0 ? r : 1.0;
}

void TabularMdp::validate() const {
  if (num_states <= 0 || num_actions <= 0)
    throw std::invalid_argument("tabular MDP needs positive state and action counts");
  const auto S = static_cast<std::size_t>(num_states);
  const auto A = static_cast<std::size_t>(num_actions);
  if (transition.size() != S * A * S)
    throw std::invalid_argument("transition table must have num_states*num_actions*num_states entries");
  if (rewards.size() != S * A)
    throw std::invalid_argument("reward table must have num_states*num_actions entries");
  if (rho.size() != S) throw std::invalid_argument("rho must have num_states entries");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  check_distribution(rho.data(), num_states, "rho");
  for (std::size_t sa = 0; sa < S * A; ++sa)
    check_distribution(transition.data() + sa * S, num_states,
                       "transition row " + std::to_string(sa / A) + "," + std::to_string(sa % A));
  const double bound = max_reward();
  for (double r : rewards)
    if (!(r >= 0.0 && r <= bound)) throw std::invalid_argument("reward outside [0, R]");
}

TabularMdp TabularMdp::from_json(const nlohmann::json& doc) {
  TabularMdp mdp;
  mdp.num_states = doc.at("num_states").get<int>();
  mdp.num_actions = doc.at("num_actions").get<int>();
  const auto& P = doc.at("transition");
  if (!P.is_array() || static_cast<int>(P.size()) != mdp.num_states)
    throw std::invalid_argument("transition must be a [S][A][S] nested array");
  for (const auto& per_state : P) {
    if (static_cast<int>(per_state.size()) != mdp.num_actions)
      throw std::invalid_argument("transition must be a [S][A][S] nested array");
    for (const auto& row : per_state) {
      if (static_cast<int>(row.size()) != mdp.num_states)
        throw std::invalid_argument("transition must be a [S][A][S] nested array");
      for (const auto& p : row) mdp.transition.push_back(p.get<double>());
    }
  }
  const auto& R = doc.at("rewards");
  for (const auto& per_state : R) {
    if (static_cast<int>(per_state.size()) != mdp.num_actions)
      throw std::invalid_argument("rewards must be a [S][A] nested array");
    for (const auto& r : per_state) mdp.rewards.push_back(r.get<double>());
  }
  mdp.rho = doc.at("rho").get<std::vector<double>>();
  mdp.gamma = doc.at("gamma").get<double>();
  mdp.horizon = doc.at("horizon").get<int>();
  mdp.reward_bound = doc.value("reward_bound", 0.0);
  mdp.validate();
  return mdp;
}

TabularMdp TabularMdp::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tabular MDP file " + path.string());
  return from_json(nlohmann::json::parse(in));
}

nlohmann::json TabularMdp::to_json() const {
  nlohmann::json P = nlohmann::json::array();
  for (int s = 0; s < num_states; ++s) {
    nlohmann::json per_state = nlohmann::json::array();
    for (int a = 0; a < num_actions; ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (int n = 0; n < num_states; ++n) row.push_back(transition_prob(s, a, n));
      per_state.push_back(row);
    }
    P.push_back(per_state);
  }
  nlohmann::json R = nlohmann::json::array();
  for (int s = 0; s < num_states; ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (int a = 0; a < num_actions; ++a) row.push_back(reward(s, a));
    R.push_back(row);
  }
  nlohmann::json doc = {{"num_states", num_states}, {"num_actions", num_actions},
                        {"transition", P},          {"rewards", R},
                        {"rho", rho},               {"gamma", gamma},
                        {"horizon", horizon}};
  if (reward_bound > 0.0) doc["reward_bound"] = reward_bound;
  return doc;
}

TabularMdp default_oracle_mdp() {
  TabularMdp mdp;
  mdp.num_states = 3;
  mdp.num_actions = 2;
  // clang-format off
  mdp.transition = {
      // s = 0
      0.7, 0.2, 0.1,    0.1, 0.6, 0.3,
      // s = 1
      0.3, 0.5, 0.2,    0.0, 0.25, 0.75,
      // s = 2
      0.5, 0.1, 0.4,    0.2, 0.2, 0.6,
  };
  mdp.rewards = {
      0.1, 0.4,
      0.8, 0.0,
      0.3, 1.0,
  };
  // clang-format on
  mdp.rho = {0.5, 0.3, 0.2};
  mdp.gamma = 0.9;
  mdp.horizon = 3;
  mdp.reward_bound = 1.0;
  mdp.validate();
  return mdp;
}

TabularMdp bandit_mdp(std::vector<double> arm_rewards, double gamma) {
  TabularMdp mdp;
  mdp.num_states = 1;
  mdp.num_actions = static_cast<int>(arm_rewards.size());
  mdp.transition.assign(arm_rewards.size(), 1.0);
  mdp.rewards = std::move(arm_rewards);
  mdp.rho = {1.0};
  mdp.gamma = gamma;
  mdp.horizon = 1;
  mdp.validate();
  return mdp;
}

}  // namespace svrpg
