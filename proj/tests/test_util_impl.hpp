#ifndef SVRPG_TEST_UTIL_IMPL_HPP
#define SVRPG_TEST_UTIL_IMPL_HPP

#include <cmath>

namespace svrpg::testing {

template <class F>
void brute_force_paths(const TabularMdp& mdp, const SoftmaxTabularPolicy& policy, F&& f) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  const int H = mdp.horizon;
  // Mixed-radix counter over s_0, a_0, s_1, a_1, ..., s_H.
  std::vector<int> digits(2 * H + 1, 0);
  std::vector<int> radix(2 * H + 1);
  for (int i = 0; i < 2 * H + 1; ++i) radix[i] = (i % 2 == 0) ? S : A;
  while (true) {
    std::vector<int> states, actions;
    std::vector<double> rewards;
    double p = mdp.rho[digits[0]];
    for (int h = 0; h < H; ++h) {
      const int s = digits[2 * h], a = digits[2 * h + 1], next = digits[2 * h + 2];
      states.push_back(s);
      actions.push_back(a);
      rewards.push_back(mdp.reward(s, a));
      p *= policy.probabilities(s)(a) * mdp.transition_prob(s, a, next);
    }
    states.push_back(digits[2 * H]);
    f(tabular_trajectory(states, actions, rewards), p);

    int i = 0;
    while (i < 2 * H + 1 && ++digits[i] == radix[i]) digits[i++] = 0;
    if (i == 2 * H + 1) break;
  }
}

}  // namespace svrpg::testing

#endif  // SVRPG_TEST_UTIL_IMPL_HPP
