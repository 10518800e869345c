#ifndef SVRPG_TEST_UTIL_HPP
#define SVRPG_TEST_UTIL_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "svrpg/policy.hpp"
#include "svrpg/tabular_mdp.hpp"
#include "svrpg/trajectory.hpp"

namespace svrpg::testing {

// Fresh, empty directory under the build tree.
std::filesystem::path scratch_dir(const std::string& name);

std::string read_file(const std::filesystem::path& path);

Eigen::VectorXd vec(std::initializer_list<double> values);

// Tabular trajectory from index lists; states may carry one extra entry.
Trajectory tabular_trajectory(const std::vector<int>& states, const std::vector<int>& actions,
                              const std::vector<double>& rewards);

// Plain nested-loop enumeration of every (s_0, a_0, ..., s_H) sequence,
// written independently of the library's walker. Calls f(traj, p) for every
// sequence including zero-probability ones.
template <class F>
void brute_force_paths(const TabularMdp& mdp, const SoftmaxTabularPolicy& policy, F&& f);

}  // namespace svrpg::testing

#include "test_util_impl.hpp"

#endif  // SVRPG_TEST_UTIL_HPP
