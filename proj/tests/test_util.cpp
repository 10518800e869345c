#include "test_util.hpp"

#include <fstream>
#include <sstream>

namespace svrpg::testing {

std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(SVRPG_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

Trajectory tabular_trajectory(const std::vector<int>& states, const std::vector<int>& actions,
                              const std::vector<double>& rewards) {
  Trajectory t;
  for (int s : states) t.states.push_back(Eigen::VectorXd::Constant(1, s));
  for (int a : actions) t.actions.push_back(Eigen::VectorXd::Constant(1, a));
  t.rewards = rewards;
  return t;
}

}  // namespace svrpg::testing
