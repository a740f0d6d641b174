#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "certipomdp/model.hpp"

namespace certipomdp {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Strips '#' comments and skips blank lines.
bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    std::istringstream probe(line);
    std::string tok;
    if (probe >> tok) return true;
  }
  return false;
}

std::vector<double> read_reals(std::istream& in, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  std::string line;
  while (out.size() < n) {
    if (!next_line(in, line)) throw ParamError("model file truncated");
    std::istringstream ls(line);
    double v;
    while (ls >> v) out.push_back(v);
  }
  if (out.size() != n) throw ParamError("model file block has extra values");
  return out;
}

}  // namespace

void save_model(const TabularPomdp& m, std::ostream& out) {
  out << "pomdp v1 " << m.num_states << ' ' << m.num_actions << ' ' << m.num_obs << ' '
      << m.horizon_T << ' ' << fmt17(m.r_max) << ' ' << fmt17(m.discount) << '\n';
  out << "prior\n";
  for (StateId x = 0; x < m.num_states; ++x)
    out << fmt17(m.prior[x]) << (x + 1 == m.num_states ? '\n' : ' ');
  for (ActionId a = 0; a < m.num_actions; ++a) {
    out << "T " << a << '\n';
    for (StateId x = 0; x < m.num_states; ++x)
      for (StateId xp = 0; xp < m.num_states; ++xp)
        out << fmt17(m.trans(x, a, xp)) << (xp + 1 == m.num_states ? '\n' : ' ');
  }
  out << "O\n";
  for (StateId x = 0; x < m.num_states; ++x)
    for (ObsId z = 0; z < m.num_obs; ++z)
      out << fmt17(m.obs(x, z)) << (z + 1 == m.num_obs ? '\n' : ' ');
  out << "R\n";
  for (StateId x = 0; x < m.num_states; ++x)
    for (ActionId a = 0; a < m.num_actions; ++a)
      out << fmt17(m.rew(x, a)) << (a + 1 == m.num_actions ? '\n' : ' ');
}

void save_model_file(const TabularPomdp& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParamError("cannot open " + path + " for writing");
  save_model(m, f);
}

TabularPomdp load_model(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw ParamError("empty model file");
  std::istringstream hs(line);
  std::string magic, ver;
  TabularPomdp m;
  hs >> magic >> ver >> m.num_states >> m.num_actions >> m.num_obs >> m.horizon_T >>
      m.r_max >> m.discount;
  if (!hs || magic != "pomdp" || ver != "v1")
    throw ParamError("bad model header: " + line);
  if (m.num_states <= 0 || m.num_actions <= 0 || m.num_obs <= 0)
    throw ParamError("model sizes must be positive");
  m.resize_tables();

  const std::size_t ns = m.num_states, na = m.num_actions, nz = m.num_obs;
  auto expect = [&in, &line](const std::string& want) {
    if (!next_line(in, line)) throw ParamError("model file truncated before " + want);
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok != want) throw ParamError("expected '" + want + "' block, got: " + line);
    return ls;
  };
  expect("prior");
  m.prior = read_reals(in, ns);
  for (ActionId a = 0; a < m.num_actions; ++a) {
    auto ls = expect("T");
    int got = -1;
    ls >> got;
    if (got != a) throw ParamError("T block out of order");
    auto block = read_reals(in, ns * ns);
    for (StateId x = 0; x < m.num_states; ++x)
      for (StateId xp = 0; xp < m.num_states; ++xp)
        m.trans_ref(x, a, xp) = block[static_cast<std::size_t>(x) * ns + xp];
  }
  expect("O");
  m.observation = read_reals(in, ns * nz);
  expect("R");
  m.reward = read_reals(in, ns * na);
  return m;
}

TabularPomdp load_model_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParamError("cannot open model file " + path);
  return load_model(f);
}

}  // namespace certipomdp
