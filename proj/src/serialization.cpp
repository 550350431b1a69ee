#include "mdbd/serialization.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mdbd {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  j["data"] = std::move(data);
  return j;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows"), cols = j.at("cols");
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw std::invalid_argument("matrix_from_json: size mismatch");
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++];
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j) {
  std::vector<double> data = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

json set_to_json(const ConstraintSet& s) {
  json j;
  j["dim"] = s.dim;
  switch (s.kind) {
    case SetKind::UnitSimplex: j["kind"] = "unit_simplex"; break;
    case SetKind::Box:
      j["kind"] = "box";
      j["lower"] = vector_to_json(s.lower);
      j["upper"] = vector_to_json(s.upper);
      break;
    case SetKind::Ball:
      j["kind"] = "ball";
      j["center"] = vector_to_json(s.center);
      j["radius"] = s.radius;
      break;
    case SetKind::NonnegativeOrthant: j["kind"] = "nonnegative_orthant"; break;
  }
  return j;
}

ConstraintSet set_from_json(const json& j) {
  const std::string kind = j.at("kind");
  const int dim = j.at("dim");
  if (kind == "unit_simplex") return ConstraintSet::unit_simplex(dim);
  if (kind == "box")
    return ConstraintSet::box(vector_from_json(j.at("lower")),
                              vector_from_json(j.at("upper")));
  if (kind == "ball")
    return ConstraintSet::ball(vector_from_json(j.at("center")), j.at("radius"));
  if (kind == "nonnegative_orthant") return ConstraintSet::nonnegative_orthant(dim);
  throw std::invalid_argument("set_from_json: unknown kind " + kind);
}

}  // namespace

std::string instance_to_json(const NetworkProblem& net, const SlaterCertificate* cert) {
  json j;
  j["schema"] = "mdbd-instance-v1";
  j["family"] = net.family;
  j["seed"] = net.seed;
  j["graph"]["n_agents"] = net.graph.n_agents;
  json edges = json::array();
  for (int i = 0; i < net.graph.n_agents; ++i)
    for (int k = i + 1; k < net.graph.n_agents; ++k)
      if (net.graph.weights(i, k) > 0.0)
        edges.push_back({i, k, net.graph.weights(i, k)});
  j["graph"]["edges"] = std::move(edges);
  json agents = json::array();
  for (const auto& a : net.agents) {
    json ja;
    ja["cost"]["w"] = matrix_to_json(a.cost.w);
    ja["cost"]["d"] = vector_to_json(a.cost.d);
    ja["cost"]["l1_coef"] = a.cost.l1_coef;
    json ineq = json::array();
    for (const auto& row : a.ineq) ineq.push_back({{"l1_coef", row.l1_coef}, {"offset", row.offset}});
    ja["ineq"] = std::move(ineq);
    ja["eq_matrix"] = matrix_to_json(a.eq_matrix);
    ja["eq_offset"] = vector_to_json(a.eq_offset);
    ja["set"] = set_to_json(a.set);
    ja["generator"] = a.generator.kind == GeneratorKind::Entropy ? "entropy" : "quadratic";
    agents.push_back(std::move(ja));
  }
  j["agents"] = std::move(agents);
  if (cert) {
    j["slater"]["point"] = matrix_to_json(cert->point);
    j["slater"]["slack"] = cert->slack;
    j["slater"]["eq_residual"] = cert->eq_residual;
  }
  return j.dump(2) + "\n";
}

GeneratedInstance instance_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("schema") != "mdbd-instance-v1")
    throw std::invalid_argument("instance_from_json: unknown schema");
  GeneratedInstance out;
  NetworkProblem& net = out.net;
  net.family = j.at("family");
  net.seed = j.at("seed");
  const int nn = j.at("graph").at("n_agents");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(nn, nn);
  for (const auto& e : j.at("graph").at("edges")) {
    const int a = e[0], b = e[1];
    const double wt = e.size() > 2 ? double(e[2]) : 1.0;
    w(a, b) = w(b, a) = wt;
  }
  net.graph = Graph(nn, std::move(w));
  for (const auto& ja : j.at("agents")) {
    LocalProblem a;
    a.cost.w = matrix_from_json(ja.at("cost").at("w"));
    a.cost.d = vector_from_json(ja.at("cost").at("d"));
    a.cost.l1_coef = ja.at("cost").at("l1_coef");
    for (const auto& row : ja.at("ineq"))
      a.ineq.push_back({row.at("l1_coef").get<double>(), row.at("offset").get<double>()});
    a.eq_matrix = matrix_from_json(ja.at("eq_matrix"));
    a.eq_offset = vector_from_json(ja.at("eq_offset"));
    a.set = set_from_json(ja.at("set"));
    a.generator = ja.at("generator") == "entropy"
                      ? GeneratingFunction::entropy_on_simplex(a.set.dim)
                      : GeneratingFunction::quadratic(a.set);
    net.agents.push_back(std::move(a));
  }
  net.validate();
  if (j.contains("slater")) {
    out.slater.point = matrix_from_json(j.at("slater").at("point"));
    out.slater.slack = j.at("slater").at("slack");
    out.slater.eq_residual = j.at("slater").at("eq_residual");
  }
  return out;
}

std::string saddle_to_json(const SaddlePoint& sp) {
  json j;
  j["schema"] = "mdbd-saddle-v1";
  j["z_star"]["x"] = matrix_to_json(sp.z_star.x);
  j["z_star"]["lambda"] = matrix_to_json(sp.z_star.lambda);
  j["z_star"]["mu"] = matrix_to_json(sp.z_star.mu);
  j["z_star"]["omega"] = matrix_to_json(sp.z_star.omega);
  j["z_star"]["nu"] = matrix_to_json(sp.z_star.nu);
  j["s_star"]["y"] = matrix_to_json(sp.s_star.y);
  j["s_star"]["gamma"] = matrix_to_json(sp.s_star.gamma);
  j["s_star"]["mu"] = matrix_to_json(sp.s_star.mu);
  j["s_star"]["omega"] = matrix_to_json(sp.s_star.omega);
  j["s_star"]["nu"] = matrix_to_json(sp.s_star.nu);
  j["optimal_value"] = sp.optimal_value;
  j["provenance"] = {{"method", sp.method},
                     {"tolerance", sp.tolerance},
                     {"achieved_residual", sp.achieved_residual},
                     {"seed", sp.seed}};
  return j.dump(2) + "\n";
}

SaddlePoint saddle_from_json(const std::string& text, const NetworkProblem& net) {
  const json j = json::parse(text);
  if (j.at("schema") != "mdbd-saddle-v1")
    throw std::invalid_argument("saddle_from_json: unknown schema");
  SaddlePoint sp;
  sp.z_star.x = matrix_from_json(j.at("z_star").at("x"));
  sp.z_star.lambda = matrix_from_json(j.at("z_star").at("lambda"));
  sp.z_star.mu = matrix_from_json(j.at("z_star").at("mu"));
  sp.z_star.omega = matrix_from_json(j.at("z_star").at("omega"));
  sp.z_star.nu = matrix_from_json(j.at("z_star").at("nu"));
  sp.s_star.y = matrix_from_json(j.at("s_star").at("y"));
  sp.s_star.gamma = matrix_from_json(j.at("s_star").at("gamma"));
  sp.s_star.mu = matrix_from_json(j.at("s_star").at("mu"));
  sp.s_star.omega = matrix_from_json(j.at("s_star").at("omega"));
  sp.s_star.nu = matrix_from_json(j.at("s_star").at("nu"));
  sp.optimal_value = j.at("optimal_value");
  sp.method = j.at("provenance").at("method");
  sp.tolerance = j.at("provenance").at("tolerance");
  sp.achieved_residual = j.at("provenance").at("achieved_residual");
  sp.seed = j.at("provenance").at("seed");
  if (sp.z_star.x.rows() != net.dim_n() || sp.z_star.x.cols() != net.n_agents())
    throw std::invalid_argument("saddle_from_json: shape mismatch with instance");
  return sp;
}

namespace {

void write_block(std::ostream& os, double t, int agent, const char* name,
                 const Eigen::Ref<const Eigen::VectorXd>& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k)
    os << t << ',' << agent + 1 << ',' << name << ',' << k << ',' << v[k] << '\n';
}

}  // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t,agent,block,index,value\n";
  for (size_t r = 0; r < rec.times.size(); ++r) {
    const double t = rec.times[r];
    const OutputState& z = rec.outputs[r];
    const StackedState& s = rec.states[r];
    const int nn = static_cast<int>(z.x.cols());
    for (int i = 0; i < nn; ++i) {
      write_block(os, t, i, "x", z.x.col(i));
      write_block(os, t, i, "lambda", z.lambda.col(i));
      write_block(os, t, i, "mu", z.mu.col(i));
      write_block(os, t, i, "omega", z.omega.col(i));
      write_block(os, t, i, "nu", z.nu.col(i));
      write_block(os, t, i, "y", s.y.col(i));
      write_block(os, t, i, "gamma", s.gamma.col(i));
    }
  }
  write_text_file(path, os.str());
}

void write_diagnostics_csv(const std::string& path, const TrajectoryRecord& rec) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t,V1,kkt_residual,ineq_residual,eq_residual,s_norm,gap\n";
  for (const auto& d : rec.diagnostics) {
    os << d.t << ',' << d.v1 << ',' << d.kkt_residual << ',' << d.ineq_residual
       << ',' << d.eq_residual << ',' << d.s_norm << ',' << d.gap << '\n';
  }
  write_text_file(path, os.str());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace mdbd
