#include "fixmag/io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "fixmag/errors.hpp"

namespace fixmag {

namespace {

Json edges_to_json(std::span<const Edge> edges) {
  Json out = Json::array();
  for (const Edge& e : edges) out.push_back({e.u, e.v});
  return out;
}

int int_field(const Json& j, const char* key) {
  require(j.contains(key), std::string("graph json: missing field \"") + key + "\"");
  require(j[key].is_number_integer(), std::string("graph json: field \"") + key + "\" must be an integer");
  return j[key].get<int>();
}

}  // namespace

Json graph_to_json(const Graph& graph) {
  return {{"n", graph.size()}, {"delta_cap", graph.delta_cap()}, {"edges", edges_to_json(graph.edges())}};
}

Graph graph_from_json(const Json& j) {
  require(j.is_object(), "graph json: expected an object");
  const int n = int_field(j, "n");
  const int delta_cap = int_field(j, "delta_cap");
  require(j.contains("edges") && j["edges"].is_array(), "graph json: \"edges\" must be an array");
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    require(e.is_array() && e.size() == 2 && e[0].is_number_integer() && e[1].is_number_integer(),
            "graph json: every edge must be a pair of integers");
    const int u = e[0].get<int>();
    const int v = e[1].get<int>();
    require(u >= 0 && u < n && v >= 0 && v < n, "graph json: edge endpoint out of range");
    edges.push_back({u, v});
  }
  return Graph(n, delta_cap, std::move(edges));
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open graph file " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::invalid_argument, "graph file " + path + ": " + e.what());
  }
  return graph_from_json(j);
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  require(out.good(), "cannot write " + path);
  out << j.dump(2) << '\n';
}

Json spins_to_json(const SpinConfig& config) {
  Json out = Json::array();
  for (Spin s : config.spins()) out.push_back(static_cast<int>(s));
  return out;
}

Json gadget_to_json(const Gadget& g) {
  Json j = graph_to_json(g.graph);
  j["u0"] = g.u0;
  j["w0"] = g.w0;
  j["terminals_left"] = g.terminals_left;
  j["terminals_right"] = g.terminals_right;
  j["u1"] = g.u1;
  j["side_left"] = g.side_left;
  j["side_right"] = g.side_right;
  j["parameters"] = {{"delta", g.spec.delta},
                     {"n", g.spec.n},
                     {"m", g.params.m},
                     {"m_prime", g.params.m_prime},
                     {"tree_depth", g.params.tree_depth},
                     {"match_size", g.params.match_size},
                     {"n_gadget", g.params.n_gadget}};
  return j;
}

Json instance_to_json(const ReductionInstance& r) {
  Json j = graph_to_json(r.composite);
  j["s"] = r.s;
  j["match_size"] = r.gadget.params.match_size;
  j["crossing_edges"] = edges_to_json(r.crossing_edges);
  j["host"] = graph_to_json(r.host);
  j["offsets"] = r.offsets;
  j["gamma"] = r.gamma;
  j["beta"] = r.beta;
  j["eta"] = r.eta;
  j["h_plus"] = r.h_plus;
  j["h_minus"] = r.h_minus;
  j["M_star"] = r.M_star;
  j["N"] = r.N;
  j["ell"] = r.ell;
  j["k"] = r.k_target;
  j["demonstration"] = r.demonstration;
  j["gadget"] = gadget_to_json(r.gadget);
  return j;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "step,M,delta_sigma\n";
  for (const auto& r : rows) out << r.step << ',' << r.magnetization << ',' << r.interaction << '\n';
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path);
  require(out.good(), "cannot write " + path);
  write_trace_csv(out, rows);
}

void write_stages_csv(std::ostream& out, const std::vector<RatioEstimate>& stages) {
  out << "stage,beta,beta_next,mean,variance\n" << std::setprecision(17);
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    out << i << ',' << s.beta << ',' << s.beta_next << ',' << s.mean << ',' << s.variance << '\n';
  }
}

}  // namespace fixmag
