#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixmag/annealing.hpp"
#include "fixmag/chains.hpp"
#include "fixmag/graph.hpp"
#include "fixmag/hardness.hpp"

namespace fixmag {

using Json = nlohmann::json;

/// {"n": int, "delta_cap": int, "edges": [[u, v], ...]}, 0-indexed.
Json graph_to_json(const Graph& graph);
/// Rejects missing fields, wrong types, out-of-range endpoints and every
/// graph invariant violation with an invalid_argument error.
Graph graph_from_json(const Json& j);

Graph read_graph_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

Json spins_to_json(const SpinConfig& config);

/// Graph fields plus u0, w0, terminals_left, terminals_right, u1 and the parameters.
Json gadget_to_json(const Gadget& gadget);
/// Composite graph fields plus s, match_size, crossing_edges and the derived quantities.
Json instance_to_json(const ReductionInstance& instance);

/// Header "step,M,delta_sigma".
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

/// Header "stage,beta,beta_next,mean,variance".
void write_stages_csv(std::ostream& out, const std::vector<RatioEstimate>& stages);

}  // namespace fixmag
