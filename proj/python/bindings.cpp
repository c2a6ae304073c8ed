#include <algorithm>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gevi/pipeline.hpp"
#include "gevi/service.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

gevi::MemberSet member_set(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

std::vector<gevi::Group> groups_from(const std::vector<std::pair<std::string, std::vector<std::string>>>& items) {
  std::vector<gevi::Group> groups;
  for (const auto& [label, names] : items) {
    const auto parsed = gevi::GroupLabel::parse(label);
    if (!parsed) throw std::invalid_argument("bad group label '" + label + "'");
    groups.push_back({*parsed, member_set(names)});
  }
  return groups;
}

py::dict transition_dict(const gevi::Transition& t) {
  py::dict d;
  d["src"] = t.src.str();
  d["dst"] = t.dst.str();
  d["mj"] = t.mj;
  d["stability"] = t.stability;
  d["size_ratio"] = t.size_ratio;
  d["flow"] = t.flow;
  d["kind"] = std::string(gevi::to_string(t.kind));
  d["dashed"] = t.dashed();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Group evolution analysis: slot graphs, clique percolation, transitions, layout and the artifact API.";

  m.def("modified_jaccard", [](std::vector<std::string> a, std::vector<std::string> b) {
    return gevi::modified_jaccard(member_set(std::move(a)), member_set(std::move(b)));
  });
  m.def("size_ratio", [](std::vector<std::string> a, std::vector<std::string> b) {
    return gevi::size_ratio(member_set(std::move(a)), member_set(std::move(b)));
  });
  m.def("stability", [](std::vector<std::string> a, std::vector<std::string> b) {
    return gevi::stability(member_set(std::move(a)), member_set(std::move(b)));
  });

  m.def(
      "segment_slots",
      [](const std::string& start, const std::string& end, int window_days, int step_days) {
        std::vector<std::tuple<int, std::string, std::string>> out;
        for (const auto& s : gevi::segment_slots(gevi::parse_instant(start), gevi::parse_instant(end),
                                                 gevi::days(window_days), gevi::days(step_days))) {
          out.emplace_back(s.index, gevi::format_instant(s.start), gevi::format_instant(s.end));
        }
        return out;
      },
      py::arg("start"), py::arg("end"), py::arg("window_days") = 30, py::arg("step_days") = 15);

  m.def(
      "detect_groups",
      [](const std::vector<std::pair<std::string, std::string>>& edges, int k) {
        const auto t = gevi::parse_instant("2000-01-01");
        std::vector<gevi::Message> messages;
        for (const auto& [a, b] : edges) messages.push_back({a, b, t});
        const auto graph = gevi::build_slot_graph(messages, {0, t, t + gevi::days(1)});
        std::vector<std::vector<std::string>> out;
        for (const auto& g : gevi::detect_groups(graph, k)) out.push_back(g.members);
        return out;
      },
      py::arg("edges"), py::arg("k") = 3, "CPM communities of an undirected edge list, largest first.");

  m.def(
      "link_groups",
      [](const std::vector<std::pair<std::string, std::vector<std::string>>>& groups, double th, double sh,
         int min_lifespan) {
        const gevi::EvolutionParams params{th, sh, min_lifespan};
        params.validate();
        const auto graph = gevi::link_groups(groups_from(groups), params);
        py::list transitions;
        for (const auto& t : graph.transitions()) transitions.append(transition_dict(t));
        py::dict flows;
        for (const auto& g : graph.groups()) {
          const auto f = gevi::member_flows(graph, g.label);
          py::dict d;
          d["inflow"] = f.inflow;
          d["external_in"] = f.external_in;
          d["outflow"] = f.outflow;
          d["external_out"] = f.external_out;
          flows[py::str(g.label.str())] = d;
        }
        py::list stable;
        for (const auto& l : gevi::stable_groups(graph, params)) stable.append(l.str());
        py::list hierarchies;
        for (const auto& h : gevi::hierarchies(graph)) {
          py::list labels;
          for (const auto& l : h.groups) labels.append(l.str());
          hierarchies.append(labels);
        }
        py::dict out;
        out["transitions"] = transitions;
        out["flows"] = flows;
        out["stable"] = stable;
        out["hierarchies"] = hierarchies;
        return out;
      },
      py::arg("groups"), py::arg("th") = 0.5, py::arg("sh") = 10.0, py::arg("min_lifespan") = 3,
      "Transitions, event kinds, member flows, stable groups and hierarchies for (label, members) pairs.");

  m.def(
      "compute_artifact",
      [](const std::string& config_json) {
        const auto config = gevi::config_from_json(json::parse(config_json));
        py::gil_scoped_release release;
        return gevi::to_json(gevi::compute_artifact(config)).dump();
      },
      py::arg("config_json"));
  m.def(
      "run_pipeline",
      [](const std::string& config_json) {
        const auto config = gevi::config_from_json(json::parse(config_json));
        py::gil_scoped_release release;
        return gevi::summary_json(gevi::run_pipeline(config)).dump();
      },
      py::arg("config_json"));
  m.def("summary", [](const std::string& artifact_json) {
    return gevi::summary_json(gevi::artifact_from_json(json::parse(artifact_json))).dump();
  });
  m.def("series_csv", [](const std::string& artifact_json) {
    return gevi::series_csv(gevi::artifact_from_json(json::parse(artifact_json)));
  });
  m.def("canonical_dump", [](const std::string& artifact_json) {
    return gevi::canonical_dump(gevi::artifact_from_json(json::parse(artifact_json)));
  });

  py::class_<gevi::ApiRouter>(m, "Router")
      .def(py::init([](const std::string& artifact_json) {
        return gevi::ApiRouter(gevi::artifact_from_json(json::parse(artifact_json)));
      }))
      .def(
          "get",
          [](const gevi::ApiRouter& r, const std::string& path, const std::map<std::string, std::string>& query) {
            const std::multimap<std::string, std::string> q(query.begin(), query.end());
            const auto res = r.handle("GET", path, q);
            return std::make_pair(res.status, res.body.dump());
          },
          py::arg("path"), py::arg("query") = std::map<std::string, std::string>{});

  py::register_exception<gevi::PipelineError>(m, "PipelineError", PyExc_RuntimeError);
}
