#include "gevi/artifact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gevi {

using nlohmann::json;

std::vector<int> EvolutionArtifact::hierarchy_of_groups() const {
  std::vector<int> out(graph.groups().size(), -1);
  for (const auto& h : hierarchies) {
    for (const auto& label : h.groups) {
      if (const auto idx = graph.index_of(label)) out[*idx] = h.id;
    }
  }
  return out;
}

EvolutionArtifact build_artifact(std::vector<Group> groups, std::vector<TimeSlot> slots,
                                 std::vector<std::uint64_t> message_counts, const EvolutionParams& params) {
  if (message_counts.size() != slots.size()) {
    throw std::invalid_argument("build_artifact: one message count per slot is required");
  }
  EvolutionArtifact a;
  a.params = params;
  a.graph = link_groups(std::move(groups), params);
  a.hierarchies = hierarchies(a.graph);
  a.lifespans = lifespans(a.graph);
  a.slots = std::move(slots);
  a.series = counts_per_slot(a.graph.groups(), message_counts);
  attach_stability(a.series, a.graph.transitions());
  return a;
}

void apply_layout(EvolutionArtifact& artifact, const LayoutMetrics& metrics, int sweeps) {
  artifact.layouts.clear();
  artifact.layouts.reserve(artifact.hierarchies.size());
  for (const auto& h : artifact.hierarchies) {
    artifact.layouts.push_back(layout_hierarchy(artifact.graph, h, metrics, sweeps));
  }
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json flows_json(const MemberFlows& f) {
  return {{"inflow", f.inflow},         {"external_in", f.external_in}, {"union_in", f.union_in},
          {"outflow", f.outflow},       {"external_out", f.external_out}, {"union_out", f.union_out}};
}

json layout_json(const PositionedGraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"id", n.id}, {"layer", n.layer}, {"order", n.order}, {"dummy", n.is_dummy},
                     {"x", n.x}, {"y", n.y}, {"size", n.size}});
  }
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"from", g.nodes[e.from].id},
                     {"to", g.nodes[e.to].id},
                     {"style", std::string(to_string(e.style))},
                     {"transition", e.transition ? json(*e.transition) : json(nullptr)}});
  }
  return {{"hierarchy", g.hierarchy}, {"crossings", count_crossings(g)}, {"nodes", nodes}, {"edges", edges}};
}

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(where + ": field '" + key + "': " + e.what());
  }
}

GroupLabel label_field(const json& j, const char* key, const std::string& where) {
  const auto text = field<std::string>(j, key, where);
  const auto label = GroupLabel::parse(text);
  if (!label) throw std::invalid_argument(where + ": bad label '" + text + "'");
  return *label;
}

PositionedGraph layout_from_json(const json& j) {
  PositionedGraph g;
  g.hierarchy = field<int>(j, "hierarchy", "layout");
  std::map<std::string, std::size_t> index;
  for (const auto& n : field<json>(j, "nodes", "layout")) {
    LayeredNode node;
    node.id = field<std::string>(n, "id", "layout node");
    node.layer = field<int>(n, "layer", "layout node");
    node.order = field<int>(n, "order", "layout node");
    node.is_dummy = field<bool>(n, "dummy", "layout node");
    node.x = field<double>(n, "x", "layout node");
    node.y = field<double>(n, "y", "layout node");
    node.size = field<std::size_t>(n, "size", "layout node");
    index[node.id] = g.nodes.size();
    g.nodes.push_back(std::move(node));
  }
  for (const auto& e : field<json>(j, "edges", "layout")) {
    LayeredEdge edge;
    const auto from = index.find(field<std::string>(e, "from", "layout edge"));
    const auto to = index.find(field<std::string>(e, "to", "layout edge"));
    if (from == index.end() || to == index.end()) throw std::invalid_argument("layout edge: unknown node");
    edge.from = from->second;
    edge.to = to->second;
    edge.style = field<std::string>(e, "style", "layout edge") == "dashed" ? EdgeStyle::dashed : EdgeStyle::solid;
    if (!e.at("transition").is_null()) edge.transition = e.at("transition").get<std::size_t>();
    g.edges.push_back(edge);
  }
  return g;
}

}  // namespace

json to_json(const EvolutionArtifact& a) {
  json j;
  j["schema"] = kArtifactSchema;
  j["generated_at"] = a.generated_at;
  j["config"] = a.config;
  j["ingest"] = a.ingest;
  j["params"] = {{"th", a.params.th}, {"sh", a.params.sh}, {"min_lifespan", a.params.min_lifespan}};

  json slots = json::array();
  for (std::size_t i = 0; i < a.slots.size(); ++i) {
    const auto& s = a.slots[i];
    const auto& st = a.series.at(i);
    slots.push_back({{"index", s.index},
                     {"start", format_instant(s.start)},
                     {"end", format_instant(s.end)},
                     {"message_count", st.message_count},
                     {"group_count", st.group_count},
                     {"stability_mean", optional_number(st.stability_mean)},
                     {"stability_std", optional_number(st.stability_std)}});
  }
  j["slots"] = slots;

  const auto hierarchy_of = a.hierarchy_of_groups();
  json groups = json::array();
  for (std::size_t i = 0; i < a.graph.groups().size(); ++i) {
    const auto& g = a.graph.groups()[i];
    const auto events = node_events(a.graph, i);
    groups.push_back({{"label", g.label.str()},
                      {"slot", g.label.slot},
                      {"ordinal", g.label.ordinal},
                      {"size", g.size()},
                      {"members", g.members},
                      {"hierarchy", hierarchy_of[i]},
                      {"lifespan", a.lifespans[i]},
                      {"stable", a.is_stable(i)},
                      {"birth", events.birth},
                      {"death", events.death},
                      {"flows", flows_json(member_flows(a.graph, g.label))}});
  }
  j["groups"] = groups;

  json transitions = json::array();
  for (const auto& t : a.graph.transitions()) {
    transitions.push_back({{"src", t.src.str()},
                           {"dst", t.dst.str()},
                           {"mj", t.mj},
                           {"stability", t.stability},
                           {"size_ratio", t.size_ratio},
                           {"flow", t.flow},
                           {"kind", std::string(to_string(t.kind))},
                           {"style", t.dashed() ? "dashed" : "solid"}});
  }
  j["transitions"] = transitions;

  json hierarchies = json::array();
  for (const auto& h : a.hierarchies) {
    json labels = json::array();
    std::size_t stable = 0;
    for (const auto& l : h.groups) {
      labels.push_back(l.str());
      if (a.is_stable(*a.graph.index_of(l))) ++stable;
    }
    hierarchies.push_back({{"id", h.id},
                           {"first_slot", h.first_slot},
                           {"last_slot", h.last_slot},
                           {"groups", labels},
                           {"stable_groups", stable}});
  }
  j["hierarchies"] = hierarchies;

  if (a.layouts.empty()) {
    j["layout"] = nullptr;
  } else {
    json layouts = json::array();
    for (const auto& l : a.layouts) layouts.push_back(layout_json(l));
    j["layout"] = layouts;
  }
  j["summary"] = summary_json(a);
  return j;
}

EvolutionArtifact artifact_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("artifact: not a JSON object");
  const auto schema = field<std::string>(j, "schema", "artifact");
  if (schema != kArtifactSchema) throw std::invalid_argument("artifact: unsupported schema '" + schema + "'");

  EvolutionArtifact a;
  a.generated_at = j.value("generated_at", "");
  a.config = j.value("config", json::object());
  a.ingest = j.value("ingest", json::object());
  const auto& p = field<json>(j, "params", "artifact");
  a.params.th = field<double>(p, "th", "params");
  a.params.sh = field<double>(p, "sh", "params");
  a.params.min_lifespan = field<int>(p, "min_lifespan", "params");
  a.params.validate();

  for (const auto& s : field<json>(j, "slots", "artifact")) {
    TimeSlot slot;
    slot.index = field<int>(s, "index", "slot");
    slot.start = parse_instant(field<std::string>(s, "start", "slot"));
    slot.end = parse_instant(field<std::string>(s, "end", "slot"));
    if (slot.index != static_cast<int>(a.slots.size())) throw std::invalid_argument("slot: indices must be 0..n-1");
    SlotStats st;
    st.slot = slot.index;
    st.message_count = field<std::uint64_t>(s, "message_count", "slot");
    st.group_count = field<std::size_t>(s, "group_count", "slot");
    if (!s.at("stability_mean").is_null()) st.stability_mean = s.at("stability_mean").get<double>();
    if (!s.at("stability_std").is_null()) st.stability_std = s.at("stability_std").get<double>();
    a.slots.push_back(slot);
    a.series.push_back(st);
  }

  std::vector<Group> groups;
  for (const auto& g : field<json>(j, "groups", "artifact")) {
    Group group;
    group.label = label_field(g, "label", "group");
    group.members = field<MemberSet>(g, "members", "group " + group.label.str());
    if (!std::is_sorted(group.members.begin(), group.members.end()) ||
        std::adjacent_find(group.members.begin(), group.members.end()) != group.members.end()) {
      throw std::invalid_argument("group " + group.label.str() + ": members must be sorted and unique");
    }
    groups.push_back(std::move(group));
  }
  std::vector<Transition> transitions;
  for (const auto& t : field<json>(j, "transitions", "artifact")) {
    Transition tr;
    tr.src = label_field(t, "src", "transition");
    tr.dst = label_field(t, "dst", "transition");
    tr.mj = field<double>(t, "mj", "transition");
    tr.stability = field<double>(t, "stability", "transition");
    tr.size_ratio = field<double>(t, "size_ratio", "transition");
    tr.flow = field<std::size_t>(t, "flow", "transition");
    const auto kind = parse_event_kind(field<std::string>(t, "kind", "transition"));
    if (!kind) throw std::invalid_argument("transition: unknown kind");
    tr.kind = *kind;
    transitions.push_back(tr);
  }
  a.graph = EvolutionGraph(std::move(groups), std::move(transitions));
  a.lifespans = lifespans(a.graph);

  for (const auto& h : field<json>(j, "hierarchies", "artifact")) {
    Hierarchy hier;
    hier.id = field<int>(h, "id", "hierarchy");
    hier.first_slot = field<int>(h, "first_slot", "hierarchy");
    hier.last_slot = field<int>(h, "last_slot", "hierarchy");
    for (const auto& l : field<json>(h, "groups", "hierarchy")) {
      const auto label = GroupLabel::parse(l.get<std::string>());
      if (!label || !a.graph.index_of(*label)) throw std::invalid_argument("hierarchy: unknown group");
      hier.groups.push_back(*label);
    }
    if (hier.id != static_cast<int>(a.hierarchies.size())) {
      throw std::invalid_argument("hierarchy: ids must be 0..n-1");
    }
    a.hierarchies.push_back(std::move(hier));
  }

  if (j.contains("layout") && !j.at("layout").is_null()) {
    for (const auto& l : j.at("layout")) a.layouts.push_back(layout_from_json(l));
    if (a.layouts.size() != a.hierarchies.size()) {
      throw std::invalid_argument("layout: one drawing per hierarchy is required");
    }
  }
  return a;
}

EvolutionArtifact load_artifact(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open artifact " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("artifact " + path + ": " + e.what());
  }
  return artifact_from_json(j);
}

std::string canonical_dump(const EvolutionArtifact& artifact) {
  auto j = to_json(artifact);
  j.erase("generated_at");
  return j.dump();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move " + tmp + " to " + path + ": " + ec.message());
  }
}

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::map<std::string, std::size_t> event_counts(const EvolutionArtifact& a) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : a.graph.transitions()) ++counts[std::string(to_string(t.kind))];
  for (std::size_t i = 0; i < a.graph.groups().size(); ++i) {
    const auto e = node_events(a.graph, i);
    if (e.birth) ++counts["birth"];
    if (e.death) ++counts["death"];
  }
  return counts;
}

}  // namespace

std::string series_csv(const EvolutionArtifact& a) {
  std::ostringstream out;
  out << "slot,group_count,message_count,stability_mean,stability_std\n";
  for (const auto& s : a.series) {
    out << s.slot << ',' << s.group_count << ',' << s.message_count << ','
        << (s.stability_mean ? fixed(*s.stability_mean) : "") << ','
        << (s.stability_std ? fixed(*s.stability_std) : "") << '\n';
  }
  return out.str();
}

json summary_json(const EvolutionArtifact& a) {
  const auto sizes = size_distribution(a.graph.groups());
  const auto overlap = overlap_stats(a.graph.groups());
  json histogram = json::object();
  for (const auto& [size, count] : sizes.histogram) histogram[std::to_string(size)] = count;

  int first_slot = -1, last_slot = -1;
  for (const auto& s : a.series) {
    if (s.group_count == 0) continue;
    if (first_slot < 0) first_slot = s.slot;
    last_slot = s.slot;
  }
  std::size_t stable_groups = 0;
  for (std::size_t i = 0; i < a.lifespans.size(); ++i) stable_groups += a.is_stable(i) ? 1 : 0;
  std::size_t stable_hierarchies = 0;
  for (const auto& h : a.hierarchies) {
    for (const auto& l : h.groups) {
      if (a.is_stable(*a.graph.index_of(l))) {
        ++stable_hierarchies;
        break;
      }
    }
  }
  std::optional<int> min_stability_slot;
  double min_stability = 0.0;
  for (const auto& s : a.series) {
    if (s.stability_mean && (!min_stability_slot || *s.stability_mean < min_stability)) {
      min_stability = *s.stability_mean;
      min_stability_slot = s.slot;
    }
  }

  json events = json::object();
  for (const auto& [kind, count] : event_counts(a)) events[kind] = count;

  return {{"groups", a.graph.groups().size()},
          {"transitions", a.graph.transitions().size()},
          {"hierarchies", a.hierarchies.size()},
          {"stable_groups", stable_groups},
          {"stable_hierarchies", stable_hierarchies},
          {"first_slot_with_groups", first_slot < 0 ? json(nullptr) : json(first_slot)},
          {"last_slot_with_groups", last_slot < 0 ? json(nullptr) : json(last_slot)},
          {"size_histogram", histogram},
          {"size_min", sizes.min},
          {"size_median", sizes.median},
          {"size_p90", sizes.p90},
          {"size_max", sizes.max},
          {"fraction_size_at_most_10", sizes.fraction_at_most_10},
          {"max_common_members", overlap.max_common},
          {"same_slot_pairs", overlap.pairs},
          {"sharing_pairs", overlap.sharing_pairs},
          {"pair_share_fraction", overlap.pair_share_fraction},
          {"nonoverlapping_groups", overlap.nonoverlapping_groups},
          {"nonoverlapping_fraction", overlap.nonoverlapping_fraction},
          {"min_mean_stability_slot", min_stability_slot ? json(*min_stability_slot) : json(nullptr)},
          {"events", events}};
}

std::string summary_text(const EvolutionArtifact& a) {
  const auto s = summary_json(a);
  std::ostringstream out;
  const auto opt_int = [](const json& v) { return v.is_null() ? std::string("-") : std::to_string(v.get<int>()); };
  out << "groups:                    " << s["groups"].get<std::size_t>() << '\n';
  out << "slots with groups:         " << opt_int(s["first_slot_with_groups"]) << " .. "
      << opt_int(s["last_slot_with_groups"]) << '\n';
  out << "group size min/median/p90/max: " << s["size_min"].get<std::size_t>() << '/'
      << s["size_median"].get<std::size_t>() << '/' << s["size_p90"].get<std::size_t>() << '/'
      << s["size_max"].get<std::size_t>() << '\n';
  out << "groups with size <= 10:    " << fixed(s["fraction_size_at_most_10"].get<double>(), 4) << '\n';
  out << "max common members (same slot): " << s["max_common_members"].get<std::size_t>() << '\n';
  out << "same-slot pairs sharing a member: " << s["sharing_pairs"].get<std::size_t>() << " of "
      << s["same_slot_pairs"].get<std::size_t>() << " (" << fixed(s["pair_share_fraction"].get<double>(), 4)
      << ")\n";
  out << "groups overlapping no other: " << s["nonoverlapping_groups"].get<std::size_t>() << " ("
      << fixed(s["nonoverlapping_fraction"].get<double>(), 4) << ")\n";
  out << "transitions:               " << s["transitions"].get<std::size_t>() << '\n';
  out << "hierarchies:               " << s["hierarchies"].get<std::size_t>() << " (with stable groups: "
      << s["stable_hierarchies"].get<std::size_t>() << ")\n";
  out << "stable groups:             " << s["stable_groups"].get<std::size_t>() << '\n';
  out << "lowest mean stability at slot: " << opt_int(s["min_mean_stability_slot"]) << '\n';
  out << "events:";
  for (const auto& [kind, count] : s["events"].items()) out << ' ' << kind << '=' << count.get<std::size_t>();
  out << '\n';
  return out.str();
}

namespace {

struct Chart {
  double width = 900, height = 320, left = 50, right = 20, top = 20, bottom = 40;
  double max_x = 1, max_y = 1;
  double px(double x) const { return left + (width - left - right) * x / max_x; }
  double py(double y) const { return height - bottom - (height - top - bottom) * y / max_y; }
};

std::string chart_frame(const Chart& c, const std::string& title, const std::string& y_label) {
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c.width << "\" height=\"" << c.height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n<title>" << title << "</title>\n";
  svg << "<line x1=\"" << c.left << "\" y1=\"" << c.py(0) << "\" x2=\"" << c.width - c.right << "\" y2=\""
      << c.py(0) << "\" stroke=\"#000\"/>\n";
  svg << "<line x1=\"" << c.left << "\" y1=\"" << c.top << "\" x2=\"" << c.left << "\" y2=\"" << c.py(0)
      << "\" stroke=\"#000\"/>\n";
  svg << "<text x=\"" << c.width / 2 << "\" y=\"" << c.height - 8 << "\" text-anchor=\"middle\">slot</text>\n";
  svg << "<text x=\"12\" y=\"" << c.top + 10 << "\">" << y_label << "</text>\n";
  return svg.str();
}

}  // namespace

std::string counts_chart_svg(const EvolutionArtifact& a) {
  Chart groups_chart;
  groups_chart.max_x = std::max<double>(1.0, static_cast<double>(a.series.size()) - 1);
  double max_groups = 1, max_messages = 1;
  for (const auto& s : a.series) {
    max_groups = std::max(max_groups, static_cast<double>(s.group_count));
    max_messages = std::max(max_messages, static_cast<double>(s.message_count));
  }
  std::ostringstream svg;
  groups_chart.max_y = max_groups;
  svg << chart_frame(groups_chart, "groups and messages per slot", "count (scaled)");
  std::ostringstream g, m;
  for (const auto& s : a.series) {
    g << groups_chart.px(s.slot) << ',' << groups_chart.py(static_cast<double>(s.group_count)) << ' ';
    m << groups_chart.px(s.slot) << ','
      << groups_chart.py(static_cast<double>(s.message_count) * max_groups / max_messages) << ' ';
  }
  svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" points=\"" << g.str() << "\"/>\n";
  svg << "<polyline fill=\"none\" stroke=\"#ff7f0e\" points=\"" << m.str() << "\"/>\n";
  svg << "<text x=\"" << groups_chart.width - 220 << "\" y=\"30\" fill=\"#1f77b4\">groups (max " << max_groups
      << ")</text>\n";
  svg << "<text x=\"" << groups_chart.width - 220 << "\" y=\"44\" fill=\"#ff7f0e\">messages (max " << max_messages
      << ")</text>\n</svg>\n";
  return svg.str();
}

std::string stability_chart_svg(const EvolutionArtifact& a) {
  Chart c;
  c.max_x = std::max<double>(1.0, static_cast<double>(a.series.size()) - 1);
  c.max_y = 1.0;
  std::ostringstream svg;
  svg << chart_frame(c, "mean stability per slot", "stability");
  std::ostringstream mean;
  for (const auto& s : a.series) {
    if (!s.stability_mean) continue;
    const double lo = std::max(0.0, *s.stability_mean - *s.stability_std);
    const double hi = std::min(1.0, *s.stability_mean + *s.stability_std);
    svg << "<line x1=\"" << c.px(s.slot) << "\" y1=\"" << c.py(lo) << "\" x2=\"" << c.px(s.slot) << "\" y2=\""
        << c.py(hi) << "\" stroke=\"#999\"/>\n";
    mean << c.px(s.slot) << ',' << c.py(*s.stability_mean) << ' ';
  }
  svg << "<polyline fill=\"none\" stroke=\"#2ca02c\" points=\"" << mean.str() << "\"/>\n</svg>\n";
  return svg.str();
}

}  // namespace gevi
