#include "gevi/service.hpp"

#include <charconv>
#include <stdexcept>

#include "httplib.h"

namespace gevi {

using nlohmann::json;

namespace {

ApiResponse not_found(const std::string& what) { return {404, {{"error", what}}}; }
ApiResponse bad_request(const std::string& what) { return {400, {{"error", what}}}; }

std::optional<int> parse_index(std::string_view text) {
  int value = 0;
  if (text.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0) return std::nullopt;
  return value;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

ApiRouter::ApiRouter(EvolutionArtifact artifact) : artifact_(std::move(artifact)) {
  if (artifact_.layouts.empty() && !artifact_.hierarchies.empty()) apply_layout(artifact_);
  hierarchy_of_ = artifact_.hierarchy_of_groups();
  position_of_.assign(artifact_.graph.groups().size(), {-1, 0});
  for (const auto& layout : artifact_.layouts) {
    for (std::size_t n = 0; n < layout.nodes.size(); ++n) {
      if (layout.nodes[n].is_dummy) continue;
      const auto label = GroupLabel::parse(layout.nodes[n].id);
      if (!label) continue;
      if (const auto idx = artifact_.graph.index_of(*label)) position_of_[*idx] = {layout.hierarchy, n};
    }
  }
}

std::optional<std::size_t> ApiRouter::find_group(std::string_view text) const {
  const auto label = GroupLabel::parse(text);
  if (!label) return std::nullopt;
  return artifact_.graph.index_of(*label);
}

json ApiRouter::transition_record(std::size_t ti) const {
  const auto& t = artifact_.graph.transitions()[ti];
  return {{"id", ti},
          {"src", t.src.str()},
          {"dst", t.dst.str()},
          {"mj", t.mj},
          {"stability", t.stability},
          {"size_ratio", t.size_ratio},
          {"flow", t.flow},
          {"kind", std::string(to_string(t.kind))},
          {"style", t.dashed() ? "dashed" : "solid"}};
}

json ApiRouter::group_record(std::size_t gi) const {
  const auto& g = artifact_.graph.groups()[gi];
  const auto flows = member_flows(artifact_.graph, g.label);
  const auto events = node_events(artifact_.graph, gi);
  json incoming = json::array(), outgoing = json::array();
  for (const auto ti : artifact_.graph.incoming(gi)) incoming.push_back(transition_record(ti));
  for (const auto ti : artifact_.graph.outgoing(gi)) outgoing.push_back(transition_record(ti));
  json position = nullptr;
  if (const auto [h, n] = position_of_[gi]; h >= 0) {
    const auto& node = artifact_.layouts[static_cast<std::size_t>(h)].nodes[n];
    position = {{"x", node.x}, {"y", node.y}, {"layer", node.layer}, {"order", node.order}};
  }
  return {{"label", g.label.str()},
          {"slot", g.label.slot},
          {"ordinal", g.label.ordinal},
          {"size", g.size()},
          {"members", g.members},
          {"hierarchy", hierarchy_of_[gi]},
          {"stable", artifact_.is_stable(gi)},
          {"lifespan", artifact_.lifespans[gi]},
          {"birth", events.birth},
          {"death", events.death},
          {"flows",
           {{"inflow", flows.inflow},
            {"external_in", flows.external_in},
            {"union_in", flows.union_in},
            {"outflow", flows.outflow},
            {"external_out", flows.external_out},
            {"union_out", flows.union_out}}},
          {"incoming", incoming},
          {"outgoing", outgoing},
          {"position", position}};
}

ApiResponse ApiRouter::hierarchies(bool stable_only) const {
  json list = json::array();
  for (const auto& h : artifact_.hierarchies) {
    std::size_t stable = 0;
    for (const auto& l : h.groups) stable += artifact_.is_stable(*artifact_.graph.index_of(l)) ? 1 : 0;
    if (stable_only && stable == 0) continue;
    list.push_back({{"id", h.id},
                    {"first_slot", h.first_slot},
                    {"last_slot", h.last_slot},
                    {"group_count", h.groups.size()},
                    {"stable_groups", stable},
                    {"root", h.groups.front().str()}});
  }
  return {200, list};
}

ApiResponse ApiRouter::hierarchy_graph(std::string_view id_text) const {
  const auto id = parse_index(id_text);
  if (!id) return bad_request("hierarchy id must be a non-negative integer");
  if (static_cast<std::size_t>(*id) >= artifact_.layouts.size()) {
    return not_found("no hierarchy " + std::string(id_text));
  }
  const auto& layout = artifact_.layouts[static_cast<std::size_t>(*id)];
  json nodes = json::array();
  for (const auto& n : layout.nodes) {
    json node = {{"id", n.id}, {"layer", n.layer}, {"order", n.order}, {"dummy", n.is_dummy},
                 {"x", n.x},   {"y", n.y},         {"size", n.size}};
    if (!n.is_dummy) {
      const auto gi = find_group(n.id);
      if (gi) {
        const auto flows = member_flows(artifact_.graph, artifact_.graph.groups()[*gi].label);
        const auto events = node_events(artifact_.graph, *gi);
        node["label"] = n.id;
        node["stable"] = artifact_.is_stable(*gi);
        node["birth"] = events.birth;
        node["death"] = events.death;
        node["flows"] = {{"inflow", flows.inflow},
                         {"external_in", flows.external_in},
                         {"outflow", flows.outflow},
                         {"external_out", flows.external_out}};
      }
    }
    nodes.push_back(std::move(node));
  }
  json edges = json::array();
  for (const auto& e : layout.edges) {
    json edge = {{"from", layout.nodes[e.from].id}, {"to", layout.nodes[e.to].id},
                 {"style", std::string(to_string(e.style))}};
    if (e.transition && *e.transition < artifact_.graph.transitions().size()) {
      const auto& t = artifact_.graph.transitions()[*e.transition];
      edge["transition"] = *e.transition;
      edge["kind"] = std::string(to_string(t.kind));
      edge["flow"] = t.flow;
      edge["mj"] = t.mj;
      edge["stability"] = t.stability;
    } else {
      edge["transition"] = nullptr;
    }
    edges.push_back(std::move(edge));
  }
  return {200,
          {{"hierarchy", layout.hierarchy},
           {"crossings", count_crossings(layout)},
           {"nodes", nodes},
           {"edges", edges}}};
}

ApiResponse ApiRouter::group(std::string_view label) const {
  if (!GroupLabel::parse(label)) return bad_request("group label must look like <slot>_<ordinal>");
  const auto gi = find_group(label);
  if (!gi) return not_found("no group " + std::string(label));
  return {200, group_record(*gi)};
}

ApiResponse ApiRouter::overlaps(std::string_view label) const {
  if (!GroupLabel::parse(label)) return bad_request("group label must look like <slot>_<ordinal>");
  const auto gi = find_group(label);
  if (!gi) return not_found("no group " + std::string(label));
  const auto& g = artifact_.graph.groups()[*gi];
  json list = json::array();
  for (const auto& entry : same_slot_overlaps(artifact_.graph.groups(), g.label)) {
    list.push_back({{"label", entry.label.str()}, {"count", entry.common.size()}, {"common", entry.common}});
  }
  return {200, {{"label", g.label.str()}, {"overlaps", list}}};
}

ApiResponse ApiRouter::slot_stats(std::string_view index_text) const {
  const auto index = parse_index(index_text);
  if (!index) return bad_request("slot index must be a non-negative integer");
  if (static_cast<std::size_t>(*index) >= artifact_.series.size()) {
    return not_found("no slot " + std::string(index_text));
  }
  const auto i = static_cast<std::size_t>(*index);
  const auto& s = artifact_.series[i];
  json body = {{"slot", s.slot},
               {"group_count", s.group_count},
               {"message_count", s.message_count},
               {"stability_mean", optional_number(s.stability_mean)},
               {"stability_std", optional_number(s.stability_std)}};
  if (i < artifact_.slots.size()) {
    body["start"] = format_instant(artifact_.slots[i].start);
    body["end"] = format_instant(artifact_.slots[i].end);
  }
  return {200, body};
}

ApiResponse ApiRouter::search(std::string_view query) const {
  const auto gi = find_group(query);
  if (!gi) return not_found("no group matches '" + std::string(query) + "'");
  return {200, group_record(*gi)};
}

ApiResponse ApiRouter::handle(std::string_view method, std::string_view path,
                              const std::multimap<std::string, std::string>& query) const {
  if (method != "GET") return {405, {{"error", "read-only API: only GET is supported"}}};

  std::vector<std::string_view> parts;
  for (std::size_t pos = 0; pos < path.size();) {
    const auto next = path.find('/', pos);
    const auto part = path.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (!part.empty()) parts.push_back(part);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  if (parts.size() < 2 || parts[0] != "api") return not_found("unknown endpoint");

  const auto& resource = parts[1];
  if (resource == "hierarchies") {
    if (parts.size() == 2) {
      const auto flag = query.find("stable");
      if (flag == query.end()) return hierarchies();
      if (flag->second != "0" && flag->second != "1" && flag->second != "true" && flag->second != "false") {
        return bad_request("stable must be 0, 1, true or false");
      }
      return hierarchies(flag->second == "1" || flag->second == "true");
    }
    if (parts.size() == 4 && parts[3] == "graph") return hierarchy_graph(parts[2]);
  } else if (resource == "groups") {
    if (parts.size() == 3) return group(parts[2]);
    if (parts.size() == 4 && parts[3] == "overlaps") return overlaps(parts[2]);
  } else if (resource == "slots") {
    if (parts.size() == 4 && parts[3] == "stats") return slot_stats(parts[2]);
  } else if (resource == "search" && parts.size() == 2) {
    const auto q = query.find("q");
    if (q == query.end()) return bad_request("missing query parameter 'q'");
    return search(q->second);
  }
  return not_found("unknown endpoint");
}

std::pair<std::string, int> parse_listen_address(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw std::invalid_argument("listen address must be host:port");
  }
  const auto port = parse_index(address.substr(colon + 1));
  if (!port || *port > 65535) throw std::invalid_argument("invalid port in listen address");
  return {std::string(address.substr(0, colon)), *port};
}

struct ApiServer::Impl {
  httplib::Server server;
};

ApiServer::ApiServer(const ApiRouter& router, const std::string& static_dir) : impl_(std::make_unique<Impl>()) {
  impl_->server.Get(R"(/api/.*)", [&router](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
    const auto reply = router.handle(req.method, req.path, query);
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  });
  if (!static_dir.empty() && !impl_->server.set_mount_point("/", static_dir)) {
    throw std::runtime_error("static directory " + static_dir + " does not exist");
  }
}

ApiServer::~ApiServer() = default;

int ApiServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : impl_->server.bind_to_port(host, port) ? port : -1;
  if (bound < 0) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void ApiServer::run() { impl_->server.listen_after_bind(); }

void ApiServer::stop() { impl_->server.stop(); }

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void serve(const ApiRouter& router, const std::string& host, int port, const std::string& static_dir) {
  ApiServer server(router, static_dir);
  server.bind(host, port);
  server.run();
}

}  // namespace gevi
