#include "gevi/ingest.hpp"

#include "gevi/detail/parallel.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <stdexcept>
#include <string_view>
#include <utility>

namespace gevi {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

bool is_header(std::string_view line) {
  const auto fields = split(line, ',');
  return fields.size() == 3 && trim(fields[0]) == "sender" && trim(fields[1]) == "recipient" &&
         trim(fields[2]) == "timestamp";
}

}  // namespace

ParsedMessages parse_messages(std::istream& in) {
  if (!in) throw std::runtime_error("message stream is not readable");

  ParsedMessages out;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    if (first_content) {
      first_content = false;
      if (is_header(row)) continue;
    }
    ++out.rows;

    const auto fields = split(row, ',');
    if (fields.size() != 3) {
      out.issues.push_back({line_no, "expected 3 fields, got " + std::to_string(fields.size())});
      continue;
    }
    const auto sender = trim(fields[0]);
    if (sender.empty()) {
      out.issues.push_back({line_no, "empty sender"});
      continue;
    }
    std::vector<std::string_view> recipients;
    for (auto r : split(fields[1], ';')) {
      r = trim(r);
      if (!r.empty()) recipients.push_back(r);
    }
    if (recipients.empty()) {
      out.issues.push_back({line_no, "empty recipient"});
      continue;
    }
    Instant ts;
    try {
      ts = parse_instant(fields[2]);
    } catch (const std::invalid_argument& e) {
      out.issues.push_back({line_no, e.what()});
      continue;
    }
    for (auto r : recipients) out.messages.push_back({std::string(sender), std::string(r), ts});
  }
  if (in.bad()) throw std::runtime_error("I/O error while reading messages at line " + std::to_string(line_no));
  return out;
}

ActorSet parse_actors(std::istream& in) {
  if (!in) throw std::runtime_error("actor stream is not readable");
  ActorSet actors;
  std::string line;
  bool first_content = true;
  while (std::getline(in, line)) {
    const auto id = trim(line);
    if (id.empty() || id.front() == '#') continue;
    if (first_content) {
      first_content = false;
      if (id == "actor" || id == "id") continue;
    }
    actors.emplace(id);
  }
  if (in.bad()) throw std::runtime_error("I/O error while reading actors");
  return actors;
}

std::vector<Message> filter_actors(std::span<const Message> messages, const ActorSet& allowed) {
  if (allowed.empty()) throw std::invalid_argument("filter_actors: allowed actor set is empty");
  std::vector<Message> out;
  for (const auto& m : messages) {
    if (allowed.contains(m.sender) && allowed.contains(m.recipient)) out.push_back(m);
  }
  return out;
}

std::vector<TimeSlot> segment_slots(Instant range_start, Instant range_end, Duration window,
                                    Duration step) {
  if (window <= Duration::zero()) throw std::invalid_argument("segment_slots: window must be positive");
  if (step <= Duration::zero()) throw std::invalid_argument("segment_slots: step must be positive");
  if (step > window) throw std::invalid_argument("segment_slots: step must not exceed window");
  if (range_end < range_start) throw std::invalid_argument("segment_slots: range_end precedes range_start");

  const auto count = (range_end - range_start) / step + 1;
  std::vector<TimeSlot> slots;
  slots.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    const Instant start = range_start + i * step;
    slots.push_back({static_cast<int>(i), start, start + window});
  }
  return slots;
}

std::uint64_t SlotGraph::total_weight() const {
  std::uint64_t sum = 0;
  for (const auto& e : edges) sum += e.weight;
  return sum;
}

std::optional<std::uint32_t> SlotGraph::vertex_index(const ActorId& actor) const {
  const auto it = std::lower_bound(vertices.begin(), vertices.end(), actor);
  if (it == vertices.end() || *it != actor) return std::nullopt;
  return static_cast<std::uint32_t>(it - vertices.begin());
}

namespace {

template <typename Range>
SlotGraph graph_from(const Range& in_slot, const TimeSlot& slot) {
  std::map<std::pair<std::string_view, std::string_view>, std::uint32_t> weights;
  for (const Message& m : in_slot) {
    if (m.sender == m.recipient) continue;
    std::string_view a = m.sender, b = m.recipient;
    if (b < a) std::swap(a, b);
    ++weights[{a, b}];
  }

  SlotGraph g;
  g.slot = slot;
  for (const auto& [pair, w] : weights) {
    g.vertices.emplace_back(pair.first);
    g.vertices.emplace_back(pair.second);
  }
  std::sort(g.vertices.begin(), g.vertices.end());
  g.vertices.erase(std::unique(g.vertices.begin(), g.vertices.end()), g.vertices.end());

  const auto index_of = [&](std::string_view a) {
    return static_cast<std::uint32_t>(std::lower_bound(g.vertices.begin(), g.vertices.end(), a) -
                                      g.vertices.begin());
  };
  g.edges.reserve(weights.size());
  for (const auto& [pair, w] : weights) g.edges.push_back({index_of(pair.first), index_of(pair.second), w});
  // vertex order matches string order, so map order is already (u, v) order
  return g;
}

}  // namespace

SlotGraph build_slot_graph(std::span<const Message> messages, const TimeSlot& slot) {
  std::vector<std::reference_wrapper<const Message>> in_slot;
  for (const auto& m : messages) {
    if (slot.contains(m.timestamp)) in_slot.push_back(std::cref(m));
  }
  return graph_from(in_slot, slot);
}

std::vector<SlotGraph> build_slot_graphs(std::span<const Message> messages,
                                         std::span<const TimeSlot> slots) {
  std::vector<const Message*> by_time;
  by_time.reserve(messages.size());
  for (const auto& m : messages) by_time.push_back(&m);
  std::stable_sort(by_time.begin(), by_time.end(),
                   [](const Message* a, const Message* b) { return a->timestamp < b->timestamp; });

  return detail::parallel_map<SlotGraph>(slots.size(), [&](std::size_t i) {
    const TimeSlot& slot = slots[i];
    const auto lo = std::lower_bound(by_time.begin(), by_time.end(), slot.start,
                                     [](const Message* m, Instant t) { return m->timestamp < t; });
    const auto hi = std::lower_bound(lo, by_time.end(), slot.end,
                                     [](const Message* m, Instant t) { return m->timestamp < t; });
    std::vector<std::reference_wrapper<const Message>> in_slot;
    in_slot.reserve(static_cast<std::size_t>(hi - lo));
    for (auto it = lo; it != hi; ++it) in_slot.push_back(std::cref(**it));
    return graph_from(in_slot, slot);
  });
}

}  // namespace gevi
