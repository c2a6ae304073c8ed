#include "gevi/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gevi {

double SizeDistribution::fraction_at_most(std::size_t limit) const {
  if (total == 0) return 0.0;
  std::size_t n = 0;
  for (const auto& [size, count] : histogram) {
    if (size <= limit) n += count;
  }
  return static_cast<double>(n) / static_cast<double>(total);
}

SizeDistribution size_distribution(std::span<const Group> groups) {
  SizeDistribution d;
  std::vector<std::size_t> sizes;
  sizes.reserve(groups.size());
  for (const auto& g : groups) {
    ++d.histogram[g.size()];
    sizes.push_back(g.size());
  }
  d.total = sizes.size();
  if (sizes.empty()) return d;
  std::sort(sizes.begin(), sizes.end());
  d.min = sizes.front();
  d.max = sizes.back();
  d.median = sizes[(sizes.size() - 1) / 2];
  const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(sizes.size())));
  d.p90 = sizes[std::max<std::size_t>(rank, 1) - 1];
  d.fraction_at_most_10 = d.fraction_at_most(10);
  return d;
}

std::vector<SlotStats> counts_per_slot(std::span<const Group> groups,
                                       std::span<const std::uint64_t> message_counts) {
  std::vector<SlotStats> series(message_counts.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    series[i].slot = static_cast<int>(i);
    series[i].message_count = message_counts[i];
  }
  for (const auto& g : groups) {
    if (g.slot() < 0 || static_cast<std::size_t>(g.slot()) >= series.size()) {
      throw std::out_of_range("group " + g.label.str() + " lies outside the slot range");
    }
    ++series[static_cast<std::size_t>(g.slot())].group_count;
  }
  return series;
}

std::vector<SlotStats> counts_per_slot(std::span<const Group> groups, std::span<const Message> messages,
                                       std::span<const TimeSlot> slots) {
  std::vector<Instant> times;
  times.reserve(messages.size());
  for (const auto& m : messages) times.push_back(m.timestamp);
  std::sort(times.begin(), times.end());

  std::vector<std::uint64_t> counts(slots.size(), 0);
  for (const auto& slot : slots) {
    if (slot.index < 0 || static_cast<std::size_t>(slot.index) >= slots.size()) {
      throw std::invalid_argument("counts_per_slot: slot indices must be 0..n-1");
    }
    const auto lo = std::lower_bound(times.begin(), times.end(), slot.start);
    const auto hi = std::lower_bound(times.begin(), times.end(), slot.end);
    counts[static_cast<std::size_t>(slot.index)] = static_cast<std::uint64_t>(hi - lo);
  }
  return counts_per_slot(groups, counts);
}

std::vector<StabilitySummary> slot_stability(std::span<const Transition> transitions) {
  std::map<int, std::vector<double>> by_slot;
  for (const auto& t : transitions) by_slot[t.src.slot].push_back(t.stability);

  std::vector<StabilitySummary> out;
  for (const auto& [slot, values] : by_slot) {
    StabilitySummary s;
    s.slot = slot;
    s.transitions = values.size();
    double sum = 0.0;
    for (const double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (const double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(sq / static_cast<double>(values.size()));
    out.push_back(s);
  }
  return out;
}

void attach_stability(std::vector<SlotStats>& series, std::span<const Transition> transitions) {
  for (const auto& s : slot_stability(transitions)) {
    for (auto& entry : series) {
      if (entry.slot == s.slot) {
        entry.stability_mean = s.mean;
        entry.stability_std = s.std_dev;
      }
    }
  }
}

OverlapStats overlap_stats(std::span<const Group> groups) {
  std::map<int, std::vector<const Group*>> by_slot;
  for (const auto& g : groups) by_slot[g.slot()].push_back(&g);

  OverlapStats s;
  s.groups = groups.size();
  for (const auto& [slot, members] : by_slot) {
    std::vector<bool> overlaps(members.size(), false);
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const auto common = intersection_size(members[i]->members, members[j]->members);
        ++s.pairs;
        s.max_common = std::max(s.max_common, common);
        if (common > 0) {
          ++s.sharing_pairs;
          overlaps[i] = overlaps[j] = true;
        }
      }
    }
    s.nonoverlapping_groups += static_cast<std::size_t>(std::count(overlaps.begin(), overlaps.end(), false));
  }
  if (s.pairs > 0) s.pair_share_fraction = static_cast<double>(s.sharing_pairs) / static_cast<double>(s.pairs);
  if (s.groups > 0) {
    s.nonoverlapping_fraction = static_cast<double>(s.nonoverlapping_groups) / static_cast<double>(s.groups);
  }
  return s;
}

MemberSet common_members(const Group& a, const Group& b) {
  MemberSet out;
  std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                        std::back_inserter(out));
  return out;
}

std::vector<OverlapEntry> same_slot_overlaps(std::span<const Group> groups, const GroupLabel& label) {
  const auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return g.label == label; });
  if (it == groups.end()) throw std::out_of_range("no group " + label.str());
  std::vector<OverlapEntry> out;
  for (const auto& other : groups) {
    if (other.slot() != label.slot || other.label == label) continue;
    auto common = common_members(*it, other);
    if (!common.empty()) out.push_back({other.label, std::move(common)});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
  return out;
}

}  // namespace gevi
