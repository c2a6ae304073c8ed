#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gevi/evolution.hpp"
#include "gevi/ingest.hpp"

namespace gevi {

struct SizeDistribution {
  std::map<std::size_t, std::size_t> histogram;  // size -> number of groups
  std::size_t total = 0;
  double fraction_at_most_10 = 0.0;  // 0 when there are no groups
  std::size_t min = 0;
  std::size_t median = 0;  // lower median
  std::size_t p90 = 0;     // nearest-rank
  std::size_t max = 0;

  /// Fraction of groups with size <= limit.
  double fraction_at_most(std::size_t limit) const;
};

SizeDistribution size_distribution(std::span<const Group> groups);

struct SlotStats {
  int slot = 0;
  std::size_t group_count = 0;
  std::uint64_t message_count = 0;
  std::optional<double> stability_mean;  // over transitions leaving this slot
  std::optional<double> stability_std;   // population standard deviation
};

/// One entry per slot: group count and number of messages inside the slot
/// window. A message is counted in every slot containing it.
std::vector<SlotStats> counts_per_slot(std::span<const Group> groups, std::span<const Message> messages,
                                       std::span<const TimeSlot> slots);

/// Same as counts_per_slot with per-slot message counts supplied directly.
std::vector<SlotStats> counts_per_slot(std::span<const Group> groups,
                                       std::span<const std::uint64_t> message_counts);

struct StabilitySummary {
  int slot = 0;
  std::size_t transitions = 0;
  double mean = 0.0;
  double std_dev = 0.0;
};

/// Mean and population standard deviation of stability per source slot,
/// ascending by slot; slots without outgoing transitions are absent.
std::vector<StabilitySummary> slot_stability(std::span<const Transition> transitions);

/// Fills stability_mean / stability_std of `series` from slot_stability.
void attach_stability(std::vector<SlotStats>& series, std::span<const Transition> transitions);

struct OverlapStats {
  std::size_t max_common = 0;
  std::size_t pairs = 0;          // same-slot group pairs
  std::size_t sharing_pairs = 0;  // pairs with at least one common member
  std::size_t groups = 0;
  std::size_t nonoverlapping_groups = 0;
  double pair_share_fraction = 0.0;     // 0 when there are no pairs
  double nonoverlapping_fraction = 0.0; // 0 when there are no groups
};

OverlapStats overlap_stats(std::span<const Group> groups);

MemberSet common_members(const Group& a, const Group& b);

struct OverlapEntry {
  GroupLabel label;
  MemberSet common;
};

/// Same-slot groups sharing at least one member with `label`, by label.
std::vector<OverlapEntry> same_slot_overlaps(std::span<const Group> groups, const GroupLabel& label);

}  // namespace gevi
