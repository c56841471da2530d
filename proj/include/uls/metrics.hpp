#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uls/volume.hpp"

namespace uls {

/// Sørensen-Dice overlap. Both masks empty -> 1.0; one empty -> 0.0.
double dice(const BinaryMask& a, const BinaryMask& b);

/// Per-item symmetric absolute percentage error, |pred-ref| / (|pred|+|ref|).
/// Both zero -> 0.0 (perfect agreement).
double smape(double pred, double ref);

/// Integer-voxel translation by `offset`; voxels shifted outside the frame
/// are dropped. `offset` is the moving mask's click minus the fixed mask's.
BinaryMask realign(const BinaryMask& pred, Index3 offset);

/// Half-open voxel box; used to restrict comparisons to the overlap of two
/// VOI footprints that differ by a click offset.
struct Box3 {
  Index3 lo, hi;
  bool empty() const { return lo.x >= hi.x || lo.y >= hi.y || lo.z >= hi.z; }
};

Box3 overlap_region(Dims3 dims, Index3 offset);

double dice_in_region(const BinaryMask& a, const BinaryMask& b, const Box3& region);

struct ConsistencyMember {
  BinaryMask mask;
  Index3 click;  // scan-space voxel the member's VOI was centered on
};

/// Mean Dice over all member pairs after realignment, each pair restricted to
/// its overlap region. Pairs with no overlap are skipped; throws if fewer
/// than two members or no scorable pair remains.
double consistency_score(const std::vector<ConsistencyMember>& members);

/// Weighted challenge score; every component must lie in [0, 1].
/// LAE and SAE enter as agreement scores, i.e. 1 - mean SMAPE.
double challenge_score(double sp, double lae, double sae, double scs);

struct LesionScore {
  std::string lesion_id, lesion_type, partition;
  double dice = 0, long_smape = 0, short_smape = 0;
  bool missing_prediction = false;
};

struct GroupScore {
  std::string group_id;
  int n_members = 0, n_pairs = 0;
  double scs = 0;
};

struct DistStats {
  int n = 0;
  double mean = 0, std_dev = 0;  // population std (divide by n)
};

struct TypeStats {
  DistStats dice, long_smape, short_smape;
};

struct MetricReport {
  std::vector<LesionScore> per_lesion;
  std::map<std::string, TypeStats> per_type;
  std::map<std::string, TypeStats> per_partition;  // present when partitions supplied
  std::vector<GroupScore> groups;
  double sp = 0, lae = 0, sae = 0;
  std::optional<double> scs, cs;  // absent when no consistency groups exist
};

/// Deterministic reduce over per-lesion scores and group scores.
MetricReport aggregate_report(std::vector<LesionScore> lesions, std::vector<GroupScore> groups);

std::string report_to_json(const MetricReport& r);
std::string report_to_text(const MetricReport& r);

}  // namespace uls
