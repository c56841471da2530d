#include "uls/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace uls {

double dice(const BinaryMask& a, const BinaryMask& b) {
  if (a.dims != b.dims) throw std::invalid_argument("dice: mask dims differ");
  std::size_t na = 0, nb = 0, inter = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool va = a.data[i] != 0, vb = b.data[i] != 0;
    na += va;
    nb += vb;
    inter += (va && vb);
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * double(inter) / double(na + nb);
}

double smape(double pred, double ref) {
  if (pred < 0 || ref < 0) throw std::invalid_argument("smape: inputs must be non-negative");
  const double denom = std::abs(pred) + std::abs(ref);
  if (denom == 0) return 0.0;
  return std::abs(pred - ref) / denom;
}

BinaryMask realign(const BinaryMask& pred, Index3 offset) {
  BinaryMask out(pred.dims, pred.spacing);
  const Dims3 d = pred.dims;
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        const Index3 src{x - offset.x, y - offset.y, z - offset.z};
        if (d.in_bounds(src) && pred.at(src)) out.at(x, y, z) = 1;
      }
  return out;
}

Box3 overlap_region(Dims3 dims, Index3 offset) {
  Box3 r;
  r.lo = {std::max(0, offset.x), std::max(0, offset.y), std::max(0, offset.z)};
  r.hi = {std::min(dims.x, dims.x + offset.x), std::min(dims.y, dims.y + offset.y),
          std::min(dims.z, dims.z + offset.z)};
  return r;
}

double dice_in_region(const BinaryMask& a, const BinaryMask& b, const Box3& region) {
  if (a.dims != b.dims) throw std::invalid_argument("dice_in_region: mask dims differ");
  if (region.empty()) throw std::invalid_argument("dice_in_region: empty region");
  std::size_t na = 0, nb = 0, inter = 0;
  for (int z = region.lo.z; z < region.hi.z; ++z)
    for (int y = region.lo.y; y < region.hi.y; ++y)
      for (int x = region.lo.x; x < region.hi.x; ++x) {
        const bool va = a.at(x, y, z) != 0, vb = b.at(x, y, z) != 0;
        na += va;
        nb += vb;
        inter += (va && vb);
      }
  if (na + nb == 0) return 1.0;
  return 2.0 * double(inter) / double(na + nb);
}

double consistency_score(const std::vector<ConsistencyMember>& members) {
  if (members.size() < 2)
    throw std::invalid_argument("consistency_score: need at least two members");
  double sum = 0;
  int pairs = 0;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (members[i].mask.dims != members[j].mask.dims)
        throw std::invalid_argument("consistency_score: member dims differ");
      const Index3 offset = members[i].click - members[j].click;
      const Box3 region = overlap_region(members[i].mask.dims, offset);
      if (region.empty()) continue;  // offset beyond the VOI: pair not scorable
      const BinaryMask moved = realign(members[i].mask, offset);
      sum += dice_in_region(moved, members[j].mask, region);
      ++pairs;
    }
  if (pairs == 0) throw std::invalid_argument("consistency_score: no pair with overlapping footprints");
  return sum / double(pairs);
}

double challenge_score(double sp, double lae, double sae, double scs) {
  for (double v : {sp, lae, sae, scs})
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("challenge_score: components must lie in [0, 1]");
  // Rational form of 0.8/0.05/0.05/0.1 so that (1,1,1,1) -> exactly 1.
  return (16.0 * sp + lae + sae + 2.0 * scs) / 20.0;
}

namespace {

DistStats stats_of(const std::vector<double>& xs) {
  DistStats s;
  s.n = int(xs.size());
  if (xs.empty()) return s;
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / double(xs.size());
  double var = 0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.std_dev = std::sqrt(var / double(xs.size()));
  return s;
}

TypeStats bucket_stats(const std::vector<const LesionScore*>& rows) {
  std::vector<double> d, ls, ss;
  for (const auto* r : rows) {
    d.push_back(r->dice);
    ls.push_back(r->long_smape);
    ss.push_back(r->short_smape);
  }
  return {stats_of(d), stats_of(ls), stats_of(ss)};
}

}  // namespace

MetricReport aggregate_report(std::vector<LesionScore> lesions, std::vector<GroupScore> groups) {
  MetricReport r;
  r.per_lesion = std::move(lesions);
  r.groups = std::move(groups);

  std::map<std::string, std::vector<const LesionScore*>> by_type, by_partition;
  std::vector<double> dices, long_smapes, short_smapes;
  for (const auto& l : r.per_lesion) {
    dices.push_back(l.dice);
    long_smapes.push_back(l.long_smape);
    short_smapes.push_back(l.short_smape);
    by_type[l.lesion_type.empty() ? "unknown" : l.lesion_type].push_back(&l);
    if (!l.partition.empty()) by_partition[l.partition].push_back(&l);
  }
  for (const auto& [type, rows] : by_type) r.per_type[type] = bucket_stats(rows);
  for (const auto& [part, rows] : by_partition) r.per_partition[part] = bucket_stats(rows);

  r.sp = stats_of(dices).mean;
  r.lae = 1.0 - stats_of(long_smapes).mean;
  r.sae = 1.0 - stats_of(short_smapes).mean;
  if (!r.groups.empty()) {
    double sum = 0;
    for (const auto& g : r.groups) sum += g.scs;
    r.scs = sum / double(r.groups.size());
    // The combined score needs both sides; a consistency-only run has no
    // per-lesion scores and reports SCS alone.
    if (!r.per_lesion.empty()) r.cs = challenge_score(r.sp, r.lae, r.sae, *r.scs);
  }
  return r;
}

namespace {

nlohmann::json stats_json(const DistStats& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"std", s.std_dev}};
}

nlohmann::json type_stats_json(const TypeStats& t) {
  return {{"dice", stats_json(t.dice)},
          {"long_smape", stats_json(t.long_smape)},
          {"short_smape", stats_json(t.short_smape)}};
}

}  // namespace

std::string report_to_json(const MetricReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["std_convention"] = "population";
  j["per_lesion"] = nlohmann::json::array();
  for (const auto& l : r.per_lesion) {
    nlohmann::json row = {{"lesion_id", l.lesion_id},
                          {"lesion_type", l.lesion_type},
                          {"dice", l.dice},
                          {"long_smape", l.long_smape},
                          {"short_smape", l.short_smape},
                          {"missing_prediction", l.missing_prediction}};
    if (!l.partition.empty()) row["partition"] = l.partition;
    j["per_lesion"].push_back(std::move(row));
  }
  j["per_type"] = nlohmann::json::object();
  for (const auto& [type, stats] : r.per_type) j["per_type"][type] = type_stats_json(stats);
  if (!r.per_partition.empty()) {
    j["per_partition"] = nlohmann::json::object();
    for (const auto& [part, stats] : r.per_partition) j["per_partition"][part] = type_stats_json(stats);
  }
  j["groups"] = nlohmann::json::array();
  for (const auto& g : r.groups)
    j["groups"].push_back({{"group_id", g.group_id},
                           {"n_members", g.n_members},
                           {"n_pairs", g.n_pairs},
                           {"scs", g.scs}});
  j["aggregate"] = {{"n_lesions", int(r.per_lesion.size())},
                    {"n_groups", int(r.groups.size())},
                    {"SP", r.sp},
                    {"LAE", r.lae},
                    {"SAE", r.sae},
                    {"SCS", r.scs ? nlohmann::json(*r.scs) : nlohmann::json(nullptr)},
                    {"CS", r.cs ? nlohmann::json(*r.cs) : nlohmann::json(nullptr)}};
  return j.dump(2);
}

std::string report_to_text(const MetricReport& r) {
  std::ostringstream os;
  char buf[256];

  os << "Aggregate (std convention: population)\n";
  std::snprintf(buf, sizeof(buf), "  SP  = %.4f\n  LAE = %.4f\n  SAE = %.4f\n", r.sp, r.lae, r.sae);
  os << buf;
  if (r.scs)
    std::snprintf(buf, sizeof(buf), "  SCS = %.4f\n", *r.scs);
  else
    std::snprintf(buf, sizeof(buf), "  SCS = n/a (no consistency groups)\n");
  os << buf;
  if (r.cs)
    std::snprintf(buf, sizeof(buf), "  CS  = %.4f\n", *r.cs);
  else
    std::snprintf(buf, sizeof(buf), "  CS  = n/a\n");
  os << buf;

  os << "\nPer lesion type\n";
  std::snprintf(buf, sizeof(buf), "  %-16s %6s %18s %18s %18s\n", "type", "n", "dice",
                "long_smape", "short_smape");
  os << buf;
  for (const auto& [type, s] : r.per_type) {
    std::snprintf(buf, sizeof(buf), "  %-16s %6d %9.3f ± %-6.3f %9.3f ± %-6.3f %9.3f ± %-6.3f\n",
                  type.c_str(), s.dice.n, s.dice.mean, s.dice.std_dev, s.long_smape.mean,
                  s.long_smape.std_dev, s.short_smape.mean, s.short_smape.std_dev);
    os << buf;
  }
  if (!r.per_partition.empty()) {
    os << "\nPer partition\n";
    for (const auto& [part, s] : r.per_partition) {
      std::snprintf(buf, sizeof(buf), "  %-16s %6d %9.3f ± %-6.3f %9.3f ± %-6.3f %9.3f ± %-6.3f\n",
                    part.c_str(), s.dice.n, s.dice.mean, s.dice.std_dev, s.long_smape.mean,
                    s.long_smape.std_dev, s.short_smape.mean, s.short_smape.std_dev);
      os << buf;
    }
  }
  if (!r.groups.empty()) {
    os << "\nConsistency groups\n";
    std::snprintf(buf, sizeof(buf), "  %-16s %8s %8s %10s\n", "group", "members", "pairs", "SCS");
    os << buf;
    for (const auto& g : r.groups) {
      std::snprintf(buf, sizeof(buf), "  %-16s %8d %8d %10.4f\n", g.group_id.c_str(), g.n_members,
                    g.n_pairs, g.scs);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace uls
