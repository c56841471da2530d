#include <doctest.h>

#include "helpers.hpp"
#include "uls/metrics.hpp"

using namespace uls;

namespace {

BinaryMask mask_of(Dims3 dims, std::initializer_list<Index3> voxels) {
  BinaryMask m(dims, {1, 1, 1});
  for (const auto& v : voxels) m.at(v) = 1;
  return m;
}

double brute_dice(const BinaryMask& a, const BinaryMask& b) {
  std::size_t na = 0, nb = 0, inter = 0;
  for (int z = 0; z < a.dims.z; ++z)
    for (int y = 0; y < a.dims.y; ++y)
      for (int x = 0; x < a.dims.x; ++x) {
        na += a.at(x, y, z) != 0;
        nb += b.at(x, y, z) != 0;
        inter += (a.at(x, y, z) && b.at(x, y, z));
      }
  if (na + nb == 0) return 1.0;
  return 2.0 * double(inter) / double(na + nb);
}

}  // namespace

TEST_CASE("dice handles the canonical cases") {
  const Dims3 d{4, 4, 4};
  const BinaryMask a = mask_of(d, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
  CHECK(dice(a, a) == 1.0);

  const BinaryMask b = mask_of(d, {{0, 1, 0}, {1, 1, 0}});
  CHECK(dice(a, b) == 0.0);

  const BinaryMask c = mask_of(d, {{2, 0, 0}, {3, 0, 0}, {0, 2, 2}, {1, 2, 2}});
  CHECK(dice(a, c) == 0.5);

  const BinaryMask empty(d, {1, 1, 1});
  CHECK(dice(empty, empty) == 1.0);
  CHECK(dice(a, empty) == 0.0);

  BinaryMask other({3, 3, 3}, {1, 1, 1});
  CHECK_THROWS_AS(dice(a, other), std::invalid_argument);
}

TEST_CASE("dice matches the double-loop oracle on random masks") {
  SplitMix64 rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    const Dims3 dims{int(1 + rng.below(16)), int(1 + rng.below(16)), int(1 + rng.below(16))};
    const BinaryMask a = test::random_mask_3d(dims, 0.3, rng);
    const BinaryMask b = test::random_mask_3d(dims, 0.3, rng);
    CHECK(dice(a, b) == doctest::Approx(brute_dice(a, b)).epsilon(1e-15));
    CHECK(dice(a, b) == dice(b, a));
  }
}

TEST_CASE("smape follows the per-item formula") {
  CHECK(smape(7.0, 7.0) == 0.0);
  CHECK(smape(3.0, 1.0) == doctest::Approx(0.5));
  CHECK(smape(0.0, 5.0) == 1.0);
  CHECK(smape(5.0, 0.0) == 1.0);
  CHECK(smape(0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(smape(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("smape is symmetric and scale-invariant") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = rng.next_double() * 50;
    const double b = rng.next_double() * 50;
    const double c = 0.1 + rng.next_double() * 10;
    CHECK(smape(a, b) == smape(b, a));
    CHECK(smape(c * a, c * b) == doctest::Approx(smape(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("realign translates by integer voxels and drops shifted-out voxels") {
  const Dims3 d{6, 6, 6};
  const BinaryMask m = mask_of(d, {{1, 2, 3}, {5, 5, 5}});
  const BinaryMask same = realign(m, {0, 0, 0});
  CHECK(same.data == m.data);

  const BinaryMask moved = realign(m, {2, 0, 0});
  CHECK(moved.at(3, 2, 3) == 1);
  CHECK(moved.count_foreground() == 1);  // (5,5,5) shifted out of frame
}

TEST_CASE("overlap_region computes the shared footprint box") {
  const Box3 r = overlap_region({10, 10, 10}, {3, 0, -2});
  CHECK(r.lo == Index3{3, 0, 0});
  CHECK(r.hi == Index3{10, 10, 8});
  CHECK_FALSE(r.empty());
  CHECK(overlap_region({4, 4, 4}, {4, 0, 0}).empty());
  CHECK(overlap_region({4, 4, 4}, {-7, 0, 0}).empty());
}

TEST_CASE("consistency groups of translated masks score a perfect 1") {
  // One sphere observed from two VOIs whose clicks differ by (3, 0, 0).
  const auto scan = test::make_sphere_scan({40, 40, 40}, {1, 1, 1}, {20, 20, 20}, 6.0);
  const Index3 click_a{20, 20, 20}, click_b{23, 20, 20};
  const Dims3 voi{24, 24, 24};
  auto crop = [&](Index3 click) {
    BinaryMask out(voi, {1, 1, 1});
    const Index3 c0{voi.x / 2, voi.y / 2, voi.z / 2};
    for (int z = 0; z < voi.z; ++z)
      for (int y = 0; y < voi.y; ++y)
        for (int x = 0; x < voi.x; ++x) {
          const Index3 s = click + Index3{x, y, z} - c0;
          if (scan.mask.in_bounds(s) && scan.mask.at(s)) out.at(x, y, z) = 1;
        }
    return out;
  };
  const std::vector<ConsistencyMember> members = {{crop(click_a), click_a}, {crop(click_b), click_b}};
  CHECK(consistency_score(members) == 1.0);
}

TEST_CASE("consistency_score averages over all pairs") {
  // Three members: identical A and B; C misses half of its voxels.
  const Dims3 voi{8, 8, 8};
  BinaryMask full(voi, {1, 1, 1});
  for (int x = 2; x < 6; ++x) full.at(x, 4, 4) = 1;
  BinaryMask half(voi, {1, 1, 1});
  for (int x = 2; x < 6; ++x) half.at(x, 4, 4) = (x < 4);
  const Index3 click{10, 10, 10};
  const std::vector<ConsistencyMember> members = {{full, click}, {full, click}, {half, click}};
  // Pairwise Dice: (A,B)=1, (A,C)=2*2/(4+2)=2/3, (B,C)=2/3.
  CHECK(consistency_score(members) == doctest::Approx((1.0 + 2.0 / 3.0 + 2.0 / 3.0) / 3.0));

  CHECK_THROWS_AS(consistency_score({{full, click}}), std::invalid_argument);
}

TEST_CASE("consistency_score is invariant to member order") {
  SplitMix64 rng(66);
  const Dims3 voi{10, 10, 10};
  std::vector<ConsistencyMember> members;
  for (int i = 0; i < 3; ++i)
    members.push_back({test::random_mask_3d(voi, 0.2, rng), Index3{i, 0, 0}});
  const double base = consistency_score(members);
  std::swap(members[0], members[2]);
  CHECK(consistency_score(members) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("challenge_score is the published weighted sum") {
  CHECK(challenge_score(1, 1, 1, 1) == 1.0);
  CHECK(challenge_score(0, 0, 0, 0) == 0.0);
  const double cs = challenge_score(0.703, 1.0 - 0.112, 1.0 - 0.120, 0.787);
  CHECK(cs == doctest::Approx(0.729).epsilon(0.0008));
  CHECK_THROWS_AS(challenge_score(1.2, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(challenge_score(0, -0.1, 0, 0), std::invalid_argument);
}

TEST_CASE("challenge_score increases strictly in every component") {
  const double base = challenge_score(0.5, 0.5, 0.5, 0.5);
  CHECK(challenge_score(0.6, 0.5, 0.5, 0.5) > base);
  CHECK(challenge_score(0.5, 0.6, 0.5, 0.5) > base);
  CHECK(challenge_score(0.5, 0.5, 0.6, 0.5) > base);
  CHECK(challenge_score(0.5, 0.5, 0.5, 0.6) > base);
}

TEST_CASE("aggregate_report reduces per-lesion scores deterministically") {
  LesionScore a{"l1", "lung", "", 0.6, 0.1, 0.2, false};
  LesionScore b{"l2", "lung", "", 0.8, 0.3, 0.4, false};
  const MetricReport r = aggregate_report({a, b}, {{"g1", 2, 1, 0.9}});
  CHECK(r.sp == doctest::Approx(0.7));
  CHECK(r.per_type.at("lung").dice.mean == doctest::Approx(0.7));
  CHECK(r.per_type.at("lung").dice.std_dev == doctest::Approx(0.1));
  CHECK(r.lae == doctest::Approx(1.0 - 0.2));
  CHECK(r.sae == doctest::Approx(1.0 - 0.3));
  REQUIRE(r.scs.has_value());
  CHECK(*r.scs == doctest::Approx(0.9));
  REQUIRE(r.cs.has_value());
  CHECK(*r.cs == doctest::Approx(challenge_score(0.7, 0.8, 0.7, 0.9)));

  const MetricReport single = aggregate_report({a}, {});
  CHECK(single.sp == doctest::Approx(0.6));
  CHECK(single.per_type.at("lung").dice.std_dev == 0.0);
  CHECK_FALSE(single.scs.has_value());
  CHECK_FALSE(single.cs.has_value());
}

TEST_CASE("aggregate_report partitions appear when a partition column is present") {
  LesionScore a{"l1", "lung", "FSUP", 0.6, 0.1, 0.2, false};
  LesionScore b{"l2", "ovary", "PSUP", 0.8, 0.3, 0.4, false};
  const MetricReport r = aggregate_report({a, b}, {});
  REQUIRE(r.per_partition.size() == 2);
  CHECK(r.per_partition.at("FSUP").dice.mean == doctest::Approx(0.6));
  CHECK(r.per_partition.at("PSUP").dice.mean == doctest::Approx(0.8));

  const std::string json_text = report_to_json(r);
  CHECK(json_text.find("per_partition") != std::string::npos);
  CHECK(json_text.find("FSUP") != std::string::npos);
}
