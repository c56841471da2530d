#pragma once

#include <cstdint>
#include <utility>

#include "uls/manifest.hpp"

namespace uls {

/// Patient-level held-out split, stratified per dataset. The held-out side
/// gets floor(fraction * n_patients) patients per dataset, at least 1; no
/// patient straddles the sides. Deterministic for a given seed. A dataset
/// whose training side would become empty is an error.
std::pair<Manifest, Manifest> make_split(const Manifest& manifest, double fraction,
                                         std::uint64_t seed);

}  // namespace uls
