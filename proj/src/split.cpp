#include "uls/split.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "uls/rng.hpp"

namespace uls {

std::pair<Manifest, Manifest> make_split(const Manifest& manifest, double fraction,
                                         std::uint64_t seed) {
  if (!(fraction > 0) || !(fraction < 1))
    throw std::invalid_argument("make_split: fraction must lie in (0, 1)");

  // Patients per dataset, sorted for a stable shuffle base.
  std::map<std::string, std::set<std::string>> patients_by_dataset;
  for (const auto& r : manifest.rows) patients_by_dataset[r.dataset].insert(r.patient_id);

  std::set<std::string> held_patients;  // keyed dataset|patient
  for (const auto& [dataset, patients] : patients_by_dataset) {
    if (patients.size() < 2)
      throw std::invalid_argument("make_split: dataset '" + dataset +
                                  "' has a single patient; a split would empty one side");
    std::vector<std::string> order(patients.begin(), patients.end());
    SplitMix64 rng(derive_seed(seed, dataset));
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[rng.below(i + 1)]);

    std::size_t n_held = std::size_t(fraction * double(order.size()));
    n_held = std::max<std::size_t>(1, n_held);
    if (n_held >= order.size())
      throw std::invalid_argument("make_split: dataset '" + dataset +
                                  "': held-out fraction leaves no training patients");
    for (std::size_t i = 0; i < n_held; ++i) held_patients.insert(dataset + "|" + order[i]);
  }

  std::pair<Manifest, Manifest> out;
  for (const auto& r : manifest.rows) {
    if (held_patients.count(r.dataset + "|" + r.patient_id))
      out.second.rows.push_back(r);
    else
      out.first.rows.push_back(r);
  }
  return out;
}

}  // namespace uls
