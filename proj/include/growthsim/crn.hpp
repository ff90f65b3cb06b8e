// SPDX-License-Identifier: Apache-2.0
//
// Static model of chemical reaction networks under stochastic mass-action
// kinetics, and of birth systems (networks in which every species duplicates
// at one common rate).
#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "growthsim/errors.hpp"

namespace growthsim {

using Count = std::uint64_t;

/// Dense index of a species inside one Network. Names live in the Network.
struct SpeciesId {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(SpeciesId, SpeciesId) = default;
};

/// Non-negative multiset over species; kept sorted by species, no zero entries.
class StoichVector {
 public:
  struct Entry {
    SpeciesId species;
    Count coefficient = 0;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  StoichVector() = default;
  StoichVector(std::initializer_list<Entry> entries) {
    for (const auto& e : entries) add(e.species, e.coefficient);
  }

  void add(SpeciesId species, Count coefficient) {
    if (coefficient == 0) return;
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), species,
        [](const Entry& e, SpeciesId s) { return e.species < s; });
    if (it != entries_.end() && it->species == species) {
      it->coefficient += coefficient;
    } else {
      entries_.insert(it, Entry{species, coefficient});
    }
  }

  Count operator[](SpeciesId species) const {
    for (const auto& e : entries_)
      if (e.species == species) return e.coefficient;
    return 0;
  }

  std::span<const Entry> entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// Molecularity: total number of molecules on this side.
  Count order() const noexcept {
    Count total = 0;
    for (const auto& e : entries_) total += e.coefficient;
    return total;
  }

  friend bool operator==(const StoichVector&, const StoichVector&) = default;

 private:
  std::vector<Entry> entries_;
};

enum class ReactionTag { duplication, death, logic, conjugation, other };

inline std::string_view to_string(ReactionTag tag) {
  switch (tag) {
    case ReactionTag::duplication: return "duplication";
    case ReactionTag::death: return "death";
    case ReactionTag::logic: return "logic";
    case ReactionTag::conjugation: return "conjugation";
    case ReactionTag::other: return "other";
  }
  return "other";
}

inline std::optional<ReactionTag> parse_reaction_tag(std::string_view text) {
  for (auto tag : {ReactionTag::duplication, ReactionTag::death, ReactionTag::logic,
                   ReactionTag::conjugation, ReactionTag::other}) {
    if (to_string(tag) == text) return tag;
  }
  return std::nullopt;
}

struct Reaction {
  StoichVector reactants;
  StoichVector products;
  double rate_constant = 0.0;
  ReactionTag tag = ReactionTag::other;

  /// The species X when this reaction has the shape X -> 2X.
  std::optional<SpeciesId> duplicated_species() const {
    auto r = reactants.entries();
    auto p = products.entries();
    if (r.size() == 1 && p.size() == 1 && r[0].species == p[0].species &&
        r[0].coefficient == 1 && p[0].coefficient == 2) {
      return r[0].species;
    }
    return std::nullopt;
  }

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

/// Species counts, indexed by SpeciesId. A plain value.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t species_count) : counts_(species_count, 0) {}
  explicit Configuration(std::vector<Count> counts) : counts_(std::move(counts)) {}

  Count operator[](SpeciesId s) const { return counts_[s.index]; }
  Count& operator[](SpeciesId s) { return counts_[s.index]; }

  Count at(SpeciesId s) const {
    if (s.index >= counts_.size()) throw InvalidArgument("species index out of range");
    return counts_[s.index];
  }

  std::size_t size() const noexcept { return counts_.size(); }
  std::span<const Count> counts() const noexcept { return counts_; }
  std::span<Count> counts() noexcept { return counts_; }

  /// Total population; throws CountOverflow past 2^64-1.
  Count total() const {
    Count sum = 0;
    for (Count c : counts_) {
      if (c > std::numeric_limits<Count>::max() - sum)
        throw CountOverflow("total population exceeds 64-bit range");
      sum += c;
    }
    return sum;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<Count> counts_;
};

namespace detail {

inline double binomial_as_double(Count n, Count k) {
  if (k > n) return 0.0;
  if (k == 0) return 1.0;
  if (k == 1) return static_cast<double>(n);
  if (k == 2) return static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  double value = 1.0;
  for (Count i = 1; i <= k; ++i)
    value = value * static_cast<double>(n - k + i) / static_cast<double>(i);
  return value;
}

inline Count checked_add(Count a, Count b) {
  if (b > std::numeric_limits<Count>::max() - a)
    throw CountOverflow("species count exceeds 64-bit range");
  return a + b;
}

}  // namespace detail

inline bool is_applicable(const Reaction& reaction, const Configuration& config) {
  for (const auto& e : reaction.reactants.entries())
    if (config.at(e.species) < e.coefficient) return false;
  return true;
}

/// Mass-action propensity (rate/volume) * prod_S C(c(S), r(S)); zero when
/// the reaction is not applicable.
inline double propensity(const Reaction& reaction, const Configuration& config,
                         double volume = 1.0) {
  double a = reaction.rate_constant / volume;
  for (const auto& e : reaction.reactants.entries()) {
    const Count c = config.at(e.species);
    if (c < e.coefficient) return 0.0;
    a *= e.coefficient == 1 ? static_cast<double>(c)
                            : detail::binomial_as_double(c, e.coefficient);
  }
  return a;
}

/// c - r + p. Throws NotApplicable when some r(S) > c(S).
inline Configuration apply_reaction(Configuration config, const Reaction& reaction) {
  if (!is_applicable(reaction, config))
    throw NotApplicable("reaction not applicable to configuration");
  for (const auto& e : reaction.reactants.entries()) config[e.species] -= e.coefficient;
  for (const auto& e : reaction.products.entries())
    config[e.species] = detail::checked_add(config.at(e.species), e.coefficient);
  return config;
}

/// Sum of counts over a subset of species (empty subset gives 0).
inline Count total_population(const Configuration& config,
                              std::span<const SpeciesId> species) {
  Count sum = 0;
  for (SpeciesId s : species) sum = detail::checked_add(sum, config.at(s));
  return sum;
}

inline Count total_population(const Configuration& config,
                              std::initializer_list<SpeciesId> species) {
  return total_population(config, std::span<const SpeciesId>(species.begin(), species.size()));
}

class Network {
 public:
  Network() = default;

  Network(std::vector<std::string> species_names, std::vector<Reaction> reactions,
          double volume = 1.0)
      : names_(std::move(species_names)), reactions_(std::move(reactions)), volume_(volume) {
    if (!(volume_ > 0.0) || !std::isfinite(volume_))
      throw InvalidArgument("network volume must be positive");
    for (std::uint32_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw InvalidArgument("empty species name");
      if (!index_.emplace(names_[i], i).second)
        throw InvalidArgument("duplicate species name '" + names_[i] + "'");
    }
    for (const auto& r : reactions_) {
      if (!(r.rate_constant >= 0.0) || !std::isfinite(r.rate_constant))
        throw InvalidArgument("rate constant must be finite and non-negative");
      if (r.reactants.empty() && r.products.empty())
        throw InvalidArgument("reaction with empty reactants and products");
      for (const auto* side : {&r.reactants, &r.products})
        for (const auto& e : side->entries())
          if (e.species.index >= names_.size())
            throw InvalidArgument("reaction references undeclared species");
    }
  }

  std::size_t species_count() const noexcept { return names_.size(); }
  std::span<const std::string> species_names() const noexcept { return names_; }
  std::span<const Reaction> reactions() const noexcept { return reactions_; }
  double volume() const noexcept { return volume_; }

  std::vector<SpeciesId> species() const {
    std::vector<SpeciesId> ids(names_.size());
    for (std::uint32_t i = 0; i < ids.size(); ++i) ids[i] = SpeciesId{i};
    return ids;
  }

  const std::string& name(SpeciesId s) const {
    if (s.index >= names_.size()) throw InvalidArgument("species index out of range");
    return names_[s.index];
  }

  std::optional<SpeciesId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return SpeciesId{it->second};
  }

  SpeciesId id(std::string_view name) const {
    if (auto s = find(name)) return *s;
    throw InvalidArgument("unknown species '" + std::string(name) + "'");
  }

  /// Zero configuration with the named counts filled in.
  Configuration configuration(
      std::initializer_list<std::pair<std::string_view, Count>> counts = {}) const {
    Configuration c(names_.size());
    for (const auto& [n, v] : counts) c[id(n)] = v;
    return c;
  }

  Configuration configuration(const std::vector<std::pair<std::string, Count>>& counts) const {
    Configuration c(names_.size());
    for (const auto& [n, v] : counts) c[id(n)] = v;
    return c;
  }

  double propensity(std::size_t reaction, const Configuration& config) const {
    return growthsim::propensity(reactions_.at(reaction), config, volume_);
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<Reaction> reactions_;
  double volume_ = 1.0;
};

/// Incremental construction by species name.
class NetworkBuilder {
 public:
  using Side = std::vector<std::pair<std::string, Count>>;

  SpeciesId species(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return SpeciesId{it->second};
    const auto idx = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(name);
    index_.emplace(std::string(name), idx);
    return SpeciesId{idx};
  }

  NetworkBuilder& reaction(const Side& reactants, const Side& products, double rate,
                           ReactionTag tag = ReactionTag::other) {
    Reaction r;
    for (const auto& [n, c] : reactants) r.reactants.add(species(n), c);
    for (const auto& [n, c] : products) r.products.add(species(n), c);
    r.rate_constant = rate;
    r.tag = tag;
    reactions_.push_back(std::move(r));
    return *this;
  }

  NetworkBuilder& reaction(Reaction r) {
    reactions_.push_back(std::move(r));
    return *this;
  }

  NetworkBuilder& duplication(std::string_view name, double gamma) {
    return reaction({{std::string(name), 1}}, {{std::string(name), 2}}, gamma,
                    ReactionTag::duplication);
  }

  NetworkBuilder& volume(double v) {
    volume_ = v;
    return *this;
  }

  Network build() const { return Network(names_, reactions_, volume_); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<Reaction> reactions_;
  double volume_ = 1.0;
};

/// Disjoint-by-name union of networks. Species are merged by name; a reaction
/// identical to one already present is kept once (shared duplications).
inline Network compose(std::span<const Network> parts) {
  if (parts.empty()) return Network{};
  NetworkBuilder builder;
  builder.volume(parts.front().volume());
  std::vector<Reaction> kept;
  for (const auto& part : parts) {
    if (part.volume() != parts.front().volume())
      throw InvalidArgument("cannot compose networks with different volumes");
    for (const auto& n : part.species_names()) builder.species(n);
    for (const auto& r : part.reactions()) {
      Reaction mapped;
      for (const auto& e : r.reactants.entries())
        mapped.reactants.add(builder.species(part.name(e.species)), e.coefficient);
      for (const auto& e : r.products.entries())
        mapped.products.add(builder.species(part.name(e.species)), e.coefficient);
      mapped.rate_constant = r.rate_constant;
      mapped.tag = r.tag;
      if (std::find(kept.begin(), kept.end(), mapped) == kept.end()) kept.push_back(mapped);
    }
  }
  for (auto& r : kept) builder.reaction(std::move(r));
  return builder.build();
}

inline Network compose(std::initializer_list<Network> parts) {
  return compose(std::span<const Network>(parts.begin(), parts.size()));
}

// ---------------------------------------------------------------------------
// Birth systems

class InvalidBirthSystem : public InvalidArgument {
 public:
  InvalidBirthSystem(const std::string& what, std::string species)
      : InvalidArgument(what), species_(std::move(species)) {}
  const std::string& species() const noexcept { return species_; }

 private:
  std::string species_;
};

class MissingDuplication : public InvalidBirthSystem {
 public:
  explicit MissingDuplication(const std::string& species)
      : InvalidBirthSystem("species '" + species + "' has no duplication reaction", species) {}
};

class DuplicateDuplication : public InvalidBirthSystem {
 public:
  explicit DuplicateDuplication(const std::string& species)
      : InvalidBirthSystem("species '" + species + "' has more than one duplication reaction",
                           species) {}
};

class RateMismatch : public InvalidBirthSystem {
 public:
  RateMismatch(const std::string& species, double found, double expected)
      : InvalidBirthSystem("duplication of '" + species + "' has rate " + std::to_string(found) +
                               ", expected " + std::to_string(expected),
                           species),
        found_(found),
        expected_(expected) {}
  double found() const noexcept { return found_; }
  double expected() const noexcept { return expected_; }

 private:
  double found_;
  double expected_;
};

/// Input/output/internal partition. Empty means "every species is both an
/// input and an output", which is how the two-species protocols are declared.
struct SpeciesRoles {
  std::vector<SpeciesId> inputs;
  std::vector<SpeciesId> outputs;
  std::vector<SpeciesId> internals;

  bool empty() const noexcept { return inputs.empty() && outputs.empty() && internals.empty(); }
};

class BirthSystem {
 public:
  const Network& network() const noexcept { return network_; }
  double duplication_rate() const noexcept { return gamma_; }
  std::span<const SpeciesId> inputs() const noexcept { return roles_.inputs; }
  std::span<const SpeciesId> outputs() const noexcept { return roles_.outputs; }
  std::span<const SpeciesId> internals() const noexcept { return roles_.internals; }
  const Configuration& initial_counts() const noexcept { return initial_; }

  std::size_t duplication_count() const {
    return static_cast<std::size_t>(
        std::count_if(network_.reactions().begin(), network_.reactions().end(),
                      [](const Reaction& r) { return r.duplicated_species().has_value(); }));
  }

  friend BirthSystem validate_birth_system(Network candidate, double gamma, SpeciesRoles roles,
                                           Configuration initial);

 private:
  Network network_;
  double gamma_ = 0.0;
  SpeciesRoles roles_;
  Configuration initial_;
};

inline bool same_rate(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

/// Succeeds iff every species has exactly one X -> 2X reaction and all of
/// them carry rate gamma.
inline BirthSystem validate_birth_system(Network candidate, double gamma, SpeciesRoles roles = {},
                                         Configuration initial = {}) {
  if (!(gamma > 0.0)) throw InvalidArgument("duplication rate must be positive");
  const auto n = candidate.species_count();
  std::vector<int> seen(n, 0);
  for (const auto& r : candidate.reactions()) {
    auto s = r.duplicated_species();
    if (!s) continue;
    const auto& name = candidate.name(*s);
    if (++seen[s->index] > 1) throw DuplicateDuplication(name);
    if (!same_rate(r.rate_constant, gamma)) throw RateMismatch(name, r.rate_constant, gamma);
  }
  for (std::uint32_t i = 0; i < n; ++i)
    if (seen[i] == 0) throw MissingDuplication(candidate.name(SpeciesId{i}));

  if (roles.empty()) {
    roles.inputs = candidate.species();
    roles.outputs = candidate.species();
  }
  if (initial.size() == 0) initial = Configuration(n);
  if (initial.size() != n) throw InvalidArgument("initial counts do not match species count");

  BirthSystem system;
  system.network_ = std::move(candidate);
  system.gamma_ = gamma;
  system.roles_ = std::move(roles);
  system.initial_ = std::move(initial);
  return system;
}

}  // namespace growthsim
