// SPDX-License-Identifier: Apache-2.0
//
// Constructors for the protocol networks (A-B amplifier, dual-rail gates,
// the conjugation-based gate variant) and dual-rail signal encoding.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "growthsim/crn.hpp"

namespace growthsim {

/// A Boolean signal carried by two species. Rails are named, so one signal
/// can be resolved against any network that declares both rails.
struct DualRailSignal {
  std::string name;
  std::string rail0;
  std::string rail1;

  /// Signal "Y" with rails "Y0" and "Y1".
  static DualRailSignal named(std::string name) {
    return {name, name + "0", name + "1"};
  }

  friend bool operator==(const DualRailSignal&, const DualRailSignal&) = default;
};

struct ResolvedSignal {
  SpeciesId rail0;
  SpeciesId rail1;

  SpeciesId rail(int value) const { return value ? rail1 : rail0; }
};

inline ResolvedSignal resolve(const Network& net, const DualRailSignal& s) {
  return {net.id(s.rail0), net.id(s.rail1)};
}

/// Initial (n, gap)-correctness requirement of one signal.
struct SignalSpec {
  Count n = 0;
  Count delta = 0;
  int value = 0;
};

/// Two-input Boolean function, indexed by (a << 1) | b.
class TruthTable {
 public:
  constexpr TruthTable() = default;
  constexpr explicit TruthTable(std::array<int, 4> outputs) : out_(outputs) {}

  /// Four-character literal listing f(0,0) f(0,1) f(1,0) f(1,1), e.g. "1110".
  static TruthTable parse(std::string_view literal) {
    if (literal.size() != 4) throw InvalidArgument("truth table literal must have 4 bits");
    std::array<int, 4> out{};
    for (int i = 0; i < 4; ++i) {
      if (literal[i] != '0' && literal[i] != '1')
        throw InvalidArgument("truth table literal must contain only 0 and 1");
      out[i] = literal[i] - '0';
    }
    return TruthTable(out);
  }

  /// NAND, AND, OR, NOR, XOR, XNOR, or a 4-bit literal.
  static std::optional<TruthTable> from_name(std::string_view name) {
    if (name == "NAND") return nand();
    if (name == "AND") return TruthTable({0, 0, 0, 1});
    if (name == "OR") return TruthTable({0, 1, 1, 1});
    if (name == "NOR") return nor();
    if (name == "XOR") return TruthTable({0, 1, 1, 0});
    if (name == "XNOR") return TruthTable({1, 0, 0, 1});
    if (name.size() == 4 && name.find_first_not_of("01") == std::string_view::npos)
      return parse(name);
    return std::nullopt;
  }

  static constexpr TruthTable nand() { return TruthTable({1, 1, 1, 0}); }
  static constexpr TruthTable nor() { return TruthTable({1, 0, 0, 0}); }

  constexpr int operator()(int a, int b) const { return out_[((a & 1) << 1) | (b & 1)]; }

  std::string literal() const {
    std::string s;
    for (int v : out_) s += static_cast<char>('0' + v);
    return s;
  }

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

 private:
  std::array<int, 4> out_{};
};

struct GateSpec {
  TruthTable table = TruthTable::nand();
  double alpha = 1.0;
};

namespace detail {

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be positive");
}

inline void require_disjoint(std::initializer_list<const DualRailSignal*> signals) {
  std::set<std::string> seen;
  for (const auto* s : signals) {
    for (const auto* rail : {&s->rail0, &s->rail1}) {
      if (rail->empty()) throw InvalidArgument("signal '" + s->name + "' has an empty rail name");
      if (!seen.insert(*rail).second)
        throw SignalOverlap("species '" + *rail + "' is used by more than one rail");
    }
  }
}

inline BirthSystem as_birth_system(const Network& net, double gamma,
                                   std::vector<std::string_view> inputs,
                                   std::vector<std::string_view> outputs) {
  SpeciesRoles roles;
  for (auto n : inputs) roles.inputs.push_back(net.id(n));
  for (auto n : outputs) roles.outputs.push_back(net.id(n));
  return validate_birth_system(net, gamma, roles, Configuration(net.species_count()));
}

}  // namespace detail

/// A -> 2A, B -> 2B (rate gamma), A + B -> 0 (rate delta).
inline BirthSystem ab_network(double gamma, double delta, std::string_view a = "A",
                              std::string_view b = "B") {
  detail::require_positive(gamma, "duplication rate");
  detail::require_positive(delta, "death rate");
  if (a == b) throw SignalOverlap("A-B protocol needs two distinct species");
  NetworkBuilder nb;
  nb.species(a);
  nb.species(b);
  nb.duplication(a, gamma);
  nb.duplication(b, gamma);
  nb.reaction({{std::string(a), 1}, {std::string(b), 1}}, {}, delta, ReactionTag::death);
  auto net = nb.build();
  return detail::as_birth_system(net, gamma, {a, b}, {a, b});
}

/// The A-B protocol on the two rails of a signal.
inline BirthSystem amplifier_network(const DualRailSignal& signal, double gamma, double delta) {
  detail::require_disjoint({&signal});
  return ab_network(gamma, delta, signal.rail0, signal.rail1);
}

/// A^a + B^b -> A^a + B^b + Y^f(a,b) at rate alpha for each (a,b), plus
/// duplications of all six rails. Species order: A0 A1 B0 B1 Y0 Y1.
inline BirthSystem gate_network(const DualRailSignal& in_a, const DualRailSignal& in_b,
                                const DualRailSignal& out, const GateSpec& spec, double gamma) {
  detail::require_positive(gamma, "duplication rate");
  detail::require_positive(spec.alpha, "gate rate");
  detail::require_disjoint({&in_a, &in_b, &out});
  NetworkBuilder nb;
  for (const auto* s : {&in_a, &in_b, &out}) {
    nb.species(s->rail0);
    nb.species(s->rail1);
  }
  auto rail = [](const DualRailSignal& s, int v) { return v ? s.rail1 : s.rail0; };
  for (int a = 0; a <= 1; ++a) {
    for (int b = 0; b <= 1; ++b) {
      const auto ra = rail(in_a, a);
      const auto rb = rail(in_b, b);
      nb.reaction({{ra, 1}, {rb, 1}}, {{ra, 1}, {rb, 1}, {rail(out, spec.table(a, b)), 1}},
                  spec.alpha, ReactionTag::logic);
    }
  }
  for (const auto* s : {&in_a, &in_b, &out}) {
    nb.duplication(s->rail0, gamma);
    nb.duplication(s->rail1, gamma);
  }
  return detail::as_birth_system(nb.build(), gamma,
                                 {in_a.rail0, in_a.rail1, in_b.rail0, in_b.rail1},
                                 {out.rail0, out.rail1});
}

/// The five conjugation reactions of the bacterial gate, verbatim: the
/// receiver is converted into an output cell, the sender is preserved.
///   (1) A1 + B0 -> A1 + Y0      (2) A0 + B1 -> A0 + Y0
///   (3) A1 + B1 -> A1 + Y0      (4) A0 + B0 -> A0 + Y1
///   (5) A0 + B0 -> Y1 + B0
/// Only (0,0) produces Y1, so the list computes NOR.
inline BirthSystem biological_gate_network(const DualRailSignal& in_a,
                                           const DualRailSignal& in_b,
                                           const DualRailSignal& out, double delta_conj,
                                           double gamma) {
  detail::require_positive(gamma, "duplication rate");
  detail::require_positive(delta_conj, "conjugation rate");
  detail::require_disjoint({&in_a, &in_b, &out});
  NetworkBuilder nb;
  for (const auto* s : {&in_a, &in_b, &out}) {
    nb.species(s->rail0);
    nb.species(s->rail1);
  }
  const auto& a0 = in_a.rail0;
  const auto& a1 = in_a.rail1;
  const auto& b0 = in_b.rail0;
  const auto& b1 = in_b.rail1;
  const auto& y0 = out.rail0;
  const auto& y1 = out.rail1;
  const auto tag = ReactionTag::conjugation;
  nb.reaction({{a1, 1}, {b0, 1}}, {{a1, 1}, {y0, 1}}, delta_conj, tag);
  nb.reaction({{a0, 1}, {b1, 1}}, {{a0, 1}, {y0, 1}}, delta_conj, tag);
  nb.reaction({{a1, 1}, {b1, 1}}, {{a1, 1}, {y0, 1}}, delta_conj, tag);
  nb.reaction({{a0, 1}, {b0, 1}}, {{a0, 1}, {y1, 1}}, delta_conj, tag);
  nb.reaction({{a0, 1}, {b0, 1}}, {{y1, 1}, {b0, 1}}, delta_conj, tag);
  for (const auto* s : {&in_a, &in_b, &out}) {
    nb.duplication(s->rail0, gamma);
    nb.duplication(s->rail1, gamma);
  }
  return detail::as_birth_system(nb.build(), gamma, {a0, a1, b0, b1}, {y0, y1});
}

/// Birth-death chain with birth rate gamma*M and death rate delta*M^2, written
/// as M -> 2M, M + M -> M (rate 2 delta) and M -> 0 (rate delta).
inline BirthSystem m_chain_network(double gamma, double delta, std::string_view m = "M") {
  detail::require_positive(gamma, "duplication rate");
  detail::require_positive(delta, "death rate");
  NetworkBuilder nb;
  nb.duplication(m, gamma);
  nb.reaction({{std::string(m), 2}}, {{std::string(m), 1}}, 2.0 * delta, ReactionTag::death);
  nb.reaction({{std::string(m), 1}}, {}, delta, ReactionTag::death);
  return detail::as_birth_system(nb.build(), gamma, {m}, {m});
}

/// Independent Yule processes X -> 2X, one per name.
inline BirthSystem yule_network(double gamma, std::vector<std::string> names = {"X"}) {
  detail::require_positive(gamma, "duplication rate");
  NetworkBuilder nb;
  for (const auto& n : names) nb.duplication(n, gamma);
  auto net = nb.build();
  std::vector<std::string_view> all(names.begin(), names.end());
  return detail::as_birth_system(net, gamma, all, all);
}

// ---------------------------------------------------------------------------
// Encoding and readout

struct RailCounts {
  Count rail0 = 0;
  Count rail1 = 0;

  Count total() const { return rail0 + rail1; }
  Count rail(int v) const { return v ? rail1 : rail0; }
  friend bool operator==(const RailCounts&, const RailCounts&) = default;
};

/// Wrong rail gets round(e*n) (ties to even), the encoded rail the rest.
/// Throws GapViolation unless the result is (n, delta)-correct.
inline RailCounts make_signal(const SignalSpec& spec, double error_fraction) {
  if (spec.n == 0) throw InvalidArgument("signal size n must be positive");
  if (spec.delta > spec.n) throw InvalidArgument("signal gap exceeds n");
  if (spec.value != 0 && spec.value != 1) throw InvalidArgument("signal value must be 0 or 1");
  if (!(error_fraction >= 0.0 && error_fraction < 1.0))
    throw InvalidArgument("error fraction must lie in [0,1)");
  const auto wrong =
      static_cast<Count>(std::nearbyint(error_fraction * static_cast<double>(spec.n)));
  if (2 * wrong > spec.n - spec.delta)
    throw GapViolation("wrong-rail count " + std::to_string(wrong) + " exceeds (n - gap)/2 for n=" +
                       std::to_string(spec.n) + ", gap=" + std::to_string(spec.delta));
  RailCounts rc;
  (spec.value ? rc.rail0 : rc.rail1) = wrong;
  (spec.value ? rc.rail1 : rc.rail0) = spec.n - wrong;
  return rc;
}

/// True when the counts are (n, delta)-correct for value v.
inline bool is_correct(const RailCounts& rc, Count n, Count delta, int value) {
  return rc.total() >= n && 2 * rc.rail(1 - value) + delta <= n;
}

enum class Readout { zero, one, undefined };

inline std::string_view to_string(Readout r) {
  switch (r) {
    case Readout::zero: return "0";
    case Readout::one: return "1";
    case Readout::undefined: return "undef";
  }
  return "undef";
}

inline Readout readout_of(int value) { return value ? Readout::one : Readout::zero; }

inline Readout read_signal(const RailCounts& rc, double theta = 0.75) {
  if (!(theta > 0.5 && theta <= 1.0)) throw InvalidArgument("readout threshold must lie in (1/2,1]");
  const long double total = static_cast<long double>(rc.rail0) + static_cast<long double>(rc.rail1);
  if (total == 0) return Readout::undefined;
  if (static_cast<long double>(rc.rail1) >= theta * total) return Readout::one;
  if (static_cast<long double>(rc.rail0) >= theta * total) return Readout::zero;
  return Readout::undefined;
}

inline Readout read_signal(const Configuration& config, const ResolvedSignal& signal,
                           double theta = 0.75) {
  return read_signal(RailCounts{config[signal.rail0], config[signal.rail1]}, theta);
}

inline RailCounts rails_of(const Configuration& config, const ResolvedSignal& signal) {
  return {config[signal.rail0], config[signal.rail1]};
}

}  // namespace growthsim
