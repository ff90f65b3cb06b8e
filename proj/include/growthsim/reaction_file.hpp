// SPDX-License-Identifier: Apache-2.0
//
// Line-oriented reaction file format.
//
//   # full-line comment
//   species A B            optional; fixes species order
//   volume 1.0             optional; defaults to 1
//   init A = 100           optional initial count
//   A + B -> 0 @ 1.5 # death
//   A -> 2A @ 1 # duplication
//
// One reaction per line: `reactants -> products @ rate [# tag]`. A side is a
// `+`-separated list of terms `[k]Name` (k a positive integer, optionally
// followed by spaces); `0`, `∅` or nothing denotes the empty multiset. Names
// start with a letter or `_` and continue with letters, digits, `_` or `'`.
// Text after `#` on a reaction line is the reaction tag and must be one of
// duplication|death|logic|conjugation|other. Untagged reactions of the shape
// X -> 2X are tagged duplication, everything else other.
#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "growthsim/crn.hpp"

namespace growthsim {

struct ReactionFile {
  Network network;
  Configuration initial;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

inline bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline bool is_species_name(std::string_view s) {
  if (s.empty() || !is_name_start(s.front())) return false;
  for (char c : s)
    if (!is_name_char(c)) return false;
  return true;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char shortbuf[40];
    std::snprintf(shortbuf, sizeof shortbuf, "%.*g", prec, v);
    if (std::strtod(shortbuf, nullptr) == v) return shortbuf;
  }
  return buf;
}

struct ParsedTerm {
  std::string name;
  Count coefficient = 1;
};

inline std::vector<ParsedTerm> parse_side(std::string_view side, const std::string& source,
                                          std::size_t line) {
  std::vector<ParsedTerm> terms;
  side = trim(side);
  if (side.empty() || side == "0" || side == "\xE2\x88\x85") return terms;
  for (auto raw : split(side, '+')) {
    auto term = trim(raw);
    if (term.empty()) throw ParseError(source, line, "empty term in reaction side");
    std::size_t digits = 0;
    while (digits < term.size() && std::isdigit(static_cast<unsigned char>(term[digits])))
      ++digits;
    ParsedTerm t;
    if (digits > 0) {
      if (!parse_number(term.substr(0, digits), t.coefficient) || t.coefficient == 0)
        throw ParseError(source, line, "bad stoichiometric coefficient in '" +
                                           std::string(term) + "'");
    }
    auto name = trim(term.substr(digits));
    if (!is_species_name(name))
      throw ParseError(source, line, "bad species name '" + std::string(name) + "'");
    t.name = std::string(name);
    terms.push_back(std::move(t));
  }
  return terms;
}

}  // namespace detail

inline ReactionFile parse_reaction_file(std::istream& in, const std::string& source = "<input>") {
  NetworkBuilder builder;
  std::vector<std::pair<std::string, Count>> init;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    auto words = detail::split_ws(line);
    if (words.front() == "species") {
      for (std::size_t i = 1; i < words.size(); ++i) {
        if (!detail::is_species_name(words[i]))
          throw ParseError(source, line_no, "bad species name '" + std::string(words[i]) + "'");
        builder.species(words[i]);
      }
      continue;
    }
    if (words.front() == "volume") {
      double v = 0;
      if (words.size() != 2 || !detail::parse_number(words[1], v) || !(v > 0))
        throw ParseError(source, line_no, "expected 'volume <positive number>'");
      builder.volume(v);
      continue;
    }
    if (words.front() == "init") {
      auto rest = detail::trim(line.substr(4));
      auto eq = rest.find('=');
      Count value = 0;
      if (eq == std::string_view::npos ||
          !detail::is_species_name(detail::trim(rest.substr(0, eq))) ||
          !detail::parse_number(rest.substr(eq + 1), value))
        throw ParseError(source, line_no, "expected 'init <species> = <count>'");
      auto name = std::string(detail::trim(rest.substr(0, eq)));
      builder.species(name);
      init.emplace_back(name, value);
      continue;
    }

    std::string_view tag_text;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      tag_text = detail::trim(line.substr(hash + 1));
      line = detail::trim(line.substr(0, hash));
    }
    auto arrow = line.find("->");
    auto at = line.rfind('@');
    if (arrow == std::string_view::npos || at == std::string_view::npos || at < arrow)
      throw ParseError(source, line_no, "expected 'reactants -> products @ rate'");
    double rate = 0;
    if (!detail::parse_number(line.substr(at + 1), rate) || !(rate >= 0))
      throw ParseError(source, line_no, "bad rate constant");
    auto reactants = detail::parse_side(line.substr(0, arrow), source, line_no);
    auto products = detail::parse_side(line.substr(arrow + 2, at - arrow - 2), source, line_no);
    if (reactants.empty() && products.empty())
      throw ParseError(source, line_no, "reaction with both sides empty");

    Reaction r;
    for (const auto& t : reactants) r.reactants.add(builder.species(t.name), t.coefficient);
    for (const auto& t : products) r.products.add(builder.species(t.name), t.coefficient);
    r.rate_constant = rate;
    if (auto tag = parse_reaction_tag(tag_text)) {
      r.tag = *tag;
    } else if (!tag_text.empty()) {
      throw ParseError(source, line_no, "unknown reaction tag '" + std::string(tag_text) + "'");
    } else {
      r.tag = r.duplicated_species() ? ReactionTag::duplication : ReactionTag::other;
    }
    builder.reaction(std::move(r));
  }

  ReactionFile file;
  file.network = builder.build();
  file.initial = file.network.configuration(init);
  return file;
}

inline ReactionFile parse_reaction_text(std::string_view text,
                                        const std::string& source = "<string>") {
  std::istringstream in{std::string(text)};
  return parse_reaction_file(in, source);
}

inline ReactionFile load_reaction_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open reaction file '" + path + "'");
  return parse_reaction_file(in, path);
}

inline std::string format_side(const Network& net, const StoichVector& side) {
  if (side.empty()) return "0";
  std::string out;
  for (const auto& e : side.entries()) {
    if (!out.empty()) out += " + ";
    if (e.coefficient != 1) out += std::to_string(e.coefficient);
    out += net.name(e.species);
  }
  return out;
}

inline std::string format_reaction(const Network& net, const Reaction& r) {
  return format_side(net, r.reactants) + " -> " + format_side(net, r.products) + " @ " +
         detail::format_double(r.rate_constant) + " # " + std::string(to_string(r.tag));
}

/// Canonical text form; parse_reaction_text(format_reaction_file(n)) rebuilds n.
inline std::string format_reaction_file(const Network& net, const Configuration* initial = nullptr) {
  std::string out = "species";
  for (const auto& n : net.species_names()) out += " " + n;
  out += "\n";
  if (net.volume() != 1.0) out += "volume " + detail::format_double(net.volume()) + "\n";
  if (initial) {
    for (auto s : net.species())
      if ((*initial)[s] != 0)
        out += "init " + net.name(s) + " = " + std::to_string((*initial)[s]) + "\n";
  }
  for (const auto& r : net.reactions()) out += format_reaction(net, r) + "\n";
  return out;
}

}  // namespace growthsim
