// Copyright 2026 The qjoint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "qjoint/core.hpp"
#include "qjoint/group.hpp"
#include "qjoint/observables.hpp"

namespace qjoint::io {

using nlohmann::json;

inline constexpr int kSignificantDigits = 12;

/// Shortest form with 12 significant digits; locale independent.
inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, kSignificantDigits);
  std::string s(buf, res.ptr);
  if (s == "-0") s = "0";
  return s;
}

/// v rounded to 12 significant digits, so JSON dumps stay short and stable.
inline double round_significant(double v) {
  if (!std::isfinite(v)) return v;
  const std::string s = format_double(v);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out == 0.0 ? 0.0 : out;
}

inline double parse_double(const std::string& text) {
  double out = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
  if (begin < end && *begin == '+') ++begin;
  auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc() || res.ptr != end) throw ParseError("not a number: '" + text + "'");
  return out;
}

inline std::size_t parse_index(const std::string& text) {
  std::size_t out = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
  auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc() || res.ptr != end) throw ParseError("not an index: '" + text + "'");
  return out;
}

// ---- matrices ----

inline json matrix_part(const Operator& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(round_significant(imag ? m(r, c).imag() : m(r, c).real()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Operator matrix_from_json(const json& re, const json& im, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  auto check = [&](const json& part, const char* name) {
    if (!part.is_array() || part.size() != dim) {
      throw ParseError(std::string(name) + " must be a " + std::to_string(dim) + "x" + std::to_string(dim) + " array");
    }
    for (const json& row : part) {
      if (!row.is_array() || row.size() != dim) throw ParseError(std::string(name) + " has a malformed row");
      for (const json& v : row) {
        if (!v.is_number()) throw ParseError(std::string(name) + " has a non-numeric entry");
      }
    }
  };
  check(re, "re");
  check(im, "im");
  Operator m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      m(r, c) = Complex(re[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>(),
                        im[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>());
    }
  }
  return m;
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

/// Reads "dim" and "factors"; factors default to [dim].
inline FiniteAbelianGroup group_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("expected a JSON object");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 2) {
    throw ParseError("\"dim\" must be an integer >= 2");
  }
  const auto dim = doc["dim"].get<std::size_t>();
  std::vector<std::size_t> factors{dim};
  if (doc.contains("factors")) {
    const json& f = doc["factors"];
    if (!f.is_array() || f.empty()) throw ParseError("\"factors\" must be a nonempty array");
    factors.clear();
    for (const json& v : f) {
      if (!v.is_number_integer() || v.get<long long>() < 2) throw ParseError("factors must be integers >= 2");
      factors.push_back(v.get<std::size_t>());
    }
  }
  FiniteAbelianGroup group(factors);
  if (group.order() != dim) throw ParseError("product of factors does not equal dim");
  return group;
}

inline json group_to_json(const FiniteAbelianGroup& group) {
  json doc;
  doc["dim"] = group.order();
  doc["factors"] = std::vector<std::size_t>(group.factors().begin(), group.factors().end());
  return doc;
}

// ---- POVM ----

/// Outcomes are written as residue tuples: n entries for G, 2n for G x G.
inline json povm_to_json(const Povm& povm) {
  json doc = group_to_json(povm.group());
  json effects = json::array();
  const auto& g = povm.group();
  for (std::size_t i = 0; i < povm.size(); ++i) {
    std::vector<std::size_t> outcome;
    if (povm.space() == OutcomeSpace::kGroup) {
      outcome = g.decode(i);
    } else {
      outcome = g.decode(i / g.order());
      const auto second = g.decode(i % g.order());
      outcome.insert(outcome.end(), second.begin(), second.end());
    }
    json e;
    e["outcome"] = outcome;
    e["re"] = matrix_part(povm.effects()[i], false);
    e["im"] = matrix_part(povm.effects()[i], true);
    effects.push_back(std::move(e));
  }
  doc["effects"] = std::move(effects);
  return doc;
}

/// Parses a POVM document. Effects may come in any order; they are placed by
/// outcome. The result is not validated, so an empty or incomplete effect list
/// parses and is reported invalid by validate().
inline Povm povm_from_json(const json& doc) {
  const FiniteAbelianGroup group = group_from_json(doc);
  if (!doc.contains("effects") || !doc["effects"].is_array()) throw ParseError("\"effects\" must be an array");
  const json& list = doc["effects"];
  const std::size_t n = group.rank();
  const std::size_t d = group.order();
  if (list.empty()) return Povm(group, OutcomeSpace::kGroup, {});

  OutcomeSpace space = OutcomeSpace::kGroup;
  std::vector<std::pair<std::size_t, Operator>> placed;
  for (std::size_t idx = 0; idx < list.size(); ++idx) {
    const json& e = list[idx];
    if (!e.is_object() || !e.contains("re") || !e.contains("im")) {
      throw ParseError("effect " + std::to_string(idx) + " needs \"re\" and \"im\"");
    }
    std::size_t flat = idx;
    if (e.contains("outcome")) {
      const json& o = e["outcome"];
      if (!o.is_array() || (o.size() != n && o.size() != 2 * n)) {
        throw ParseError("outcome must have " + std::to_string(n) + " or " + std::to_string(2 * n) + " entries");
      }
      std::vector<std::size_t> residues;
      for (const json& v : o) {
        if (!v.is_number_integer() || v.get<long long>() < 0) throw ParseError("outcome entries must be residues");
        residues.push_back(v.get<std::size_t>());
      }
      const OutcomeSpace this_space = o.size() == n ? OutcomeSpace::kGroup : OutcomeSpace::kPhaseSpace;
      if (idx == 0) {
        space = this_space;
      } else if (this_space != space) {
        throw ParseError("effects mix single and paired outcomes");
      }
      try {
        if (space == OutcomeSpace::kGroup) {
          flat = group.encode(residues);
        } else {
          const std::span<const std::size_t> all(residues);
          flat = group.encode(all.first(n)) * d + group.encode(all.last(n));
        }
      } catch (const IndexError& err) {
        throw ParseError(std::string("bad outcome: ") + err.what());
      }
    } else if (idx == 0) {
      space = list.size() == d * d ? OutcomeSpace::kPhaseSpace : OutcomeSpace::kGroup;
    }
    placed.emplace_back(flat, matrix_from_json(e["re"], e["im"], d));
  }
  const std::size_t expected = space == OutcomeSpace::kGroup ? d : d * d;
  if (placed.size() != expected) {
    // Wrong count: keep the list as given, validate() flags it.
    std::vector<Operator> effects;
    for (auto& [flat, m] : placed) effects.push_back(std::move(m));
    return Povm(group, space, std::move(effects));
  }
  std::vector<Operator> effects(expected);
  std::vector<bool> seen(expected, false);
  for (auto& [flat, m] : placed) {
    if (flat >= expected || seen[flat]) throw ParseError("duplicate or out-of-range outcome");
    seen[flat] = true;
    effects[flat] = std::move(m);
  }
  return Povm(group, space, std::move(effects));
}

inline Povm povm_from_string(const std::string& text) { return povm_from_json(parse_json(text)); }

// ---- states ----

inline json state_to_json(const Operator& rho, const FiniteAbelianGroup& group) {
  json doc = group_to_json(group);
  doc["re"] = matrix_part(rho, false);
  doc["im"] = matrix_part(rho, true);
  return doc;
}

struct ParsedState {
  FiniteAbelianGroup group;
  Operator matrix;
};

/// Matrix only; the caller decides whether it must be a valid state.
inline ParsedState state_from_json(const json& doc) {
  FiniteAbelianGroup group = group_from_json(doc);
  if (!doc.contains("re") || !doc.contains("im")) throw ParseError("state needs \"re\" and \"im\"");
  Operator m = matrix_from_json(doc["re"], doc["im"], group.order());
  return {std::move(group), std::move(m)};
}

// ---- probability tables ----

/// CSV with header j,k,probability; j and k are flat element indices.
inline void write_probabilities(std::ostream& out, const std::vector<double>& probs, std::size_t d) {
  out << "j,k,probability\n";
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) out << j << ',' << k << ',' << format_double(probs.at(j * d + k)) << '\n';
  }
}

/// Reads a j,k,probability table into a flat vector indexed j*d + k.
/// Every pair must appear exactly once.
inline std::vector<double> read_probabilities(std::istream& in, std::size_t d) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty probability table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "j,k,probability") throw ParseError("probability table must start with header j,k,probability");
  std::vector<double> probs(d * d, 0.0);
  std::vector<bool> seen(d * d, false);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 3) throw ParseError("line " + std::to_string(lineno) + ": expected 3 fields");
    const std::size_t j = parse_index(cells[0]);
    const std::size_t k = parse_index(cells[1]);
    if (j >= d || k >= d) throw ParseError("line " + std::to_string(lineno) + ": index out of range");
    if (seen[j * d + k]) throw ParseError("line " + std::to_string(lineno) + ": duplicate entry");
    seen[j * d + k] = true;
    probs[j * d + k] = parse_double(cells[2]);
  }
  for (bool s : seen) {
    if (!s) throw ParseError("probability table is missing entries");
  }
  return probs;
}

}  // namespace qjoint::io
