#pragma once

// JSON forms of graphs, instances, walks, matchings, profiles and rationals.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "twtsp/error.hpp"
#include "twtsp/graph.hpp"
#include "twtsp/matching.hpp"
#include "twtsp/model.hpp"
#include "twtsp/rational.hpp"

namespace twtsp {

using json = nlohmann::json;

inline json to_json(const Rational& q) { return {{"num", q.numerator()}, {"den", q.denominator()}}; }

inline Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  return Rational(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

inline json to_json(const MetricGraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v, e.len});
  return {{"n", g.size()}, {"edges", edges}};
}

inline MetricGraph graph_from_json(const json& j) {
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) edges.push_back({e.at(0).get<Vertex>(), e.at(1).get<Vertex>(), e.at(2).get<Length>()});
  return MetricGraph(j.at("n").get<int>(), std::move(edges));
}

inline json to_json(const Request& r) { return {{"v", r.vertex}, {"r", r.release}, {"d", r.deadline}, {"pi", r.reward}}; }

inline json to_json(const Instance& inst) {
  json reqs = json::array();
  for (const Request& r : inst.requests) reqs.push_back(to_json(r));
  return {{"graph", to_json(inst.graph)},
          {"service", inst.service},
          {"root", inst.root ? json(*inst.root) : json(nullptr)},
          {"requests", reqs}};
}

inline Instance instance_from_json(const json& j) {
  Instance inst;
  inst.graph = graph_from_json(j.at("graph"));
  inst.service = j.value("service", Time{1});
  if (j.contains("root") && !j.at("root").is_null()) inst.root = j.at("root").get<Vertex>();
  for (const auto& r : j.at("requests"))
    inst.requests.push_back({r.at("v").get<Vertex>(), r.at("r").get<Time>(), r.at("d").get<Time>(), r.value("pi", Reward{1})});
  return inst;
}

inline json to_json(const Walk& w) {
  json actions = json::array();
  for (const Action& a : w.actions) {
    if (const auto* mv = std::get_if<Move>(&a)) actions.push_back({{"move", mv->to}});
    else actions.push_back({{"idle", std::get<Idle>(a).duration}});
  }
  return {{"start_vertex", w.start_vertex}, {"start_time", w.start_time}, {"actions", actions}};
}

inline Walk walk_from_json(const json& j) {
  Walk w;
  w.start_vertex = j.at("start_vertex").get<Vertex>();
  w.start_time = j.value("start_time", Time{0});
  for (const auto& a : j.at("actions")) {
    if (a.contains("move")) {
      Move mv{a.at("move").get<Vertex>(), std::nullopt};
      if (a.contains("duration")) mv.duration = a.at("duration").get<Time>();
      w.actions.emplace_back(mv);
    } else {
      w.actions.emplace_back(Idle{a.at("idle").get<Time>()});
    }
  }
  return w;
}

inline json to_json(const Matching& m) {
  json pairs = json::array();
  for (const auto& [i, j] : m.pairs) pairs.push_back({i, j});
  return {{"kind", to_string(m.kind)}, {"pairs", pairs}};
}

inline Matching matching_from_json(const json& j) {
  Matching m;
  const auto kind = j.value("kind", std::string("one_to_one"));
  if (kind == "one_to_one") m.kind = MatchingKind::OneToOne;
  else if (kind == "partial") m.kind = MatchingKind::Partial;
  else if (kind == "many_to_one") m.kind = MatchingKind::ManyToOne;
  else throw Error(Errc::ParseError, "unknown matching kind " + kind);
  for (const auto& p : j.at("pairs")) m.pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
  return m;
}

inline json to_json(const ErrorProfile& p) {
  return {{"lambda", p.lambda}, {"tau", p.tau}, {"rho", to_json(p.rho)}, {"delta1", p.delta1}, {"delta2", p.delta2}};
}

inline json to_json(const CoverageReport& c) {
  json starts = json::object();
  for (const auto& [i, t] : c.service_starts) starts[std::to_string(i)] = t;
  return {{"covered", c.covered}, {"reward", c.reward}, {"service_starts", starts}};
}

/// Reads a JSON file; I/O and syntax problems become ParseError.
inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::ParseError, "cannot write " + path);
  out << text;
}

/// Wraps nlohmann access errors in ParseError.
template <class F>
auto parse_guard(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, what + ": " + e.what());
  }
}

/// FNV-1a 64-bit hash, hex encoded.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

inline std::string digest(const Instance& inst) { return fnv1a_hex(to_json(inst).dump()); }

}  // namespace twtsp
