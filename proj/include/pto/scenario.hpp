#pragma once

// Planar worlds with partially observable discrete factors (doors, object
// locations) and the four-function oracle consumed by the planner:
// state_check, transition_check, goal_check and visibility of a factor.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pto/geometry.hpp"
#include "pto/world_set.hpp"

namespace pto {

/// Sampling resolution for segment checks, in meters.
inline constexpr double kSegmentResolution = 0.01;
/// Half-thickness of a closed door's blocking rectangle.
inline constexpr double kDoorInflation = 0.05;
/// Default observation range around a factor.
inline constexpr double kDefaultZoneRadius = 1.5;

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ScenarioMode { IndependentDoors, ExclusiveLocations };
enum class FactorKind { Door, ObjectLocation };

struct UncertainFactor {
  FactorKind kind = FactorKind::Door;
  std::string name;
  /// Door: segment endpoints. Object location: placement point in `a`.
  Vec2 a;
  Vec2 b;
  /// Door only: region blocked in hypotheses where the door is closed.
  Polygon blocking;
  Disc zone;
  /// Door: probability of being open. Object location: prior weight.
  double prior = 0.5;

  /// Line-of-sight target: door midpoint or placement point.
  Vec2 reference() const { return kind == FactorKind::Door ? 0.5 * (a + b) : a; }
};

struct GoalSpec {
  WorldSet worlds;
  GoalRegion region;
};

struct Scenario {
  std::string name;
  ScenarioMode mode = ScenarioMode::IndependentDoors;
  Box bounds;
  std::vector<Polygon> obstacles;
  std::vector<UncertainFactor> factors;
  Config start;
  std::vector<GoalSpec> goals;

  std::size_t hypothesis_count() const {
    if (mode == ScenarioMode::IndependentDoors) return std::size_t{1} << factors.size();
    return factors.empty() ? 1 : factors.size();
  }
  WorldSet all_worlds() const { return WorldSet::full(hypothesis_count()); }

  /// Hypotheses in which factor `f` is "closed" (door) or "absent"
  /// (object location). In door mode, bit f of a hypothesis index set
  /// means door f is closed.
  WorldSet negative_worlds(std::size_t f) const {
    const std::size_t n = hypothesis_count();
    if (mode == ScenarioMode::ExclusiveLocations) return all_worlds().minus(WorldSet::single(f));
    std::uint64_t mask = 0;
    for (std::size_t s = 0; s < n; ++s)
      if ((s >> f) & 1U) mask |= std::uint64_t{1} << s;
    return WorldSet(mask);
  }
  WorldSet positive_worlds(std::size_t f) const { return all_worlds().minus(negative_worlds(f)); }

  /// Mutually exclusive outcomes of observing factor `f`: open/closed for
  /// doors, present/absent for object locations.
  std::vector<WorldSet> factor_outcomes(std::size_t f) const {
    return {positive_worlds(f), negative_worlds(f)};
  }

  /// Initial belief b0 over hypotheses.
  std::vector<double> prior() const {
    const std::size_t n = hypothesis_count();
    std::vector<double> p(n, 0.0);
    if (mode == ScenarioMode::ExclusiveLocations) {
      if (factors.empty()) return {1.0};
      double total = 0.0;
      for (const auto& f : factors) total += f.prior;
      for (std::size_t s = 0; s < n; ++s) p[s] = factors[s].prior / total;
      return p;
    }
    for (std::size_t s = 0; s < n; ++s) {
      double v = 1.0;
      for (std::size_t f = 0; f < factors.size(); ++f)
        v *= ((s >> f) & 1U) ? 1.0 - factors[f].prior : factors[f].prior;
      p[s] = v;
    }
    return p;
  }
};

// ---------------------------------------------------------------------------
// Oracle

/// Worlds in which configuration `x` is collision free.
inline WorldSet state_check(const Scenario& sc, Config x) {
  if (!is_finite(x) || !sc.bounds.contains(x)) return {};
  for (const Polygon& p : sc.obstacles)
    if (p.contains(x)) return {};
  WorldSet blocked;
  for (std::size_t f = 0; f < sc.factors.size(); ++f) {
    const UncertainFactor& fac = sc.factors[f];
    if (fac.kind == FactorKind::Door && fac.blocking.contains(x)) blocked |= sc.negative_worlds(f);
  }
  return sc.all_worlds().minus(blocked);
}

/// Worlds in which the straight motion x1 -> x2 is collision free. Uses
/// exact closed segment/polygon intersection; the result is contained in
/// the sampled check at any resolution.
inline WorldSet transition_check(const Scenario& sc, Config x1, Config x2) {
  if (x1 == x2) return state_check(sc, x1);
  if (lex_less(x2, x1)) std::swap(x1, x2);
  if (!is_finite(x1) || !is_finite(x2)) return {};
  if (!sc.bounds.contains(x1) || !sc.bounds.contains(x2)) return {};
  for (const Polygon& p : sc.obstacles)
    if (p.intersects_segment(x1, x2)) return {};
  WorldSet blocked;
  for (std::size_t f = 0; f < sc.factors.size(); ++f) {
    const UncertainFactor& fac = sc.factors[f];
    if (fac.kind == FactorKind::Door && fac.blocking.intersects_segment(x1, x2))
      blocked |= sc.negative_worlds(f);
  }
  return sc.all_worlds().minus(blocked);
}

/// Transition check by sampling the segment every `resolution` meters
/// (endpoints included). Direction-independent.
inline WorldSet transition_check_sampled(const Scenario& sc, Config x1, Config x2,
                                         double resolution = kSegmentResolution) {
  if (lex_less(x2, x1)) std::swap(x1, x2);
  const double len = distance(x1, x2);
  const auto steps = static_cast<std::size_t>(std::ceil(len / resolution));
  WorldSet result = state_check(sc, x1);
  for (std::size_t i = 1; i <= steps && !result.empty(); ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps);
    result &= state_check(sc, i == steps ? x2 : lerp(x1, x2, t));
  }
  return result;
}

inline WorldSet goal_check(const Scenario& sc, Config x) {
  WorldSet out;
  for (const GoalSpec& g : sc.goals)
    if (g.region.contains(x)) out |= g.worlds;
  return out & sc.all_worlds();
}

/// True iff `x` is in the factor's observation zone with an unobstructed
/// line of sight to its reference point.
inline bool visible(const Scenario& sc, Config x, std::size_t factor) {
  const UncertainFactor& f = sc.factors.at(factor);
  if (!f.zone.contains(x)) return false;
  const Vec2 target = f.reference();
  for (const Polygon& p : sc.obstacles)
    if (p.intersects_segment(x, target)) return false;
  return true;
}

/// Bitmask of factors visible from `x`.
inline std::uint64_t visible_factors(const Scenario& sc, Config x) {
  std::uint64_t mask = 0;
  for (std::size_t f = 0; f < sc.factors.size(); ++f)
    if (visible(sc, x, f)) mask |= std::uint64_t{1} << f;
  return mask;
}

/// Oracle front end that counts collision queries. One instance per
/// planner; not thread safe.
class Oracle {
 public:
  explicit Oracle(const Scenario& sc) : sc_(&sc) {}

  const Scenario& scenario() const { return *sc_; }

  WorldSet state_check(Config x) {
    ++state_checks_;
    return pto::state_check(*sc_, x);
  }
  WorldSet transition_check(Config a, Config b) {
    ++transition_checks_;
    return pto::transition_check(*sc_, a, b);
  }
  WorldSet goal_check(Config x) const { return pto::goal_check(*sc_, x); }

  std::uint64_t state_checks() const { return state_checks_; }
  std::uint64_t transition_checks() const { return transition_checks_; }
  std::uint64_t collision_checks() const { return state_checks_ + transition_checks_; }

 private:
  const Scenario* sc_;
  std::uint64_t state_checks_ = 0;
  std::uint64_t transition_checks_ = 0;
};

// ---------------------------------------------------------------------------
// Scenario documents

namespace detail {

using nlohmann::json;

inline const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ScenarioError(path + "." + key, "missing field");
  return j.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ScenarioError(path, "non-finite value");
  return v;
}

inline Vec2 point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ScenarioError(path, "expected [x, y]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

inline Box box(const json& j, const std::string& path) {
  Box b{point(field(j, "min", path), path + ".min"), point(field(j, "max", path), path + ".max")};
  if (!(b.min.x < b.max.x && b.min.y < b.max.y)) throw ScenarioError(path, "empty box");
  return b;
}

inline Disc disc(const json& j, const std::string& path) {
  Disc d{point(field(j, "center", path), path + ".center"),
         number(field(j, "radius", path), path + ".radius")};
  if (!(d.radius > 0.0)) throw ScenarioError(path + ".radius", "radius must be > 0");
  return d;
}

inline json to_json(Vec2 p) { return json::array({p.x, p.y}); }

}  // namespace detail

/// Parses and validates a scenario document (format 1).
inline Scenario parse_scenario(const std::string& text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("", "scenario document must be an object");
  const std::string root = "scenario";
  const json& fmt = detail::field(doc, "format", root);
  if (!fmt.is_number_integer() || fmt.get<int>() != 1)
    throw ScenarioError(root + ".format", "unsupported format version");

  Scenario sc;
  sc.name = doc.value("name", std::string{});
  const json& mode = detail::field(doc, "mode", root);
  const std::string mode_str = mode.is_string() ? mode.get<std::string>() : "";
  if (mode_str == "independent_doors") {
    sc.mode = ScenarioMode::IndependentDoors;
  } else if (mode_str == "exclusive_locations") {
    sc.mode = ScenarioMode::ExclusiveLocations;
  } else {
    throw ScenarioError(root + ".mode", "expected \"independent_doors\" or \"exclusive_locations\"");
  }

  sc.bounds = detail::box(detail::field(doc, "bounds", root), root + ".bounds");

  if (doc.contains("obstacles")) {
    const json& obs = doc.at("obstacles");
    if (!obs.is_array()) throw ScenarioError(root + ".obstacles", "expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string path = root + ".obstacles[" + std::to_string(i) + "]";
      if (!obs[i].is_array() || obs[i].size() < 3)
        throw ScenarioError(path, "polygon needs at least 3 vertices");
      std::vector<Vec2> pts;
      for (std::size_t k = 0; k < obs[i].size(); ++k)
        pts.push_back(detail::point(obs[i][k], path + "[" + std::to_string(k) + "]"));
      sc.obstacles.emplace_back(std::move(pts));
    }
  }

  if (doc.contains("factors")) {
    const json& facs = doc.at("factors");
    if (!facs.is_array()) throw ScenarioError(root + ".factors", "expected an array");
    for (std::size_t i = 0; i < facs.size(); ++i) {
      const std::string path = root + ".factors[" + std::to_string(i) + "]";
      const json& fj = facs[i];
      UncertainFactor f;
      const json& kind = detail::field(fj, "kind", path);
      const std::string kind_str = kind.is_string() ? kind.get<std::string>() : "";
      const json& geom = detail::field(fj, "geometry", path);
      if (kind_str == "door") {
        if (sc.mode != ScenarioMode::IndependentDoors)
          throw ScenarioError(path + ".kind", "door factors require mode \"independent_doors\"");
        f.kind = FactorKind::Door;
        if (!geom.is_array() || geom.size() != 2)
          throw ScenarioError(path + ".geometry", "door geometry is a segment [[x,y],[x,y]]");
        f.a = detail::point(geom[0], path + ".geometry[0]");
        f.b = detail::point(geom[1], path + ".geometry[1]");
        f.blocking = inflate_segment(f.a, f.b, kDoorInflation);
      } else if (kind_str == "object_location") {
        if (sc.mode != ScenarioMode::ExclusiveLocations)
          throw ScenarioError(path + ".kind",
                              "object_location factors require mode \"exclusive_locations\"");
        f.kind = FactorKind::ObjectLocation;
        f.a = f.b = detail::point(geom, path + ".geometry");
      } else {
        throw ScenarioError(path + ".kind", "expected \"door\" or \"object_location\"");
      }
      f.name = fj.value("name", (f.kind == FactorKind::Door ? "door" : "location") + std::to_string(i));
      f.zone = {f.reference(), kDefaultZoneRadius};
      if (fj.contains("zone")) {
        const json& z = fj.at("zone");
        if (z.contains("center")) f.zone.center = detail::point(z.at("center"), path + ".zone.center");
        if (z.contains("radius")) f.zone.radius = detail::number(z.at("radius"), path + ".zone.radius");
      }
      if (!(f.zone.radius > 0.0)) throw ScenarioError(path + ".zone.radius", "radius must be > 0");
      f.prior = detail::number(detail::field(fj, "prior", path), path + ".prior");
      if (f.kind == FactorKind::Door && !(f.prior > 0.0 && f.prior < 1.0))
        throw ScenarioError(path + ".prior", "door prior must lie in (0, 1)");
      if (f.kind == FactorKind::ObjectLocation && !(f.prior > 0.0 && f.prior <= 1.0))
        throw ScenarioError(path + ".prior", "location weight must lie in (0, 1]");
      sc.factors.push_back(std::move(f));
    }
  }
  if (sc.mode == ScenarioMode::IndependentDoors && sc.factors.size() > 6)
    throw ScenarioError(root + ".factors", "at most 6 doors are supported");
  if (sc.mode == ScenarioMode::ExclusiveLocations) {
    if (sc.factors.size() > kMaxHypotheses)
      throw ScenarioError(root + ".factors", "too many locations");
    double total = 0.0;
    for (const auto& f : sc.factors) total += f.prior;
    if (!sc.factors.empty() && std::abs(total - 1.0) > 1e-6)
      throw ScenarioError(root + ".factors", "location weights must sum to 1");
  }

  const std::size_t n = sc.hypothesis_count();
  sc.start = detail::point(detail::field(doc, "start", root), root + ".start");

  const json& goals = detail::field(doc, "goals", root);
  if (!goals.is_array() || goals.empty()) throw ScenarioError(root + ".goals", "expected a non-empty array");
  WorldSet covered;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    const std::string path = root + ".goals[" + std::to_string(i) + "]";
    const json& gj = goals[i];
    GoalSpec g;
    const json& worlds = gj.contains("worlds") ? gj.at("worlds") : json("all");
    if (worlds.is_string() && worlds.get<std::string>() == "all") {
      g.worlds = WorldSet::full(n);
    } else if (worlds.is_array()) {
      for (std::size_t k = 0; k < worlds.size(); ++k) {
        if (!worlds[k].is_number_integer() || worlds[k].get<long long>() < 0 ||
            static_cast<std::size_t>(worlds[k].get<long long>()) >= n)
          throw ScenarioError(path + ".worlds[" + std::to_string(k) + "]",
                              "hypothesis index out of range (|H| = " + std::to_string(n) + ")");
        g.worlds |= WorldSet::single(worlds[k].get<std::size_t>());
      }
    } else {
      throw ScenarioError(path + ".worlds", "expected \"all\" or a list of hypothesis indices");
    }
    if (gj.contains("disc")) {
      g.region = detail::disc(gj.at("disc"), path + ".disc");
    } else if (gj.contains("box")) {
      g.region = detail::box(gj.at("box"), path + ".box");
    } else {
      throw ScenarioError(path, "goal needs a \"disc\" or \"box\" region");
    }
    covered |= g.worlds;
    sc.goals.push_back(g);
  }
  if (covered != sc.all_worlds()) throw ScenarioError(root + ".goals", "some hypothesis has no goal region");

  if (!sc.bounds.contains(sc.start)) throw ScenarioError(root + ".start", "start lies outside bounds");
  for (const Polygon& p : sc.obstacles)
    if (p.contains(sc.start)) throw ScenarioError(root + ".start", "start collides with an obstacle");
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

/// Canonical document for a scenario; parse_scenario(dump) reproduces it.
inline nlohmann::json scenario_to_json(const Scenario& sc) {
  using detail::json;
  using detail::to_json;
  json doc;
  doc["format"] = 1;
  doc["name"] = sc.name;
  doc["mode"] = sc.mode == ScenarioMode::IndependentDoors ? "independent_doors" : "exclusive_locations";
  doc["bounds"] = {{"min", to_json(sc.bounds.min)}, {"max", to_json(sc.bounds.max)}};
  json obs = json::array();
  for (const Polygon& p : sc.obstacles) {
    json poly = json::array();
    for (Vec2 v : p.vertices()) poly.push_back(to_json(v));
    obs.push_back(poly);
  }
  doc["obstacles"] = obs;
  json facs = json::array();
  for (const UncertainFactor& f : sc.factors) {
    json fj;
    fj["kind"] = f.kind == FactorKind::Door ? "door" : "object_location";
    fj["name"] = f.name;
    fj["geometry"] = f.kind == FactorKind::Door ? json::array({to_json(f.a), to_json(f.b)}) : to_json(f.a);
    fj["zone"] = {{"center", to_json(f.zone.center)}, {"radius", f.zone.radius}};
    fj["prior"] = f.prior;
    facs.push_back(fj);
  }
  doc["factors"] = facs;
  doc["start"] = to_json(sc.start);
  json goals = json::array();
  for (const GoalSpec& g : sc.goals) {
    json gj;
    if (g.worlds == sc.all_worlds()) {
      gj["worlds"] = "all";
    } else {
      json w = json::array();
      for (std::size_t s : g.worlds.members()) w.push_back(s);
      gj["worlds"] = w;
    }
    if (g.region.is_disc()) {
      gj["disc"] = {{"center", to_json(g.region.disc().center)}, {"radius", g.region.disc().radius}};
    } else {
      gj["box"] = {{"min", to_json(g.region.box().min)}, {"max", to_json(g.region.box().max)}};
    }
    goals.push_back(gj);
  }
  doc["goals"] = goals;
  return doc;
}

/// FNV-1a 64 over the canonical document; identifies a scenario in output
/// documents.
inline std::string scenario_hash(const Scenario& sc) {
  const std::string text = scenario_to_json(sc).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  std::string s = os.str();
  return std::string(16 - s.size(), '0') + s;
}

/// Overrides the prior of the factor called `name`.
inline void set_factor_prior(Scenario& sc, const std::string& name, double prior) {
  for (UncertainFactor& f : sc.factors) {
    if (f.name != name) continue;
    if (f.kind == FactorKind::Door && !(prior > 0.0 && prior < 1.0))
      throw ScenarioError(name, "door prior must lie in (0, 1)");
    if (f.kind == FactorKind::ObjectLocation && !(prior > 0.0 && prior <= 1.0))
      throw ScenarioError(name, "location weight must lie in (0, 1]");
    f.prior = prior;
    return;
  }
  throw ScenarioError(name, "no factor with this name");
}

}  // namespace pto
