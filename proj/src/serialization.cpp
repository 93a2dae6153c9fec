#include "graspmc/serialization.hpp"

#include <functional>
#include <set>

#include "graspmc/error.hpp"

namespace graspmc {

namespace {

template <class F>
auto parsing(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

const char* spaceName(StateSpace s) { return s == StateSpace::Grasp ? "grasp" : "euclidean"; }

StateSpace spaceFromName(const std::string& s) {
  if (s == "grasp") return StateSpace::Grasp;
  if (s == "euclidean") return StateSpace::Euclidean;
  throw Error(ErrorCode::ParseError, "unknown state space '" + s + "'");
}

Json proposalToJson(const ProposalRecord& p) {
  return {{"state", vectorToJson(p.state)}, {"density", p.density}, {"outcome", outcomeName(p.outcome)},
          {"accepted", p.accepted}, {"jump", p.jump}};
}

ProposalRecord proposalFromJson(const Json& j) {
  return {vectorFromJson(j.at("state")), j.at("density").get<double>(),
          outcomeFromName(j.at("outcome").get<std::string>()), j.at("accepted").get<bool>(), j.at("jump").get<bool>()};
}

Json tallyToJson(const Tallies& t) {
  return {{"success", t.success}, {"slipped", t.slipped}, {"collision", t.collision}, {"miss", t.miss}};
}

Tallies tallyFromJson(const Json& j) {
  return {j.at("success").get<std::size_t>(), j.at("slipped").get<std::size_t>(),
          j.at("collision").get<std::size_t>(), j.at("miss").get<std::size_t>()};
}

Json statsToJson(const RunStatistics& s) {
  return {{"local_steps", s.localSteps},       {"local_accepted", s.localAccepted},
          {"jump_attempts", s.jumpAttempts},   {"jumps_accepted", s.jumpsAccepted},
          {"jump_fallbacks", s.jumpFallbacks}};
}

RunStatistics statsFromJson(const Json& j) {
  RunStatistics s;
  s.localSteps = j.at("local_steps").get<std::size_t>();
  s.localAccepted = j.at("local_accepted").get<std::size_t>();
  s.jumpAttempts = j.at("jump_attempts").get<std::size_t>();
  s.jumpsAccepted = j.at("jumps_accepted").get<std::size_t>();
  s.jumpFallbacks = j.at("jump_fallbacks").get<std::size_t>();
  return s;
}

Json vec3ToJson(const grasp::Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

grasp::Vec3 vec3FromJson(const Json& j) {
  const Vector v = vectorFromJson(j);
  if (v.size() != 3) throw Error(ErrorCode::ParseError, "expected a 3-vector");
  return v;
}

}  // namespace

void requireSchema(const Json& doc, const char* expected) {
  if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string()) {
    throw Error(ErrorCode::ParseError, std::string("missing schema tag, expected ") + expected);
  }
  const auto tag = doc["schema"].get<std::string>();
  if (tag != expected) {
    throw Error(ErrorCode::ParseError, "schema '" + tag + "' does not match expected '" + expected + "'");
  }
}

Json vectorToJson(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vectorFromJson(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Json matrixToJson(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vectorToJson(m.row(r).transpose()));
  return rows;
}

Matrix matrixFromJson(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "expected a matrix");
  if (j.empty()) return Matrix();
  const auto cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = vectorFromJson(j[r]);
    if (static_cast<std::size_t>(row.size()) != cols) throw Error(ErrorCode::ParseError, "ragged matrix");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

Json toJson(const ChainHistory& h) {
  Json seeded = Json::array(), inherited = Json::array(), steps = Json::array();
  for (std::size_t i = 0; i < h.seededStates(); ++i) {
    seeded.push_back({{"state", vectorToJson(h.states()[i])}, {"density", h.densities()[i]}});
  }
  for (std::size_t i = 0; i < h.inheritedProposals(); ++i) inherited.push_back(proposalToJson(h.proposals()[i]));
  for (std::size_t k = 0; k < h.steps(); ++k) {
    const std::size_t s = h.seededStates() + k;
    steps.push_back({{"proposal", proposalToJson(h.proposals()[h.inheritedProposals() + k])},
                     {"next_state", vectorToJson(h.states()[s])},
                     {"next_density", h.densities()[s]}});
  }
  return {{"pool", h.pool() == ChainHistory::Pool::States ? "states" : "proposals"},
          {"seeded", std::move(seeded)},
          {"inherited", std::move(inherited)},
          {"steps", std::move(steps)}};
}

ChainHistory chainFromJson(const Json& j) {
  return parsing("chain", [&] {
    const auto pool = j.at("pool").get<std::string>();
    if (pool != "states" && pool != "proposals") throw Error(ErrorCode::ParseError, "unknown pool '" + pool + "'");
    ChainHistory h(pool == "states" ? ChainHistory::Pool::States : ChainHistory::Pool::Proposals);
    for (const auto& s : j.at("seeded")) h.seedState(vectorFromJson(s.at("state")), s.at("density").get<double>());
    for (const auto& p : j.at("inherited")) h.inheritProposal(proposalFromJson(p));
    for (const auto& s : j.at("steps")) {
      h.recordStep(proposalFromJson(s.at("proposal")), vectorFromJson(s.at("next_state")),
                   s.at("next_density").get<double>());
    }
    return h;
  });
}

Json toJson(const JumpRegion& r) {
  return {{"center", vectorToJson(r.center)}, {"rotation", matrixToJson(r.rotation)},
          {"scales", vectorToJson(r.scales)}, {"epsilon", r.epsilon},
          {"sqrt_scales", r.sqrtScales},      {"volume", r.volume}};
}

JumpRegion regionFromJson(const Json& j) {
  return parsing("region", [&] {
    JumpRegion r;
    r.center = vectorFromJson(j.at("center"));
    r.rotation = matrixFromJson(j.at("rotation"));
    r.scales = vectorFromJson(j.at("scales"));
    r.epsilon = j.at("epsilon").get<double>();
    r.sqrtScales = j.at("sqrt_scales").get<bool>();
    r.volume = j.at("volume").get<double>();
    const auto d = r.center.size();
    if (r.rotation.rows() != d || r.rotation.cols() != d || r.scales.size() != d) {
      throw Error(ErrorCode::ParseError, "region dimensions disagree");
    }
    return r;
  });
}

Json toJson(const LearningParams& p) {
  const auto& k = p.kameleon;
  const auto& d = p.darting;
  return {{"kameleon",
           {{"gamma", k.gamma},
            {"nu", k.nu},
            {"subsample_size", k.subsampleSize},
            {"burn_in_iterations", k.burnInIterations},
            {"bandwidth", k.bandwidth ? Json(*k.bandwidth) : Json(nullptr)},
            {"bandwidth_floor", k.bandwidthFloor}}},
          {"darting",
           {{"p_check", d.pCheck},
            {"epsilon", d.epsilon},
            {"scale_floor", d.scaleFloor},
            {"inverted_acceptance", d.invertedAcceptance},
            {"sqrt_scales", d.sqrtScales}}},
          {"iterations", p.iterations},
          {"invert_p_check", p.invertPCheck},
          {"space", spaceName(p.space)}};
}

LearningParams learningParamsFromJson(const Json& j) {
  return parsing("learning params", [&] {
    LearningParams p;
    const auto& k = j.at("kameleon");
    p.kameleon.gamma = k.at("gamma").get<double>();
    p.kameleon.nu = k.at("nu").get<double>();
    p.kameleon.subsampleSize = k.at("subsample_size").get<std::size_t>();
    p.kameleon.burnInIterations = k.at("burn_in_iterations").get<std::size_t>();
    if (!k.at("bandwidth").is_null()) p.kameleon.bandwidth = k.at("bandwidth").get<double>();
    p.kameleon.bandwidthFloor = k.at("bandwidth_floor").get<double>();
    const auto& d = j.at("darting");
    p.darting.pCheck = d.at("p_check").get<double>();
    p.darting.epsilon = d.at("epsilon").get<double>();
    p.darting.scaleFloor = d.at("scale_floor").get<double>();
    p.darting.invertedAcceptance = d.at("inverted_acceptance").get<bool>();
    p.darting.sqrtScales = d.at("sqrt_scales").get<bool>();
    p.iterations = j.at("iterations").get<std::size_t>();
    p.invertPCheck = j.at("invert_p_check").get<bool>();
    p.space = spaceFromName(j.at("space").get<std::string>());
    p.validate();
    return p;
  });
}

Json toJson(const LearnedModel& m) {
  Json modes = Json::array(), regions = Json::array();
  for (const auto& v : m.modes) modes.push_back(vectorToJson(v));
  for (const auto& r : m.regions) regions.push_back(toJson(r));
  return {{"schema", kModelSchema},
          {"object", m.object},
          {"seed", m.seed},
          {"params", toJson(m.params)},
          {"modes", std::move(modes)},
          {"mode_densities", m.modeDensities},
          {"region_covariance", matrixToJson(m.regionCovariance)},
          {"regions", std::move(regions)},
          {"stats", statsToJson(m.stats)},
          {"chain", toJson(m.chain)}};
}

LearnedModel modelFromJson(const Json& j) {
  requireSchema(j, kModelSchema);
  return parsing("learned model", [&] {
    LearnedModel m{chainFromJson(j.at("chain")), {}, {}, matrixFromJson(j.at("region_covariance")),
                   j.at("object").get<std::string>(), learningParamsFromJson(j.at("params")),
                   j.at("seed").get<std::uint64_t>(), statsFromJson(j.at("stats")),
                   j.at("mode_densities").get<std::vector<double>>()};
    for (const auto& v : j.at("modes")) m.modes.push_back(vectorFromJson(v));
    for (const auto& r : j.at("regions")) m.regions.push_back(regionFromJson(r));
    if (m.modeDensities.size() != m.modes.size()) {
      throw Error(ErrorCode::ParseError, "mode_densities and modes differ in length");
    }
    return m;
  });
}

Json toJson(const RoughSketch& s) {
  Json props = Json::array();
  for (const auto& p : s.proposals) props.push_back(proposalToJson(p));
  return {{"schema", kSketchSchema},
          {"source_object", s.sourceObject},
          {"params",
           {{"iterations", s.params.iterations},
            {"position_sigma", s.params.positionSigma},
            {"kappa", s.params.kappa},
            {"random", s.params.random}}},
          {"start", vectorToJson(s.start)},
          {"evaluations", s.evaluations},
          {"proposals", std::move(props)}};
}

RoughSketch sketchFromJson(const Json& j) {
  requireSchema(j, kSketchSchema);
  return parsing("sketch", [&] {
    RoughSketch s;
    s.sourceObject = j.at("source_object").get<std::string>();
    const auto& p = j.at("params");
    s.params.iterations = p.at("iterations").get<std::size_t>();
    s.params.positionSigma = p.at("position_sigma").get<double>();
    s.params.kappa = p.at("kappa").get<double>();
    s.params.random = p.at("random").get<bool>();
    s.start = vectorFromJson(j.at("start"));
    s.evaluations = j.at("evaluations").get<std::uint64_t>();
    for (const auto& q : j.at("proposals")) s.proposals.push_back(proposalFromJson(q));
    return s;
  });
}

Json toJson(const std::vector<grasp::Demonstration>& demos, const std::string& object) {
  Json arr = Json::array();
  for (const auto& d : demos) arr.push_back({{"state", vectorToJson(d.grasp.toState())}, {"quality", d.quality}});
  return {{"schema", kDemonstrationsSchema}, {"object", object}, {"grasps", std::move(arr)}};
}

std::vector<grasp::Demonstration> demonstrationsFromJson(const Json& j) {
  requireSchema(j, kDemonstrationsSchema);
  return parsing("demonstrations", [&] {
    std::vector<grasp::Demonstration> out;
    for (const auto& g : j.at("grasps")) {
      out.push_back({grasp::Grasp::fromState(vectorFromJson(g.at("state"))), g.at("quality").get<double>()});
    }
    return out;
  });
}

Json toJson(const grasp::SdfNode& n) {
  using K = grasp::SdfNode::Kind;
  Json j = {{"kind", grasp::sdfKindName(n.kind)},
            {"rotation", matrixToJson(n.pose.rotation)},
            {"translation", vec3ToJson(n.pose.translation)}};
  switch (n.kind) {
    case K::Sphere: j["radius"] = n.radius; break;
    case K::Box: j["half_extents"] = vec3ToJson(n.halfExtents); break;
    case K::Cylinder:
      j["radius"] = n.radius;
      j["half_height"] = n.halfHeight;
      break;
    case K::TorusSegment:
      j["major_radius"] = n.majorRadius;
      j["minor_radius"] = n.minorRadius;
      j["arc_half_angle"] = n.arcHalfAngle;
      break;
    case K::Union:
    case K::Intersection:
    case K::Difference: {
      Json children = Json::array();
      for (const auto& c : n.children) children.push_back(toJson(c));
      j["children"] = std::move(children);
      break;
    }
  }
  return j;
}

grasp::SdfNode sdfFromJson(const Json& j) {
  using K = grasp::SdfNode::Kind;
  return parsing("sdf node", [&] {
    grasp::RigidTransform pose;
    if (j.contains("rotation")) {
      const Matrix r = matrixFromJson(j.at("rotation"));
      if (r.rows() != 3 || r.cols() != 3) throw Error(ErrorCode::ParseError, "rotation must be 3x3");
      if ((r.transpose() * r - Matrix::Identity(3, 3)).norm() > 1e-9 || r.determinant() < 0.0) {
        throw Error(ErrorCode::ParseError, "rotation is not a proper rotation matrix");
      }
      pose.rotation = r;
    }
    if (j.contains("translation")) pose.translation = vec3FromJson(j.at("translation"));
    const K kind = grasp::sdfKindFromName(j.at("kind").get<std::string>());
    auto children = [&] {
      std::vector<grasp::SdfNode> c;
      for (const auto& x : j.at("children")) c.push_back(sdfFromJson(x));
      if (c.empty()) throw Error(ErrorCode::ParseError, "composite node without children");
      return c;
    };
    switch (kind) {
      case K::Sphere: return grasp::SdfNode::sphere(j.at("radius").get<double>(), pose);
      case K::Box: return grasp::SdfNode::box(vec3FromJson(j.at("half_extents")), pose);
      case K::Cylinder:
        return grasp::SdfNode::cylinder(j.at("radius").get<double>(), j.at("half_height").get<double>(), pose);
      case K::TorusSegment:
        return grasp::SdfNode::torusSegment(j.at("major_radius").get<double>(), j.at("minor_radius").get<double>(),
                                            j.at("arc_half_angle").get<double>(), pose);
      case K::Union: return grasp::SdfNode::unite(children(), pose);
      case K::Intersection: return grasp::SdfNode::intersect(children(), pose);
      case K::Difference: {
        auto c = children();
        grasp::SdfNode base = std::move(c.front());
        c.erase(c.begin());
        return grasp::SdfNode::subtract(std::move(base), std::move(c), pose);
      }
    }
    throw Error(ErrorCode::ParseError, "unhandled sdf kind");
  });
}

Json catalogToJson(const std::vector<grasp::ObjectModel>& catalog) {
  Json objects = Json::array();
  for (const auto& o : catalog) objects.push_back({{"name", o.name}, {"shape", toJson(o.shape)}});
  return {{"schema", kCatalogSchema}, {"objects", std::move(objects)}};
}

std::vector<grasp::ObjectModel> catalogFromJson(const Json& j) {
  requireSchema(j, kCatalogSchema);
  return parsing("catalog", [&] {
    std::vector<grasp::ObjectModel> out;
    std::set<std::string> names;
    for (const auto& o : j.at("objects")) {
      auto name = o.at("name").get<std::string>();
      if (!names.insert(name).second) throw Error(ErrorCode::ParseError, "duplicate object '" + name + "'");
      out.emplace_back(std::move(name), sdfFromJson(o.at("shape")));
    }
    return out;
  });
}

Json toJson(const ExperimentConfig& c) {
  return {{"schema", kConfigSchema},
          {"experiment", experimentName(c.experiment)},
          {"object", c.object},
          {"seed", c.seed},
          {"iterations", c.iterations},
          {"burn_in", c.burnIn},
          {"subsample_size", c.subsampleSize},
          {"gamma", c.gamma},
          {"nu", c.nu},
          {"p_check", c.pCheck},
          {"epsilon", c.epsilon},
          {"kappa", c.kappa},
          {"position_sigma", c.positionSigma},
          {"demonstration_count", c.demonstrationCount},
          {"inverted_acceptance", c.invertedAcceptance},
          {"sqrt_scales", c.sqrtScales},
          {"invert_p_check", c.invertPCheck},
          {"keep_trace", c.keepTrace}};
}

ExperimentConfig configFromJson(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be an object");
  if (j.contains("schema")) requireSchema(j, kConfigSchema);
  return parsing("config", [&] {
    ExperimentConfig c;
    const std::map<std::string, std::function<void(const Json&)>> fields = {
        {"schema", [](const Json&) {}},
        {"experiment", [&](const Json& v) { c.experiment = experimentFromName(v.get<std::string>()); }},
        {"object", [&](const Json& v) { c.object = v.get<std::string>(); }},
        {"seed", [&](const Json& v) { c.seed = v.get<std::uint64_t>(); }},
        {"iterations", [&](const Json& v) { c.iterations = v.get<std::size_t>(); }},
        {"burn_in", [&](const Json& v) { c.burnIn = v.get<std::size_t>(); }},
        {"subsample_size", [&](const Json& v) { c.subsampleSize = v.get<std::size_t>(); }},
        {"gamma", [&](const Json& v) { c.gamma = v.get<double>(); }},
        {"nu", [&](const Json& v) { c.nu = v.get<double>(); }},
        {"p_check", [&](const Json& v) { c.pCheck = v.get<double>(); }},
        {"epsilon", [&](const Json& v) { c.epsilon = v.get<double>(); }},
        {"kappa", [&](const Json& v) { c.kappa = v.get<double>(); }},
        {"position_sigma", [&](const Json& v) { c.positionSigma = v.get<double>(); }},
        {"demonstration_count", [&](const Json& v) { c.demonstrationCount = v.get<std::size_t>(); }},
        {"inverted_acceptance", [&](const Json& v) { c.invertedAcceptance = v.get<bool>(); }},
        {"sqrt_scales", [&](const Json& v) { c.sqrtScales = v.get<bool>(); }},
        {"invert_p_check", [&](const Json& v) { c.invertPCheck = v.get<bool>(); }},
        {"keep_trace", [&](const Json& v) { c.keepTrace = v.get<bool>(); }},
    };
    for (const auto& [key, value] : j.items()) {
      const auto it = fields.find(key);
      if (it == fields.end()) throw Error(ErrorCode::ParseError, "unknown config field '" + key + "'");
      it->second(value);
    }
    return c;
  });
}

Json toJson(const ResultRecord& r, bool includeTrace) {
  Json j = {{"schema", kResultSchema},
            {"version", r.version},
            {"config", toJson(r.config)},
            {"tallies", tallyToJson(r.tallies)},
            {"stats", statsToJson(r.stats)},
            {"sketch_evaluations", r.sketchEvaluations},
            {"source_object", r.sourceObject},
            {"wall_clock_seconds", r.wallClockSeconds}};
  if (includeTrace) {
    Json trace = Json::array();
    for (const auto& t : r.trace) {
      trace.push_back({{"state", vectorToJson(t.state)}, {"density", t.density}, {"outcome", outcomeName(t.outcome)},
                       {"accepted", t.accepted}, {"jumped", t.jumped}});
    }
    j["trace"] = std::move(trace);
  }
  return j;
}

ResultRecord resultFromJson(const Json& j) {
  requireSchema(j, kResultSchema);
  return parsing("result", [&] {
    ResultRecord r;
    r.version = j.at("version").get<std::string>();
    r.config = configFromJson(j.at("config"));
    r.tallies = tallyFromJson(j.at("tallies"));
    r.stats = statsFromJson(j.at("stats"));
    r.sketchEvaluations = j.at("sketch_evaluations").get<std::uint64_t>();
    r.sourceObject = j.at("source_object").get<std::string>();
    r.wallClockSeconds = j.at("wall_clock_seconds").get<double>();
    if (j.contains("trace")) {
      for (const auto& t : j.at("trace")) {
        r.trace.push_back({vectorFromJson(t.at("state")), t.at("density").get<double>(),
                           outcomeFromName(t.at("outcome").get<std::string>()), t.at("accepted").get<bool>(),
                           t.at("jumped").get<bool>()});
      }
    }
    return r;
  });
}

Json samplesToJson(const std::vector<SampleRecord>& samples) {
  Json arr = Json::array();
  for (const auto& s : samples) {
    arr.push_back({{"tag", s.tag == SampleTag::Demonstrated ? "demonstrated" : "learned"},
                   {"position", vec3ToJson(s.position)},
                   {"orientation", Json::array({s.orientation[0], s.orientation[1], s.orientation[2], s.orientation[3]})},
                   {"orientation_segment", Json::array({vec3ToJson(s.orientationStart), vec3ToJson(s.orientationEnd)})},
                   {"span_segment", Json::array({vec3ToJson(s.spanStart), vec3ToJson(s.spanEnd)})},
                   {"quality", s.quality},
                   {"outcome", outcomeName(s.outcome)}});
  }
  return {{"schema", kSamplesSchema}, {"samples", std::move(arr)}};
}

}  // namespace graspmc
