#include "capkit/scenario.hpp"

#include <algorithm>
#include <fstream>

namespace capkit {

// ---------------------------------------------------------------------------
// JSON helpers

namespace {

const ojson& need(const ojson& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) {
    throw ValidationError(ctx + ": expected an object");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(ctx + ": missing field '" + key + "'");
  }
  return *it;
}

double need_num(const ojson& j, const char* key, const std::string& ctx) {
  const ojson& v = need(j, key, ctx);
  if (!v.is_number()) {
    throw ValidationError(ctx + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

double opt_num(const ojson& j, const char* key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return j.at(key).get<double>();
}

std::size_t need_count(const ojson& j, const char* key, const std::string& ctx) {
  const double v = need_num(j, key, ctx);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ValidationError(ctx + ": field '" + key +
                          "' must be a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

std::string need_str(const ojson& j, const char* key, const std::string& ctx) {
  const ojson& v = need(j, key, ctx);
  if (!v.is_string()) {
    throw ValidationError(ctx + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

ojson point_to_json(const Point& p) {
  ojson arr = ojson::array();
  for (double c : p.coords()) arr.push_back(c);
  return arr;
}

Point point_from_json(const ojson& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(std::string(what) +
                          ": expected a nonempty array of numbers");
  }
  std::vector<double> coords;
  coords.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw ValidationError(std::string(what) + ": coordinates must be numbers");
    }
    coords.push_back(v.get<double>());
  }
  return Point(std::move(coords));
}

namespace {

std::vector<Point> points_from_json(const ojson& j, const char* what) {
  if (!j.is_array()) {
    throw ValidationError(std::string(what) + ": expected an array of points");
  }
  std::vector<Point> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(point_from_json(v, what));
  return out;
}

}  // namespace

ojson convex_set_to_json(const ConvexSet& s) {
  ojson j;
  j["kind"] = s.kind_name();
  if (const auto* h = s.get_if<Halfspace>()) {
    j["normal"] = point_to_json(h->normal);
    j["offset"] = h->offset;
  } else if (const auto* h = s.get_if<Hyperplane>()) {
    j["normal"] = point_to_json(h->normal);
    j["offset"] = h->offset;
  } else if (const auto* b = s.get_if<BoxSet>()) {
    j["lower"] = point_to_json(b->lower);
    j["upper"] = point_to_json(b->upper);
  } else if (const auto* b = s.get_if<BallSet>()) {
    j["center"] = point_to_json(b->center);
    j["radius"] = b->radius;
  } else if (const auto* a = s.get_if<AffineSubspace>()) {
    j["anchor"] = point_to_json(a->anchor);
    ojson basis = ojson::array();
    for (const Point& q : a->basis) basis.push_back(point_to_json(q));
    j["basis"] = basis;
  } else if (const auto* i = s.get_if<IntersectionSet>()) {
    ojson sets = ojson::array();
    for (const ConvexSet& m : i->sets) sets.push_back(convex_set_to_json(m));
    j["sets"] = sets;
  }
  return j;
}

ConvexSet convex_set_from_json(const ojson& j) {
  const std::string kind = need_str(j, "kind", "convex set");
  if (kind == "halfspace") {
    return ConvexSet::halfspace(point_from_json(need(j, "normal", kind), "normal"),
                                need_num(j, "offset", kind));
  }
  if (kind == "hyperplane") {
    return ConvexSet::hyperplane(point_from_json(need(j, "normal", kind), "normal"),
                                 need_num(j, "offset", kind));
  }
  if (kind == "box") {
    return ConvexSet::box(point_from_json(need(j, "lower", kind), "lower"),
                          point_from_json(need(j, "upper", kind), "upper"));
  }
  if (kind == "ball") {
    return ConvexSet::ball(point_from_json(need(j, "center", kind), "center"),
                           need_num(j, "radius", kind));
  }
  if (kind == "affine") {
    std::vector<Point> basis;
    if (j.contains("basis")) basis = points_from_json(j.at("basis"), "basis");
    return ConvexSet::affine_subspace(
        point_from_json(need(j, "anchor", kind), "anchor"), std::move(basis));
  }
  if (kind == "intersection") {
    const ojson& sets = need(j, "sets", kind);
    if (!sets.is_array() || sets.empty()) {
      throw ValidationError("intersection: 'sets' must be a nonempty array");
    }
    std::vector<ConvexSet> members;
    members.reserve(sets.size());
    for (const auto& m : sets) members.push_back(convex_set_from_json(m));
    return ConvexSet::intersection(std::move(members));
  }
  throw ValidationError("convex set: unknown kind '" + kind + "'");
}

namespace {

ojson domain_to_json(const DomainSpec& d, const SamplerSpec& sampler) {
  ojson j;
  j["kind"] = d.kind_name();
  if (const auto* b = d.get_if<BoxDomain>()) {
    j["lower"] = point_to_json(b->lower);
    j["upper"] = point_to_json(b->upper);
  } else if (const auto* b = d.get_if<BallDomain>()) {
    j["center"] = point_to_json(b->center);
    j["radius"] = b->radius;
  } else if (const auto* h = d.get_if<HalflineDomain>()) {
    j["origin"] = h->origin;
    j["upward"] = h->upward;
    j["window"] = h->window;
  } else if (const auto* f = d.get_if<FiniteDomain>()) {
    ojson pts = ojson::array();
    for (const Point& p : f->points) pts.push_back(point_to_json(p));
    j["points"] = pts;
  }
  ojson sj;
  if (const auto* g = std::get_if<GridSampler>(&sampler)) {
    sj["kind"] = "grid";
    sj["count"] = g->count;
  } else {
    sj["kind"] = "random";
    sj["count"] = std::get<RandomSampler>(sampler).count;
  }
  j["sampler"] = sj;
  return j;
}

std::pair<DomainSpec, SamplerSpec> domain_from_json(const ojson& j) {
  const std::string kind = need_str(j, "kind", "domain");
  DomainSpec domain = [&]() -> DomainSpec {
    if (kind == "box") {
      return DomainSpec::box(point_from_json(need(j, "lower", "domain"), "lower"),
                             point_from_json(need(j, "upper", "domain"), "upper"));
    }
    if (kind == "ball") {
      return DomainSpec::ball(point_from_json(need(j, "center", "domain"), "center"),
                              need_num(j, "radius", "domain"));
    }
    if (kind == "halfline") {
      const bool upward = j.contains("upward") ? j.at("upward").get<bool>() : true;
      return DomainSpec::halfline(need_num(j, "origin", "domain"), upward,
                                  need_num(j, "window", "domain"));
    }
    if (kind == "finite") {
      return DomainSpec::finite(points_from_json(need(j, "points", "domain"),
                                                 "domain points"));
    }
    throw ValidationError("domain: unknown kind '" + kind + "'");
  }();
  SamplerSpec sampler = GridSampler{41};
  if (j.contains("sampler")) {
    const ojson& sj = j.at("sampler");
    const std::string sk = need_str(sj, "kind", "sampler");
    const std::size_t count = need_count(sj, "count", "sampler");
    if (count == 0) throw ValidationError("sampler: count must be >= 1");
    if (sk == "grid") {
      sampler = GridSampler{count};
    } else if (sk == "random") {
      sampler = RandomSampler{count};
    } else {
      throw ValidationError("sampler: unknown kind '" + sk + "'");
    }
  }
  return {std::move(domain), sampler};
}

}  // namespace

ojson mapping_to_json(const MappingSpec& m) {
  ojson j;
  j["family"] = m.family_name();
  if (const auto* a = std::get_if<AffineFamily>(&m.family())) {
    const std::size_t d = m.domain().dim();
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < d; ++i) {
      ojson row = ojson::array();
      for (std::size_t k = 0; k < d; ++k) row.push_back(a->matrix[i * d + k]);
      rows.push_back(row);
    }
    j["matrix"] = rows;
    j["offset"] = point_to_json(a->offset);
  } else if (const auto* s = std::get_if<ScaleFamily>(&m.family())) {
    j["factor"] = s->factor;
  } else if (const auto* t = std::get_if<TranslationFamily>(&m.family())) {
    j["offset"] = point_to_json(t->offset);
  } else if (const auto* r = std::get_if<Rotation2dFamily>(&m.family())) {
    j["angle"] = r->angle;
  } else if (const auto* c = std::get_if<ConstantFamily>(&m.family())) {
    j["point"] = point_to_json(c->value);
  } else if (const auto* b = std::get_if<BerindeFamily>(&m.family())) {
    j["factor"] = b->factor;
    j["residual_weight"] = b->residual_weight;
  } else if (const auto* p = std::get_if<ProjectedFamily>(&m.family())) {
    j["inner"] = mapping_to_json(*p->inner);
    j["set"] = convex_set_to_json(p->target);
  }
  j["into_domain"] = m.into_domain();
  return j;
}

MappingSpec mapping_from_json(const ojson& j, const DomainSpec& domain) {
  const std::string family = need_str(j, "family", "mapping");
  const bool into = j.contains("into_domain") ? j.at("into_domain").get<bool>()
                                              : false;
  if (family == "affine") {
    const ojson& rows = need(j, "matrix", "affine mapping");
    if (!rows.is_array()) {
      throw ValidationError("affine mapping: 'matrix' must be an array of rows");
    }
    std::vector<double> matrix;
    for (const auto& row : rows) {
      if (!row.is_array()) {
        throw ValidationError("affine mapping: matrix rows must be arrays");
      }
      for (const auto& v : row) matrix.push_back(v.get<double>());
    }
    return MappingSpec(
        AffineFamily{std::move(matrix),
                     point_from_json(need(j, "offset", "affine"), "offset")},
        domain, into);
  }
  if (family == "scale") {
    return MappingSpec(ScaleFamily{need_num(j, "factor", "scale mapping")},
                       domain, into);
  }
  if (family == "translation") {
    return MappingSpec(
        TranslationFamily{point_from_json(need(j, "offset", "translation"), "offset")},
        domain, into);
  }
  if (family == "rotation2d") {
    return MappingSpec(Rotation2dFamily{need_num(j, "angle", "rotation2d")},
                       domain, into);
  }
  if (family == "constant") {
    return MappingSpec(
        ConstantFamily{point_from_json(need(j, "point", "constant"), "point")},
        domain, into);
  }
  if (family == "berinde") {
    return MappingSpec(
        BerindeFamily{need_num(j, "factor", "berinde"),
                      need_num(j, "residual_weight", "berinde")},
        domain, into);
  }
  if (family == "projected") {
    auto inner = std::make_shared<MappingSpec>(
        mapping_from_json(need(j, "inner", "projected"), domain));
    return MappingSpec(
        ProjectedFamily{std::move(inner),
                        convex_set_from_json(need(j, "set", "projected"))},
        domain, into);
  }
  throw ValidationError("mapping: unknown family '" + family + "'");
}

ojson hybrid_params_to_json(const HybridParams& p) {
  ojson j;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["gamma"] = p.gamma;
  j["delta"] = p.delta;
  j["epsilon"] = p.epsilon;
  if (p.varsigma) j["varsigma"] = *p.varsigma;
  if (p.eta) j["eta"] = *p.eta;
  return j;
}

HybridParams hybrid_params_from_json(const ojson& j) {
  HybridParams p;
  p.alpha = need_num(j, "alpha", "hybrid params");
  p.beta = need_num(j, "beta", "hybrid params");
  p.gamma = need_num(j, "gamma", "hybrid params");
  p.delta = need_num(j, "delta", "hybrid params");
  p.epsilon = opt_num(j, "epsilon", 0.0);
  if (j.contains("varsigma")) p.varsigma = j.at("varsigma").get<double>();
  if (j.contains("eta")) p.eta = j.at("eta").get<double>();
  for (double v : {p.alpha, p.beta, p.gamma, p.delta, p.epsilon}) {
    if (!std::isfinite(v)) {
      throw ValidationError("hybrid params: coefficients must be finite");
    }
  }
  return p;
}

namespace {

ojson steps_to_json(const StepSequence& s) {
  ojson j;
  switch (s.kind()) {
    case StepKind::Constant:
      j["kind"] = "constant";
      j["alpha"] = s.param_a();
      break;
    case StepKind::Periodic:
      j["kind"] = "periodic";
      j["a"] = s.param_a();
      j["b"] = s.param_b();
      break;
    case StepKind::HarmonicFloor:
      j["kind"] = "harmonic";
      j["a"] = s.param_a();
      j["b"] = s.param_b();
      j["floor"] = s.param_floor();
      break;
  }
  return j;
}

StepSequence steps_from_json(const ojson& j) {
  const std::string kind = need_str(j, "kind", "step sequence");
  if (kind == "constant") {
    return StepSequence::constant(need_num(j, "alpha", "step sequence"));
  }
  if (kind == "periodic") {
    return StepSequence::periodic(need_num(j, "a", "step sequence"),
                                  need_num(j, "b", "step sequence"));
  }
  if (kind == "harmonic") {
    return StepSequence::harmonic_floor(need_num(j, "a", "step sequence"),
                                        need_num(j, "b", "step sequence"),
                                        opt_num(j, "floor", 0.0));
  }
  throw ValidationError("step sequence: unknown kind '" + kind + "'");
}

const std::vector<std::string> kKnownChecks = {
    "further-hybrid", "normally-hybrid", "widely-hybrid", "quasi-nonexpansive",
    "berinde-quasi-contractive"};

}  // namespace

// ---------------------------------------------------------------------------
// Scenario <-> JSON

Scenario scenario_from_json(const ojson& j) {
  const DomainSpec placeholder = DomainSpec::box(Point({0.0}), Point({1.0}));
  Scenario sc{need_str(j, "name", "scenario"),
              0,
              Tol{},
              placeholder,
              GridSampler{41},
              MappingSpec::identity(placeholder),
              MappingSpec::identity(placeholder),
              {},
              {},
              {},
              {},
              {},
              {},
              {},
              DiagnosticsConfig{},
              {}};
  if (sc.name.empty()) throw ValidationError("scenario: name must be nonempty");
  // Seeds are mandatory so every sampled verdict is reproducible.
  sc.seed = static_cast<std::uint64_t>(need_num(j, "seed", "scenario"));

  if (j.contains("tolerances")) {
    sc.tol.atol = opt_num(j.at("tolerances"), "atol", 1e-9);
    sc.tol.rtol = opt_num(j.at("tolerances"), "rtol", 1e-9);
  }

  auto [domain, sampler] = domain_from_json(need(j, "domain", "scenario"));
  sc.domain = std::move(domain);
  sc.sampler = sampler;

  const ojson& maps = need(j, "mappings", "scenario");
  try {
    sc.s = mapping_from_json(need(maps, "S", "mappings"), sc.domain);
    sc.t = mapping_from_json(need(maps, "T", "mappings"), sc.domain);
  } catch (const DimensionError& e) {
    throw ValidationError(std::string("mappings: domain mismatch: ") + e.what());
  }

  if (j.contains("hybrid")) {
    const ojson& h = j.at("hybrid");
    HybridConfig cfg;
    cfg.params = hybrid_params_from_json(need(h, "params", "hybrid"));
    const ojson& checks = need(h, "checks", "hybrid");
    if (!checks.is_array()) {
      throw ValidationError("hybrid: 'checks' must be an array of names");
    }
    for (const auto& c : checks) {
      const std::string name = c.get<std::string>();
      if (std::find(kKnownChecks.begin(), kKnownChecks.end(), name) ==
          kKnownChecks.end()) {
        throw ValidationError("hybrid: unknown check '" + name + "'");
      }
      cfg.checks.push_back(name);
    }
    if (h.contains("variants")) {
      for (const auto& v : h.at("variants")) {
        cfg.variants.push_back(
            HybridVariant{need_str(v, "label", "hybrid variant"),
                          hybrid_params_from_json(need(v, "params", "hybrid variant"))});
      }
    }
    if (h.contains("berinde")) {
      cfg.berinde_certificate = {
          need_num(h.at("berinde"), "factor", "hybrid berinde"),
          need_num(h.at("berinde"), "residual_weight", "hybrid berinde")};
    }
    sc.hybrid = std::move(cfg);
  }

  if (j.contains("fixed_points")) {
    sc.fixed_points = points_from_json(j.at("fixed_points"), "fixed_points");
  }

  if (j.contains("cap")) {
    const ojson& c = j.at("cap");
    const ojson& cand = need(c, "candidates", "cap");
    CapConfig cfg{
        CandidateGrid{point_from_json(need(cand, "lower", "cap candidates"), "lower"),
                      point_from_json(need(cand, "upper", "cap candidates"), "upper"),
                      need_count(cand, "count", "cap candidates")},
        0};
    cfg.convexity_trials = c.contains("convexity_trials")
                               ? need_count(c, "convexity_trials", "cap")
                               : 1000;
    sc.cap = std::move(cfg);
  }

  if (j.contains("orbit")) {
    const ojson& o = j.at("orbit");
    sc.orbit = OrbitConfig{point_from_json(need(o, "start", "orbit"), "start"),
                           need_count(o, "horizon", "orbit"),
                           opt_num(o, "bound", 0.0)};
  }

  if (j.contains("x0")) sc.x0 = point_from_json(j.at("x0"), "x0");

  if (j.contains("schemes")) {
    std::vector<std::string> labels;
    for (const auto& sj : j.at("schemes")) {
      SchemeRequest req;
      const std::string kind = need_str(sj, "kind", "scheme");
      const auto parsed = scheme_kind_from_string(kind);
      if (!parsed) throw ValidationError("scheme: unknown kind '" + kind + "'");
      req.kind = *parsed;
      req.steps = steps_from_json(need(sj, "steps", "scheme"));
      if (sj.contains("beta_steps")) {
        req.beta_steps = steps_from_json(sj.at("beta_steps"));
      }
      if (req.kind == SchemeKind::Ishikawa && !req.beta_steps) {
        throw ValidationError("scheme: ishikawa needs 'beta_steps'");
      }
      if (sj.contains("stop")) {
        const ojson& st = sj.at("stop");
        req.stop.tol = opt_num(st, "tol", 1e-9);
        req.stop.max_iters = st.contains("max_iters")
                                 ? need_count(st, "max_iters", "stop")
                                 : 10000;
        req.stop.divergence_bound = opt_num(st, "divergence_bound", 0.0);
      }
      req.label = kind;
      std::size_t dup = 0;
      for (const std::string& l : labels) {
        if (l.rfind(kind, 0) == 0) ++dup;
      }
      if (dup > 0) req.label = kind + "#" + std::to_string(dup + 1);
      labels.push_back(req.label);
      sc.schemes.push_back(std::move(req));
    }
  }

  if (j.contains("probes")) {
    const ojson& p = j.at("probes");
    if (p.contains("z_ref")) sc.probes.z_ref = point_from_json(p.at("z_ref"), "z_ref");
    if (p.contains("cap_set")) {
      sc.probes.cap_set = convex_set_from_json(p.at("cap_set"));
    }
    if (p.contains("bridge_z")) {
      sc.probes.bridge_z = points_from_json(p.at("bridge_z"), "bridge_z");
    }
  }

  if (j.contains("diagnostics")) {
    const ojson& d = j.at("diagnostics");
    sc.diag.fejer_tol = opt_num(d, "fejer_tol", sc.diag.fejer_tol);
    sc.diag.energy_tol = opt_num(d, "energy_tol", sc.diag.energy_tol);
    sc.diag.residual_tol = opt_num(d, "residual_tol", sc.diag.residual_tol);
    if (d.contains("window")) sc.diag.window = need_count(d, "window", "diagnostics");
    sc.diag.proj_tol = opt_num(d, "proj_tol", sc.diag.proj_tol);
    sc.diag.proj_limit_tol = opt_num(d, "proj_limit_tol", sc.diag.proj_limit_tol);
  }

  if (j.contains("expected")) {
    const ojson& e = j.at("expected");
    if (!e.is_object()) throw ValidationError("expected: must be an object");
    for (const auto& [key, val] : e.items()) {
      if (!val.is_string()) {
        throw ValidationError("expected: values must be strings");
      }
      sc.expected.emplace_back(key, val.get<std::string>());
    }
  }

  // Cross-field invariants.
  const std::size_t d = sc.domain.dim();
  auto check_dim = [&](const Point& p, const char* what) {
    if (p.dim() != d) {
      throw ValidationError(std::string(what) + ": dimension " +
                            std::to_string(p.dim()) + " does not match domain dimension " +
                            std::to_string(d));
    }
  };
  for (const Point& p : sc.fixed_points) check_dim(p, "fixed_points");
  if (sc.x0) check_dim(*sc.x0, "x0");
  if (sc.probes.z_ref) check_dim(*sc.probes.z_ref, "probes.z_ref");
  if (sc.probes.cap_set && sc.probes.cap_set->dim() != d) {
    throw ValidationError("probes.cap_set: dimension mismatch");
  }
  for (const Point& p : sc.probes.bridge_z) check_dim(p, "probes.bridge_z");
  if (sc.cap) {
    check_dim(sc.cap->candidates.lower, "cap.candidates.lower");
    check_dim(sc.cap->candidates.upper, "cap.candidates.upper");
    if (sc.cap->candidates.count < 2) {
      throw ValidationError("cap.candidates: count must be >= 2");
    }
  }
  if (sc.orbit) {
    check_dim(sc.orbit->start, "orbit.start");
    if (!sc.domain.contains(sc.orbit->start, sc.tol)) {
      throw ValidationError("orbit.start lies outside the domain");
    }
  }
  if (!sc.schemes.empty()) {
    if (!sc.x0) throw ValidationError("schemes present but 'x0' is missing");
    if (!sc.domain.contains(*sc.x0, sc.tol)) {
      throw ValidationError("x0 lies outside the domain");
    }
  }
  if (!sc.probes.bridge_z.empty() && !sc.domain.as_convex_set()) {
    throw ValidationError(
        "probes.bridge_z requires a projectable (non-finite) domain");
  }
  if (sc.hybrid) {
    for (const std::string& c : sc.hybrid->checks) {
      if (c == "widely-hybrid" &&
          (!sc.hybrid->params.varsigma || !sc.hybrid->params.eta)) {
        throw ValidationError(
            "hybrid: widely-hybrid check needs varsigma and eta");
      }
      if (c == "quasi-nonexpansive" && sc.fixed_points.empty()) {
        throw ValidationError(
            "hybrid: quasi-nonexpansive check needs fixed_points");
      }
      if (c == "berinde-quasi-contractive" && !sc.hybrid->berinde_certificate) {
        for (const MappingSpec* m : {&sc.s, &sc.t}) {
          if (!std::holds_alternative<BerindeFamily>(m->family())) {
            throw ValidationError(
                "hybrid: berinde check needs a 'berinde' certificate or "
                "berinde-family mappings");
          }
        }
      }
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open scenario file " + path.string());
  }
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("scenario " + path.string() + ": " + e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError("scenario " + path.string() + ": " + e.what());
  }
}

ojson scenario_to_json(const Scenario& sc) {
  ojson j;
  j["name"] = sc.name;
  j["seed"] = sc.seed;
  j["tolerances"] = ojson{{"atol", sc.tol.atol}, {"rtol", sc.tol.rtol}};
  j["domain"] = domain_to_json(sc.domain, sc.sampler);
  j["mappings"] = ojson{{"S", mapping_to_json(sc.s)}, {"T", mapping_to_json(sc.t)}};
  if (sc.hybrid) {
    ojson h;
    h["params"] = hybrid_params_to_json(sc.hybrid->params);
    h["checks"] = sc.hybrid->checks;
    if (!sc.hybrid->variants.empty()) {
      ojson vs = ojson::array();
      for (const HybridVariant& v : sc.hybrid->variants) {
        vs.push_back(ojson{{"label", v.label},
                           {"params", hybrid_params_to_json(v.params)}});
      }
      h["variants"] = vs;
    }
    if (sc.hybrid->berinde_certificate) {
      h["berinde"] = ojson{{"factor", sc.hybrid->berinde_certificate->first},
                           {"residual_weight", sc.hybrid->berinde_certificate->second}};
    }
    j["hybrid"] = h;
  }
  if (!sc.fixed_points.empty()) {
    ojson pts = ojson::array();
    for (const Point& p : sc.fixed_points) pts.push_back(point_to_json(p));
    j["fixed_points"] = pts;
  }
  if (sc.cap) {
    j["cap"] = ojson{{"candidates",
                      ojson{{"lower", point_to_json(sc.cap->candidates.lower)},
                            {"upper", point_to_json(sc.cap->candidates.upper)},
                            {"count", sc.cap->candidates.count}}},
                     {"convexity_trials", sc.cap->convexity_trials}};
  }
  if (sc.orbit) {
    j["orbit"] = ojson{{"start", point_to_json(sc.orbit->start)},
                       {"horizon", sc.orbit->horizon},
                       {"bound", sc.orbit->bound}};
  }
  if (sc.x0) j["x0"] = point_to_json(*sc.x0);
  if (!sc.schemes.empty()) {
    ojson arr = ojson::array();
    for (const SchemeRequest& r : sc.schemes) {
      ojson sj;
      sj["kind"] = to_string(r.kind);
      sj["steps"] = steps_to_json(r.steps);
      if (r.beta_steps) sj["beta_steps"] = steps_to_json(*r.beta_steps);
      sj["stop"] = ojson{{"tol", r.stop.tol},
                         {"max_iters", r.stop.max_iters},
                         {"divergence_bound", r.stop.divergence_bound}};
      arr.push_back(sj);
    }
    j["schemes"] = arr;
  }
  {
    ojson p;
    if (sc.probes.z_ref) p["z_ref"] = point_to_json(*sc.probes.z_ref);
    if (sc.probes.cap_set) p["cap_set"] = convex_set_to_json(*sc.probes.cap_set);
    if (!sc.probes.bridge_z.empty()) {
      ojson pts = ojson::array();
      for (const Point& z : sc.probes.bridge_z) pts.push_back(point_to_json(z));
      p["bridge_z"] = pts;
    }
    if (!p.empty()) j["probes"] = p;
  }
  j["diagnostics"] = ojson{{"fejer_tol", sc.diag.fejer_tol},
                           {"energy_tol", sc.diag.energy_tol},
                           {"residual_tol", sc.diag.residual_tol},
                           {"window", sc.diag.window},
                           {"proj_tol", sc.diag.proj_tol},
                           {"proj_limit_tol", sc.diag.proj_limit_tol}};
  if (!sc.expected.empty()) {
    ojson e;
    for (const auto& [k, v] : sc.expected) e[k] = v;
    j["expected"] = e;
  }
  return j;
}

// ---------------------------------------------------------------------------
// run_scenario

namespace {

template <class F>
auto phase(const char* name, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError("[" + std::string(name) + "] " + e.what());
  } catch (const DomainError& e) {
    throw DomainError("[" + std::string(name) + "] " + e.what());
  } catch (const Error& e) {
    throw Error("[" + std::string(name) + "] " + e.what());
  }
}

bool is_mann_type(SchemeKind k) {
  return k == SchemeKind::Mann || k == SchemeKind::PicardMann ||
         k == SchemeKind::TwoMapPicardMann;
}

ClassCheckReport run_named_check(const std::string& name, const Scenario& sc,
                                 const MappingSpec& m, const HybridParams& p,
                                 std::span<const PointPair> pairs,
                                 std::span<const Point> sample) {
  if (name == "further-hybrid") return check_further_hybrid(m, p, pairs, sc.tol);
  if (name == "normally-hybrid") return check_normally_hybrid(m, p, pairs, sc.tol);
  if (name == "widely-hybrid") return check_widely_hybrid(m, p, pairs, sc.tol);
  if (name == "quasi-nonexpansive") {
    return check_quasi_nonexpansive(m, sc.fixed_points, sample, sc.tol);
  }
  if (name == "berinde-quasi-contractive") {
    double a = 0.0, L = 0.0;
    if (sc.hybrid->berinde_certificate) {
      a = sc.hybrid->berinde_certificate->first;
      L = sc.hybrid->berinde_certificate->second;
    } else {
      const auto* fam = std::get_if<BerindeFamily>(&m.family());
      if (!fam) {
        throw ValidationError(
            "berinde check: no certificate for a non-berinde mapping");
      }
      a = fam->factor;
      L = fam->residual_weight;
    }
    return check_berinde_quasi_contractive(m, a, L, pairs, sc.tol);
  }
  throw ValidationError("unknown class check '" + name + "'");
}

}  // namespace

RunBundle run_scenario(const Scenario& sc) {
  RunBundle bundle{sc, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, 0};

  // Domain sample; for mappings declared C->C this also exercises the
  // image-stays-inside invariant at every sampled point.
  bundle.domain_sample = phase("sample", [&] {
    std::vector<Point> sample = sc.domain.sample(sc.sampler, sc.seed);
    for (const Point& x : sample) {
      sc.s.eval(x, sc.tol);
      sc.t.eval(x, sc.tol);
    }
    return sample;
  });
  const std::vector<Point>& sample = bundle.domain_sample;

  if (sc.hybrid) {
    phase("class-checks", [&] {
      const std::vector<PointPair> pairs = all_ordered_pairs(sample);
      const bool same = sc.s == sc.t;
      for (const std::string& name : sc.hybrid->checks) {
        ClassCheckReport rs = run_named_check(name, sc, sc.s, sc.hybrid->params,
                                              pairs, sample);
        ClassCheckReport rt = same ? rs
                                   : run_named_check(name, sc, sc.t,
                                                     sc.hybrid->params, pairs,
                                                     sample);
        bundle.class_checks.emplace_back("class/" + name + "/S", std::move(rs));
        bundle.class_checks.emplace_back("class/" + name + "/T", std::move(rt));
      }
      for (const HybridVariant& v : sc.hybrid->variants) {
        ClassCheckReport rs =
            check_further_hybrid(sc.s, v.params, pairs, sc.tol);
        ClassCheckReport rt =
            same ? rs : check_further_hybrid(sc.t, v.params, pairs, sc.tol);
        bundle.class_checks.emplace_back(
            "class/further-hybrid@" + v.label + "/S", std::move(rs));
        bundle.class_checks.emplace_back(
            "class/further-hybrid@" + v.label + "/T", std::move(rt));
      }
      return 0;
    });
    phase("theorem-conditions", [&] {
      bundle.condition_checks.emplace_back(
          "theorem_conditions", check_theorem_conditions(sc.hybrid->params));
      for (const HybridVariant& v : sc.hybrid->variants) {
        bundle.condition_checks.emplace_back("theorem_conditions@" + v.label,
                                             check_theorem_conditions(v.params));
      }
      return 0;
    });
  }

  if (sc.cap) {
    phase("cap-estimate", [&] {
      const std::vector<Point> candidates =
          DomainSpec::box(sc.cap->candidates.lower, sc.cap->candidates.upper)
              .sample(GridSampler{sc.cap->candidates.count}, sc.seed);
      bundle.cap = estimate_cap_region(sc.s, sc.t, sample, candidates, sc.tol);
      return 0;
    });
    if (!bundle.cap->members.empty() && sc.cap->convexity_trials > 0) {
      phase("cap-convexity", [&] {
        MembershipPredicate pred = [&](const Point& z) {
          return is_common_attractive(sc.s, sc.t, z, sample, sc.tol).attractive;
        };
        bundle.cap_convexity = check_convexity_of_membership(
            pred, bundle.cap->members, sc.cap->convexity_trials, sc.seed);
        return 0;
      });
    }
  }

  if (!sc.fixed_points.empty()) {
    phase("equivalence", [&] {
      bundle.equivalence = check_cap_fixedpoint_equivalence(
          sc.s, sc.t, sample, sc.fixed_points, sc.tol);
      return 0;
    });
  }

  if (sc.orbit) {
    phase("orbit", [&] {
      const double bound = sc.orbit->bound > 0.0
                               ? sc.orbit->bound
                               : 1e6 * (1.0 + norm(sc.orbit->start));
      bundle.orbit = orbit_bounded(sc.s, sc.t, sc.orbit->start,
                                   sc.orbit->horizon, bound, sc.tol);
      return 0;
    });
  }

  for (const SchemeRequest& req : sc.schemes) {
    phase("schemes", [&] {
      SchemeRun run;
      run.request = req;
      Probes probes{sc.probes.z_ref, sc.probes.cap_set};
      std::optional<MappingSpec> s_arg;
      if (req.kind == SchemeKind::TwoMapPicardMann) s_arg = sc.s;
      run.trace = run_scheme(req.kind, s_arg, sc.t, *sc.x0, req.steps,
                             req.beta_steps, req.stop, probes, sc.tol);
      if (sc.probes.z_ref) {
        run.fejer = fejer_check(run.trace, *sc.probes.z_ref, sc.diag.fejer_tol);
        if (is_mann_type(req.kind)) {
          run.energy = energy_inequality_check(run.trace, *sc.probes.z_ref,
                                               sc.diag.energy_tol);
        }
      }
      if (run.trace.length() >= sc.diag.window) {
        run.residual_limit = residual_limit_check(
            run.trace, sc.diag.residual_tol, sc.diag.window);
      }
      if (sc.probes.cap_set) {
        run.proj_seq = projection_sequence_check(
            run.trace, sc.diag.proj_tol, sc.diag.window, sc.diag.proj_limit_tol);
      }
      bundle.runs.push_back(std::move(run));
      return 0;
    });
  }

  // Comparison rows are derived from the stored traces, one per scheme run.
  for (const SchemeRun& run : bundle.runs) {
    ComparisonRow row;
    row.scenario = sc.name;
    row.kind = run.request.kind;
    row.iterations_to_tolerance =
        iterations_to_tolerance(run.trace, run.request.stop.tol);
    row.final_residual = run.trace.residuals_t.back();
    if (!run.trace.residuals_s.empty()) {
      row.final_residual =
          std::max(row.final_residual, run.trace.residuals_s.back());
    }
    if (sc.probes.z_ref) {
      row.final_dist = dist(run.trace.iterates.back(), *sc.probes.z_ref);
    }
    row.stop_reason = run.trace.stop_reason;
    bundle.comparison.push_back(std::move(row));
  }

  for (const Point& z : sc.probes.bridge_z) {
    phase("bridge", [&] {
      BridgeResult res{z, {}, false, {}};
      const AttractiveCheck membership =
          is_common_attractive(sc.s, sc.t, z, sample, sc.tol);
      if (!membership.attractive) {
        res.ok = false;
        res.error = "z = " + to_string(z) +
                    " is not attractive on the domain sample (worst witness " +
                    to_string(membership.worst_witness) + ")";
      } else {
        try {
          res.fixed_point = cap_fixed_point_bridge(
              sc.s, sc.t, z, *sc.domain.as_convex_set(), sc.tol);
          res.ok = true;
        } catch (const Error& e) {
          res.ok = false;
          res.error = e.what();
        }
      }
      bundle.bridges.push_back(std::move(res));
      return 0;
    });
  }

  // -------------------------------------------------------------------------
  // Verdicts

  auto expected_for = [&](const std::string& name) -> std::optional<std::string> {
    for (const auto& [k, v] : sc.expected) {
      if (k == name) return v;
    }
    return std::nullopt;
  };
  auto add_verdict = [&](const std::string& name, const std::string& value) {
    bundle.verdicts.push_back(ScenarioVerdict{name, value, expected_for(name)});
  };

  for (const auto& [key, report] : bundle.class_checks) {
    add_verdict(key, to_string(report.verdict));
  }
  for (const auto& [key, cond] : bundle.condition_checks) {
    add_verdict(key, cond.ok ? "pass" : "fail");
  }
  if (bundle.cap) {
    add_verdict("cap/nonempty", bundle.cap->members.empty() ? "false" : "true");
  }
  if (bundle.cap_convexity) {
    add_verdict("cap/convexity", bundle.cap_convexity->passed() ? "pass" : "fail");
  }
  if (bundle.equivalence) {
    add_verdict("equivalence", bundle.equivalence->passed() ? "pass" : "fail");
  }
  if (bundle.orbit) {
    add_verdict("orbit", to_string(bundle.orbit->verdict));
  }
  for (const SchemeRun& run : bundle.runs) {
    const std::string base = "scheme/" + run.request.label;
    add_verdict(base + "/stop", to_string(run.trace.stop_reason));
    if (run.fejer) add_verdict(base + "/fejer", run.fejer->ok ? "pass" : "fail");
    if (run.energy) {
      add_verdict(base + "/energy", run.energy->ok ? "pass" : "fail");
    }
    if (run.residual_limit) {
      add_verdict(base + "/residual_limit", *run.residual_limit ? "pass" : "fail");
    }
    if (run.proj_seq) {
      add_verdict(base + "/projection_sequence",
                  run.proj_seq->ok() ? "pass" : "fail");
    }
  }
  if (!bundle.bridges.empty()) {
    const bool all_ok = std::all_of(bundle.bridges.begin(), bundle.bridges.end(),
                                    [](const BridgeResult& b) { return b.ok; });
    add_verdict("bridge", all_ok ? "pass" : "fail");
  }

  // Expected keys that matched nothing above are scored as failures too,
  // so a typo in a scenario file cannot silently pass.
  for (const auto& [key, value] : sc.expected) {
    const bool known = std::any_of(
        bundle.verdicts.begin(), bundle.verdicts.end(),
        [&](const ScenarioVerdict& v) { return v.name == key; });
    if (!known) {
      bundle.verdicts.push_back(ScenarioVerdict{key, "missing", value});
    }
  }

  bundle.failures = static_cast<std::size_t>(
      std::count_if(bundle.verdicts.begin(), bundle.verdicts.end(),
                    [](const ScenarioVerdict& v) { return !v.pass(); }));
  return bundle;
}

}  // namespace capkit
