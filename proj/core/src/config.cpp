#include "flatgrasp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "flatgrasp/error.hpp"
#include "flatgrasp/rng.hpp"

namespace flatgrasp {

using nlohmann::json;

namespace {

constexpr double kDeg = 3.14159265358979323846 / 180.0;

// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw InvalidArgument(where("") + " must be a JSON object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw InvalidArgument("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw InvalidArgument("expected an integer");
        if constexpr (std::is_unsigned_v<T>)
          if (it->is_number_integer() && !it->is_number_unsigned()) throw InvalidArgument("expected a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw InvalidArgument("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw InvalidArgument("expected a string");
      }
      out = it->template get<T>();
    } catch (const std::exception& e) {
      throw InvalidArgument(where(key) + ": " + e.what());
    }
  }

  // Degrees in the document, radians in memory.
  void read_degrees(const char* key, double& radians) {
    double deg = radians / kDeg;
    read(key, deg);
    radians = deg * kDeg;
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : key.empty() ? path_ : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw InvalidArgument("unknown config key '" + where(it.key()) + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_backbone(const json& j, BackboneConfig& c) {
  ObjectReader r(j, "backbone");
  std::string mode(backbone_mode_name(c.mode));
  r.read("mode", mode);
  c.mode = parse_backbone_mode(mode);
  r.read("channels", c.channels);
  r.read("seed", c.seed);
  r.finish();
}

void read_policy(const json& j, PolicyConfig& c) {
  ObjectReader r(j, "policy");
  std::string mode(ac_mode_name(c.ac_mode));
  r.read("ac_mode", mode);
  c.ac_mode = parse_ac_mode(mode);
  r.read("hidden_channels", c.hidden_channels);
  if (const json* d = r.sub("trunk_dilation")) {
    if (!d->is_array() || d->size() != 2 || !(*d)[0].is_number_integer() || !(*d)[1].is_number_integer())
      throw InvalidArgument("policy.trunk_dilation must be an array of two integers");
    c.trunk_dilation = {(*d)[0].get<int>(), (*d)[1].get<int>()};
    if (c.trunk_dilation[0] < 1 || c.trunk_dilation[1] < 1)
      throw InvalidArgument("policy.trunk_dilation entries must be >= 1");
  }
  r.read("seed", c.seed);
  r.read("actor_head_gain", c.actor_head_gain);
  r.finish();
}

void read_ppo(const json& j, PPOConfig& c) {
  ObjectReader r(j, "ppo");
  r.read("clip_epsilon", c.clip_epsilon);
  r.read("learning_rate", c.learning_rate);
  r.read("entropy_coef", c.entropy_coef);
  r.read("value_coef", c.value_coef);
  r.read("epochs", c.epochs);
  r.read("batch_size", c.batch_size);
  r.read("minibatch_size", c.minibatch_size);
  r.read("max_grad_norm", c.max_grad_norm);
  r.read("adam_beta1", c.adam_beta1);
  r.read("adam_beta2", c.adam_beta2);
  r.read("adam_epsilon", c.adam_epsilon);
  r.read("normalize_advantage", c.normalize_advantage);
  r.finish();
}

void read_grasp(const json& j, GraspParams& c) {
  ObjectReader r(j, "grasp");
  r.read("squeeze_force", c.squeeze_force);
  r.read("gravity", c.gravity);
  r.read("lift_height", c.lift_height);
  r.read_degrees("antipodal_tolerance_deg", c.antipodal_tolerance);
  r.read("max_com_offset", c.max_com_offset);
  r.read("min_face_height", c.min_face_height);
  r.read("contact_noise", c.contact_noise);
  r.read("mc_pass_fraction", c.mc_pass_fraction);
  r.finish();
}

void read_decoder(const json& j, DecoderParams& c) {
  ObjectReader r(j, "decoder");
  r.read("min_separation", c.min_separation);
  r.read("min_face_height", c.min_face_height);
  r.read("max_separation", c.max_separation);
  r.read("refine_offset", c.refine_offset);
  r.read("face_window", c.face_window);
  r.finish();
}

void read_env(const json& j, RunConfig& c) {
  ObjectReader r(j, "env");
  if (const json* pool = r.sub("pool")) c.env.pool = parse_family_list(*pool);
  r.read("mc_trials", c.env.mc_trials);
  if (const json* d = r.sub("decoder")) read_decoder(*d, c.env.decoder);
  if (const json* b = r.sub("bounds")) {
    ObjectReader br(*b, "env.bounds");
    br.read("min_extent", c.env.bounds.min_extent);
    br.read("max_extent", c.env.bounds.max_extent);
    br.read("min_height", c.env.bounds.min_height);
    br.read("max_height", c.env.bounds.max_height);
    br.finish();
  }
  r.finish();
}

json family_list_json(const std::vector<Family>& pool) {
  json a = json::array();
  for (Family f : pool) a.push_back(std::string(family_tag(f)));
  return a;
}

json vec2_json(Vec2 v) { return json::array({v.x, v.y}); }

json side_json(const GraspSide& s) {
  json pts = json::array();
  for (const Vec2& p : s.points) pts.push_back(vec2_json(p));
  return {{"points", pts},
          {"contact", vec2_json(s.contact)},
          {"inward_normal", vec2_json(s.inward_normal)},
          {"face_height", s.face_height},
          {"face_bevel_deg", s.face_bevel / kDeg}};
}

}  // namespace

std::vector<Family> parse_family_list(const json& j) {
  std::vector<std::string> names;
  if (j.is_string()) {
    std::stringstream ss(j.get<std::string>());
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) names.push_back(item);
  } else if (j.is_array()) {
    for (const json& e : j) {
      if (!e.is_string()) throw InvalidArgument("family list entries must be strings");
      names.push_back(e.get<std::string>());
    }
  } else {
    throw InvalidArgument("family list must be a string or an array of strings");
  }
  std::vector<Family> out;
  for (const std::string& n : names) {
    const std::vector<Family>* group = nullptr;
    if (n == "training") group = &training_families();
    else if (n == "beveled") group = &beveled_families();
    else if (n == "irregular") group = &irregular_families();
    else if (n == "household") group = &household_families();
    else if (n == "all") group = &all_families();
    if (group) out.insert(out.end(), group->begin(), group->end());
    else out.push_back(parse_family(n));
  }
  return out;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  ObjectReader r(j, "");
  r.read("seed", c.seed);
  r.read("total_episodes", c.total_episodes);
  r.read("eval_every", c.eval_every);
  r.read("eval_episodes", c.eval_episodes);
  r.read("checkpoint_every", c.checkpoint_every);
  r.read("trailing_window", c.trailing_window);
  r.read("workers", c.workers);
  r.read("record_episodes", c.record_episodes);
  r.read("output_dir", c.output_dir);
  if (const json* e = r.sub("env")) read_env(*e, c);
  if (const json* b = r.sub("backbone")) read_backbone(*b, c.backbone);
  if (const json* p = r.sub("policy")) read_policy(*p, c.policy);
  if (const json* p = r.sub("ppo")) read_ppo(*p, c.ppo);
  if (const json* g = r.sub("grasp")) read_grasp(*g, c.env.grasp);
  r.finish();
  c.policy.feature_channels = c.backbone.channels;
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  if (c.trailing_window < 1) throw InvalidArgument("trailing_window must be >= 1");
  if (c.workers < 1) throw InvalidArgument("workers must be >= 1");
  if (c.eval_every > 0 && c.eval_episodes == 0) throw InvalidArgument("eval_episodes must be >= 1 when eval_every is set");
  if (c.output_dir.empty()) throw InvalidArgument("output_dir must not be empty");
  if (c.backbone.channels < 1) throw InvalidArgument("backbone.channels must be >= 1");
  if (c.policy.hidden_channels < 1) throw InvalidArgument("policy.hidden_channels must be >= 1");
  validate(c.env);
  validate(c.ppo);
}

json to_json(const RunConfig& c) {
  const GraspParams& g = c.env.grasp;
  const DecoderParams& d = c.env.decoder;
  return {
      {"seed", c.seed},
      {"total_episodes", c.total_episodes},
      {"eval_every", c.eval_every},
      {"eval_episodes", c.eval_episodes},
      {"checkpoint_every", c.checkpoint_every},
      {"trailing_window", c.trailing_window},
      {"workers", c.workers},
      {"record_episodes", c.record_episodes},
      {"output_dir", c.output_dir},
      {"env",
       {{"pool", family_list_json(c.env.pool)},
        {"mc_trials", c.env.mc_trials},
        {"decoder",
         {{"min_separation", d.min_separation},
          {"min_face_height", d.min_face_height},
          {"max_separation", d.max_separation},
          {"refine_offset", d.refine_offset},
          {"face_window", d.face_window}}},
        {"bounds",
         {{"min_extent", c.env.bounds.min_extent},
          {"max_extent", c.env.bounds.max_extent},
          {"min_height", c.env.bounds.min_height},
          {"max_height", c.env.bounds.max_height}}}}},
      {"backbone",
       {{"mode", backbone_mode_name(c.backbone.mode)}, {"channels", c.backbone.channels}, {"seed", c.backbone.seed}}},
      {"policy",
       {{"ac_mode", ac_mode_name(c.policy.ac_mode)},
        {"hidden_channels", c.policy.hidden_channels},
        {"trunk_dilation", c.policy.trunk_dilation},
        {"seed", c.policy.seed},
        {"actor_head_gain", c.policy.actor_head_gain}}},
      {"ppo",
       {{"clip_epsilon", c.ppo.clip_epsilon},
        {"learning_rate", c.ppo.learning_rate},
        {"entropy_coef", c.ppo.entropy_coef},
        {"value_coef", c.ppo.value_coef},
        {"epochs", c.ppo.epochs},
        {"batch_size", c.ppo.batch_size},
        {"minibatch_size", c.ppo.minibatch_size},
        {"max_grad_norm", c.ppo.max_grad_norm},
        {"adam_beta1", c.ppo.adam_beta1},
        {"adam_beta2", c.ppo.adam_beta2},
        {"adam_epsilon", c.ppo.adam_epsilon},
        {"normalize_advantage", c.ppo.normalize_advantage}}},
      {"grasp",
       {{"squeeze_force", g.squeeze_force},
        {"gravity", g.gravity},
        {"lift_height", g.lift_height},
        {"antipodal_tolerance_deg", g.antipodal_tolerance / kDeg},
        {"max_com_offset", g.max_com_offset},
        {"min_face_height", g.min_face_height},
        {"contact_noise", g.contact_noise},
        {"mc_pass_fraction", g.mc_pass_fraction}}},
  };
}

RunConfig load_run_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw InvalidArgument("cannot parse config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

BackboneConfig effective_backbone(const RunConfig& c) {
  BackboneConfig b = c.backbone;
  b.seed = hash_seed(c.seed, {0xbbULL, c.backbone.seed});
  return b;
}

PolicyConfig effective_policy(const RunConfig& c) {
  PolicyConfig p = c.policy;
  p.feature_channels = c.backbone.channels;
  p.seed = hash_seed(c.seed, {0x9cULL, c.policy.seed});
  return p;
}

json to_json(const ObjectModel& o, bool with_geometry) {
  json dims = json::object();
  for (const auto& [k, v] : o.dims) dims[k] = v;
  json j = {{"family", family_tag(o.family)}, {"seed", o.seed}, {"dims", dims}};
  if (with_geometry) {
    json fp = json::array();
    for (const Vec2& v : o.footprint) fp.push_back(vec2_json(v));
    json bev = json::array();
    for (double b : o.bevel) bev.push_back(b / kDeg);
    j["footprint"] = fp;
    j["bevel_deg"] = bev;
    j["height"] = o.height;
    j["mass"] = o.mass;
    j["friction"] = o.friction;
    j["color"] = o.color;
  }
  return j;
}

json to_json(const GraspPlan& p) {
  json j = {{"main_point",
             {{"feature_cell", {p.main.feature_cell.row, p.main.feature_cell.col}},
              {"pixel", {p.main.pixel.row, p.main.pixel.col}},
              {"world", vec2_json(p.main.world)}}},
            {"valid", p.valid},
            {"failure_reason", failure_reason_name(p.failure_reason)}};
  if (p.valid) {
    j["axis_deg"] = p.axis_deg;
    j["sideA"] = side_json(p.side_a);
    j["sideB"] = side_json(p.side_b);
  } else {
    j["axis_deg"] = nullptr;
    j["sideA"] = nullptr;
    j["sideB"] = nullptr;
  }
  return j;
}

json to_json(const GraspOutcome& o) {
  const GraspChecks& c = o.checks;
  return {{"evaluated", o.evaluated},
          {"success", o.success},
          {"reward", o.reward},
          {"mc_pass_fraction", o.mc_pass_fraction},
          {"checks",
           {{"antipodal", {{"pass", c.antipodal}, {"angle_deg", c.antipodal_angle / kDeg}}},
            {"friction", {{"pass", c.friction}, {"margin_n", c.friction_margin}}},
            {"torque", {{"pass", c.torque}, {"com_offset_m", c.com_offset}}},
            {"face", {{"pass", c.face}, {"min_face_height_m", c.min_face_height}}}}}};
}

json to_json(const EpisodeRecord& r) {
  return {{"episode", r.episode},
          {"seed", r.seed},
          {"object", to_json(r.object)},
          {"pose", {{"x", r.pose.x}, {"y", r.pose.y}, {"theta", r.pose.theta}}},
          {"action", r.action},
          {"action_cell", {r.main.feature_cell.row, r.main.feature_cell.col}},
          {"plan", to_json(r.plan)},
          {"outcome", to_json(r.outcome)},
          {"reward", r.reward},
          {"duration_ms", r.duration_ms}};
}

json manifest_json(const std::vector<ObjectModel>& objects) {
  json a = json::array();
  for (const ObjectModel& o : objects) a.push_back(to_json(o));
  return a;
}

std::vector<ObjectModel> objects_from_manifest(const json& manifest, const ObjectBounds& bounds) {
  if (!manifest.is_array()) throw InvalidArgument("object manifest must be a JSON array");
  std::vector<ObjectModel> out;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const std::string where = "manifest[" + std::to_string(i) + "]";
    ObjectReader r(manifest[i], where);
    std::string family;
    std::uint64_t seed = 0;
    r.read("family", family);
    r.read("seed", seed);
    const json* dims = r.sub("dims");
    r.finish();
    if (family.empty()) throw InvalidArgument(where + ".family is required");
    ObjectModel o = generate_object(parse_family(family), seed, bounds);
    if (dims) {
      if (!dims->is_object()) throw InvalidArgument(where + ".dims must be an object");
      for (auto it = dims->begin(); it != dims->end(); ++it) {
        auto found = o.dims.find(it.key());
        if (found == o.dims.end() || !it->is_number() ||
            std::abs(found->second - it->get<double>()) > 1e-9 * std::max(1.0, std::abs(found->second)))
          throw InvalidArgument(where + ".dims." + it.key() + " does not match the regenerated object");
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<ObjectModel> load_manifest(const std::filesystem::path& path, const ObjectBounds& bounds) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw InvalidArgument("cannot parse manifest " + path.string() + ": " + e.what());
  }
  return objects_from_manifest(j, bounds);
}

std::vector<ObjectModel> generate_object_set(const std::vector<Family>& families, int count, std::uint64_t seed,
                                             const ObjectBounds& bounds) {
  if (count < 0) throw InvalidArgument("object count must be >= 0");
  std::vector<ObjectModel> out;
  for (std::size_t f = 0; f < families.size(); ++f)
    for (int k = 0; k < count; ++k)
      out.push_back(generate_object(families[f], hash_seed(seed, {static_cast<std::uint64_t>(families[f]),
                                                                  static_cast<std::uint64_t>(k)}),
                                    bounds));
  return out;
}

json metrics_header() {
  return {{"schema", "flatgrasp.metrics"},
          {"version", kMetricsSchemaVersion},
          {"fields",
           {"episode", "update", "batch_success", "trailing_success", "policy_loss", "value_loss", "entropy",
            "clip_fraction", "approx_kl", "grad_norm", "eval_success"}}};
}

json records_header() {
  return {{"schema", "flatgrasp.episode"},
          {"version", kRecordSchemaVersion},
          {"fields", {"episode", "seed", "object", "pose", "action", "action_cell", "plan", "outcome", "reward",
                      "duration_ms"}}};
}

std::string dump_line(const json& j) { return j.dump(); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace flatgrasp
