// Acceptance runner: `flatgrasp_acceptance --criterion N` prints one
// "criterion N: PASS|FAIL ..." line and exits non-zero on FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "flatgrasp/checkpoint.hpp"
#include "flatgrasp/config.hpp"
#include "flatgrasp/decoder.hpp"
#include "flatgrasp/outcome.hpp"
#include "flatgrasp/rng.hpp"
#include "flatgrasp/trainer.hpp"
#include "flatgrasp/world.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "plan_checks.hpp"

namespace fs = std::filesystem;
using namespace flatgrasp;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch(const std::string& name) {
  const char* base = std::getenv("FLATGRASP_ACCEPTANCE_DIR");
  const fs::path p = fs::path(base ? base : fs::temp_directory_path().string()) / ("flatgrasp_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

double perimeter(const Polygon& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) s += norm(poly[(i + 1) % poly.size()] - poly[i]);
  return s;
}

Scene random_scene(std::uint64_t tag, int i) {
  const auto& fams = all_families();
  const Family f = fams[static_cast<std::size_t>(i) % fams.size()];
  const ObjectModel obj = generate_object(f, hash_seed(tag, {static_cast<std::uint64_t>(i), 1}));
  return {obj, sample_pose(obj, hash_seed(tag, {static_cast<std::uint64_t>(i), 2}))};
}

Scene rotated_180(const Scene& s) {
  return {s.object, {1.0 - s.pose.x, 1.0 - s.pose.y, s.pose.theta + std::numbers::pi}};
}

// ---------------------------------------------------------------- geometry

Verdict criterion1() {
  const auto t0 = Clock::now();
  int area_bad = 0, mask_bad = 0, trip_bad = 0, rot_bad = 0;
  double worst_area = 0.0, worst_rot = 0.0;
  Rng rng(0x51);
  for (int i = 0; i < 500; ++i) {
    const Scene s = random_scene(0xC1, i);
    const Polygon posed = s.posed_footprint();
    const double per = perimeter(posed);
    const Observation o = rasterize(s);

    const double raster_area = static_cast<double>(o.mask_count()) * kCellSize * kCellSize;
    const double err = std::abs(raster_area - std::abs(testing::trapezoid_area(posed)));
    worst_area = std::max(worst_area, err / (per * kCellSize));
    area_bad += err > 1.5 * per * kCellSize;

    double top = 0.0;
    bool consistent = true;
    for (std::size_t k = 0; k < o.mask.size(); ++k) {
      consistent = consistent && ((o.mask[k] != 0) == (o.depth[k] > 0.0));
      top = std::max(top, o.depth[k]);
    }
    mask_bad += !consistent || top > s.object.height + 1e-9;

    for (int k = 0; k < 20; ++k) {
      const Vec2 p{rng.uniform(), rng.uniform()};
      const Vec2 q = pixel_to_world(world_to_pixel(p));
      trip_bad += std::max(std::abs(p.x - q.x), std::abs(p.y - q.y)) > 1.0 / 448 + 1e-12;
    }

    const Observation r = rasterize(rotated_180(s));
    const double diff = static_cast<double>(testing::symmetric_difference(testing::rotate_mask_180(o.mask), r.mask));
    worst_rot = std::max(worst_rot, diff / (2.0 * per / kCellSize));
    rot_bad += diff > 2.0 * per / kCellSize;
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = area_bad == 0 && mask_bad == 0 && trip_bad == 0 && rot_bad == 0 && secs < 30.0;
  v.detail = fmt("500 objects, area %d, mask/depth %d, round trip %d, rotation %d failures; "
                 "worst area ratio %.3f, worst rotation ratio %.3f; %.1f s",
                 area_bad, mask_bad, trip_bad, rot_bad, worst_area, worst_rot, secs);
  return v;
}

// ----------------------------------------------------------------- decoder

// Axis 0 from first principles: farthest mask cell along the main pixel's
// row on each side, the raw hit separation, and the highest depth within the
// face window inward from each hit.
struct AxisZeroOracle {
  bool feasible = false;
};

AxisZeroOracle axis_zero_oracle(const Observation& o, Cell px, const DecoderParams& p) {
  AxisZeroOracle out;
  int right = -1, left = -1;
  for (int c = px.col + 1; c < kGridSize; ++c)
    if (o.mask[Observation::index(px.row, c)]) right = c;
  for (int c = px.col - 1; c >= 0; --c)
    if (o.mask[Observation::index(px.row, c)]) left = c;
  if (right < 0 || left < 0) return out;
  // samples fall at quarter-pixel fractions; the farthest ones in the end cells
  const double x_right = right + 0.75, x_left = left + 0.25;
  const double sep = (x_right - x_left) * kCellSize;
  if (sep < p.min_separation || sep > p.max_separation) return out;
  const double reach_right = x_right - (px.col + 0.5), reach_left = (px.col + 0.5) - x_left;
  auto face = [&](double x0, double inward, double reach) {
    const int steps = std::min(2 * p.face_window, static_cast<int>(2.0 * reach));
    double h = 0.0;
    for (int k = 0; k <= steps; ++k) {
      const int c = static_cast<int>(std::floor(x0 + inward * 0.5 * k));
      h = std::max(h, o.depth[Observation::index(px.row, c)]);
    }
    return h;
  };
  out.feasible = face(x_right, -1.0, reach_right) >= p.min_face_height &&
                 face(x_left, 1.0, reach_left) >= p.min_face_height;
  return out;
}

Verdict criterion2() {
  const DecoderParams params;
  DecoderParams only_zero;
  only_zero.axes_deg = {0.0, 0.0, 0.0};
  int decodes = 0, valid = 0, hierarchy_checked = 0, hierarchy_bad = 0, oracle_mismatch = 0;
  int validity_bad = 0, equiv_checked = 0, equiv_bad = 0, totality_bad = 0;
  std::string first_violation;
  double total_ms = 0.0, max_ms = 0.0;
  Rng rng(0x52);

  for (int i = 0; i < 500; ++i) {
    const Scene s = random_scene(0xC2, i);
    const Observation o = rasterize(s);
    const SideMetadata meta = side_metadata(s);
    const Scene rs = rotated_180(s);
    const Observation ro = rasterize(rs);
    const SideMetadata rmeta = side_metadata(rs);

    std::vector<Cell> cells;
    const Cell com = world_to_pixel(s.center_of_mass());
    cells.push_back({com.row / kFeatureStride, com.col / kFeatureStride});
    std::vector<Cell> on;
    for (int r = 0; r < kGridSize; ++r)
      for (int c = 0; c < kGridSize; ++c)
        if (o.mask[Observation::index(r, c)]) on.push_back({r, c});
    for (int k = 0; k < 4; ++k) {
      const Cell c = on[rng.below(on.size())];
      cells.push_back({c.row / kFeatureStride, c.col / kFeatureStride});
    }
    const int any = static_cast<int>(rng.below(kActionCount));
    cells.push_back({any / kFeatureSize, any % kFeatureSize});

    for (const Cell fc : cells) {
      GraspPlan plan;
      try {
        // best of three, so a preempted run does not count as decoder time
        double ms = 1e300;
        for (int rep = 0; rep < 3; ++rep) {
          const auto t0 = Clock::now();
          plan = decode(fc, o.mask, o.depth, &meta, params);
          ms = std::min(ms, seconds_since(t0) * 1e3);
        }
        total_ms += ms;
        max_ms = std::max(max_ms, ms);
      } catch (...) {
        ++totality_bad;
        continue;
      }
      ++decodes;
      valid += plan.valid;
      totality_bad += plan.valid != (plan.failure_reason == FailureReason::kNone);

      const std::string violation = testing::plan_violation(plan, o.mask, params);
      if (!violation.empty()) {
        ++validity_bad;
        if (first_violation.empty()) first_violation = violation;
      }

      const Cell px = plan.main.pixel;
      if (o.mask[Observation::index(px.row, px.col)]) {
        const bool oracle = axis_zero_oracle(o, px, params).feasible;
        const bool zero = decode(fc, o.mask, o.depth, &meta, only_zero).valid;
        oracle_mismatch += oracle != zero;
        if (oracle && zero) {
          ++hierarchy_checked;
          hierarchy_bad += !(plan.valid && plan.axis_deg == 0.0);
        }
      }

      const Cell rpx{kGridSize - 1 - px.row, kGridSize - 1 - px.col};
      const GraspPlan rp = decode_pixel(rpx, ro.mask, ro.depth, &rmeta, params);
      ++equiv_checked;
      bool same = rp.valid == plan.valid && rp.failure_reason == plan.failure_reason;
      if (same && plan.valid) {
        const Vec2 one{1.0, 1.0};
        same = rp.axis_deg == plan.axis_deg &&
               norm(rp.side_a.contact - (one - plan.side_b.contact)) <= 2.0 * kCellSize + 1e-12 &&
               norm(rp.side_b.contact - (one - plan.side_a.contact)) <= 2.0 * kCellSize + 1e-12;
      }
      equiv_bad += !same;
    }
  }

  // The narrow rectangle: 0 deg is too short, the first fallback takes it.
  bool rect_ok = false;
  {
    ObjectModel m;
    m.footprint = {{-0.05, -0.2}, {0.05, -0.2}, {0.05, 0.2}, {-0.05, 0.2}};
    m.bevel.assign(4, 0.0);
    m.height = 0.05;
    const Scene s{m, {0.5, 0.5, 0.0}};
    const Observation o = rasterize(s);
    const SideMetadata meta = side_metadata(s);
    const GraspPlan zero = decode(Cell{28, 28}, o.mask, o.depth, &meta, only_zero);
    const GraspPlan p = decode(Cell{28, 28}, o.mask, o.depth, &meta, params);
    int first = kGridSize, last = -1;
    for (int c = 0; c < kGridSize; ++c)
      if (o.mask[Observation::index(114, c)]) first = std::min(first, c), last = std::max(last, c);
    const double chord = (last - first) * kCellSize / std::cos(60 * kDeg);
    rect_ok = !zero.valid && zero.failure_reason == FailureReason::kTooShort && p.valid && p.axis_deg == 60.0 &&
              std::abs(norm(p.side_a.contact - p.side_b.contact) - chord) <= 2 * kCellSize &&
              testing::plan_violation(p, o.mask, params).empty();
  }

  const double mean_ms = decodes ? total_ms / decodes : 0.0;
  Verdict v;
  v.pass = hierarchy_bad == 0 && validity_bad == 0 && equiv_bad == 0 && totality_bad == 0 && max_ms <= 5.0 &&
           rect_ok && hierarchy_checked > 0;
  v.detail = fmt("%d decodes (%d valid); hierarchy %d/%d bad (oracle vs axis-0 decode differ on %d); "
                 "validity %d bad; equivariance %d/%d bad; totality %d bad; latency mean %.3f ms max %.3f ms; "
                 "rectangle %s",
                 decodes, valid, hierarchy_bad, hierarchy_checked, oracle_mismatch, validity_bad, equiv_bad,
                 equiv_checked, totality_bad, mean_ms, max_ms, rect_ok ? "ok" : "mismatch");
  if (!first_violation.empty()) v.detail += "; first violation: " + first_violation;
  return v;
}

// ----------------------------------------------------------------- outcome

Scene square_scene(double mass, double mu) {
  ObjectModel m;
  m.footprint = {{-0.15, -0.15}, {0.15, -0.15}, {0.15, 0.15}, {-0.15, 0.15}};
  m.bevel.assign(4, 0.0);
  m.height = 0.05;
  m.mass = mass;
  m.friction = mu;
  return {m, {0.5, 0.5, 0.0}};
}

// Antipodal pair 0.3 m apart on a line through the square at angle phi,
// shifted sideways from the centre of mass by `offset`.
GraspPlan line_plan(double phi, double offset, double bevel_a, double bevel_b) {
  const Vec2 dir{std::cos(phi), std::sin(phi)};
  const Vec2 side{-dir.y, dir.x};
  const Vec2 mid = Vec2{0.5, 0.5} + side * offset;
  GraspPlan p;
  p.valid = true;
  p.failure_reason = FailureReason::kNone;
  p.axis_deg = phi / kDeg;
  p.side_a.contact = mid + dir * 0.15;
  p.side_a.inward_normal = dir * -1.0;
  p.side_a.face_height = 0.05;
  p.side_a.face_bevel = bevel_a;
  p.side_b.contact = mid - dir * 0.15;
  p.side_b.inward_normal = dir;
  p.side_b.face_height = 0.05;
  p.side_b.face_bevel = bevel_b;
  return p;
}

Verdict criterion3() {
  Rng rng(0x53);
  int agree = 0, near_boundary = 0, mono_bad = 0;
  const GraspParams gp;
  for (int i = 0; i < 200; ++i) {
    testing::WrenchCase c;
    c.squeeze = gp.squeeze_force;
    c.gravity = gp.gravity;
    c.pad = gp.max_com_offset;
    c.mu = rng.uniform(0.2, 1.0);
    c.mass = rng.uniform(0.3, 4.0);
    c.bevel_a = rng.uniform(-30.0, 30.0) * kDeg;
    c.bevel_b = rng.uniform(-30.0, 30.0) * kDeg;
    c.lateral_offset = rng.uniform(0.0, 0.08);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const GraspPlan plan = line_plan(phi, sign * c.lateral_offset, c.bevel_a, c.bevel_b);
    const GraspOutcome o = evaluate(plan, square_scene(c.mass, c.mu), gp);
    const auto w = testing::wrench_oracle(c);
    const bool same = o.success == (w.lift && w.roll);
    agree += same;
    if (!same) {
      const double weight = c.mass * c.gravity;
      near_boundary += std::abs(o.checks.friction_margin) <= 0.01 * weight ||
                       std::abs(o.checks.com_offset - gp.max_com_offset) <= 0.01 * gp.max_com_offset;
    }

    bool prev = false;
    for (double mu : {0.1, 0.3, 0.5, 0.7, 0.9, 1.2}) {
      const bool ok = evaluate(plan, square_scene(c.mass, mu), gp).success;
      mono_bad += prev && !ok;
      prev = ok;
    }
    prev = true;
    for (double m : {0.2, 0.6, 1.2, 2.0, 3.0, 4.5}) {
      const bool ok = evaluate(plan, square_scene(m, c.mu), gp).success;
      mono_bad += !prev && ok;
      prev = ok;
    }
  }
  Verdict v;
  v.pass = agree >= 198 && mono_bad == 0;
  v.detail = fmt("agreement %d/200 (%d disagreements within 1%% of a check boundary); monotonicity violations %d",
                 agree, near_boundary, mono_bad);
  return v;
}

// ---------------------------------------------------------- gradient check

Verdict criterion4() {
  const auto t0 = Clock::now();
  int params = 0, failures = 0;
  double worst = 0.0;
  for (AcMode mode : {AcMode::kShared, AcMode::kIndependent}) {
    const testing::ReducedInstance inst(mode);
    const testing::GradCheckResult r = testing::gradient_check(inst);
    params += r.parameters;
    failures += r.failures;
    worst = std::max(worst, r.max_relative_error);
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = failures == 0 && params > 0 && secs < 60.0;
  v.detail = fmt("%d parameters (shared and independent heads), %d above 1e-4, max relative error %.2e; %.1f s",
                 params, failures, worst, secs);
  return v;
}

// ------------------------------------------------------------------ bandit

RunConfig bandit_config(std::uint64_t seed) {
  RunConfig c;
  c.seed = seed;
  c.total_episodes = 5000;
  c.trailing_window = 256;
  c.checkpoint_every = 0;
  return c;
}

Verdict criterion5() {
  const auto t0 = Clock::now();
  int converged = 0;
  std::string per_seed;
  for (std::uint64_t seed : {1, 2, 3}) {
    const BanditSource source(100 + seed, Family::kTrainingSquare);
    const RunConfig c = bandit_config(seed);
    TrainResult r = train_on(source, c);
    const auto snap = r.agent->snapshot();
    const RolloutBatch greedy = rollout(source, *snap, 100, hash_seed(seed, {0xE5}), 1, true);
    int wins = 0;
    for (const Transition& t : greedy.transitions) wins += t.reward;
    const double rate = wins / 100.0;
    converged += rate >= 0.9;
    per_seed += fmt(" seed %d: greedy %.2f trailing %.3f;", static_cast<int>(seed), rate,
                    r.metrics.empty() ? 0.0 : r.metrics.back().trailing_success);
  }
  Verdict v;
  v.pass = converged == 3;
  v.detail = fmt("%d/3 seeds converged within 5000 episodes;", converged) + per_seed +
             fmt(" %.0f s", seconds_since(t0));
  return v;
}

// --------------------------------------------------------- end to end run

std::vector<ObjectModel> manifest(const std::string& name) {
  return load_manifest(fs::path(FLATGRASP_DATA_DIR) / "manifests" / (name + ".json"));
}

Verdict criterion6() {
  const fs::path dir = scratch("c6");
  RunConfig c;
  c.output_dir = (dir / "run").string();
  c.eval_every = 0;
  const auto t0 = Clock::now();
  const TrainResult r = train(c);
  const double train_min = seconds_since(t0) / 60.0;
  const auto snap = r.agent->snapshot();

  EvalOptions eo;
  eo.runs = 30;
  eo.seed = 99;
  const EvalReport tr = evaluate_policy(*snap, c.env, manifest("training"), eo);
  const EvalReport bv = evaluate_policy(*snap, c.env, manifest("beveled"), eo);
  const EvalReport ir = evaluate_policy(*snap, c.env, manifest("irregular"), eo);
  write_text_file(dir / "tables.txt", format_table(tr) + format_table(bv) + format_table(ir));

  Verdict v;
  v.pass = train_min <= 60.0 && tr.all_percent >= 85.0 && bv.all_percent >= 75.0 && ir.all_percent >= 70.0;
  v.detail = fmt("%llu episodes in %.1f min; greedy success training %.1f%% (>= 85), beveled %.1f%% (>= 75), "
                 "irregular %.1f%% (>= 70); final trailing %.3f",
                 static_cast<unsigned long long>(r.state.episode), train_min, tr.all_percent, bv.all_percent,
                 ir.all_percent, r.metrics.empty() ? 0.0 : r.metrics.back().trailing_success);
  return v;
}

// ---------------------------------------------------------------- ablation

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + FLATGRASP_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string l; std::getline(in, l);) ++n;
  return n;
}

Verdict criterion7() {
  const fs::path dir = scratch("c7");
  RunConfig base;
  base.total_episodes = 6000;
  base.checkpoint_every = 0;
  base.trailing_window = 500;
  base.output_dir = (dir / "unused").string();
  write_text_file(dir / "ablation.json", to_json(base).dump(2) + "\n");

  int completed = 0, fixed_wins = 0;
  std::string per_seed;
  for (int seed : {1, 2, 3}) {
    const fs::path out = dir / ("seed" + std::to_string(seed));
    const int code = run_cli(fmt("ablate --config \"%s\" --seed %d --out \"%s\"",
                                 (dir / "ablation.json").c_str(), seed, out.c_str()));
    if (code != 0 || !fs::exists(out / "summary.json") || !fs::exists(out / "summary.txt")) {
      per_seed += fmt(" seed %d: exit %d;", seed, code);
      continue;
    }
    const auto summary = nlohmann::json::parse(read_text_file(out / "summary.json"));
    std::map<std::string, double> final;
    bool curves = summary.at("variants").size() == 4;
    for (const auto& v : summary.at("variants")) {
      curves = curves && !v.at("label").get<std::string>().empty() && !v.at("curve").empty() &&
               count_lines(v.at("metrics").get<std::string>()) == v.at("curve").size() + 1;
      final[v.at("key").get<std::string>()] = v.at("final_trailing_success").get<double>();
    }
    if (!curves) {
      per_seed += fmt(" seed %d: incomplete curves;", seed);
      continue;
    }
    ++completed;
    const double fixed = final["fixed-shared"], adaptive = final["adaptive-shared"];
    fixed_wins += fixed >= adaptive;
    per_seed += fmt(" seed %d: fixed %.3f adaptive %.3f;", seed, fixed, adaptive);
  }
  Verdict v;
  v.pass = completed == 3;
  v.detail = fmt("%d/3 grids completed with 4 labeled curves and a summary; soft check (not gating) fixed >= "
                 "adaptive in %d/3 seeds, %s;",
                 completed, fixed_wins, fixed_wins >= 2 ? "holds" : "does not hold") +
             per_seed;
  return v;
}

// ---------------------------------------------------------- reproducibility

Verdict criterion8() {
  const fs::path dir = scratch("c8");
  const std::vector<ObjectModel> objects = manifest("beveled");
  std::map<std::string, std::string> seen;
  int compared = 0, differing = 0;
  auto record = [&](const std::string& key, const std::string& bytes) {
    ++compared;
    auto [it, fresh] = seen.emplace(key, bytes);
    if (!fresh && it->second != bytes) ++differing;
  };

  for (BackboneMode mode : {BackboneMode::kFixed, BackboneMode::kAdaptive}) {
    const std::string tag = mode == BackboneMode::kFixed ? "fixed" : "adaptive";
    for (int workers : {1, 4}) {
      for (int rep = 0; rep < 2; ++rep) {
        RunConfig c;
        c.seed = 8;
        c.total_episodes = 256;
        c.checkpoint_every = 128;
        c.eval_every = 128;
        c.eval_episodes = 32;
        c.trailing_window = 100;
        c.record_episodes = true;
        c.workers = workers;
        c.backbone.mode = mode;
        // identical config means the same output_dir, so every run of a mode
        // writes to one directory
        const fs::path out = dir / tag;
        fs::remove_all(out);
        c.output_dir = out.string();
        const TrainResult r = train(c);
        record(tag + "/metrics", read_text_file(out / "metrics.jsonl"));
        record(tag + fmt("/checkpoint at %d workers", workers), read_text_file(out / "final.fgsp"));
        // across worker counts only the recorded `workers` field may differ
        Checkpoint ck = load_checkpoint(out / "final.fgsp");
        ck.config.workers = 1;
        const auto bytes = encode_checkpoint(*ck.agent, ck.config, ck.state);
        record(tag + "/checkpoint", std::string(bytes.begin(), bytes.end()));

        EvalOptions eo;
        eo.runs = 4;
        eo.seed = 5;
        eo.workers = workers;
        EvalReport rep_a = evaluate_policy(*r.agent->snapshot(), c.env, objects, eo);
        record(tag + "/report", to_json(rep_a).dump() + format_table(rep_a));
      }
    }
  }
  Verdict v;
  v.pass = differing == 0 && compared == 32;
  v.detail = fmt("%d artefacts (metrics, raw and worker-normalised checkpoints, eval report) over 2 backbones x "
                 "{1, 4} workers x 2 repeats; %d differ",
                 compared, differing);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                        criterion5, criterion6, criterion7, criterion8};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else if (a == "--all") {
      for (int k = 1; k <= 8; ++k) which.push_back(k);
    } else {
      std::cerr << "usage: flatgrasp_acceptance --criterion N | --all\n";
      return 2;
    }
  }
  if (which.empty()) {
    std::cerr << "usage: flatgrasp_acceptance --criterion N | --all\n";
    return 2;
  }
  bool all = true;
  for (int k : which) {
    if (k < 1 || k > 8) {
      std::cerr << "no criterion " << k << '\n';
      return 2;
    }
    Verdict v;
    try {
      v = criteria[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::cout << "criterion " << k << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
