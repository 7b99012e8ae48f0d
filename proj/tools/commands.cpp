#include "commands.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "flatgrasp/checkpoint.hpp"
#include "flatgrasp/config.hpp"
#include "flatgrasp/error.hpp"
#include "flatgrasp/image_io.hpp"
#include "flatgrasp/trainer.hpp"

namespace flatgrasp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t parse_u64(const std::string& text, const char* what) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidArgument(std::string(what) + " must be a non-negative integer");
  return v;
}

// Seed precedence: config < FLATGRASP_SEED < --seed.
void apply_seed(RunConfig& config, const std::optional<std::uint64_t>& flag) {
  if (const char* env = std::getenv("FLATGRASP_SEED"); env && *env) config.seed = parse_u64(env, "FLATGRASP_SEED");
  if (flag) config.seed = *flag;
}

RunConfig load_config(const std::string& path, const std::optional<std::uint64_t>& seed,
                      const std::optional<std::string>& out, const std::optional<int>& workers) {
  RunConfig config = load_run_config(path);
  apply_seed(config, seed);
  if (out) config.output_dir = *out;
  if (workers) config.workers = *workers;
  validate(config);
  return config;
}

Cell parse_cell(const std::string& text) {
  if (text == "argmax-of-uniform") return {0, 0};  // argmax ties break to the smallest index
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InvalidArgument("--cell must be R,C or argmax-of-uniform");
  const auto r = parse_u64(text.substr(0, comma), "cell row");
  const auto c = parse_u64(text.substr(comma + 1), "cell column");
  if (r >= kFeatureSize || c >= kFeatureSize)
    throw InvalidArgument("--cell must be inside the " + std::to_string(kFeatureSize) + "x" +
                          std::to_string(kFeatureSize) + " action map");
  return {static_cast<int>(r), static_cast<int>(c)};
}

std::string file_id(const fs::path& path) {
  const std::string bytes = read_text_file(path);
  return hex32(crc32_of({reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()}));
}

std::string config_hash(const RunConfig& config) {
  const std::string text = to_json(config).dump();
  return hex32(crc32_of({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}));
}

}  // namespace

int cmd_train(const TrainArgs& args) {
  RunConfig config = load_config(args.config, args.seed, args.out, args.workers);
  fs::create_directories(config.output_dir);
  write_text_file(fs::path(config.output_dir) / "config.input.json", read_text_file(args.config));
  TrainOptions options;
  if (args.resume) options.resume = fs::path(*args.resume);
  options.on_update = [](const UpdateMetrics& m) {
    if (m.update % 50 == 0)
      std::cerr << "episode " << m.episode << "  trailing success " << m.trailing_success << '\n';
  };
  const TrainResult r = train(config, options);
  std::cout << "final checkpoint: " << r.final_checkpoint.string() << '\n'
            << "episodes: " << r.state.episode << "  trailing success: "
            << (r.metrics.empty() ? 0.0 : r.metrics.back().trailing_success) << '\n';
  return kExitOk;
}

int cmd_eval(const EvalArgs& args) {
  if (args.runs < 1) throw InvalidArgument("--runs must be >= 1");
  const Checkpoint ck = load_checkpoint(args.checkpoint);
  const std::vector<ObjectModel> objects = load_manifest(args.objects, ck.config.env.bounds);
  EvalOptions options;
  options.runs = args.runs;
  options.seed = args.seed;
  options.workers = args.workers;
  std::vector<EpisodeRecord> records;
  EvalReport report =
      evaluate_policy(*ck.agent->snapshot(), ck.config.env, objects, options, args.records ? &records : nullptr);
  report.config_hash = config_hash(ck.config);
  report.checkpoint_id = file_id(args.checkpoint);

  const fs::path out = args.out ? fs::path(*args.out)
                                : fs::path(args.checkpoint).parent_path() /
                                      ("eval_" + fs::path(args.objects).stem().string());
  write_text_file(out / "report.json", to_json(report).dump(2) + "\n");
  const std::string table = format_table(report);
  write_text_file(out / "report.txt", table);
  if (args.records) {
    std::ostringstream lines;
    lines << dump_line(records_header()) << '\n';
    for (const EpisodeRecord& r : records) lines << dump_line(to_json(r)) << '\n';
    write_text_file(out / "episodes.jsonl", lines.str());
  }
  std::cout << table;
  return kExitOk;
}

int cmd_ablate(const AblateArgs& args) {
  const RunConfig config = load_config(args.config, args.seed, args.out, args.workers);
  TrainOptions options;
  const AblationResult r = run_ablation(config, options);
  std::cout << format_ablation_table(r);
  return kExitOk;
}

int cmd_decode(const DecodeArgs& args) {
  const Cell cell = parse_cell(args.cell);
  const std::vector<std::uint8_t> mask = mask_from_image(read_png(args.mask));
  const std::vector<double> depth = depth_from_image(read_png(args.depth));
  const GraspPlan plan = decode(cell, mask, depth);
  const json j = to_json(plan);
  write_text_file(fs::path(args.out) / "plan.json", j.dump(2) + "\n");
  write_png(fs::path(args.out) / "overlay.png", render_overlay(mask, depth, plan));
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_gen_objects(const GenObjectsArgs& args) {
  if (args.count < 0) throw InvalidArgument("--count must be >= 0");
  const std::vector<Family> families = parse_family_list(json(args.families));
  const std::vector<ObjectModel> objects = generate_object_set(families, args.count, args.seed);
  const fs::path out = args.out;
  write_text_file(out / "manifest.json", manifest_json(objects).dump(2) + "\n");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    Scene scene{objects[i], Pose2D{0.5, 0.5, 0.0}};
    const Observation obs = rasterize(scene);
    char name[64];
    std::snprintf(name, sizeof name, "%03zu_%s.png", i, std::string(family_tag(objects[i].family)).c_str());
    write_png(out / "previews" / name, color_image(obs));
  }
  std::cout << "wrote " << objects.size() << " objects to " << (out / "manifest.json").string() << '\n';
  return kExitOk;
}

int cmd_render(const RenderArgs& args) {
  std::ifstream in(args.record);
  if (!in) throw InvalidArgument("cannot read " + args.record);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("record file is empty");
  const json header = json::parse(line);
  if (header.value("schema", "") != "flatgrasp.episode")
    throw InvalidArgument("record file does not start with an episode schema header");
  int rendered = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    const std::uint64_t episode = rec.at("episode").get<std::uint64_t>();
    if (args.episode && episode != *args.episode) continue;
    const std::vector<ObjectModel> objs = objects_from_manifest(json::array({rec.at("object")}));
    const json& p = rec.at("pose");
    Scene scene{objs.front(), Pose2D{p.at("x").get<double>(), p.at("y").get<double>(), p.at("theta").get<double>()}};
    const Observation obs = rasterize(scene);
    const std::string stem = std::to_string(episode);
    dump_observation(args.out, stem, obs);
    const SideMetadata sides = side_metadata(scene);
    const GraspPlan plan = decode(main_point(rec.at("action").get<int>()).feature_cell, obs.mask, obs.depth, &sides);
    write_png(fs::path(args.out) / (stem + "_overlay.png"), render_overlay(obs.mask, obs.depth, plan));
    ++rendered;
  }
  std::cout << "rendered " << rendered << " episodes into " << args.out << '\n';
  return kExitOk;
}

}  // namespace flatgrasp::cli
