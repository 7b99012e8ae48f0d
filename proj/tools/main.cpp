#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "commands.hpp"
#include "flatgrasp/error.hpp"

using namespace flatgrasp::cli;

namespace {

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const flatgrasp::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const flatgrasp::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const flatgrasp::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat-object dual-arm grasp simulator, trainer and benchmark harness"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Run the rollout/update loop and write checkpoints and metrics");
  t->add_option("--config", train.config, "Run config JSON")->required()->check(CLI::ExistingFile);
  t->add_option("--seed", train.seed, "Override the config seed (also FLATGRASP_SEED)");
  t->add_option("--out", train.out, "Output directory (overrides output_dir)");
  t->add_option("--workers", train.workers, "Rollout worker threads")->check(CLI::PositiveNumber);
  t->add_option("--resume", train.resume, "Continue from this checkpoint")->check(CLI::ExistingFile);

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Greedy evaluation of a checkpoint on a frozen object set");
  e->add_option("--checkpoint", eval.checkpoint, "Checkpoint (.fgsp)")->required()->check(CLI::ExistingFile);
  e->add_option("--objects", eval.objects, "Object-set manifest JSON")->required()->check(CLI::ExistingFile);
  e->add_option("--runs", eval.runs, "Runs per object")->capture_default_str();
  e->add_option("--seed", eval.seed, "Evaluation seed")->capture_default_str();
  e->add_option("--workers", eval.workers, "Rollout worker threads")->check(CLI::PositiveNumber);
  e->add_option("--out", eval.out, "Report directory (default: next to the checkpoint)");
  e->add_flag("--records", eval.records, "Also write episodes.jsonl");

  AblateArgs ablate;
  auto* a = app.add_subcommand("ablate", "Run the fixed/adaptive x shared/independent grid");
  a->add_option("--config", ablate.config, "Base run config JSON")->required()->check(CLI::ExistingFile);
  a->add_option("--seed", ablate.seed, "Override the config seed (also FLATGRASP_SEED)");
  a->add_option("--out", ablate.out, "Output directory (overrides output_dir)");
  a->add_option("--workers", ablate.workers, "Rollout worker threads")->check(CLI::PositiveNumber);

  DecodeArgs decode;
  auto* d = app.add_subcommand("decode", "Decode one action on heightmap images");
  d->add_option("--mask", decode.mask, "8-bit mask PNG")->required()->check(CLI::ExistingFile);
  d->add_option("--depth", decode.depth, "16-bit depth PNG (0.1 mm units)")->required()->check(CLI::ExistingFile);
  d->add_option("--cell", decode.cell, "Feature cell R,C or argmax-of-uniform")->capture_default_str();
  d->add_option("--out", decode.out, "Directory for plan.json and overlay.png")->capture_default_str();

  GenObjectsArgs gen;
  auto* g = app.add_subcommand("gen-objects", "Write a frozen object-set manifest plus previews");
  g->add_option("--families", gen.families, "Comma-separated family tags or groups")->required();
  g->add_option("--count", gen.count, "Objects per family")->capture_default_str();
  g->add_option("--seed", gen.seed, "Generation seed")->capture_default_str();
  g->add_option("--out", gen.out, "Output directory")->capture_default_str();

  RenderArgs render;
  auto* r = app.add_subcommand("render", "Render heightmaps and overlays for recorded episodes");
  r->add_option("--record", render.record, "episodes.jsonl")->required()->check(CLI::ExistingFile);
  r->add_option("--out", render.out, "Output directory")->required();
  r->add_option("--episode", render.episode, "Only this episode index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  if (*t) return guarded([&] { return cmd_train(train); });
  if (*e) return guarded([&] { return cmd_eval(eval); });
  if (*a) return guarded([&] { return cmd_ablate(ablate); });
  if (*d) return guarded([&] { return cmd_decode(decode); });
  if (*g) return guarded([&] { return cmd_gen_objects(gen); });
  if (*r) return guarded([&] { return cmd_render(render); });
  return kExitUsage;
}
