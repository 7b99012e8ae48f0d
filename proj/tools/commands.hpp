#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace flatgrasp::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<std::string> resume;
};

struct EvalArgs {
  std::string checkpoint;
  std::string objects;
  int runs = 30;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<std::string> out;
  bool records = false;
};

struct AblateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
};

struct DecodeArgs {
  std::string mask;
  std::string depth;
  std::string cell = "argmax-of-uniform";
  std::string out = ".";
};

struct GenObjectsArgs {
  std::string families;
  int count = 1;
  std::uint64_t seed = 0;
  std::string out = "objects";
};

struct RenderArgs {
  std::string record;
  std::string out;
  std::optional<std::uint64_t> episode;
};

int cmd_train(const TrainArgs& args);
int cmd_eval(const EvalArgs& args);
int cmd_ablate(const AblateArgs& args);
int cmd_decode(const DecodeArgs& args);
int cmd_gen_objects(const GenObjectsArgs& args);
int cmd_render(const RenderArgs& args);

}  // namespace flatgrasp::cli
