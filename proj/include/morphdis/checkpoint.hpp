#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "morphdis/model.hpp"

namespace morphdis {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TrainingState {
  std::size_t epochs_done = 0;
  std::size_t best_epoch = 0;       // 0: the initialized model
  double best_tune_full = -1.0;
  std::vector<std::string> log_lines;  // one per completed epoch
};

// Everything needed to run or resume a model: architecture echo, training
// config echo, vocabularies, normalization table, current parameters with
// Adam state, and the parameters of the selected (best) epoch.
struct Checkpoint {
  std::unique_ptr<JointModel> model;
  KeyValues train_config;
  TrainingState state;
  std::vector<Tensor> best;  // parallel to model->parameters()

  // Copies the selected epoch's parameters into the live model.
  void use_best();
  void snapshot_best();
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in, const std::string& source);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace morphdis
