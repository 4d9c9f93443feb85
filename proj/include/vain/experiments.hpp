#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vain/model.hpp"
#include "vain/trainer.hpp"

#include "json.hpp"

namespace vain {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Architecture presets per task. Hidden sizes follow the reference widths at
// scale = 1; desk runs shrink them uniformly.
ModelSpec balls_spec(Arch arch, uint64_t seed, int hidden = 64, int enc_out = 32);
ModelSpec chess_spec(Arch arch, uint64_t seed, int width = 64);
ModelSpec soccer_spec(Arch arch, uint64_t seed, int hidden = 256, int enc_out = 128);

size_t mlp_macs(int in, const std::vector<int>& hidden, int out);

// Pairwise-net hidden width for the interaction network such that its total
// multiply-adds per frame land within 10% of the attention model's budget.
int parity_psi_hidden(const ModelSpec& vain, const ModelSpec& in_spec, int n_agents);

struct ExperimentOptions {
  std::string out_dir;  // empty: no files written
  uint64_t seed = 0;
  std::string chess_examples;             // prep-chess output (jsonl)
  std::vector<std::string> soccer_files;  // one CSV per dataset, >= 2
  int epochs = -1;     // override preset default
  int max_train = -1;  // cap on training examples
  int max_test = -1;
  int soccer_hidden = 256;  // reference widths; shrink for desk runs
  int soccer_enc_out = 128;
  bool verbose = false;
};

// Presets: balls-desk, balls-paper, chess-mpp, soccer-loo. Returns the report
// that also lands in <out_dir>/report.json. Missing external data raises
// DataError with acquisition instructions.
nlohmann::json run_experiment(const std::string& preset, const ExperimentOptions& opt);

// Expected accuracy of uniform random piece selection plus a seeded draw.
double rand_baseline_accuracy(const Dataset& data, uint64_t seed);

}  // namespace vain
