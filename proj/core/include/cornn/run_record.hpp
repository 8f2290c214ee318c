#pragma once

#include "cornn/optimizers.hpp"

#include <filesystem>
#include <iosfwd>

namespace cornn {

/// Checkpoint CSV: header `fe,best_train_mse,test_mse`, 17 significant digits.
void write_checkpoints_csv(const RunRecord& record, std::ostream& out);
std::vector<Checkpoint> read_checkpoints_csv(std::istream& in);

/// Sidecar JSON with everything else in the record (algorithm,
/// hyperparameters, seed, label, final parameters, status).
std::string run_metadata_json(const RunRecord& record);

/// Writes `<stem>.csv` and `<stem>.json` next to each other.
void save_run(const RunRecord& record, const std::filesystem::path& stem);
RunRecord load_run(const std::filesystem::path& stem);

} // namespace cornn
