#pragma once

#include <filesystem>

#include "unlearn/linear.hpp"

namespace unlearn {

/// CSV layout: one point per row, features first, response in the last
/// column. Doubles are printed with 17 significant digits so a write/read
/// round trip is bit-faithful. Weights and ridge strength are not part of
/// the format; pass them when loading.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path,
                         double ridge_lambda = 0.0);

/// Binary snapshot of a PrecomputedModel (dataset included) for harness
/// reuse. The byte layout is an implementation detail; round trips are
/// bit-faithful.
void save_precomputed(const PrecomputedModel& model,
                      const std::filesystem::path& path);
PrecomputedModel load_precomputed(const std::filesystem::path& path);

}  // namespace unlearn
