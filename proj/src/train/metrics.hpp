#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gs {

enum class Task { kSlip, kShape };

struct EpochMetrics {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;  // joint accuracy for the slip task
    double train_slip_accuracy = 0.0;
    double train_crumple_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double val_slip_accuracy = 0.0;
    double val_crumple_accuracy = 0.0;
};

struct EvalMetrics {
    double loss = 0.0;
    double accuracy = 0.0;  // joint (both heads correct) for slip, top-1 for shape
    double slip_accuracy = 0.0;
    double crumple_accuracy = 0.0;
    // Slip task: true combination x predicted combination, combo = slip*2+crumple.
    std::array<std::array<std::uint64_t, 4>, 4> combo_confusion{};
    std::size_t samples = 0;
};

// epoch,split,loss,... one train and one val row per epoch.
void write_metrics_csv(const std::string& path, const std::vector<EpochMetrics>& history,
                       Task task);

// Fixed-key-order summary ("JSON-like" text with stable formatting).
void write_summary_json(const std::string& path,
                        const std::vector<std::pair<std::string, std::string>>& entries);

std::string json_quote(const std::string& value);

}  // namespace gs
