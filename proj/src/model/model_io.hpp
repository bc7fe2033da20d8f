#pragma once

#include <string>
#include <vector>

#include "model/checkpoint.hpp"
#include "model/shapenet.hpp"
#include "model/slipnet.hpp"

namespace gs {

struct SlipNetModel {
    SlipNetConfig config;
    SlipNetParams params;
    SlipNetState state;
};

struct ShapeNetModel {
    ShapeNetConfig config;
    ShapeNetParams params;
};

// extra_config entries are carried verbatim (training provenance: seed,
// hyperparameters, data path). Model hyperparameters are always written.
Checkpoint to_checkpoint(const SlipNetModel& model,
                         std::vector<std::pair<std::string, std::string>> extra_config = {});
Checkpoint to_checkpoint(const ShapeNetModel& model,
                         std::vector<std::pair<std::string, std::string>> extra_config = {});

SlipNetModel slipnet_from_checkpoint(const Checkpoint& checkpoint);
ShapeNetModel shapenet_from_checkpoint(const Checkpoint& checkpoint);

void save_slipnet(const std::string& path, const SlipNetModel& model,
                  std::vector<std::pair<std::string, std::string>> extra_config = {},
                  CheckpointDtype dtype = CheckpointDtype::kF64);
void save_shapenet(const std::string& path, const ShapeNetModel& model,
                   std::vector<std::pair<std::string, std::string>> extra_config = {},
                   CheckpointDtype dtype = CheckpointDtype::kF64);
SlipNetModel load_slipnet(const std::string& path);
ShapeNetModel load_shapenet(const std::string& path);

}  // namespace gs
