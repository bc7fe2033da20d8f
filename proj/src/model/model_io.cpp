#include "model/model_io.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

#include "dataio/csv.hpp"

namespace gs {

namespace {

std::size_t config_size_t(const Checkpoint& c, const std::string& key) {
    return static_cast<std::size_t>(std::stoull(c.config_value(key)));
}

double config_double(const Checkpoint& c, const std::string& key) {
    return std::stod(c.config_value(key));
}

// Overwrites every tensor of `target` from same-named checkpoint entries,
// enforcing shape agreement.
template <typename Tensors>
void restore_tensors(Tensors& target, const Checkpoint& checkpoint) {
    target.for_each_tensor([&](const std::string& name, Matrix& m) {
        const Matrix& stored = checkpoint.tensor(name);
        if (!stored.same_shape(m))
            throw std::runtime_error("checkpoint tensor " + name + " has shape " +
                                     stored.shape_str() + ", expected " + m.shape_str());
        m = stored;
    });
}

template <typename Tensors>
void append_tensors(const Tensors& source, Checkpoint& checkpoint) {
    source.for_each_tensor([&](const std::string& name, const Matrix& m) {
        checkpoint.tensors.emplace_back(name, m);
    });
}

}  // namespace

Checkpoint to_checkpoint(const SlipNetModel& model,
                         std::vector<std::pair<std::string, std::string>> extra_config) {
    Checkpoint checkpoint;
    checkpoint.config.emplace_back("model", "slipnet");
    checkpoint.config.emplace_back("feature_dim", std::to_string(model.config.feature_dim));
    checkpoint.config.emplace_back("n_steps", std::to_string(model.config.n_steps));
    checkpoint.config.emplace_back("decision_dim", std::to_string(model.config.decision_dim));
    checkpoint.config.emplace_back("attention_dim",
                                   std::to_string(model.config.attention_dim));
    checkpoint.config.emplace_back("shared_blocks",
                                   std::to_string(model.config.shared_blocks));
    checkpoint.config.emplace_back("step_blocks", std::to_string(model.config.step_blocks));
    checkpoint.config.emplace_back("relaxation", format_double(model.config.relaxation));
    checkpoint.config.emplace_back("bn_eps", format_double(model.config.bn.eps));
    checkpoint.config.emplace_back("bn_momentum", format_double(model.config.bn.momentum));
    for (auto& kv : extra_config) checkpoint.config.push_back(std::move(kv));

    append_tensors(model.params, checkpoint);
    // Running statistics live under a reserved prefix so they never collide
    // with learnable tensor names.
    model.state.for_each_tensor([&](const std::string& name, const Matrix& m) {
        checkpoint.tensors.emplace_back("stats." + name, m);
    });
    return checkpoint;
}

Checkpoint to_checkpoint(const ShapeNetModel& model,
                         std::vector<std::pair<std::string, std::string>> extra_config) {
    Checkpoint checkpoint;
    checkpoint.config.emplace_back("model", "shapenet");
    std::string widths;
    for (std::size_t w : model.config.widths) {
        if (!widths.empty()) widths += ',';
        widths += std::to_string(w);
    }
    checkpoint.config.emplace_back("widths", widths);
    for (auto& kv : extra_config) checkpoint.config.push_back(std::move(kv));
    append_tensors(model.params, checkpoint);
    return checkpoint;
}

SlipNetModel slipnet_from_checkpoint(const Checkpoint& checkpoint) {
    if (checkpoint.config_value("model") != "slipnet")
        throw std::runtime_error("checkpoint is not a slipnet model");
    SlipNetModel model;
    model.config.feature_dim = config_size_t(checkpoint, "feature_dim");
    model.config.n_steps = config_size_t(checkpoint, "n_steps");
    model.config.decision_dim = config_size_t(checkpoint, "decision_dim");
    model.config.attention_dim = config_size_t(checkpoint, "attention_dim");
    model.config.shared_blocks = config_size_t(checkpoint, "shared_blocks");
    model.config.step_blocks = config_size_t(checkpoint, "step_blocks");
    model.config.relaxation = config_double(checkpoint, "relaxation");
    model.config.bn.eps = config_double(checkpoint, "bn_eps");
    model.config.bn.momentum = config_double(checkpoint, "bn_momentum");
    model.config.validate();

    model.params = SlipNetParams::init(model.config, 0);
    restore_tensors(model.params, checkpoint);
    model.state = SlipNetState::init(model.config);
    model.state.for_each_tensor([&](const std::string& name, Matrix& m) {
        const Matrix& stored = checkpoint.tensor("stats." + name);
        if (!stored.same_shape(m))
            throw std::runtime_error("checkpoint stats tensor " + name + " has shape " +
                                     stored.shape_str() + ", expected " + m.shape_str());
        m = stored;
    });
    return model;
}

ShapeNetModel shapenet_from_checkpoint(const Checkpoint& checkpoint) {
    if (checkpoint.config_value("model") != "shapenet")
        throw std::runtime_error("checkpoint is not a shapenet model");
    ShapeNetModel model;
    model.config.widths.clear();
    std::stringstream widths(checkpoint.config_value("widths"));
    std::string token;
    while (std::getline(widths, token, ','))
        model.config.widths.push_back(static_cast<std::size_t>(std::stoull(token)));
    model.config.validate();

    model.params = ShapeNetParams::init(model.config, 0);
    restore_tensors(model.params, checkpoint);
    return model;
}

void save_slipnet(const std::string& path, const SlipNetModel& model,
                  std::vector<std::pair<std::string, std::string>> extra_config,
                  CheckpointDtype dtype) {
    save_checkpoint(path, to_checkpoint(model, std::move(extra_config)), dtype);
}

void save_shapenet(const std::string& path, const ShapeNetModel& model,
                   std::vector<std::pair<std::string, std::string>> extra_config,
                   CheckpointDtype dtype) {
    save_checkpoint(path, to_checkpoint(model, std::move(extra_config)), dtype);
}

SlipNetModel load_slipnet(const std::string& path) {
    return slipnet_from_checkpoint(load_checkpoint(path));
}

ShapeNetModel load_shapenet(const std::string& path) {
    return shapenet_from_checkpoint(load_checkpoint(path));
}

}  // namespace gs
