#pragma once

// Internal JSON (de)serialization for config structs, shared by checkpoint
// and experiment-config code. Not installed.

#include <json.hpp>

#include "psa/nets.hpp"
#include "psa/phantom.hpp"
#include "psa/training.hpp"

namespace psa::phantom {

// Defined in phantom.cpp.
nlohmann::json phantom_config_json(const PhantomConfig& cfg);
PhantomConfig phantom_config_from_json(const nlohmann::json& j);

}  // namespace psa::phantom

namespace psa::train {

inline nlohmann::json net_config_json(const nets::NetConfig& c) {
    return {{"depth", c.depth},
            {"base_channels", c.base_channels},
            {"kernel", c.kernel},
            {"num_styles", c.num_styles},
            {"perceptual_layers", c.perceptual_layers},
            {"perceptual_channels", c.perceptual_channels},
            {"classifier_branch_channels", c.classifier_branch_channels},
            {"classifier_blocks", c.classifier_blocks}};
}

inline nets::NetConfig net_config_from_json(const nlohmann::json& j) {
    nets::NetConfig c;
    c.depth = j.value("depth", c.depth);
    c.base_channels = j.value("base_channels", c.base_channels);
    c.kernel = j.value("kernel", c.kernel);
    c.num_styles = j.value("num_styles", c.num_styles);
    c.perceptual_layers = j.value("perceptual_layers", c.perceptual_layers);
    c.perceptual_channels = j.value("perceptual_channels", c.perceptual_channels);
    c.classifier_branch_channels =
        j.value("classifier_branch_channels", c.classifier_branch_channels);
    c.classifier_blocks = j.value("classifier_blocks", c.classifier_blocks);
    c.validate();
    return c;
}

inline nlohmann::json train_config_json(const TrainConfig& c) {
    return {{"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"learning_rate", c.learning_rate},
            {"seed", c.seed},
            {"loss",
             {{"lambda_shape", c.loss.lambda_shape},
              {"lambda_overlap", c.loss.lambda_overlap},
              {"epsilon", c.loss.epsilon}}},
            {"checkpoint_every", c.checkpoint_every},
            {"checkpoint_dir", c.checkpoint_dir},
            {"loss_log", c.loss_log}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.seed = j.value("seed", c.seed);
    if (j.contains("loss")) {
        const auto& l = j.at("loss");
        c.loss.lambda_shape = l.value("lambda_shape", c.loss.lambda_shape);
        c.loss.lambda_overlap = l.value("lambda_overlap", c.loss.lambda_overlap);
        c.loss.epsilon = l.value("epsilon", c.loss.epsilon);
    }
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.checkpoint_dir = j.value("checkpoint_dir", c.checkpoint_dir);
    c.loss_log = j.value("loss_log", c.loss_log);
    c.validate();
    return c;
}

}  // namespace psa::train
