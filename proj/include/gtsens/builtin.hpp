#pragma once

#include <map>
#include <string>
#include <vector>

#include "gtsens/network.hpp"

namespace gtsens {

/// Registry of bundled models, keyed by name. Each entry is model-format
/// text, so the bundled networks go through the same parser as user files.
const std::map<std::string, std::string>& builtin_model_texts();

std::vector<std::string> builtin_model_names();

bool is_builtin_model(const std::string& name);

ReactionNetwork builtin_model(const std::string& name);

struct LoadedModel {
    ReactionNetwork net;
    std::string source;       // model name or file path
    std::string text;
    std::string hash;         // content hash of text
};

/// Resolve a --model argument: a registry name, or a path to a model file.
LoadedModel load_model(const std::string& name_or_path);

}  // namespace gtsens
