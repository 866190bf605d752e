#include "gtsens/builtin.hpp"

#include <fstream>
#include <sstream>

namespace gtsens {

const std::map<std::string, std::string>& builtin_model_texts() {
    static const std::map<std::string, std::string> registry = {
        {"immigration",
         "# X(t) = x0 + Poisson(c t)\n"
         "[params]   c = 1.0\n"
         "[species]  S = 0\n"
         "[reactions]\n"
         "R1: 0 -> S @ c\n"},
        {"pure-birth",
         "# binary fission; X(t) is negative binomial\n"
         "[params]   c = 1.0\n"
         "[species]  S = 1\n"
         "[reactions]\n"
         "R1: S -> 2 S @ c\n"},
        {"conversion-annihilation",
         "# conversion plus pairwise annihilation, fed by immigration\n"
         "[params]   c1 = 1.0  c2 = 1.0  c3 = 1.0\n"
         "[species]  S1 = 2  S2 = 1\n"
         "[reactions]\n"
         "R1: S1 -> S2      @ c1\n"
         "R2: S1 + S2 -> 0  @ c2\n"
         "R3: 0 -> S1       @ c3\n"},
        {"gene-expression",
         "# two-state gene with transcription in both states\n"
         "[params]   c1 = 1.0  c2 = 1.0  c3 = 1.0  alpha = 1.0  beta = 1.0\n"
         "[species]  A = 1  Ap = 0  S1 = 0  S2 = 0\n"
         "[reactions]\n"
         "R1: A -> A + S1   @ c1\n"
         "R2: Ap -> Ap + S1 @ c2\n"
         "R3: S1 -> S2      @ c3\n"
         "R4: A + S2 -> Ap  @ alpha\n"
         "R5: Ap -> A + S2  @ beta\n"},
        {"dimer-exchange",
         "# immigration feeding a reversible pair exchange\n"
         "[params]   c1 = 1.0  c2 = 1.0  c3 = 1.0\n"
         "[species]  S1 = 2  S2 = 0\n"
         "[reactions]\n"
         "R1: 0 -> S1        @ c1\n"
         "R2: 2 S1 -> 2 S2   @ c2\n"
         "R3: 2 S2 -> 2 S1   @ c3\n"},
        {"birth-annihilation",
         "# binary fission balanced by pairwise annihilation\n"
         "[params]   c1 = 1.0  c2 = 1.0\n"
         "[species]  S = 1\n"
         "[reactions]\n"
         "R1: S -> 2 S  @ c1\n"
         "R2: 2 S -> 0  @ c2\n"},
        {"lotka-volterra",
         "# prey dynamics with a frozen predator count\n"
         "[params]   alpha1 = 1.0  beta1 = 1.0  gamma12 = 1.0  delta1 = 1.0\n"
         "[species]  S1 = 1  S2 = 1\n"
         "[reactions]\n"
         "R1: 0 -> S1        @ alpha1\n"
         "R2: S1 -> 2 S1     @ beta1\n"
         "R3: S1 + S2 -> S2  @ gamma12\n"
         "R4: S1 -> 0        @ delta1\n"},
    };
    return registry;
}

std::vector<std::string> builtin_model_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : builtin_model_texts()) names.push_back(k);
    return names;
}

bool is_builtin_model(const std::string& name) {
    return builtin_model_texts().count(name) != 0;
}

ReactionNetwork builtin_model(const std::string& name) {
    auto it = builtin_model_texts().find(name);
    if (it == builtin_model_texts().end())
        throw std::out_of_range("unknown builtin model \"" + name + "\"");
    return parse_model(it->second);
}

LoadedModel load_model(const std::string& name_or_path) {
    LoadedModel m;
    auto it = builtin_model_texts().find(name_or_path);
    if (it != builtin_model_texts().end()) {
        m.text = it->second;
        m.source = name_or_path;
    } else {
        std::ifstream in(name_or_path, std::ios::binary);
        if (!in)
            throw std::runtime_error("model \"" + name_or_path +
                                     "\" is neither a builtin name nor a readable file");
        std::ostringstream ss;
        ss << in.rdbuf();
        m.text = ss.str();
        m.source = name_or_path;
    }
    m.net = parse_model(m.text);
    m.hash = content_hash(m.text);
    return m;
}

}  // namespace gtsens
