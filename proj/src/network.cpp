#include "gtsens/network.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <set>
#include <sstream>

namespace gtsens {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

struct ComplexTerm {
    std::int64_t multiplicity;
    std::string species;
};

// complex := '0' | term ('+' term)*, term := [multiplicity] name
std::vector<ComplexTerm> parse_complex(const std::string& text, int line) {
    std::string t = trim(text);
    if (t == "0") return {};
    std::vector<ComplexTerm> terms;
    std::size_t start = 0;
    while (start <= t.size()) {
        std::size_t plus = t.find('+', start);
        std::string term = trim(plus == std::string::npos ? t.substr(start) : t.substr(start, plus - start));
        if (term.empty()) throw ModelParseError(line, "empty term in complex \"" + t + "\"");
        std::size_t p = 0;
        std::int64_t mult = 1;
        if (std::isdigit(static_cast<unsigned char>(term[p]))) {
            std::size_t q = p;
            while (q < term.size() && std::isdigit(static_cast<unsigned char>(term[q]))) ++q;
            if (q - p > 9) throw ModelParseError(line, "multiplicity out of range in \"" + term + "\"");
            mult = std::stoll(term.substr(p, q - p));
            p = q;
            while (p < term.size() && std::isspace(static_cast<unsigned char>(term[p]))) ++p;
        }
        if (p >= term.size() || !is_name_start(term[p]))
            throw ModelParseError(line, "expected species name in \"" + term + "\"");
        std::size_t q = p;
        while (q < term.size() && is_name_char(term[q])) ++q;
        std::string name = term.substr(p, q - p);
        if (trim(term.substr(q)) != "")
            throw ModelParseError(line, "unexpected text after species name in \"" + term + "\"");
        if (mult <= 0) throw ModelParseError(line, "multiplicity must be positive in \"" + term + "\"");
        terms.push_back({mult, name});
        if (plus == std::string::npos) break;
        start = plus + 1;
    }
    return terms;
}

// name = value assignments, several per line.
std::vector<std::pair<std::string, std::string>> parse_assignments(const std::string& text, int line) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t p = 0;
    while (p < text.size()) {
        while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
        if (p >= text.size()) break;
        if (!is_name_start(text[p])) throw ModelParseError(line, "expected name in assignment list");
        std::size_t q = p;
        while (q < text.size() && is_name_char(text[q])) ++q;
        std::string name = text.substr(p, q - p);
        p = q;
        while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
        if (p >= text.size() || text[p] != '=')
            throw ModelParseError(line, "expected '=' after \"" + name + "\"");
        ++p;
        while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
        std::size_t v = p;
        while (p < text.size() && !std::isspace(static_cast<unsigned char>(text[p]))) ++p;
        if (v == p) throw ModelParseError(line, "missing value for \"" + name + "\"");
        out.emplace_back(name, text.substr(v, p - v));
    }
    return out;
}

void parse_reaction_line(ReactionNetwork& net, const std::string& text, int line,
                         std::map<std::string, std::size_t>& species_idx) {
    std::size_t colon = text.find(':');
    if (colon == std::string::npos) throw ModelParseError(line, "reaction line missing ':'");
    Reaction rx;
    rx.name = trim(text.substr(0, colon));
    if (rx.name.empty()) throw ModelParseError(line, "empty reaction name");

    std::string rest = text.substr(colon + 1);
    std::string factor_text;
    std::size_t bar = rest.find('|');
    if (bar != std::string::npos) {
        std::string opt = trim(rest.substr(bar + 1));
        rest = rest.substr(0, bar);
        if (opt.rfind("b", 0) != 0) throw ModelParseError(line, "unknown reaction option \"" + opt + "\"");
        std::size_t eq = opt.find('=');
        if (eq == std::string::npos) throw ModelParseError(line, "expected b = \"expr\"");
        factor_text = trim(opt.substr(eq + 1));
        if (factor_text.size() >= 2 && factor_text.front() == '"' && factor_text.back() == '"')
            factor_text = factor_text.substr(1, factor_text.size() - 2);
        if (factor_text.empty()) throw ModelParseError(line, "empty propensity factor expression");
    }

    std::size_t at = rest.find('@');
    if (at == std::string::npos) throw ModelParseError(line, "reaction line missing '@ param'");
    rx.rate_param = trim(rest.substr(at + 1));
    if (rx.rate_param.empty()) throw ModelParseError(line, "missing rate parameter name");

    std::string body = rest.substr(0, at);
    std::size_t arrow = body.find("->");
    if (arrow == std::string::npos) throw ModelParseError(line, "reaction line missing '->'");

    auto resolve = [&](const std::vector<ComplexTerm>& terms) {
        std::vector<std::pair<std::size_t, std::int64_t>> out;
        for (const auto& t : terms) {
            auto it = species_idx.find(t.species);
            if (it == species_idx.end())
                throw ModelParseError(line, "unknown species \"" + t.species + "\"");
            bool merged = false;
            for (auto& [idx, mult] : out) {
                if (idx == it->second) {
                    mult += t.multiplicity;
                    merged = true;
                    break;
                }
            }
            if (!merged) out.emplace_back(it->second, t.multiplicity);
        }
        return out;
    };
    rx.reactants = resolve(parse_complex(body.substr(0, arrow), line));
    rx.products = resolve(parse_complex(body.substr(arrow + 2), line));

    if (!factor_text.empty()) {
        try {
            rx.custom_factor = Expression::parse(factor_text, net.species.size());
        } catch (const ExpressionError& e) {
            throw ModelParseError(line, e.what());
        }
    }
    net.reactions.push_back(std::move(rx));
}

}  // namespace

std::size_t ReactionNetwork::species_index(const std::string& name) const {
    for (std::size_t i = 0; i < species.size(); ++i)
        if (species[i] == name) return i;
    throw std::out_of_range("unknown species \"" + name + "\"");
}

std::size_t ReactionNetwork::reaction_index(const std::string& name) const {
    for (std::size_t j = 0; j < reactions.size(); ++j)
        if (reactions[j].name == name) return j;
    throw std::out_of_range("unknown reaction \"" + name + "\"");
}

std::size_t ReactionNetwork::channel_of_param(const std::string& param) const {
    std::size_t found = reactions.size();
    for (std::size_t j = 0; j < reactions.size(); ++j) {
        if (reactions[j].rate_param == param) {
            if (found != reactions.size())
                throw std::invalid_argument("parameter \"" + param + "\" drives several channels");
            found = j;
        }
    }
    if (found == reactions.size())
        throw std::out_of_range("parameter \"" + param + "\" drives no channel");
    return found;
}

bool ReactionClassification::is_unconsuming(std::size_t j) const {
    return std::find(unconsuming.begin(), unconsuming.end(), j) != unconsuming.end();
}

ReactionNetwork parse_model(const std::string& text) {
    ReactionNetwork net;
    std::map<std::string, std::size_t> species_idx;
    enum class Section { None, Params, Species, Reactions } section = Section::None;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::string s = trim(raw);
        if (s.empty()) continue;
        if (s[0] == '[') {
            std::size_t close = s.find(']');
            if (close == std::string::npos) throw ModelParseError(line, "unterminated section tag");
            std::string tag = s.substr(1, close - 1);
            if (tag == "params") section = Section::Params;
            else if (tag == "species") section = Section::Species;
            else if (tag == "reactions") section = Section::Reactions;
            else throw ModelParseError(line, "unknown section [" + tag + "]");
            s = trim(s.substr(close + 1));
            if (s.empty()) continue;
        }
        switch (section) {
            case Section::None:
                throw ModelParseError(line, "content before any section tag");
            case Section::Params:
                for (auto& [name, value] : parse_assignments(s, line)) {
                    if (net.params.count(name)) throw ModelParseError(line, "duplicate parameter \"" + name + "\"");
                    char* end = nullptr;
                    double v = std::strtod(value.c_str(), &end);
                    if (end != value.c_str() + value.size() || !std::isfinite(v))
                        throw ModelParseError(line, "malformed value for \"" + name + "\"");
                    net.params[name] = v;
                }
                break;
            case Section::Species:
                for (auto& [name, value] : parse_assignments(s, line)) {
                    if (species_idx.count(name)) throw ModelParseError(line, "duplicate species \"" + name + "\"");
                    errno = 0;
                    char* end = nullptr;
                    long long v = std::strtoll(value.c_str(), &end, 10);
                    if (end != value.c_str() + value.size() || errno == ERANGE)
                        throw ModelParseError(line, "initial count for \"" + name + "\" must be an in-range integer");
                    species_idx[name] = net.species.size();
                    net.species.push_back(name);
                    net.x0.push_back(v);
                }
                break;
            case Section::Reactions:
                parse_reaction_line(net, s, line, species_idx);
                break;
        }
    }
    try {
        return validate_network(std::move(net));
    } catch (const std::exception& e) {
        if (dynamic_cast<const ModelParseError*>(&e)) throw;
        throw ModelParseError(line, e.what());
    }
}

ReactionNetwork validate_network(ReactionNetwork net) {
    std::size_t n = net.species.size();
    if (n == 0) throw std::invalid_argument("network has no species");
    if (net.reactions.empty()) throw std::invalid_argument("network has no reactions");
    if (net.x0.size() != n) throw std::invalid_argument("x0 length does not match species");

    std::set<std::string> names(net.species.begin(), net.species.end());
    if (names.size() != n) throw std::invalid_argument("species names not unique");
    std::set<std::string> rnames;
    for (const auto& rx : net.reactions)
        if (!rnames.insert(rx.name).second)
            throw std::invalid_argument("duplicate reaction name \"" + rx.name + "\"");

    for (std::size_t i = 0; i < n; ++i)
        if (net.x0[i] < 0)
            throw std::invalid_argument("negative initial count for species \"" + net.species[i] + "\"");

    net.nu.assign(net.reactions.size(), std::vector<std::int64_t>(n, 0));
    net.rate.resize(net.reactions.size());
    for (std::size_t j = 0; j < net.reactions.size(); ++j) {
        const Reaction& rx = net.reactions[j];
        auto& col = net.nu[j];
        for (const auto& [i, m] : rx.reactants) {
            if (i >= n) throw std::invalid_argument("reactant species index out of range");
            if (m <= 0) throw std::invalid_argument("nonpositive reactant multiplicity");
            col[i] -= m;
        }
        for (const auto& [i, m] : rx.products) {
            if (i >= n) throw std::invalid_argument("product species index out of range");
            if (m <= 0) throw std::invalid_argument("nonpositive product multiplicity");
            col[i] += m;
        }
        if (std::all_of(col.begin(), col.end(), [](std::int64_t v) { return v == 0; }))
            throw std::invalid_argument("reaction \"" + rx.name + "\" has a zero stoichiometric column");
        auto it = net.params.find(rx.rate_param);
        if (it == net.params.end())
            throw std::invalid_argument("reaction \"" + rx.name + "\" references undeclared parameter \"" +
                                        rx.rate_param + "\"");
        if (!(it->second > 0.0))
            throw std::invalid_argument("rate constant \"" + rx.rate_param + "\" must be positive");
        net.rate[j] = it->second;
    }
    return net;
}

double propensity_factor(const ReactionNetwork& net, std::size_t j, std::span<const std::int64_t> x) {
    const Reaction& rx = net.reactions[j];
    for (const auto& [i, m] : rx.reactants)
        if (x[i] < m) return 0.0;
    if (rx.custom_factor) {
        double b = rx.custom_factor->eval(x);
        if (b < 0.0)
            throw KineticsError("propensity factor of \"" + rx.name + "\" negative at a reachable state");
        return b;
    }
    // Stochastic mass action: number of distinct reactant combinations,
    // product over species of C(x_i, m_i).
    double b = 1.0;
    for (const auto& [i, m] : rx.reactants) {
        double falling = 1.0;
        double fact = 1.0;
        for (std::int64_t k = 0; k < m; ++k) {
            falling *= static_cast<double>(x[i] - k);
            fact *= static_cast<double>(k + 1);
        }
        b *= falling / fact;
    }
    return b;
}

double propensity(const ReactionNetwork& net, std::size_t j, std::span<const std::int64_t> x) {
    return net.rate[j] * propensity_factor(net, j, x);
}

ReactionClassification classify_reactions(const ReactionNetwork& net) {
    ReactionClassification c;
    for (std::size_t j = 0; j < net.n_reactions(); ++j) {
        bool nonneg = std::all_of(net.nu[j].begin(), net.nu[j].end(),
                                  [](std::int64_t v) { return v >= 0; });
        (nonneg ? c.unconsuming : c.consuming).push_back(j);
    }
    return c;
}

State apply_reaction(const State& x, const ReactionNetwork& net, std::size_t j) {
    if (!(propensity(net, j, x) > 0.0))
        throw std::invalid_argument("apply_reaction: channel \"" + net.reactions[j].name +
                                    "\" has zero propensity at this state");
    State y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
        std::int64_t v;
        if (__builtin_add_overflow(y[i], net.nu[j][i], &v))
            throw KineticsError("state overflow applying \"" + net.reactions[j].name + "\"");
        if (v < 0)
            throw KineticsError("negative count applying \"" + net.reactions[j].name +
                                "\": kinetics positive at an infeasible state");
        y[i] = v;
    }
    return y;
}

ReactionNetwork with_param(const ReactionNetwork& net, const std::string& name, double value) {
    ReactionNetwork out = net;
    auto it = out.params.find(name);
    if (it == out.params.end()) throw std::out_of_range("unknown parameter \"" + name + "\"");
    if (!(value > 0.0)) throw std::invalid_argument("rate constant \"" + name + "\" must be positive");
    it->second = value;
    for (std::size_t j = 0; j < out.reactions.size(); ++j)
        if (out.reactions[j].rate_param == name) out.rate[j] = value;
    return out;
}

std::string render_model(const ReactionNetwork& net) {
    std::ostringstream out;
    out << "[params]";
    for (const auto& [k, v] : net.params) {
        out.precision(17);
        out << " " << k << " = " << v;
    }
    out << "\n[species]";
    for (std::size_t i = 0; i < net.n_species(); ++i)
        out << " " << net.species[i] << " = " << net.x0[i];
    out << "\n[reactions]\n";
    auto complex_str = [&](const std::vector<std::pair<std::size_t, std::int64_t>>& terms) {
        if (terms.empty()) return std::string("0");
        std::string s;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            if (k) s += " + ";
            if (terms[k].second != 1) s += std::to_string(terms[k].second) + " ";
            s += net.species[terms[k].first];
        }
        return s;
    };
    for (const auto& rx : net.reactions) {
        out << rx.name << ": " << complex_str(rx.reactants) << " -> " << complex_str(rx.products)
            << " @ " << rx.rate_param;
        if (rx.custom_factor) out << " | b = \"" << rx.custom_factor->text() << "\"";
        out << "\n";
    }
    return out.str();
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace gtsens
