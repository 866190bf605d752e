#include "gtsens/json_io.hpp"

#include <sstream>

namespace gtsens {

using nlohmann::json;

namespace {

const char* probe_kind_name(ProbeKind k) {
    switch (k) {
        case ProbeKind::RightTail: return "right-tail";
        case ProbeKind::LeftTail: return "left-tail";
        case ProbeKind::MomentF: return "moment-f3";
    }
    return "?";
}

json rational_json(const Rational& r) { return r.str(); }

}  // namespace

json to_json(const EstimatorResult& r) {
    return json{{"schema_version", 1},
                {"mean", r.mean},
                {"variance", r.variance},
                {"stderr", r.std_error},
                {"ci95", json::array({r.ci_lo, r.ci_hi})},
                {"n_replicates", r.n_replicates},
                {"n_discarded", r.n_discarded},
                {"seed", r.seed}};
}

json to_json(const ProbeResult& p) {
    return json{{"kind", probe_kind_name(p.kind)},
                {"parameter", p.parameter},
                {"estimate", p.estimate},
                {"stderr", p.std_error},
                {"top_sample_share", p.top_sample_share},
                {"split_z", p.split_z},
                {"n", p.n},
                {"stabilized", p.stabilized}};
}

json to_json(const ReweightingDiagnostic& d) {
    return json{{"direct_mean", d.direct_mean},
                {"direct_stderr", d.direct_stderr},
                {"reweighted_mean", d.reweighted_mean},
                {"reweighted_stderr", d.reweighted_stderr},
                {"z", d.z},
                {"n", d.n}};
}

json to_json(const ReactionNetwork& net, const ValidityReport& rep) {
    json j;
    j["schema_version"] = 1;
    j["model"] = rep.model;
    j["target_channel"] = net.reactions[rep.target].name;
    j["target_param"] = rep.target_param;
    j["verdict"] = rep.valid ? "valid" : "inconclusive";
    j["path"] = path_name(rep.path);

    json sb = json::array();
    for (const auto& cert : rep.species_bounds) {
        json weights = json::array();
        for (const auto& w : cert.weights) weights.push_back(rational_json(w));
        sb.push_back(json{{"species", net.species[cert.species]},
                          {"weights", weights},
                          {"bound", rational_json(cert.bound)}});
    }
    j["species_bounds"] = sb;

    json certified = json::array();
    for (std::size_t ch : rep.certified_channels)
        certified.push_back(json{{"channel", net.reactions[ch].name},
                                 {"reason", rep.channel_certifications.at(ch)}});
    j["certified_channels"] = certified;

    if (rep.lp_certificate) {
        const auto& cert = *rep.lp_certificate;
        json coeffs = json::object();
        for (const auto& [ch, w] : cert.coeffs) coeffs[net.reactions[ch].name] = rational_json(w);
        json lhs = json::object();
        for (const auto& [ch, w] : cert.uncertified_coeffs)
            lhs[net.reactions[ch].name] = rational_json(w);
        json dual = json::array();
        for (const auto& v : cert.dual) dual.push_back(rational_json(v));
        j["affine_bound"] = json{{"target", net.reactions[cert.target].name},
                                 {"constant", rational_json(cert.constant)},
                                 {"coeffs", coeffs},
                                 {"controlled_counts", lhs},
                                 {"dual", dual}};
    }
    if (rep.recession_ray) {
        json ray = json::object();
        for (const auto& [ch, v] : rep.recession_ray->ray)
            ray[net.reactions[ch].name] = rational_json(v);
        j["recession_ray"] = ray;
    }
    if (rep.coupling) {
        json entries = json::array();
        for (const auto& e : rep.coupling->entries) {
            json entry{{"channel", net.reactions[e.channel].name},
                       {"type", e.type == CouplingAssignment::Type::BinaryFission
                                    ? "binary-fission"
                                    : "catalytic-birth"}};
            if (e.catalyst) entry["catalyst"] = net.species[*e.catalyst];
            if (e.species) entry["species"] = net.species[*e.species];
            entries.push_back(entry);
        }
        j["coupling"] = entries;
    }
    json unresolved = json::array();
    for (std::size_t ch : rep.unresolved_channels) unresolved.push_back(net.reactions[ch].name);
    j["unresolved_channels"] = unresolved;
    j["failures"] = rep.failures;
    j["bound_exists_despite_unresolved"] = rep.bound_exists_despite_unresolved;

    json probes = json::array();
    for (const auto& p : rep.probes) probes.push_back(to_json(p));
    j["probes"] = probes;
    return j;
}

json to_json(const MonoSolution& s) {
    json sens = json::object();
    for (const auto& [k, v] : s.mean_sensitivity) sens[k] = v;
    return json{{"mean", s.mean},
                {"variance", s.variance},
                {"family", s.family},
                {"mean_sensitivity", sens}};
}

std::string render_report_text(const ReactionNetwork& net, const ValidityReport& rep) {
    std::ostringstream out;
    out << "target " << rep.target_param << " (channel " << net.reactions[rep.target].name
        << "): " << (rep.valid ? "VALID" : "INCONCLUSIVE");
    if (rep.valid) out << " via " << path_name(rep.path);
    out << "\n";
    for (const auto& cert : rep.species_bounds) {
        out << "  species " << net.species[cert.species] << " bounded by " << cert.bound.str()
            << " (weights";
        for (const auto& w : cert.weights) out << " " << w.str();
        out << ")\n";
    }
    for (std::size_t ch : rep.certified_channels)
        out << "  channel " << net.reactions[ch].name << ": "
            << rep.channel_certifications.at(ch) << "\n";
    if (rep.lp_certificate) {
        const auto& cert = *rep.lp_certificate;
        out << "  bound: ";
        bool first = true;
        for (const auto& [ch, w] : cert.uncertified_coeffs) {
            if (!first) out << " + ";
            first = false;
            if (!(w == Rational(1))) out << w.str() << "*";
            out << "R[" << net.reactions[ch].name << "]";
        }
        out << " <= " << cert.constant.str();
        for (const auto& [ch, w] : cert.coeffs) {
            out << " + ";
            if (!(w == Rational(1))) out << w.str() << "*";
            out << "R[" << net.reactions[ch].name << "]";
        }
        out << "\n";
    }
    if (rep.recession_ray) {
        out << "  recession ray:";
        for (const auto& [ch, v] : rep.recession_ray->ray)
            out << " " << net.reactions[ch].name << "=" << v.str();
        out << "\n";
    }
    for (const auto& f : rep.failures) out << "  failed: " << f << "\n";
    if (rep.bound_exists_despite_unresolved)
        out << "  note: an affine count bound exists, but unresolved unconsuming channels "
               "keep the verdict inconclusive\n";
    for (const auto& p : rep.probes) {
        out << "  probe " << probe_kind_name(p.kind);
        if (p.kind != ProbeKind::MomentF) out << "(" << p.parameter << ")";
        out << ": " << p.estimate << " +- " << p.std_error
            << (p.stabilized ? "" : "  [UNSTABLE]") << "\n";
    }
    return out.str();
}

}  // namespace gtsens
