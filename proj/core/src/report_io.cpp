#include "chainbell/report_io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>

#include "chainbell/version.hpp"

namespace chainbell {

namespace {

std::string real(double value) {
    char buffer[40];
    const auto [ptr, ec] =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 15);
    return std::string(buffer, ptr);
}

std::string json_quote(std::string_view text) {
    std::string out;
    out.reserve(text.size() + 2);
    out += '"';
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

const char* mode_name(MatchMode mode) {
    return mode == MatchMode::TrialSynchronized ? "sync" : "stream";
}

const char* sampling_name(SamplingMode sampling) {
    return sampling == SamplingMode::ChainedOnly ? "chained" : "uniform";
}

const char* source_name(SourceKind source) {
    return source == SourceKind::Lhv ? "lhv" : "quantum";
}

std::string config_block(const ExperimentReport& report) {
    std::string out = "{";
    if (report.generator) {
        const GeneratorConfig& g = *report.generator;
        out += "\"source\":" + json_quote(source_name(g.source));
        out += ",\"n\":" + std::to_string(g.n);
        out += ",\"p\":" + real(g.p);
        out += ",\"thinning_q\":" + real(g.thinning_q);
        if (g.requested_gamma) {
            out += ",\"requested_gamma\":" + real(*g.requested_gamma);
        }
        out += ",\"trials_per_pair\":" + std::to_string(g.trials_per_pair);
        out += ",\"seed\":" + std::to_string(g.seed);
        out += ",\"delta_t\":" + real(g.delta_t);
        out += ",\"mode\":" + json_quote(mode_name(g.mode));
        out += ",\"sampling\":" + json_quote(sampling_name(g.sampling));
    } else {
        out += "\"source\":\"analysis\"";
        out += ",\"n\":" + std::to_string(report.analysis.n);
        out += ",\"delta_t\":" + real(report.analysis.delta_t);
        out += ",\"mode\":" + json_quote(mode_name(report.analysis.mode));
    }
    out += "}";
    return out;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::string bound_block(const CoincidenceBound& bound) {
    std::string out = "{";
    out += "\"raw\":" + real(bound.raw);
    out += ",\"clamped\":" + real(bound.clamped);
    out += ",\"vacuous\":" + std::string(bound.vacuous ? "true" : "false");
    out += "}";
    return out;
}

}  // namespace

std::string config_hash(const ExperimentReport& report) {
    return hex64(fnv1a64(config_block(report)));
}

std::string format_report(const ExperimentReport& report) {
    std::string out = "{\n";
    out += "  \"toolkit\": {\"name\":" + json_quote(kToolkitName) +
           ",\"version\":" + json_quote(kToolkitVersion) + "},\n";
    out += "  \"config\": " + config_block(report) + ",\n";
    out += "  \"config_hash\": " + json_quote(config_hash(report)) + ",\n";

    out += "  \"pairs\": [\n";
    for (std::size_t i = 0; i < report.per_pair.size(); ++i) {
        const PairStats& stats = report.per_pair[i];
        out += "    {\"index\":" + std::to_string(stats.pair.index);
        out += ",\"alice_setting\":" + std::to_string(stats.pair.alice_setting);
        out += ",\"bob_setting\":" + std::to_string(stats.pair.bob_setting);
        out += ",\"sign\":" + std::to_string(stats.pair.sign);
        out += ",\"trials\":" + std::to_string(stats.trials);
        out += ",\"coincidences\":" + std::to_string(stats.coincidences);
        out += ",\"gamma_hat\":" + real(stats.gamma_hat());
        if (stats.has_correlation()) {
            out += ",\"cond_corr\":" + real(stats.cond_corr());
            out += ",\"std_err\":" + real(stats.std_err());
        } else {
            out += ",\"cond_corr\":null,\"std_err\":null";
        }
        out += i + 1 < report.per_pair.size() ? "},\n" : "}\n";
    }
    out += "  ],\n";

    out += "  \"warnings\": {";
    out += "\"non_chained_trials\":" + std::to_string(report.non_chained_trials);
    out += ",\"incomplete_trials\":" + std::to_string(report.incomplete_trials);
    out += ",\"non_chained_matches\":" + std::to_string(report.non_chained_matches);
    out += "},\n";

    if (report.has_estimate) {
        out += "  \"estimates\": {";
        out += "\"s_hat\":" + real(report.s_hat);
        out += ",\"s_se\":" + real(report.s_se);
        out += ",\"gamma_hat\":" + real(report.gamma_hat.value_or(0.0));
        out += "},\n";
    } else {
        out += "  \"error\": " + json_quote(report.error) + ",\n";
        if (report.gamma_hat) {
            out += "  \"estimates\": {\"gamma_hat\":" + real(*report.gamma_hat) + "},\n";
        }
    }

    out += "  \"bounds\": {";
    out += "\"local\":" + real(report.bounds.local);
    out += ",\"quantum\":" + real(report.bounds.quantum);
    out += ",\"gamma_crit\":" + real(report.bounds.gamma_critical);
    out += ",\"eta_crit\":" + real(report.bounds.eta_critical);
    out += ",\"p_crit\":" + real(report.bounds.p_critical);
    if (report.bounds.bound_at_gamma_hat) {
        out += ",\"coincidence_bound_at_gamma_hat\":" + bound_block(*report.bounds.bound_at_gamma_hat);
    }
    out += "},\n";

    out += "  \"verdicts\": {";
    if (report.has_estimate) {
        out += "\"exceeds_local\":" + std::string(report.verdicts.exceeds_local ? "true" : "false");
        out += ",\"exceeds_coincidence_bound\":" +
               std::string(report.verdicts.exceeds_coincidence_bound ? "true" : "false");
        out += ",\"loophole_free\":" +
               std::string(report.verdicts.loophole_free ? "true" : "false");
    } else {
        out += "\"error\":" + json_quote(report.error);
    }
    out += "}\n";
    out += "}\n";
    return out;
}

std::string format_bounds_report(const BoundsReport& report) {
    std::string out = "{\n";
    out += "  \"toolkit\": {\"name\":" + json_quote(kToolkitName) +
           ",\"version\":" + json_quote(kToolkitVersion) + "},\n";
    out += "  \"n\": " + std::to_string(report.n) + ",\n";
    out += "  \"local_bound\": " + real(report.local) + ",\n";
    out += "  \"quantum_value\": " + real(report.quantum) + ",\n";
    out += "  \"gamma_crit\": " + real(report.gamma_critical) + ",\n";
    out += "  \"eta_crit\": " + real(report.eta_critical) + ",\n";
    out += "  \"p_crit\": " + real(report.p_critical);
    if (report.gamma && report.bound_at_gamma) {
        out += ",\n  \"gamma\": " + real(*report.gamma) + ",\n";
        out += "  \"coincidence_bound\": " + bound_block(*report.bound_at_gamma) + "\n";
    } else {
        out += "\n";
    }
    out += "}\n";
    return out;
}

std::string format_sweep_header() { return "gamma,s_hat,se,bound,quantum,note\n"; }

std::string format_sweep_row(const SweepRow& row) {
    return real(row.gamma) + "," + real(row.s_hat) + "," + real(row.s_se) + "," +
           real(row.bound) + "," + real(row.quantum) + ",\n";
}

std::string format_sweep_error_row(double gamma, const std::string& message) {
    std::string note = message;
    for (char& c : note) {
        if (c == ',' || c == '\n') c = ';';
    }
    return real(gamma) + ",,,,," + note + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        }
        file << text;
        if (!file.flush()) {
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace chainbell
