#include "hcmab/bounds_report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hcmab/errors.hpp"
#include "hcmab/text.hpp"

namespace hcmab {

namespace {

std::vector<double> parse_list(std::string_view value, std::size_t arms, const std::string& key) {
    std::vector<double> out;
    for (auto part : text::split(value, ',')) out.push_back(text::parse_double(part));
    if (out.size() == 1 && arms > 1) out.assign(arms, out.front());
    if (out.size() != arms) throw ShapeError("'" + key + "' needs 1 or m values");
    return out;
}

std::string g6(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
    std::string str() const {
        std::vector<std::size_t> width(rows_.front().size(), 0);
        for (const auto& r : rows_)
            for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
        std::string out;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            for (std::size_t c = 0; c < rows_[i].size(); ++c) {
                if (c) out += "  ";
                out += std::string(width[c] - rows_[i][c].size(), ' ');
                out += rows_[i][c];
            }
            out += '\n';
            if (i == 0) {
                std::size_t total = 0;
                for (auto w : width) total += w;
                out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
            }
        }
        return out;
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string action_str(const Action& a) {
    return "(" + text::join(a, ',', [](ArmIndex i) { return std::to_string(i); }) + ")";
}

}  // namespace

BoundsInstance parse_bounds_instance(std::string_view input) {
    std::map<std::string, std::string, std::less<>> kv;
    std::size_t line_no = 0;
    bool have_schema = false;
    static const std::set<std::string, std::less<>> known{
        "env", "m", "k", "horizon", "mu_on", "mu_off", "bias", "offline_counts", "reward_scale", "alpha"};
    for (auto line : text::split(input, '\n')) {
        ++line_no;
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
        const std::string key(text::trim(line.substr(0, eq)));
        const std::string value(text::trim(line.substr(eq + 1)));
        if (!have_schema) {
            if (key != "schema" || value != kInstanceSchema)
                throw ParseError(line_no, "first setting must be schema = " + std::string(kInstanceSchema));
            have_schema = true;
            continue;
        }
        if (!known.count(key)) throw ParseError(line_no, "unknown key '" + key + "'");
        if (!kv.emplace(key, value).second) throw ParseError(line_no, "duplicate key '" + key + "'");
    }
    if (!have_schema) throw ParseError(line_no, "missing schema line");
    for (const char* required : {"m", "k", "horizon", "mu_on"}) {
        if (!kv.count(required)) throw ConfigError(std::string("instance file is missing '") + required + "'");
    }

    try {
        BoundsInstance inst;
        const auto m = static_cast<std::size_t>(text::parse_u64(kv.at("m")));
        if (m == 0) throw ConfigError("m must be at least 1");
        inst.env.model = kv.count("env") ? env_model_from_string(kv.at("env")) : EnvModel::Cascade;
        inst.env.arms = m;
        inst.env.action_size = static_cast<std::size_t>(text::parse_u64(kv.at("k")));
        inst.env.mean = MeanVector(parse_list(kv.at("mu_on"), m, "mu_on"));
        inst.env.reward_scale = kv.count("reward_scale") ? text::parse_double(kv.at("reward_scale")) : 1.0;
        inst.env.validate();
        inst.mu_off = kv.count("mu_off") ? MeanVector(parse_list(kv.at("mu_off"), m, "mu_off")) : inst.env.mean;
        inst.bias = kv.count("bias") ? BiasVector(parse_list(kv.at("bias"), m, "bias")) : BiasVector::uniform(m, 0.0);
        inst.offline_counts.assign(m, 0);
        if (kv.count("offline_counts")) {
            const auto parts = text::split(kv.at("offline_counts"), ',');
            if (parts.size() == 1) inst.offline_counts.assign(m, text::parse_u64(parts[0]));
            else if (parts.size() == m)
                for (std::size_t i = 0; i < m; ++i) inst.offline_counts[i] = text::parse_u64(parts[i]);
            else throw ShapeError("'offline_counts' needs 1 or m values");
        }
        inst.horizon = text::parse_u64(kv.at("horizon"));
        if (inst.horizon == 0) throw ConfigError("horizon must be at least 1");
        inst.alpha = kv.count("alpha") ? text::parse_double(kv.at("alpha")) : 1.0;
        const auto bad = validate_bias(inst.mu_off, inst.env.mean, inst.bias);
        if (!bad.empty()) throw BiasViolation(bad.front(), "arm " + std::to_string(bad.front()) + " violates its bias bound");
        return inst;
    } catch (const DomainError& e) {
        throw ConfigError(std::string("instance file: ") + e.what());
    }
}

BoundsInstance load_bounds_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open instance file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_bounds_instance(ss.str());
}

BoundsReport evaluate_bounds(const BoundsInstance& instance) {
    BoundsReport r;
    r.instance = instance;
    const auto env = make_environment(instance.env);
    r.theory = make_theory_instance(*env, instance.mu_off, instance.bias, instance.offline_counts,
                                    instance.horizon, instance.alpha);
    const auto& t = r.theory;
    r.effective_gapdep.resize(t.arms);
    r.effective_gapindep.resize(t.arms);
    for (std::size_t i = 0; i < t.arms; ++i) {
        r.effective_gapdep[i] = effective_offline_gapdep(t.offline_counts[i], t.smoothness, t.max_triggered,
                                                         t.omegas[i], t.gaps.arm_min_gap[i]);
        r.effective_gapindep[i] =
            effective_offline_gapindep(t.offline_counts[i], t.omegas[i], t.max_triggered, t.horizon, t.arms);
    }
    r.tau = solve_tau_star(t.offline_counts, t.max_triggered, t.horizon);
    r.gap_dependent = gap_dependent_bound(t);
    r.gamma = gamma_bound(t, r.tau);
    r.gap_independent = gap_independent_bound(t);
    return r;
}

std::string format_bounds_text(const BoundsReport& r) {
    const auto& t = r.theory;
    std::ostringstream out;
    out << "instance: env=" << to_string(r.instance.env.model) << " m=" << t.arms
        << " k=" << r.instance.env.action_size << " K=" << t.max_triggered << " B=" << g6(t.smoothness)
        << " T=" << t.horizon << " alpha=" << g6(r.instance.alpha) << " opt=" << g6(t.gaps.opt) << "\n\n";

    Table actions({"action", "gap"});
    for (const auto& [a, gap] : t.gaps.action_gaps) actions.add({action_str(a), g6(gap)});
    out << "action gaps\n" << actions.str() << '\n';

    Table arms({"arm", "mu_on", "mu_off", "V", "omega", "N", "delta_min", "delta_max", "N'", "N''", "n*"});
    for (std::size_t i = 0; i < t.arms; ++i) {
        arms.add({std::to_string(i), g6(r.instance.env.mean[i]), g6(r.instance.mu_off[i]), g6(t.bias_bounds[i]),
                  g6(t.omegas[i]), std::to_string(t.offline_counts[i]), g6(t.gaps.arm_min_gap[i]),
                  g6(t.gaps.arm_max_gap[i]), g6(r.effective_gapdep[i]), g6(r.effective_gapindep[i]),
                  g6(r.tau.allocation[i])});
    }
    out << "per-arm profile\n" << arms.str() << '\n';

    Table summary({"quantity", "value"});
    summary.add({"delta_min", g6(t.gaps.min_gap)});
    summary.add({"delta_max", g6(t.gaps.max_gap)});
    summary.add({"tau*", g6(r.tau.tau)});
    summary.add({"tau* (integer)", std::to_string(r.tau.tau_integer)});
    summary.add({"gap-dependent bound", g6(r.gap_dependent)});
    summary.add({"psi", g6(r.gap_independent.psi)});
    summary.add({"gamma", g6(r.gamma.value)});
    summary.add({"additive terms", g6(r.gap_independent.additive)});
    summary.add({"gap-independent bound", g6(r.gap_independent.value)});
    summary.add({"winning branch",
                 r.gap_independent.branch == GapIndependentBranch::Psi ? "psi" : "gamma"});
    out << "bounds\n" << summary.str();
    if (!r.gamma.diagnostic.empty()) out << "note: " << r.gamma.diagnostic << '\n';
    return out.str();
}

std::string format_bounds_records(const BoundsReport& r) {
    using text::format_double;
    const auto& t = r.theory;
    std::ostringstream out;
    out << "instance env=" << to_string(r.instance.env.model) << " m=" << t.arms
        << " k=" << r.instance.env.action_size << " K=" << t.max_triggered
        << " B=" << format_double(t.smoothness) << " T=" << t.horizon
        << " alpha=" << format_double(r.instance.alpha) << " opt=" << format_double(t.gaps.opt) << '\n';
    for (const auto& [a, gap] : t.gaps.action_gaps)
        out << "action arms=" << text::join(a, ',', [](ArmIndex i) { return std::to_string(i); })
            << " gap=" << format_double(gap) << '\n';
    for (std::size_t i = 0; i < t.arms; ++i) {
        out << "arm index=" << i << " mu_on=" << format_double(r.instance.env.mean[i])
            << " mu_off=" << format_double(r.instance.mu_off[i]) << " V=" << format_double(t.bias_bounds[i])
            << " omega=" << format_double(t.omegas[i]) << " N=" << t.offline_counts[i]
            << " delta_min=" << format_double(t.gaps.arm_min_gap[i])
            << " delta_max=" << format_double(t.gaps.arm_max_gap[i])
            << " n_eff_gapdep=" << format_double(r.effective_gapdep[i])
            << " n_eff_gapindep=" << format_double(r.effective_gapindep[i])
            << " n_star=" << format_double(r.tau.allocation[i]) << '\n';
    }
    out << "bounds delta_min=" << format_double(t.gaps.min_gap) << " delta_max=" << format_double(t.gaps.max_gap)
        << " tau_star=" << format_double(r.tau.tau) << " tau_star_int=" << r.tau.tau_integer
        << " gap_dependent=" << format_double(r.gap_dependent) << " psi=" << format_double(r.gap_independent.psi)
        << " gamma=" << format_double(r.gamma.value) << " additive=" << format_double(r.gap_independent.additive)
        << " gap_independent=" << format_double(r.gap_independent.value) << " branch="
        << (r.gap_independent.branch == GapIndependentBranch::Psi ? "psi" : "gamma") << '\n';
    return out.str();
}

}  // namespace hcmab
