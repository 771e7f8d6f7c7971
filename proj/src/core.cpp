#include "hcmab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hcmab/errors.hpp"

namespace hcmab {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

MeanVector::MeanVector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!in_unit(values_[i]))
            throw DomainError("mean of arm " + std::to_string(i) + " outside [0,1]");
    }
}

double MeanVector::at(ArmIndex i) const {
    if (i >= values_.size()) throw ShapeError("arm index " + std::to_string(i) + " out of range");
    return values_[i];
}

BiasVector::BiasVector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!in_unit(values_[i]))
            throw DomainError("bias bound of arm " + std::to_string(i) + " outside [0,1]");
    }
}

BiasVector BiasVector::uniform(std::size_t arms, double v) {
    return BiasVector(std::vector<double>(arms, v));
}

OfflineDataset::OfflineDataset(std::vector<std::vector<double>> samples)
    : samples_(std::move(samples)) {
    means_.reserve(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& ys = samples_[i];
        for (double y : ys) {
            if (!in_unit(y))
                throw DomainError("offline sample for arm " + std::to_string(i) + " outside [0,1]");
        }
        if (ys.empty()) {
            means_.emplace_back(std::nullopt);
        } else {
            double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
            means_.emplace_back(std::clamp(mean, 0.0, 1.0));
        }
    }
}

OfflineDataset OfflineDataset::empty(std::size_t arms) {
    return OfflineDataset(std::vector<std::vector<double>>(arms));
}

void update_online_mean(ArmState& state, double x) {
    if (!in_unit(x)) throw DomainError("online observation outside [0,1]");
    state.trigger_count += 1;
    state.online_mean += (x - state.online_mean) / static_cast<double>(state.trigger_count);
    state.online_sum += x;
}

double confidence_delta(std::uint64_t t, std::size_t arms) {
    if (t == 0 || arms == 0) throw DomainError("confidence schedule needs t >= 1 and m >= 1");
    const double tt = static_cast<double>(t);
    return 1.0 / (2.0 * static_cast<double>(arms) * tt * tt);
}

double confidence_log_term(std::uint64_t t, std::size_t arms) {
    if (t == 0 || arms == 0) throw DomainError("confidence schedule needs t >= 1 and m >= 1");
    const double tt = static_cast<double>(t);
    return std::log(4.0 * static_cast<double>(arms) * tt * tt * tt);
}

double omega(double bias_bound, double mu_off, double mu_on, ArmIndex arm) {
    if (std::abs(mu_off - mu_on) > bias_bound + kBiasTolerance) {
        throw BiasViolation(arm, "arm " + std::to_string(arm) +
                                     ": |mu_off - mu_on| exceeds the bias bound");
    }
    return std::clamp(bias_bound + mu_off - mu_on, 0.0, 2.0 * bias_bound);
}

std::vector<ArmIndex> validate_bias(const MeanVector& mu_off, const MeanVector& mu_on,
                                    const BiasVector& v) {
    if (mu_off.size() != mu_on.size() || mu_on.size() != v.size())
        throw ShapeError("validate_bias: vectors have different lengths");
    std::vector<ArmIndex> bad;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(mu_off[i] - mu_on[i]) > v[i] + kBiasTolerance) bad.push_back(i);
    }
    return bad;
}

std::vector<ArmState> initial_arm_states(const OfflineDataset& data, const BiasVector& v) {
    if (data.arms() != v.size()) throw ShapeError("offline dataset and bias vector lengths differ");
    std::vector<ArmState> states(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        states[i].offline_count = data.count(i);
        states[i].offline_mean = data.mean(i);
        states[i].bias_bound = v[i];
    }
    return states;
}

}  // namespace hcmab
