#include "insitu/ergonomics.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "embedded.hpp"

namespace insitu {

std::string_view to_string(Build build) {
    switch (build) {
        case Build::slim: return "slim";
        case Build::average: return "average";
        case Build::broad: return "broad";
    }
    return "average";
}

std::optional<Build> parse_build(std::string_view text) {
    for (auto b : {Build::slim, Build::average, Build::broad}) {
        if (to_string(b) == text) return b;
    }
    return std::nullopt;
}

ErgonomicTag ergonomic_tag_from_string(std::string_view name) {
    if (auto tag = parse_ergonomic_tag(name)) return *tag;
    throw Error(ErrorCode::UnknownTag, "unknown ergonomic tag '" + std::string(name) + "'");
}

namespace {

std::pair<double, double> band(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error(ErrorCode::ParseError, "expected a [lo, hi] pair");
    }
    const double lo = j[0].get<double>(), hi = j[1].get<double>();
    if (!(lo <= hi)) throw Error(ErrorCode::ParseError, "band has lo > hi");
    return {lo, hi};
}

}  // namespace

ErgonomicTable ErgonomicTable::from_json(std::string_view text) {
    ErgonomicTable t;
    try {
        const auto doc = nlohmann::json::parse(text);
        std::tie(t.stature_lo_, t.stature_hi_) = band(doc.at("stature_range"));
        for (const auto& [name, value] : doc.at("proportional").items()) {
            t.proportional_[ergonomic_tag_from_string(name)] = band(value);
        }
        for (const auto& [name, value] : doc.at("fixed").items()) {
            t.fixed_[ergonomic_tag_from_string(name)] = band(value);
        }
        for (const auto& [name, value] : doc.at("build_multiplier").items()) {
            auto b = parse_build(name);
            if (!b) throw Error(ErrorCode::ParseError, "unknown build '" + name + "'");
            t.multiplier_[*b] = value.get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("ergonomic table: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnknownTag) throw Error(ErrorCode::ParseError, e.what());
        throw;
    }
    return t;
}

const ErgonomicTable& ErgonomicTable::builtin() {
    static const ErgonomicTable table = from_json(embedded::ergonomics());
    return table;
}

RecommendedRange ErgonomicTable::recommend(ErgonomicTag tag, const BodyProfile& profile) const {
    if (!std::isfinite(profile.stature) || profile.stature < stature_lo_ ||
        profile.stature > stature_hi_) {
        throw Error(ErrorCode::InvalidProfile, "stature " + format_number(profile.stature) +
                                                   " m outside [" + format_number(stature_lo_) +
                                                   ", " + format_number(stature_hi_) + "]");
    }
    if (auto it = proportional_.find(tag); it != proportional_.end()) {
        return {it->second.first * profile.stature, it->second.second * profile.stature, false};
    }
    if (auto it = fixed_.find(tag); it != fixed_.end()) {
        auto m = multiplier_.find(profile.build);
        const double k = m == multiplier_.end() ? 1.0 : m->second;
        return {it->second.first * k, it->second.second * k, false};
    }
    throw Error(ErrorCode::UnknownTag, "no coefficients for '" + std::string(to_string(tag)) + "'");
}

RecommendedRange ErgonomicTable::reconcile(ErgonomicTag tag,
                                           const std::vector<BodyProfile>& profiles) const {
    if (profiles.empty()) throw Error(ErrorCode::EmptyProfileList, "no body profiles given");
    if (is_additive(tag)) {
        // Summed in sorted order so the result does not depend on profile order.
        std::vector<double> los, his;
        for (const auto& p : profiles) {
            const auto r = recommend(tag, p);
            los.push_back(r.lo);
            his.push_back(r.hi);
        }
        std::sort(los.begin(), los.end());
        std::sort(his.begin(), his.end());
        RecommendedRange sum;
        for (double v : los) sum.lo += v;
        for (double v : his) sum.hi += v;
        return sum;
    }
    double max_lo = -INFINITY, min_hi = INFINITY;
    for (const auto& p : profiles) {
        const auto r = recommend(tag, p);
        max_lo = std::max(max_lo, r.lo);
        min_hi = std::min(min_hi, r.hi);
    }
    if (max_lo <= min_hi) return {max_lo, min_hi, false};
    return {min_hi, max_lo, true};
}

RecommendedRange recommend(ErgonomicTag tag, const BodyProfile& profile) {
    return ErgonomicTable::builtin().recommend(tag, profile);
}

RecommendedRange reconcile(ErgonomicTag tag, const std::vector<BodyProfile>& profiles) {
    return ErgonomicTable::builtin().reconcile(tag, profiles);
}

std::optional<RecommendedRange> recommended_range(const Configuration& config,
                                                  const ParameterDef& def,
                                                  const std::vector<BodyProfile>& profiles) {
    if (!def.ergonomic || profiles.empty()) return std::nullopt;
    auto r = reconcile(def.ergonomic->tag, profiles);
    if (def.ergonomic->offset_param) {
        const double base = config.number(*def.ergonomic->offset_param);
        r.lo += base;
        r.hi += base;
    }
    return r;
}

}  // namespace insitu
