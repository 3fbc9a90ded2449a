#pragma once

// Runtime selection of a builtin manifold from a JSON description.

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "geonet/errors.hpp"
#include "geonet/manifold.hpp"

namespace geonet {

using AnyManifold = std::variant<RoundSphere, Ellipsoid, ConformalSphere, FlatTorus, TorusOfRevolution>;

namespace detail {

template <class J>
void reject_unknown_keys(const J& j, const std::vector<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& a : allowed) ok = ok || a == it.key();
        if (!ok) throw ValidationError(where + "." + it.key() + ": unknown key");
    }
}

template <class J>
double positive_number(const J& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ValidationError(where + "." + key + ": required");
    if (!j.at(key).is_number()) throw ValidationError(where + "." + key + ": expected a number");
    const double v = j.at(key).template get<double>();
    if (!(v > 0)) throw ValidationError(where + "." + key + ": must be positive");
    return v;
}

}  // namespace detail

/// {"kind": ..., kind-specific parameters, optional "inj" and "diam" overrides}.
///   RoundSphere: radius
///   Ellipsoid: axes [a, b, c]
///   ConformalSphere: radius, terms [{l, m, coeff}]
///   FlatTorus: basis [[b1x, b1y], [b2x, b2y]]
///   TorusOfRevolution: major, minor
template <class J>
AnyManifold make_manifold(const J& j) {
    const std::string where = "manifold";
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ValidationError(where + ".kind: required string");
    const std::string kind = j.at("kind").template get<std::string>();
    const bool has_overrides = j.contains("inj") || j.contains("diam");
    auto overrides = [&](double inj, double diam) {
        if (j.contains("inj")) inj = detail::positive_number(j, "inj", where);
        if (j.contains("diam")) diam = detail::positive_number(j, "diam", where);
        return std::pair{inj, diam};
    };
    try {
        if (kind == "RoundSphere") {
            detail::reject_unknown_keys(j, {"kind", "radius", "inj", "diam"}, where);
            const double r = j.contains("radius") ? detail::positive_number(j, "radius", where) : 1.0;
            const RoundSphere base(r);
            if (!has_overrides) return base;
            const auto [inj, diam] = overrides(base.inj(), base.diam());
            return RoundSphere(r, inj, diam);
        }
        if (kind == "Ellipsoid") {
            detail::reject_unknown_keys(j, {"kind", "axes", "inj", "diam"}, where);
            if (!j.contains("axes") || !j.at("axes").is_array() || j.at("axes").size() != 3)
                throw ValidationError(where + ".axes: expected [a, b, c]");
            const auto ax = j.at("axes").template get<std::vector<double>>();
            const Ellipsoid base(ax[0], ax[1], ax[2]);
            if (!has_overrides) return base;
            const auto [inj, diam] = overrides(base.inj(), base.diam());
            return Ellipsoid(ax[0], ax[1], ax[2], inj, diam);
        }
        if (kind == "ConformalSphere") {
            detail::reject_unknown_keys(j, {"kind", "radius", "terms", "inj", "diam"}, where);
            const double r = j.contains("radius") ? detail::positive_number(j, "radius", where) : 1.0;
            std::vector<HarmonicTerm> terms;
            if (j.contains("terms")) {
                if (!j.at("terms").is_array()) throw ValidationError(where + ".terms: expected an array");
                for (const auto& t : j.at("terms")) {
                    detail::reject_unknown_keys(t, {"l", "m", "coeff"}, where + ".terms[]");
                    terms.push_back({t.at("l").template get<int>(), t.at("m").template get<int>(),
                                     t.at("coeff").template get<double>()});
                }
            }
            const ConformalSphere base(r, terms);
            if (!has_overrides) return base;
            const auto [inj, diam] = overrides(base.inj(), base.diam());
            return ConformalSphere(r, terms, inj, diam);
        }
        if (kind == "FlatTorus") {
            detail::reject_unknown_keys(j, {"kind", "basis", "inj", "diam"}, where);
            Eigen::Matrix2d b = Eigen::Matrix2d::Identity();
            if (j.contains("basis")) {
                const auto& jb = j.at("basis");
                if (!jb.is_array() || jb.size() != 2 || jb[0].size() != 2 || jb[1].size() != 2)
                    throw ValidationError(where + ".basis: expected [[b1x, b1y], [b2x, b2y]]");
                for (int c = 0; c < 2; ++c)
                    for (int r = 0; r < 2; ++r) b(r, c) = jb[c][r].template get<double>();
            }
            const FlatTorus base(b);
            if (!has_overrides) return base;
            const auto [inj, diam] = overrides(base.inj(), base.diam());
            return FlatTorus(b, inj, diam);
        }
        if (kind == "TorusOfRevolution") {
            detail::reject_unknown_keys(j, {"kind", "major", "minor", "inj", "diam"}, where);
            const double R = detail::positive_number(j, "major", where);
            const double r = detail::positive_number(j, "minor", where);
            const TorusOfRevolution base(R, r);
            if (!has_overrides) return base;
            const auto [inj, diam] = overrides(base.inj(), base.diam());
            return TorusOfRevolution(R, r, inj, diam);
        }
    } catch (const typename J::exception& e) {
        throw ValidationError(where + ": " + e.what());
    }
    throw ValidationError(where + ".kind: unknown manifold '" + kind + "'");
}

}  // namespace geonet
