#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "posetnn/error.hpp"
#include "posetnn/filters.hpp"
#include "posetnn/histogram.hpp"
#include "posetnn/nn.hpp"
#include "posetnn/polytope.hpp"
#include "posetnn/poset.hpp"
#include "posetnn/tropical.hpp"

namespace posetnn {

using Json = nlohmann::json; // std::map-backed: keys are emitted sorted

namespace detail {

template <class F>
auto guarded(const char* what, F&& f)
{
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

} // namespace detail

// {"n": int, "covers": [[i,j],...], "labels": [str,...]}
inline Json to_json(const Poset& p)
{
    Json covers = Json::array();
    for (auto [i, j] : p.covers())
        covers.push_back({i, j});
    return Json{{"n", p.size()}, {"covers", covers}, {"labels", p.labels()}};
}

inline Poset poset_from_json(const Json& j)
{
    return detail::guarded("poset JSON", [&] {
        const auto n = j.at("n").get<std::size_t>();
        std::vector<Poset::Relation> rel;
        for (const auto& c : j.at("covers"))
            rel.emplace_back(c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>());
        Poset p = Poset::from_relations(n, rel);
        if (j.contains("labels"))
            p = p.with_labels(j.at("labels").get<std::vector<std::string>>());
        return p;
    });
}

// {"dim": int, "vertices": [[int,...],...]}
inline Json to_json(const LatticePolytope& c)
{
    return Json{{"dim", c.dim}, {"vertices", c.vertices}};
}

inline LatticePolytope polytope_from_json(const Json& j)
{
    return detail::guarded("polytope JSON", [&] {
        return LatticePolytope(j.at("dim").get<std::size_t>(),
                               j.at("vertices").get<std::vector<LatticePoint>>());
    });
}

// {"nvars": int, "monomials": [{"exp": [...], "coef": "p/q" | "-inf"}, ...]}
inline Json to_json(const TropicalPolynomial& f)
{
    Json ms = Json::array();
    for (const auto& m : f.monomials())
        ms.push_back(Json{{"exp", m.exp}, {"coef", to_string(m.coef)}});
    return Json{{"nvars", f.nvars()}, {"monomials", ms}};
}

inline TropicalPolynomial tropical_from_json(const Json& j)
{
    return detail::guarded("polynomial JSON", [&] {
        const auto n = j.at("nvars").get<std::size_t>();
        std::vector<Monomial> terms;
        for (const auto& m : j.at("monomials")) {
            const auto& c = m.at("coef");
            Rational coef;
            if (c.is_string()) {
                const auto s = c.get<std::string>();
                if (s == "-inf")
                    continue;
                coef = parse_rational(s);
            } else {
                coef = make_rational(c.get<std::int64_t>());
            }
            terms.push_back(Monomial{m.at("exp").get<Exponent>(), coef});
        }
        return TropicalPolynomial(n, std::move(terms));
    });
}

inline Json threshold_to_json(const Threshold& t)
{
    if (!t)
        return "-inf";
    return *t;
}

inline Json to_json(const IvnnLayer& l)
{
    Json w = Json::array();
    for (std::size_t i = 0; i < l.in; ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < l.out; ++j)
            row.push_back(l.w(i, j));
        w.push_back(row);
    }
    Json t = Json::array();
    for (const auto& th : l.thresholds)
        t.push_back(threshold_to_json(th));
    return Json{{"in", l.in}, {"out", l.out}, {"weights", w}, {"bias", l.bias}, {"thresholds", t}};
}

inline Json to_json(const Ivnn& net)
{
    Json layers = Json::array();
    for (const auto& l : net.layers)
        layers.push_back(to_json(l));
    return Json{{"input_dim", net.input_dim}, {"layers", layers}};
}

inline Json to_json(const PosetNN& net)
{
    Json br = Json::array();
    for (const auto& e : net.branches)
        br.push_back(e.perm);
    Json j{{"input_dim", net.input_dim}, {"branches", br}, {"chain", to_json(net.chain)}};
    j["source"] = net.source ? to_json(*net.source) : Json(nullptr);
    return j;
}

// {"m": int, "terms": [[num,...],...], "provenance": {...}}
inline Json to_json(const PoolingFilter& f)
{
    Json prov = Json::object();
    switch (f.provenance.kind) {
    case FilterProvenance::Kind::Poset:
        prov["kind"] = "poset";
        prov["poset"] = to_json(*f.provenance.poset);
        prov["literal"] = format_poset(*f.provenance.poset);
        prov["map"] = f.provenance.map;
        break;
    case FilterProvenance::Kind::Random:
        prov["kind"] = "random";
        prov["seed"] = *f.provenance.seed;
        prov["distribution"] = "uniform[0,1)";
        break;
    case FilterProvenance::Kind::Custom:
        prov["kind"] = "custom";
        break;
    }
    return Json{{"m", f.m}, {"terms", f.terms}, {"provenance", prov}};
}

inline PoolingFilter filter_from_json(const Json& j)
{
    return detail::guarded("filter JSON", [&] {
        const auto m = j.at("m").get<std::size_t>();
        auto terms = j.at("terms").get<std::vector<std::vector<double>>>();
        FilterProvenance prov;
        if (j.contains("provenance")) {
            const auto& p = j.at("provenance");
            const auto kind = p.value("kind", std::string("custom"));
            if (kind == "poset") {
                prov.kind = FilterProvenance::Kind::Poset;
                prov.poset = poset_from_json(p.at("poset"));
                prov.map = p.at("map").get<IndexMap>();
            } else if (kind == "random") {
                prov.kind = FilterProvenance::Kind::Random;
                prov.seed = p.at("seed").get<std::uint64_t>();
            }
        }
        return make_filter(m, std::move(terms), std::move(prov));
    });
}

inline Json to_json(const LatticeHistogram& h)
{
    return Json{{"name", h.name},       {"bin_width", h.bin_width}, {"counts", h.counts},
                {"samples", h.samples}, {"positive", h.positive},   {"mean", h.mean},
                {"std", h.std}};
}

} // namespace posetnn
