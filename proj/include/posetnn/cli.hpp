#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "posetnn/posetnn.hpp"

namespace posetnn::cli {

/// Bad flags or arguments; exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Format { Text, Json, Csv };

inline std::string fmt(double v)
{
    if (v == -std::numeric_limits<double>::infinity())
        return "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(cur);
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

inline std::vector<double> parse_doubles(const std::string& s)
{
    std::vector<double> out;
    for (const auto& part : split(s, ',')) {
        const auto t = trim(part);
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            throw UsageError("not a number: '" + t + "'");
        }
        if (used != t.size())
            throw UsageError("not a number: '" + t + "'");
        out.push_back(v);
    }
    return out;
}

inline std::vector<std::size_t> parse_indices(const std::string& s)
{
    std::vector<std::size_t> out;
    for (const auto& part : split(s, ',')) {
        const auto t = trim(part);
        if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
            throw UsageError("not an index: '" + t + "'");
        out.push_back(std::stoul(t));
    }
    return out;
}

/// "a,b|c,d" -> two points.
inline LatticePolytope parse_points(const std::string& s)
{
    std::vector<LatticePoint> pts;
    std::size_t dim = 0;
    for (const auto& part : split(s, '|')) {
        LatticePoint p;
        for (const auto& c : split(part, ',')) {
            const auto t = trim(c);
            try {
                std::size_t used = 0;
                p.push_back(std::stoll(t, &used));
                if (used != t.size())
                    throw std::invalid_argument(t);
            } catch (const std::exception&) {
                throw UsageError("not an integer coordinate: '" + t + "'");
            }
        }
        if (!pts.empty() && p.size() != dim)
            throw DimensionError("points of different dimensions in '" + s + "'");
        dim = p.size();
        pts.push_back(std::move(p));
    }
    return LatticePolytope(dim, std::move(pts));
}

inline std::string join_point(const LatticePoint& p, const char* sep = " ")
{
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i)
            s += sep;
        s += std::to_string(p[i]);
    }
    return s;
}

inline std::string join_perm(const std::vector<std::size_t>& perm, const std::vector<std::string>& names)
{
    std::string s;
    for (std::size_t k = 0; k < perm.size(); ++k) {
        if (k)
            s += " ";
        s += names.at(perm[k]);
    }
    return s;
}

/// Emits a vertex list in the requested format.
inline void emit_polytope(std::ostream& os, Format f, const LatticePolytope& c)
{
    if (f == Format::Json) {
        os << to_json(c).dump(2) << "\n";
    } else if (f == Format::Csv) {
        for (std::size_t i = 0; i < c.dim; ++i)
            os << (i ? "," : "") << "c" << i;
        os << "\n";
        for (const auto& v : c.vertices)
            os << join_point(v, ",") << "\n";
    } else {
        for (const auto& v : c.vertices)
            os << join_point(v) << "\n";
    }
}

inline std::string format_threshold(const Threshold& t) { return t ? fmt(*t) : "-inf"; }

inline void print_layers(std::ostream& os, const Ivnn& net)
{
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const auto& l = net.layers[k];
        os << "layer " << k + 1 << ": " << l.in << " -> " << l.out << ", ReLU_t with t = (";
        for (std::size_t j = 0; j < l.out; ++j)
            os << (j ? ", " : "") << format_threshold(l.thresholds[j]);
        os << ")\n";
        for (std::size_t i = 0; i < l.in; ++i) {
            os << "  [";
            for (std::size_t j = 0; j < l.out; ++j)
                os << (j ? " " : "") << l.w(i, j);
            os << "]\n";
        }
        bool any_bias = false;
        for (double b : l.bias)
            any_bias = any_bias || b != 0.0;
        if (any_bias) {
            os << "  bias (";
            for (std::size_t j = 0; j < l.out; ++j)
                os << (j ? ", " : "") << fmt(l.bias[j]);
            os << ")\n";
        }
    }
}

struct Context {
    Format format = Format::Text;
    std::optional<std::uint64_t> seed;
    std::ostream* out = nullptr;

    std::uint64_t require_seed(const std::string& cmd) const
    {
        if (!seed)
            throw UsageError(cmd + " is randomized and requires --seed");
        return *seed;
    }
};

inline PoolingFilter filter_from_flags(const Context& ctx, const std::string& cmd,
                                       const std::string& poset, const std::string& map,
                                       std::size_t random_k, std::size_t m)
{
    if (!poset.empty() && random_k > 0)
        throw UsageError(cmd + ": give either --poset or --random, not both");
    if (random_k > 0)
        return random_filter(m, random_k, ctx.require_seed(cmd + " --random"));
    if (poset.empty())
        throw UsageError(cmd + ": one of --poset or --random is required");
    const Poset p = parse_poset(poset);
    return filter_from_poset(p, map.empty() ? identity_map(p.size()) : parse_indices(map));
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"") == std::string::npos)
        return s;
    std::string r = "\"";
    for (char c : s) {
        if (c == '"')
            r += '"';
        r += c;
    }
    return r + "\"";
}

/**
 * Runs the command line. Output goes to `out` (or the --out file), messages
 * to `err`. Returns 0 on success, 1 on a domain error, 2 on a usage error.
 */
inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Posets, order polytopes, tropical polynomials and poset networks", "posetnn"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string format = "text";
    std::string out_path;
    std::optional<std::uint64_t> seed;
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--out", out_path, "Write output to this file");
    app.add_option("--seed", seed, "Seed for randomized commands");

    std::function<void(Context&)> action;
    auto on = [&](CLI::App* sub, std::function<void(Context&)> f) {
        sub->callback([&action, f] { action = f; });
    };

    // poset ---------------------------------------------------------------
    auto* poset_cmd = app.add_subcommand("poset", "Finite posets");
    poset_cmd->require_subcommand(1);

    std::size_t list_n = 4;
    auto* poset_list = poset_cmd->add_subcommand("list", "All posets on n points up to isomorphism");
    poset_list->add_option("--n", list_n, "Number of points (at most 6)");
    on(poset_list, [&](Context& c) {
        const auto all = enumerate_posets(list_n);
        if (c.format == Format::Json) {
            Json arr = Json::array();
            for (const auto& p : all) {
                Json j = to_json(p);
                j["literal"] = format_poset(p);
                arr.push_back(j);
            }
            *c.out << arr.dump(2) << "\n";
        } else if (c.format == Format::Csv) {
            *c.out << "index,literal,extensions,vertices\n";
            for (std::size_t i = 0; i < all.size(); ++i)
                *c.out << i << "," << csv_escape(format_poset(all[i])) << ","
                       << count_linear_extensions(all[i]) << ","
                       << order_polytope_vertices(all[i]).size() << "\n";
        } else {
            for (const auto& p : all)
                *c.out << format_poset(p) << "\n";
        }
    });

    std::string show_lit;
    auto* poset_show = poset_cmd->add_subcommand("show", "Covers, linear extensions and order polytope");
    poset_show->add_option("poset", show_lit, "Poset literal, e.g. \"4; 0<2, 1<2, 1<3\"")->required();
    on(poset_show, [&](Context& c) {
        const Poset p = parse_poset(show_lit);
        const auto exts = linear_extensions(p);
        const auto poly = order_polytope_vertices(p);
        const auto names = variable_names(p.size());
        if (c.format == Format::Json) {
            Json j = to_json(p);
            j["literal"] = format_poset(p);
            Json e = Json::array();
            for (const auto& x : exts)
                e.push_back(x.perm);
            j["extensions"] = e;
            j["vertices"] = poly.vertices;
            *c.out << j.dump(2) << "\n";
            return;
        }
        if (c.format == Format::Csv)
            throw UsageError("poset show supports text and json output");
        *c.out << "poset: " << format_poset(p) << "\n";
        *c.out << "points: " << p.size() << " (" << join_perm(identity_map(p.size()), names) << ")\n";
        *c.out << "linear extensions: " << exts.size() << "\n";
        for (const auto& x : exts)
            *c.out << "  " << join_perm(x.perm, names) << "\n";
        *c.out << "order polytope vertices: " << poly.size() << "\n";
        for (const auto& v : poly.vertices)
            *c.out << "  " << join_point(v) << "\n";
    });

    std::string compose_outer;
    std::vector<std::string> compose_inner;
    auto* poset_compose = poset_cmd->add_subcommand("compose", "Lexicographic sum P(Q_1, ..., Q_n)");
    poset_compose->add_option("outer", compose_outer, "Outer poset")->required();
    poset_compose->add_option("inner", compose_inner, "One poset per point of the outer poset");
    on(poset_compose, [&](Context& c) {
        std::vector<Poset> qs;
        for (const auto& s : compose_inner)
            qs.push_back(parse_poset(s));
        const Poset r = lex_sum(parse_poset(compose_outer), qs);
        if (c.format == Format::Json)
            *c.out << to_json(r).dump(2) << "\n";
        else
            *c.out << format_poset(r) << "\n";
    });

    // trop ----------------------------------------------------------------
    auto* trop_cmd = app.add_subcommand("trop", "Tropical polynomials");
    trop_cmd->require_subcommand(1);

    std::string of_lit;
    bool of_expanded = false;
    auto* trop_of = trop_cmd->add_subcommand("of-poset", "Tropical polynomial Tr(P) (max-plus)");
    trop_of->add_option("poset", of_lit, "Poset literal")->required();
    trop_of->add_flag("--expanded", of_expanded, "Also print the sum over linear extensions");
    on(trop_of, [&](Context& c) {
        const Poset p = parse_poset(of_lit);
        const auto f = tr_of_poset(p);
        if (c.format == Format::Json) {
            Json j = to_json(f);
            j["text"] = format_tropical(f);
            if (of_expanded) {
                const auto ep = expanded_presentation(p);
                Json s = Json::array();
                for (const auto& t : ep.summands)
                    s.push_back(format_tropical(t));
                j["expanded"] = s;
            }
            *c.out << j.dump(2) << "\n";
            return;
        }
        *c.out << format_tropical(f) << "\n";
        if (of_expanded)
            *c.out << "= " << expanded_presentation(p).factored() << "\n";
    });

    std::string act_outer, act_vars = "x,y,z";
    std::vector<std::string> act_polys;
    bool act_block = false;
    auto* trop_act = trop_cmd->add_subcommand("act", "Action of a poset on tropical polynomials");
    trop_act->add_option("poset", act_outer, "Outer poset")->required();
    trop_act->add_option("polynomials", act_polys, "One polynomial per point, e.g. \"x^2 + y\"");
    trop_act->add_option("--vars", act_vars, "Comma-separated variable names of the inputs");
    trop_act->add_flag("--block", act_block, "Give every input its own block of variables");
    on(trop_act, [&](Context& c) {
        std::vector<std::string> names;
        for (const auto& v : split(act_vars, ','))
            names.push_back(trim(v));
        std::vector<TropicalPolynomial> fs;
        for (const auto& s : act_polys)
            fs.push_back(parse_tropical(s, names));
        const Poset p = parse_poset(act_outer);
        const auto r = act_block ? act_on_tropical(p, fs) : act_on_tropical_shared(p, fs);
        const auto out_names = act_block ? variable_names(r.nvars()) : names;
        if (c.format == Format::Json) {
            Json j = to_json(r);
            j["text"] = format_tropical(r, out_names);
            *c.out << j.dump(2) << "\n";
        } else {
            *c.out << format_tropical(r, out_names) << "\n";
        }
    });

    std::string rec_poly, rec_vars;
    std::size_t rec_nvars = 0;
    auto* trop_rec = trop_cmd->add_subcommand("recover", "Recover P from Tr(P)");
    trop_rec->add_option("polynomial", rec_poly, "Polynomial of a poset")->required();
    trop_rec->add_option("--nvars", rec_nvars, "Number of variables (default: from --vars, else 4)");
    trop_rec->add_option("--vars", rec_vars, "Comma-separated variable names");
    on(trop_rec, [&](Context& c) {
        std::vector<std::string> names;
        if (!rec_vars.empty()) {
            for (const auto& v : split(rec_vars, ','))
                names.push_back(trim(v));
        } else {
            names = variable_names(rec_nvars ? rec_nvars : 4);
        }
        const Poset p = poset_from_tropical(parse_tropical(rec_poly, names));
        if (c.format == Format::Json)
            *c.out << to_json(p).dump(2) << "\n";
        else
            *c.out << format_poset(p) << "\n";
    });

    // polytope ------------------------------------------------------------
    auto* poly_cmd = app.add_subcommand("polytope", "Order polytopes and the action on polytopes");
    poly_cmd->require_subcommand(1);

    std::string vert_lit;
    auto* poly_vert = poly_cmd->add_subcommand("vertices", "Vertices of Poly(P)");
    poly_vert->add_option("poset", vert_lit, "Poset literal")->required();
    on(poly_vert, [&](Context& c) { emit_polytope(*c.out, c.format, order_polytope_vertices(parse_poset(vert_lit))); });

    std::string pact_outer;
    std::vector<std::string> pact_inputs;
    bool pact_points = false;
    auto* poly_act = poly_cmd->add_subcommand("act", "P(C_1, ..., C_n), blocks side by side");
    poly_act->add_option("poset", pact_outer, "Outer poset")->required();
    poly_act->add_option("inputs", pact_inputs, "Poset literals (order polytopes) or, with --points, vertex lists \"0,0|1,1\"");
    poly_act->add_flag("--points", pact_points, "Inputs are vertex lists");
    on(poly_act, [&](Context& c) {
        std::vector<LatticePolytope> cs;
        for (const auto& s : pact_inputs)
            cs.push_back(pact_points ? parse_points(s) : order_polytope_vertices(parse_poset(s)));
        emit_polytope(*c.out, c.format, act_on_polytopes(parse_poset(pact_outer), cs));
    });

    std::string tri_lit;
    auto* poly_tri = poly_cmd->add_subcommand("triangulate", "One simplex per linear extension");
    poly_tri->add_option("poset", tri_lit, "Poset literal")->required();
    on(poly_tri, [&](Context& c) {
        const Poset p = parse_poset(tri_lit);
        const auto simplices = triangulate(p);
        const auto names = variable_names(p.size());
        if (c.format == Format::Json) {
            Json arr = Json::array();
            for (const auto& s : simplices)
                arr.push_back(Json{{"extension", s.extension.perm}, {"vertices", s.vertices}});
            *c.out << arr.dump(2) << "\n";
            return;
        }
        for (const auto& s : simplices) {
            *c.out << join_perm(s.extension.perm, names) << ":";
            for (const auto& v : s.vertices)
                *c.out << " " << join_point(v, "");
            *c.out << "\n";
        }
    });

    // nn ------------------------------------------------------------------
    auto* nn_cmd = app.add_subcommand("nn", "Poset neural networks");
    nn_cmd->require_subcommand(1);

    std::string nn_lit;
    auto* nn_show = nn_cmd->add_subcommand("show", "Branches and layer matrices of nn(P)");
    nn_show->add_option("--poset", nn_lit, "Poset literal")->required();
    on(nn_show, [&](Context& c) {
        const auto net = poset_nn(parse_poset(nn_lit));
        if (c.format == Format::Json) {
            *c.out << to_json(net).dump(2) << "\n";
            return;
        }
        const auto names = variable_names(net.input_dim);
        *c.out << "branches: " << net.branch_count() << "\n";
        for (const auto& b : net.branches)
            *c.out << "  (" << join_perm(b.perm, names) << ")\n";
        *c.out << "shared chain network, depth " << net.depth() << "\n";
        print_layers(*c.out, net.chain);
    });

    std::string eval_lit, eval_x;
    bool eval_raw = false;
    auto* nn_eval = nn_cmd->add_subcommand("eval", "Evaluate nn(P) at a point");
    nn_eval->add_option("--poset", eval_lit, "Poset literal")->required();
    nn_eval->add_option("--x", eval_x, "Comma-separated input")->required();
    nn_eval->add_flag("--raw", eval_raw, "Print every branch instead of the maximum");
    on(nn_eval, [&](Context& c) {
        const auto net = poset_nn(parse_poset(eval_lit));
        const auto v = eval_nn(net, parse_doubles(eval_x), !eval_raw);
        if (c.format == Format::Json) {
            *c.out << Json(v).dump() << "\n";
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i)
            *c.out << (i ? (c.format == Format::Csv ? "," : " ") : "") << fmt(v[i]);
        *c.out << "\n";
    });

    std::string pieces_lit;
    GridSpec grid;
    auto* nn_pieces = nn_cmd->add_subcommand("pieces", "Distinct gradients of nn(P) on a grid");
    nn_pieces->add_option("--poset", pieces_lit, "Poset literal")->required();
    nn_pieces->add_option("--lo", grid.lo, "Lower grid bound");
    nn_pieces->add_option("--hi", grid.hi, "Upper grid bound");
    nn_pieces->add_option("--points", grid.points, "Samples per axis");
    on(nn_pieces, [&](Context& c) {
        const auto pc = count_affine_pieces_sampled(poset_nn(parse_poset(pieces_lit)), grid);
        if (c.format == Format::Json)
            *c.out << Json{{"pieces", pc.pieces}, {"bound", pc.bound}, {"samples", pc.samples}}.dump(2) << "\n";
        else if (c.format == Format::Csv)
            *c.out << "pieces,bound,samples\n" << pc.pieces << "," << pc.bound << "," << pc.samples << "\n";
        else
            *c.out << "pieces: " << pc.pieces << "\nbound: " << pc.bound << "\nsamples: " << pc.samples << "\n";
    });

    // filter --------------------------------------------------------------
    auto* filter_cmd = app.add_subcommand("filter", "Poset pooling filters");
    filter_cmd->require_subcommand(1);

    std::string f_poset, f_map;
    std::size_t f_random = 0, f_m = 4;
    auto add_filter_flags = [&](CLI::App* sub) {
        sub->add_option("--poset", f_poset, "Poset literal");
        sub->add_option("--map", f_map, "Window position of each poset point, e.g. 0,1,2,3");
        sub->add_option("--random", f_random, "Random filter with this many nonzero terms");
        sub->add_option("--m", f_m, "Window size of a random filter");
    };

    auto* f_emit = filter_cmd->add_subcommand("emit", "Print the filter terms");
    add_filter_flags(f_emit);
    on(f_emit, [&](Context& c) {
        const auto f = filter_from_flags(c, "filter emit", f_poset, f_map, f_random, f_m);
        if (c.format == Format::Json) {
            *c.out << to_json(f).dump(2) << "\n";
        } else {
            const char* sep = c.format == Format::Csv ? "," : " ";
            for (const auto& t : f.terms) {
                for (std::size_t i = 0; i < t.size(); ++i)
                    *c.out << (i ? sep : "") << fmt(t[i]);
                *c.out << "\n";
            }
        }
    });

    std::string pool_matrix, pool_image, pool_write;
    bool pool_relu = false;
    auto* f_pool = filter_cmd->add_subcommand("pool", "2x2 pooling of a matrix or an image");
    add_filter_flags(f_pool);
    f_pool->add_option("--matrix", pool_matrix, "Rows separated by ';', entries by ','");
    f_pool->add_option("--image", pool_image, "Binary PGM/PPM input");
    f_pool->add_option("--write", pool_write, "Where to write the pooled image");
    f_pool->add_flag("--relu", pool_relu, "Apply ReLU before pooling");
    on(f_pool, [&](Context& c) {
        const auto f = filter_from_flags(c, "filter pool", f_poset, f_map, f_random, f_m);
        if (pool_matrix.empty() == pool_image.empty())
            throw UsageError("filter pool needs exactly one of --matrix or --image");
        if (!pool_matrix.empty()) {
            std::vector<std::vector<double>> rows;
            for (const auto& r : split(pool_matrix, ';'))
                rows.push_back(parse_doubles(r));
            for (const auto& r : rows)
                if (r.size() != rows.front().size())
                    throw ShapeError("matrix rows have different lengths");
            Tensor4 t(1, 1, rows.size(), rows.front().size());
            for (std::size_t y = 0; y < t.h; ++y)
                for (std::size_t x = 0; x < t.w; ++x)
                    t.at(0, 0, y, x) = rows[y][x];
            const auto r = pool2d(f, t, pool_relu);
            if (c.format == Format::Json) {
                Json rowsj = Json::array();
                for (std::size_t y = 0; y < r.output.h; ++y) {
                    Json row = Json::array();
                    for (std::size_t x = 0; x < r.output.w; ++x)
                        row.push_back(r.output.at(0, 0, y, x));
                    rowsj.push_back(row);
                }
                *c.out << Json{{"output", rowsj}, {"argmax", r.argmax}}.dump(2) << "\n";
                return;
            }
            for (std::size_t y = 0; y < r.output.h; ++y) {
                for (std::size_t x = 0; x < r.output.w; ++x)
                    *c.out << (x ? (c.format == Format::Csv ? "," : " ") : "") << fmt(r.output.at(0, 0, y, x));
                *c.out << "\n";
            }
            return;
        }
        const Image img = read_pnm(pool_image);
        auto planes = to_planes(img);
        Image out_img;
        for (std::size_t ch = 0; ch < planes.size(); ++ch) {
            Tensor4 t(1, 1, planes[ch].height, planes[ch].width);
            t.data = planes[ch].v;
            if (pool_relu)
                for (auto& v : t.data)
                    v = std::max(v, 0.0);
            planes[ch] = pool_plane(f, Plane{t.w, t.h, t.data});
            renormalize(planes[ch]);
        }
        out_img.width = planes.front().width;
        out_img.height = planes.front().height;
        out_img.channels = img.channels;
        out_img.pixels.resize(out_img.width * out_img.height * out_img.channels);
        for (std::size_t ch = 0; ch < planes.size(); ++ch)
            for (std::size_t i = 0; i < planes[ch].v.size(); ++i)
                out_img.pixels[i * img.channels + ch] =
                    static_cast<std::uint8_t>(std::lround(std::clamp((planes[ch].v[i] + 1.0) * 127.5, 0.0, 255.0)));
        if (!pool_write.empty())
            write_pnm(pool_write, out_img);
        *c.out << "pooled " << img.width << "x" << img.height << " -> " << out_img.width << "x"
               << out_img.height << "\n";
    });

    GradCheckOptions gc;
    auto* f_grad = filter_cmd->add_subcommand("gradcheck", "Backward pass against central differences");
    add_filter_flags(f_grad);
    f_grad->add_option("--windows", gc.windows, "Number of random windows");
    f_grad->add_option("--step", gc.step, "Finite-difference step");
    f_grad->add_option("--rtol", gc.rtol, "Relative tolerance");
    f_grad->add_option("--tie-margin", gc.tie_margin, "Skip windows this close to a tie");
    on(f_grad, [&](Context& c) {
        const auto f = filter_from_flags(c, "filter gradcheck", f_poset, f_map, f_random, f_m);
        gc.seed = c.require_seed("filter gradcheck");
        const auto r = gradient_check(f, gc);
        if (c.format == Format::Json) {
            *c.out << Json{{"checked", r.checked}, {"near_ties", r.near_ties}, {"kinks", r.kinks},
                           {"failures", r.failures}, {"max_error", r.max_error}}
                          .dump(2)
                   << "\n";
        } else if (c.format == Format::Csv) {
            *c.out << "checked,near_ties,kinks,failures,max_error\n"
                   << r.checked << "," << r.near_ties << "," << r.kinks << "," << r.failures << ","
                   << fmt(r.max_error) << "\n";
        } else {
            *c.out << "checked: " << r.checked << "\nskipped near ties: " << r.near_ties
                   << "\nskipped kinks: " << r.kinks << "\nfailures: " << r.failures
                   << "\nmax error: " << fmt(r.max_error) << "\n";
        }
        if (r.failures > 0)
            throw Error("gradient check failed on " + std::to_string(r.failures) + " windows");
    });

    // experiment ----------------------------------------------------------
    auto* exp_cmd = app.add_subcommand("experiment", "Desk experiments");
    exp_cmd->require_subcommand(1);

    int h_step = 25;
    std::vector<std::string> h_posets{"all4"};
    std::size_t h_random = 0, h_count = 30;
    std::string h_dir = "histograms";
    HistogramOptions h_opt;
    auto* exp_hist = exp_cmd->add_subcommand("histogram", "Filter outputs on the lattice points of the unit 4-ball");
    exp_hist->add_option("--step", h_step, "Lattice step is 1/step");
    exp_hist->add_option("--posets", h_posets, "\"all4\" or poset literals");
    exp_hist->add_option("--random", h_random, "Also use random filters with this many nonzero terms");
    exp_hist->add_option("--count", h_count, "Number of random filters");
    exp_hist->add_option("--bins", h_opt.bins, "Number of bins on (0, 2]");
    exp_hist->add_option("--out-dir", h_dir, "Directory for the per-filter CSV files");
    on(exp_hist, [&](Context& c) {
        h_opt.denominator = h_step;
        std::vector<PoolingFilter> filters;
        std::vector<std::string> names, literals;
        std::vector<Poset> ps;
        if (h_posets.size() == 1 && h_posets.front() == "all4")
            ps = enumerate_posets(4);
        else
            for (const auto& s : h_posets)
                ps.push_back(parse_poset(s));
        for (std::size_t i = 0; i < ps.size(); ++i) {
            filters.push_back(filter_from_poset(ps[i]));
            char buf[32];
            std::snprintf(buf, sizeof buf, "poset%02zu", i);
            names.emplace_back(buf);
            literals.push_back(format_poset(ps[i]));
        }
        if (h_random > 0) {
            const auto s0 = c.require_seed("experiment histogram --random");
            for (std::size_t k = 0; k < h_count; ++k) {
                filters.push_back(random_filter(4, h_random, s0 + k));
                char buf[32];
                std::snprintf(buf, sizeof buf, "random%02zu", k);
                names.emplace_back(buf);
                literals.push_back("seed " + std::to_string(s0 + k));
            }
        }
        const auto hs = lattice_histogram(filters, names, h_opt);
        std::error_code ec;
        std::filesystem::create_directories(h_dir, ec);
        if (ec)
            throw IOError("cannot create " + h_dir + ": " + ec.message());
        for (const auto& h : hs) {
            const auto path = std::filesystem::path(h_dir) / (h.name + ".csv");
            std::ofstream f(path);
            if (!f)
                throw IOError("cannot write " + path.string());
            f << "bin_left,count\n";
            for (std::size_t k = 0; k < h.counts.size(); ++k)
                f << fmt(h.bin_width * static_cast<double>(k)) << "," << h.counts[k] << "\n";
        }
        {
            const auto path = std::filesystem::path(h_dir) / "summary.csv";
            std::ofstream f(path);
            if (!f)
                throw IOError("cannot write " + path.string());
            f << "name,source,samples,positive,mean,std\n";
            for (std::size_t i = 0; i < hs.size(); ++i)
                f << hs[i].name << "," << csv_escape(literals[i]) << "," << hs[i].samples << ","
                  << hs[i].positive << "," << fmt(hs[i].mean) << "," << fmt(hs[i].std) << "\n";
        }
        if (c.format == Format::Json) {
            Json arr = Json::array();
            for (std::size_t i = 0; i < hs.size(); ++i) {
                Json j = to_json(hs[i]);
                j["source"] = literals[i];
                arr.push_back(j);
            }
            *c.out << arr.dump(2) << "\n";
            return;
        }
        if (c.format == Format::Csv) {
            *c.out << "name,source,samples,positive,mean,std\n";
            for (std::size_t i = 0; i < hs.size(); ++i)
                *c.out << hs[i].name << "," << csv_escape(literals[i]) << "," << hs[i].samples << ","
                       << hs[i].positive << "," << fmt(hs[i].mean) << "," << fmt(hs[i].std) << "\n";
            return;
        }
        for (std::size_t i = 0; i < hs.size(); ++i)
            *c.out << hs[i].name << "  " << literals[i] << "  positive " << hs[i].positive << "/"
                   << hs[i].samples << "  std " << fmt(hs[i].std) << "\n";
        *c.out << "wrote " << hs.size() << " histograms and summary.csv to " << h_dir << "\n";
    });

    std::string img_in, img_a = "4;", img_b = "4; 0<1, 1<2, 2<3";
    auto* exp_img = exp_cmd->add_subcommand("image", "Filter-as-image-transform comparison");
    exp_img->add_option("--input", img_in, "Binary PGM/PPM image")->required();
    exp_img->add_option("--filter-a", img_a, "Poset of filter A");
    exp_img->add_option("--filter-b", img_b, "Poset of filter B");
    on(exp_img, [&](Context& c) {
        const Image img = read_pnm(img_in);
        const auto rows = image_comparison(img, filter_from_poset(parse_poset(img_a)), "filter A (" + img_a + ")",
                                           filter_from_poset(parse_poset(img_b)), "filter B (" + img_b + ")");
        if (c.format == Format::Json) {
            Json arr = Json::array();
            for (const auto& r : rows)
                arr.push_back(Json{{"method", r.name}, {"ssim", r.metrics.ssim}, {"psnr", r.metrics.psnr}});
            *c.out << arr.dump(2) << "\n";
        } else if (c.format == Format::Csv) {
            *c.out << "method,ssim,psnr\n";
            for (const auto& r : rows)
                *c.out << csv_escape(r.name) << "," << fmt(r.metrics.ssim) << "," << fmt(r.metrics.psnr) << "\n";
        } else {
            char line[160];
            std::snprintf(line, sizeof line, "%-36s %10s %10s\n", "method", "SSIM", "PSNR");
            *c.out << line;
            for (const auto& r : rows) {
                std::snprintf(line, sizeof line, "%-36s %10s %10s\n", r.name.c_str(),
                              fmt(r.metrics.ssim).c_str(), fmt(r.metrics.psnr).c_str());
                *c.out << line;
            }
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    Context ctx;
    ctx.format = format == "json" ? Format::Json : format == "csv" ? Format::Csv : Format::Text;
    ctx.seed = seed;
    std::ostringstream buffer;
    ctx.out = &buffer;
    int code = 0;
    try {
        if (!action)
            throw UsageError("no command given");
        action(ctx);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        code = 1;
    }
    try {
        if (out_path.empty()) {
            out << buffer.str();
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f || !(f << buffer.str()))
                throw IOError("cannot write " + out_path);
        }
    } catch (const IOError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return code;
}

} // namespace posetnn::cli
