#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "posetnn/cli.hpp"
#include "posetnn/image.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "posetnn");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = posetnn::cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("posetnn_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

const char* kN = "4; 0<2, 1<2, 1<3";

} // namespace

TEST(Cli, PosetCommands)
{
    auto r = run({"poset", "list", "--n", "4"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(count_lines(r.out), 16u);
    r = run({"--format", "csv", "poset", "list", "--n", "3"});
    EXPECT_EQ(count_lines(r.out), 6u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "index,literal,extensions,vertices");
    r = run({"--format", "json", "poset", "list", "--n", "3"});
    EXPECT_EQ(posetnn::Json::parse(r.out).size(), 5u);

    r = run({"poset", "show", kN});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("linear extensions: 5"), std::string::npos);
    EXPECT_NE(r.out.find("order polytope vertices: 8"), std::string::npos);
    EXPECT_EQ(run({"--format", "csv", "poset", "show", kN}).code, 2);

    r = run({"poset", "compose", "2; 0<1", "1;", "2;"});
    EXPECT_EQ(r.out, "3; 0<1, 0<2\n");
    EXPECT_EQ(run({"poset", "compose", "2; 0<1", "1;"}).code, 1);
}

TEST(Cli, TropicalCommands)
{
    EXPECT_EQ(run({"trop", "of-poset", "2; 0<1"}).out, "0 + y + x*y\n");
    auto r = run({"trop", "of-poset", kN, "--expanded"});
    EXPECT_EQ(count_lines(r.out), 2u);
    EXPECT_EQ(r.out.rfind("= ", r.out.find('\n') + 1), r.out.find('\n') + 1);
    r = run({"trop", "act", "2;", "x", "y"});
    EXPECT_EQ(r.out, "0 + y + x + x*y\n");
    r = run({"trop", "recover", "0 + z + y*z + x*y*z", "--vars", "x,y,z"});
    EXPECT_EQ(r.out, "3; 0<1, 1<2\n");
    EXPECT_EQ(run({"trop", "recover", "0 + x + y + x*y", "--vars", "x,y"}).out, "2;\n");
    EXPECT_EQ(run({"trop", "recover", "0 + x + y", "--vars", "x,y"}).code, 1);
    EXPECT_EQ(run({"trop", "recover", "1 + x", "--vars", "x"}).code, 1);
    EXPECT_EQ(run({"trop", "of-poset", "2; 0<<1"}).code, 1);
}

TEST(Cli, PolytopeCommands)
{
    auto r = run({"--format", "csv", "polytope", "vertices", "2; 0<1"});
    EXPECT_EQ(r.out, "c0,c1\n0,0\n0,1\n1,1\n");
    r = run({"polytope", "act", "2;", "--points", "0|1", "0|1"});
    EXPECT_EQ(r.code, 0);
    r = run({"polytope", "triangulate", kN});
    EXPECT_EQ(r.code, 0);
    r = run({"--format", "json", "polytope", "vertices", kN});
    EXPECT_EQ(posetnn::Json::parse(r.out)["vertices"].size(), 8u);
}

TEST(Cli, NetworkCommands)
{
    EXPECT_EQ(run({"nn", "eval", "--poset", kN, "--x", "-1,0,1.9,2"}).out, "3.9\n");
    auto raw = run({"nn", "eval", "--poset", kN, "--x", "1,1,1,1", "--raw"});
    EXPECT_EQ(raw.out, "4 4 4 4 4\n");
    EXPECT_EQ(run({"nn", "eval", "--poset", kN, "--x", "1,2"}).code, 1);
    EXPECT_EQ(run({"nn", "eval", "--poset", kN, "--x", "1,a,2,3"}).code, 2);
    auto p = run({"nn", "pieces", "--poset", "2; 0<1"});
    EXPECT_EQ(p.out, "pieces: 3\nbound: 3\nsamples: 441\n");
    EXPECT_EQ(run({"nn", "show", "--poset", kN}).code, 0);
}

TEST(Cli, FilterCommands)
{
    EXPECT_EQ(run({"filter", "emit", "--poset", "4; 0<1, 1<2, 2<3"}).out,
              "0 0 0 0\n0 0 0 1\n0 0 1 1\n0 1 1 1\n1 1 1 1\n");
    EXPECT_EQ(run({"filter", "pool", "--poset", "4;", "--matrix", "1,2;3,4"}).out, "10\n");
    EXPECT_EQ(run({"filter", "pool", "--poset", "4;", "--matrix", "-1,-2;-3,-4", "--relu"}).out, "0\n");
    EXPECT_EQ(run({"filter", "emit", "--random", "3"}).code, 2);
    const auto a = run({"--seed", "5", "--format", "json", "filter", "emit", "--random", "3"});
    const auto b = run({"--seed", "5", "--format", "json", "filter", "emit", "--random", "3"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(posetnn::Json::parse(a.out)["terms"].size(), 4u);
    EXPECT_EQ(run({"filter", "emit", "--poset", "4;", "--random", "3"}).code, 2);
    EXPECT_EQ(run({"filter", "emit", "--poset", kN, "--map", "0,1,1,2"}).code, 1);

    auto g = run({"--seed", "1", "filter", "gradcheck", "--poset", kN, "--windows", "300"});
    EXPECT_EQ(g.code, 0);
    EXPECT_NE(g.out.find("failures: 0"), std::string::npos);
}

TEST(Cli, FilterPoolImage)
{
    const auto dir = scratch("pool");
    posetnn::Image img{4, 2, 1, {0, 10, 20, 30, 40, 50, 60, 70}};
    posetnn::write_pnm((dir / "in.pgm").string(), img);
    auto r = run({"filter", "pool", "--poset", "4;", "--image", (dir / "in.pgm").string(), "--write",
                  (dir / "out.pgm").string()});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto out = posetnn::read_pnm((dir / "out.pgm").string());
    EXPECT_EQ(out.width, 2u);
    EXPECT_EQ(out.height, 1u);
    EXPECT_EQ(run({"filter", "pool", "--poset", "4;", "--image", (dir / "missing.pgm").string()}).code, 1);
    fs::remove_all(dir);
}

TEST(Cli, OutFileAndErrors)
{
    const auto dir = scratch("out");
    const auto path = (dir / "tr.txt").string();
    auto r = run({"--out", path, "trop", "of-poset", "2; 0<1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "0 + y + x*y");
    EXPECT_EQ(run({"--out", (dir / "no/such/dir/x").string(), "poset", "list"}).code, 1);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"--format", "xml", "poset", "list"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({"poset", "show", "2; 0<1, 1<0"}).code, 1);
    fs::remove_all(dir);
}

TEST(Cli, HistogramExperiment)
{
    const auto dir = scratch("hist");
    auto r = run({"--seed", "2", "experiment", "histogram", "--step", "4", "--random", "3", "--count", "2",
                  "--bins", "10", "--out-dir", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir))
        files += e.path().extension() == ".csv" ? 1 : 0;
    EXPECT_EQ(files, 16u + 2u + 1u);
    std::ifstream in(dir / "poset00.csv");
    std::string line;
    std::size_t rows = 0;
    std::getline(in, line);
    EXPECT_EQ(line, "bin_left,count");
    while (std::getline(in, line))
        ++rows;
    EXPECT_EQ(rows, 10u);
    std::ifstream s(dir / "summary.csv");
    std::getline(s, line);
    EXPECT_EQ(line, "name,source,samples,positive,mean,std");

    EXPECT_EQ(run({"experiment", "histogram", "--step", "4", "--random", "3", "--out-dir", dir.string()}).code, 2);
    fs::remove_all(dir);
}

TEST(Cli, ImageExperiment)
{
    const auto dir = scratch("img");
    posetnn::Image img{40, 32, 3, std::vector<std::uint8_t>(40 * 32 * 3)};
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>((i * 37) % 251);
    posetnn::write_pnm((dir / "in.ppm").string(), img);
    const auto a = run({"experiment", "image", "--input", (dir / "in.ppm").string()});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(count_lines(a.out), 4u);
    EXPECT_EQ(a.out, run({"experiment", "image", "--input", (dir / "in.ppm").string()}).out);
    const auto c = run({"--format", "csv", "experiment", "image", "--input", (dir / "in.ppm").string()});
    EXPECT_EQ(count_lines(c.out), 4u);
    fs::remove_all(dir);
}
