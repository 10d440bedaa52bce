#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "shdimer/components.hpp"
#include "shdimer/config.hpp"
#include "shdimer/csv.hpp"
#include "shdimer/dimer.hpp"
#include "shdimer/levelsampler.hpp"
#include "shdimer/limitshape.hpp"
#include "shdimer/sampler.hpp"
#include "shdimer/svg.hpp"

using namespace shdimer;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string configPath;
    std::string outDir = ".";
    uint64_t seed = 1;
    long long samples = 0;
    bool oracle = false;
    bool components = false;
    std::string grid = "80x40";
    int threads = 1;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.configPath, "run configuration file")->required();
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--samples", o.samples, "number of samples");
    cmd->add_flag("--oracle", o.oracle, "cross-check against the enumeration oracle");
    cmd->add_flag("--components", o.components, "emit the per-component curves");
    cmd->add_option("--grid", o.grid, "density grid, WxH");
    cmd->add_option("--out", o.outDir, "output directory");
    cmd->add_option("--threads", o.threads, "worker thread cap");
    cmd->add_option("--format", o.format, "csv|svg|both")
        ->check(CLI::IsMember({"csv", "svg", "both"}));
}

void parse_grid(const std::string& g, int& w, int& h) {
    auto x = g.find('x');
    if (x == std::string::npos) throw std::runtime_error("bad --grid, expected WxH");
    w = std::stoi(g.substr(0, x));
    h = std::stoi(g.substr(x + 1));
    if (w < 1 || h < 1) throw std::runtime_error("bad --grid, expected positive WxH");
}

// chunked parallel for over [0, count)
void parallel_for(long long count, int threads, const std::function<void(long long)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1) {
        for (long long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<long long> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                long long i = next.fetch_add(64);
                if (i >= count) return;
                for (long long j = i; j < std::min(count, i + 64); ++j) fn(j);
            }
        });
    for (auto& th : pool) th.join();
}

CsvTable curve_table(const FrozenBoundaryCurve& curve) {
    CsvTable t;
    t.header = {"t", "chi", "kappa", "residual"};
    for (auto& s : curve.samples)
        t.rows.push_back(
            {csv_format(s.t), csv_format(s.chi), csv_format(s.kappa), csv_format(s.residual)});
    return t;
}

void curve_svg(const std::vector<const FrozenBoundaryCurve*>& curves, const std::string& path) {
    double xLo = 1e18, xHi = -1e18;
    for (auto* c : curves)
        for (auto& s : c->samples) {
            xLo = std::min(xLo, s.chi);
            xHi = std::max(xHi, s.chi);
        }
    if (xHi <= xLo) throw std::runtime_error("no curve points to draw");
    double pad = 0.05 * (xHi - xLo);
    SvgCanvas svg(xLo - pad, xHi + pad, -0.05, 1.05);
    svg.frame();
    const char* colors[] = {"#c0392b", "#2471a3", "#1e8449", "#8e44ad"};
    for (size_t i = 0; i < curves.size(); ++i) {
        std::vector<std::pair<double, double>> pts;
        for (auto& s : curves[i]->samples) pts.push_back({s.chi, s.kappa});
        svg.dots(pts, colors[i % 4]);
    }
    svg.write(path);
}

int cmd_partition_function(const CommonOpts& o) {
    Config cfg = Config::parse_file(o.configPath);
    LatticeSpec spec = cfg.lattice_spec();
    Rat Z = partition_function_schur(spec);
    std::printf("Z = %s\n", rat_to_string(Z).c_str());
    if (o.oracle) {
        auto lat = build_lattice(spec);
        Rat Ze = partition_function_enum(lat);
        if (Z != Ze) {
            std::printf("oracle mismatch: enumeration gives %s\n", rat_to_string(Ze).c_str());
            return 1;
        }
        if (Z == 0) {
            std::printf("oracle agrees (no matchings)\n");
        } else {
            std::printf("oracle agrees\n");
        }
    }
    return 0;
}

int cmd_sample(const CommonOpts& o) {
    Config cfg = Config::parse_file(o.configPath);
    LatticeSpec spec = cfg.lattice_spec();
    if (o.samples <= 0) throw std::runtime_error("sample: need --samples > 0");
    if (partition_function_schur(spec) == 0)
        throw std::runtime_error("sample: partition function is zero, nothing to sample");

    long long S = o.samples;

    // large lattices: full-chain conditioning is numerically out of reach, but
    // a single level's marginal stays available through its correlation kernel
    if (spec.N > 12 && cfg.has("sample", "level")) {
        size_t level = static_cast<size_t>(cfg.get_int("sample", "level"));
        LevelSampler sampler(spec, level);
        fs::create_directories(o.outDir);
        CsvTable samplesCsv;
        samplesCsv.header = {"sample", "level", "parts"};
        std::map<Rat, Rat> massAt;
        Rat unit = Rat(1, S * static_cast<long long>(sampler.particles()));
        for (long long i = 0; i < S; ++i) {
            Partition lam = sampler.sample(o.seed, static_cast<uint64_t>(i));
            std::string parts;
            for (size_t k = 0; k < lam.parts.size(); ++k) {
                if (k) parts += ' ';
                parts += std::to_string(lam.parts[k]);
            }
            samplesCsv.rows.push_back({std::to_string(i), std::to_string(level), parts});
            size_t F = sampler.particles();
            for (size_t k = 0; k < F; ++k)
                massAt[Rat(lam.part(k) + static_cast<long long>(F - 1 - k))] += unit;
        }
        write_csv((fs::path(o.outDir) / "samples.csv").string(), samplesCsv);
        CsvTable empCsv;
        empCsv.header = {"position", "mass"};
        for (auto& a : massAt)
            empCsv.rows.push_back({rat_to_string(a.first), rat_to_string(a.second)});
        write_csv((fs::path(o.outDir) / "empirical.csv").string(), empCsv);
        std::printf("wrote %lld level-%zu samples to %s\n", S, level, o.outDir.c_str());
        return 0;
    }

    std::vector<BoltzmannSample> out(static_cast<size_t>(S));
    bool exact = spec.N <= 12;
    int threads = std::max(1, o.threads);
    std::vector<std::thread> pool;
    std::atomic<long long> next{0};
    auto worker = [&] {
        ExactSampler* ex = nullptr;
        LgvSampler* lgv = nullptr;
        if (exact) ex = new ExactSampler(spec);
        else lgv = new LgvSampler(spec);
        for (;;) {
            long long i = next.fetch_add(16);
            if (i >= S) break;
            for (long long j = i; j < std::min(S, i + 16); ++j)
                out[static_cast<size_t>(j)] =
                    exact ? ex->sample(o.seed, static_cast<uint64_t>(j))
                          : lgv->sample(o.seed, static_cast<uint64_t>(j));
        }
        delete ex;
        delete lgv;
    };
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    fs::create_directories(o.outDir);
    CsvTable samplesCsv;
    samplesCsv.header = {"sample", "level", "parts"};
    for (long long i = 0; i < S; ++i) {
        auto& chain = out[static_cast<size_t>(i)].sequence.chain;
        for (size_t lvl = 0; lvl < chain.size(); ++lvl) {
            std::string parts;
            for (size_t k = 0; k < chain[lvl].parts.size(); ++k) {
                if (k) parts += ' ';
                parts += std::to_string(chain[lvl].parts[k]);
            }
            samplesCsv.rows.push_back({std::to_string(i), std::to_string(lvl), parts});
        }
    }
    write_csv((fs::path(o.outDir) / "samples.csv").string(), samplesCsv);

    size_t level = cfg.has("sample", "level")
                       ? static_cast<size_t>(cfg.get_int("sample", "level"))
                       : out[0].sequence.chain.size() / 2;
    auto measure = empirical_counting_measure(out, level);
    CsvTable empCsv;
    empCsv.header = {"position", "mass"};
    for (auto& a : measure.atoms)
        empCsv.rows.push_back({rat_to_string(a.first), rat_to_string(a.second)});
    write_csv((fs::path(o.outDir) / "empirical.csv").string(), empCsv);
    std::printf("wrote %lld samples (level %zu summary) to %s\n", S, level, o.outDir.c_str());
    return 0;
}

int cmd_boundary(const CommonOpts& o) {
    Config cfg = Config::parse_file(o.configPath);
    fs::create_directories(o.outDir);
    if (o.components) {
        BlockBoundary blocks = cfg.block_boundary();
        WeightProfile w = cfg.weight_profile();
        auto fam = component_params(blocks, w.n);
        auto cc = component_curves(fam, w);
        std::vector<const FrozenBoundaryCurve*> ptrs;
        for (size_t i = 0; i < cc.curves.size(); ++i) {
            if (o.format != "svg")
                write_csv((fs::path(o.outDir) / ("component_" + std::to_string(i + 1) + ".csv"))
                              .string(),
                          curve_table(cc.curves[i]));
            ptrs.push_back(&cc.curves[i]);
        }
        if (o.format != "csv")
            curve_svg(ptrs, (fs::path(o.outDir) / "boundary.svg").string());
        std::printf("%s\n", cc.report.c_str());
        return cc.regionsDisjoint ? 0 : 1;
    }
    BoundaryProfile p = cfg.boundary_profile();
    WeightProfile w = cfg.weight_profile();
    auto curve = frozen_boundary(p, w, default_t_grid(p, w));
    curve.curveClass = cloud_class(p, w);
    if (o.format != "svg")
        write_csv((fs::path(o.outDir) / "boundary.csv").string(), curve_table(curve));
    if (o.format != "csv")
        curve_svg({&curve}, (fs::path(o.outDir) / "boundary.svg").string());
    double maxRes = 0;
    for (auto& s : curve.samples) maxRes = std::max(maxRes, s.residual);
    std::printf("frozen boundary: %zu samples, class %d, max residual %.3g\n",
                curve.samples.size(), curve.curveClass, maxRes);
    return 0;
}

int cmd_density_map(const CommonOpts& o) {
    Config cfg = Config::parse_file(o.configPath);
    BoundaryProfile p = cfg.boundary_profile();
    WeightProfile w = cfg.weight_profile();
    int W, H;
    parse_grid(o.grid, W, H);
    // chi range from the frozen boundary extent, padded
    auto curve = frozen_boundary(p, w, default_t_grid(p, w, 600));
    double xLo = 1e18, xHi = -1e18;
    for (auto& s : curve.samples) {
        xLo = std::min(xLo, s.chi);
        xHi = std::max(xHi, s.chi);
    }
    double pad = 0.15 * (xHi - xLo);
    xLo = std::max(0.0, xLo - pad);
    xHi += pad;

    std::vector<double> vals(static_cast<size_t>(W) * H);
    parallel_for(static_cast<long long>(W) * H, o.threads, [&](long long idx) {
        int i = static_cast<int>(idx % W), j = static_cast<int>(idx / W);
        double chi = xLo + (xHi - xLo) * (i + 0.5) / W;
        double kappa = (j + 0.5) / H;
        vals[static_cast<size_t>(idx)] = density(chi, kappa, p, w);
    });

    fs::create_directories(o.outDir);
    if (o.format != "svg") {
        CsvTable t;
        t.header = {"chi", "kappa", "density"};
        for (int j = 0; j < H; ++j)
            for (int i = 0; i < W; ++i)
                t.rows.push_back({csv_format(xLo + (xHi - xLo) * (i + 0.5) / W),
                                  csv_format((j + 0.5) / H),
                                  csv_format(vals[static_cast<size_t>(j) * W + i])});
        write_csv((fs::path(o.outDir) / "density.csv").string(), t);
    }
    if (o.format != "csv") {
        SvgCanvas svg(xLo, xHi, 0.0, 1.0);
        for (int j = 0; j < H; ++j)
            for (int i = 0; i < W; ++i) {
                double x0 = xLo + (xHi - xLo) * i / W, x1 = xLo + (xHi - xLo) * (i + 1) / W;
                svg.cell(x0, x1, static_cast<double>(j) / H, (j + 1.0) / H,
                         vals[static_cast<size_t>(j) * W + i]);
            }
        svg.frame();
        svg.write((fs::path(o.outDir) / "density.svg").string());
    }
    std::printf("density map %dx%d over chi in [%.3f, %.3f]\n", W, H, xLo, xHi);
    return 0;
}

// built-in profile/weights used by verify when the config lacks them: the
// two-segment boundary with gamma = 1/3 and weights y = (1,2), x = 1
void default_verify_inputs(BoundaryProfile& p, WeightProfile& w) {
    p.s = 2;
    p.alpha = {Rat(0), Rat(1)};
    p.b = {Rat(2, 3), Rat(4, 3)};
    p.gamma = Rat(1, 3);
    w.n = 3;
    w.yValues = {Rat(1), Rat(2)};
    w.x = Rat(1);
}

int cmd_verify(const CommonOpts& o, const std::string& suite) {
    Config cfg = Config::parse_file(o.configPath);
    BoundaryProfile p;
    WeightProfile w;
    default_verify_inputs(p, w);
    if (cfg.has_section("profile")) {
        p = cfg.boundary_profile();
        if (cfg.has_section("weights")) w = cfg.weight_profile();
    }
    // the block-boundary suite pairs with the config's own weights
    WeightProfile wBlocks = w;
    if (cfg.has_section("weights")) wBlocks = cfg.weight_profile();
    int failures = 0;
    auto report = [&](const char* name, bool ok, const std::string& detail) {
        std::printf("[%s] %s: %s\n", ok ? "pass" : "FAIL", name, detail.c_str());
        if (!ok) ++failures;
    };

    if (suite == "all" || suite == "oracle") {
        // randomized Schur-vs-enumeration equivalence on small lattices
        SplitRng rng(o.seed, 777);
        bool ok = true;
        std::string detail;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            LatticeSpec spec;
            spec.n = 1 + rng.next_below(3);
            for (size_t i = 0; i < spec.n; ++i) {
                spec.a.push_back(i == 0 ? 1 : static_cast<int>(rng.next_below(2)));
                spec.x.push_back(Rat(static_cast<long long>(rng.next_below(3)),
                                     1 + static_cast<long long>(rng.next_below(2))));
                spec.y.push_back(Rat(1 + static_cast<long long>(rng.next_below(3)), 2));
            }
            spec.N = 1 + rng.next_below(3);
            long long pos = 1;
            for (size_t i = 0; i < spec.N; ++i) {
                spec.Omega.push_back(pos);
                pos += 1 + static_cast<long long>(rng.next_below(3));
            }
            Rat Zs = partition_function_schur(spec);
            Rat Ze = partition_function_enum(build_lattice(spec));
            if (Zs != Ze) {
                ok = false;
                detail = "mismatch at trial " + std::to_string(trial);
            }
        }
        report("oracle-equivalence", ok, ok ? "20 random specs, Schur == enumeration" : detail);
    }

    if (suite == "all" || suite == "residual") {
        auto curve = frozen_boundary(p, w, default_t_grid(p, w));
        double maxRes = 0;
        for (auto& s : curve.samples) maxRes = std::max(maxRes, s.residual);
        report("double-root-residual", maxRes < 1e-8,
               "max residual " + std::to_string(maxRes) + " over " +
                   std::to_string(curve.samples.size()) + " samples");
    }

    if (suite == "all" || suite == "winding") {
        auto rep = winding_check(p, w, 100, o.seed);
        report("winding", rep.pass,
               "min real intersections " + std::to_string(rep.minRealIntersections) +
                   ", class " + std::to_string(rep.curveClass));
    }

    if (suite == "all" || suite == "components") {
        if (cfg.has_section("blocks")) {
            auto fam = component_params(cfg.block_boundary(), wBlocks.n);
            auto cc = component_curves(fam, wBlocks);
            report("component-disjointness", cc.regionsDisjoint && fam.supportsDisjoint,
                   cc.report);
        } else {
            report("component-disjointness", true, "skipped (no [blocks] section)");
        }
    }

    if (suite == "all" || suite == "mc") {
        // reduced Monte Carlo consistency: moderate N, Kolmogorov distance of
        // the level-kappa reduced measure against the analytic density
        LatticeSpec spec;
        size_t N = 30;
        if (cfg.has_section("lattice")) {
            spec = cfg.lattice_spec();
            N = spec.N;
        } else {
            spec.n = 3;
            spec.a = {1, 0, 0};
            spec.x = {Rat(1), Rat(1), Rat(0)};
            spec.y = {Rat(0), Rat(1), Rat(2)};
            spec.N = N;
            for (size_t i = 1; i <= N * 2 / 3; ++i) spec.Omega.push_back(static_cast<long long>(i));
            for (size_t i = 0; i < N / 3; ++i)
                spec.Omega.push_back(static_cast<long long>(N * 2 / 3 + N / 3 + 1 + i));
        }
        double kappa = 0.5;
        size_t t = static_cast<size_t>(kappa * static_cast<double>(N));
        size_t chainIdx = 2 * t + 1; // nu^{(N-t)}, the level at height kappa
        size_t keep = static_cast<size_t>((1.0 - to_double(spec.gamma())) *
                                          static_cast<double>(N - t));
        long long S = o.samples > 0 ? o.samples : 400;
        LevelSampler sampler(spec, chainIdx);
        std::vector<double> atoms;
        for (long long i = 0; i < S; ++i) {
            Partition part = sampler.sample(o.seed, static_cast<uint64_t>(i));
            for (size_t k = 0; k < keep; ++k)
                atoms.push_back((static_cast<double>(part.part(k)) + keep - (k + 1)) /
                                static_cast<double>(keep));
        }
        std::sort(atoms.begin(), atoms.end());
        double xMax = atoms.back() + 0.2;
        std::vector<double> xs;
        for (int i = 0; i <= 800; ++i) xs.push_back(xMax * i / 800);
        auto cdf = density_cdf(p, w, kappa, xs);
        double ks = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            double emp = static_cast<double>(std::upper_bound(atoms.begin(), atoms.end(), xs[i]) -
                                             atoms.begin()) /
                         static_cast<double>(atoms.size());
            ks = std::max(ks, std::abs(emp - cdf[i]));
        }
        report("monte-carlo-consistency", ks < 0.1,
               "Kolmogorov distance " + std::to_string(ks) + " at N=" + std::to_string(N) +
                   ", " + std::to_string(S) + " samples");
    }

    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dimer models on contracting square-hexagon lattices"};
    app.require_subcommand(1);
    CommonOpts o;
    std::string suite = "all";

    auto* pf = app.add_subcommand("partition-function", "exact partition function via Schur");
    add_common(pf, o);
    auto* sm = app.add_subcommand("sample", "draw Boltzmann samples");
    add_common(sm, o);
    auto* bd = app.add_subcommand("boundary", "frozen boundary curves");
    add_common(bd, o);
    auto* dm = app.add_subcommand("density-map", "liquid density over a (chi,kappa) grid");
    add_common(dm, o);
    auto* vf = app.add_subcommand("verify", "run verification suites");
    add_common(vf, o);
    vf->add_option("--suite", suite, "suite to run")
        ->check(CLI::IsMember({"all", "oracle", "residual", "winding", "components", "mc"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (pf->parsed()) return cmd_partition_function(o);
        if (sm->parsed()) return cmd_sample(o);
        if (bd->parsed()) return cmd_boundary(o);
        if (dm->parsed()) return cmd_density_map(o);
        if (vf->parsed()) return cmd_verify(o, suite);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
