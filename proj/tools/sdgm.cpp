// Experiment driver: covariance runs, dense verification, timing study and
// mesh utilities. Exit codes: 0 ok, 1 usage/config, 2 numerical check, 3 IO.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "sdgm/config.hpp"
#include "sdgm/errors.hpp"
#include "sdgm/experiment.hpp"
#include "sdgm/io.hpp"
#include "sdgm/parallel.hpp"

namespace fs = std::filesystem;
using namespace sdgm;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> sampler;
    std::string output_dir = ".";
    int threads = 0;
    std::string mesh_out;
    std::string mesh_path;
    std::string periodic = "none";
};

ExperimentConfig read_config(const Options& o)
{
    ExperimentConfig c = load_config(o.config);
    if (o.seed) {
        c.set_seed(*o.seed);
    }
    if (o.sampler) {
        try {
            c.set_sampler(parse_sampler_kind(*o.sampler));
        } catch (const ArgumentError& ex) {
            throw ConfigurationError(ex.what());
        }
    }
    return c;
}

std::string output_path(const Options& o, const std::string& name)
{
    std::error_code ec;
    fs::create_directories(o.output_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + o.output_dir + "': " + ec.message());
    }
    return (fs::path(o.output_dir) / name).string();
}

std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void save_mesh_with_header(const QuadMesh& mesh, const std::string& path, const std::string& header)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write mesh file '" + path + "'");
    }
    out << "# " << header << '\n';
    write_mesh(mesh, out);
    if (!out) {
        throw IoError("write failed for mesh file '" + path + "'");
    }
}

int cmd_run(const Options& o)
{
    const ExperimentConfig c = read_config(o);
    const DgDiscretization disc = make_discretization(c);
    const auto noise = make_noise(c, disc);
    const std::string label(to_string(c.sampler));
    const std::string header = provenance(c.hash());
    const std::vector<std::string> comments = {header};

    Eigen::MatrixXd snapshots;
    Eigen::Index n_snap = 0;
    Observer snap;
    if (c.snapshot_stride > 0) {
        const auto sim = simulation_config(c);
        snapshots.resize((sim.sample_count() + c.snapshot_stride - 1) / c.snapshot_stride, disc.num_dofs());
        snap = [&](std::int64_t step, const Eigen::VectorXd& u) {
            if ((step - sim.burn_in_steps() - 1) % c.snapshot_stride == 0) {
                snapshots.row(n_snap++) = u.transpose();
            }
        };
    }

    const CovarianceStudy s = covariance_study(c, disc, *noise, snap);

    save_matrix(output_path(o, "mass.txt"), disc.dense_mass(), comments, c.binary);
    save_matrix(output_path(o, "nodes.txt"), disc.node_positions().transpose(), comments, c.binary);
    save_mesh_with_header(disc.mesh(), output_path(o, "mesh.mesh"), header);
    save_matrix(output_path(o, "variance_" + label + ".txt"), s.variance, comments, c.binary);
    save_matrix(output_path(o, "rel_err_" + label + ".txt"), Eigen::MatrixXd::Constant(1, 1, s.rel_err), comments);
    if (s.dense) {
        save_matrix(output_path(o, "target.txt"), s.target, comments, c.binary);
        save_matrix(output_path(o, "covariance_" + label + ".txt"), s.covariance, comments, c.binary);
        save_matrix(output_path(o, "mass_product_" + label + ".txt"), s.mass_product, comments, c.binary);
        for (std::size_t k = 0; k < s.rows.size(); ++k) {
            save_matrix(output_path(o, "row_" + label + "_" + std::to_string(s.rows[k]) + ".txt"),
                        s.row_correlations[k].transpose(), comments, c.binary);
        }
    }
    if (n_snap > 0) {
        save_matrix(output_path(o, "snapshots_" + label + ".txt"), snapshots.topRows(n_snap), comments, c.binary);
    }

    std::cout << "regime=" << to_string(c.regime) << " sampler=" << noise->name() << " N=" << s.samples
              << " rel_err=" << format_double(s.rel_err) << '\n';
    if (s.dense) {
        std::cout << "mass_identity_deviation=" << format_double(s.mass_deviation) << '\n';
    }
    return kOk;
}

int cmd_verify(const Options& o)
{
    const ExperimentConfig c = read_config(o);
    const DgDiscretization disc = make_discretization(c);
    std::cout << "regime=" << to_string(c.regime) << " p=" << c.p << " elements=" << disc.num_elements()
              << " dofs=" << disc.num_dofs() << '\n';
    bool ok = true;
    for (const Check& ch : verify_discretization(disc)) {
        std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.name << " value=" << format_double(ch.value)
                  << " tol=" << format_double(ch.tolerance) << '\n';
        ok = ok && ch.pass;
    }
    return ok ? kOk : kNumerical;
}

int cmd_scaling(const Options& o)
{
    const ExperimentConfig c = read_config(o);
    const ScalingStudy st = scaling_study(c);
    if (st.timer_warning) {
        std::cerr << "warning: short timings; repetitions were increased\n";
    }
    std::printf("%8s %4s %10s %10s %14s %14s\n", "level", "p", "elements", "dofs", "s/step", "s/draw");
    Eigen::MatrixXd table(static_cast<Eigen::Index>(st.levels.size() + st.degrees.size()), 6);
    Eigen::Index r = 0;
    auto print = [&](const ScalingRow& row) {
        std::printf("%8d %4d %10ld %10ld %14.6e %14.6e\n", row.level, row.p, static_cast<long>(row.elements),
                    static_cast<long>(row.dofs), row.seconds_per_step, row.seconds_per_draw);
        table.row(r++) << row.level, row.p, static_cast<double>(row.elements), static_cast<double>(row.dofs),
            row.seconds_per_step, row.seconds_per_draw;
    };
    for (const auto& row : st.levels) {
        print(row);
    }
    std::cout << "slope_step=" << format_double(st.step_slope) << " slope_draw=" << format_double(st.draw_slope)
              << '\n';
    if (!st.degrees.empty()) {
        std::cout << "p sweep at fixed mesh:\n";
        for (const auto& row : st.degrees) {
            print(row);
        }
    }
    save_matrix(output_path(o, "scaling.txt"), table,
                {provenance(c.hash()), "columns: level p elements dofs seconds_per_step seconds_per_draw"});
    return kOk;
}

int cmd_mesh_gen(const Options& o)
{
    const ExperimentConfig c = read_config(o);
    const QuadMesh mesh = build_mesh(c.mesh);
    const std::string path = o.mesh_out.empty() ? output_path(o, "mesh.mesh") : o.mesh_out;
    save_mesh_with_header(mesh, path, provenance(c.hash()));
    std::cout << "wrote " << path << " elements=" << mesh.num_elements() << '\n';
    return kOk;
}

int cmd_mesh_check(const Options& o)
{
    QuadMesh mesh = load_mesh(o.mesh_path);
    if (o.periodic != "none") {
        mesh = apply_periodic(std::move(mesh), o.periodic.find('x') != std::string::npos,
                              o.periodic.find('y') != std::string::npos);
    }
    Index dirichlet = 0;
    Index neumann = 0;
    for (const Face& f : mesh.faces()) {
        if (f.boundary()) {
            (f.tag == BoundaryTag::Dirichlet ? dirichlet : neumann) += 1;
        }
    }
    std::cout << "vertices=" << mesh.num_vertices() << " elements=" << mesh.num_elements()
              << " p_geo=" << mesh.geometry_degree() << " interior_faces=" << mesh.num_interior_faces()
              << " boundary_faces=" << mesh.num_boundary_faces() << " (dirichlet=" << dirichlet
              << " neumann=" << neumann << ") area=" << format_double(mesh.area()) << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic DG diffusion: fluctuation-dissipation noise, Monte-Carlo covariance studies"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--threads", o.threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);

    auto common = [&](CLI::App* sub) {
        sub->fallthrough();
        sub->add_option("--config", o.config, "experiment config (INI)")->required();
        sub->add_option("--seed", o.seed, "override simulation.seed");
        sub->add_option("--output-dir", o.output_dir, "directory for output files");
    };
    auto* run = app.add_subcommand("run", "Monte-Carlo covariance run");
    common(run);
    run->add_option("--sampler", o.sampler, "override simulation.sampler (fdd, random_flux)");
    auto* verify = app.add_subcommand("verify", "dense identity checks");
    common(verify);
    auto* scaling = app.add_subcommand("scaling", "timing study over refinement levels");
    common(scaling);
    auto* mesh = app.add_subcommand("mesh", "mesh utilities");
    mesh->require_subcommand(1);
    auto* gen = mesh->add_subcommand("gen", "write the configured mesh");
    common(gen);
    gen->add_option("--out", o.mesh_out, "mesh file (default <output-dir>/mesh.mesh)");
    auto* check = mesh->add_subcommand("check", "load and validate a mesh file");
    check->fallthrough();
    check->add_option("path", o.mesh_path, "mesh file")->required();
    check->add_option("--periodic", o.periodic, "pair opposite sides first")
        ->check(CLI::IsMember({"none", "x", "y", "xy"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    set_num_threads(o.threads);
    try {
        if (*run) {
            return cmd_run(o);
        }
        if (*verify) {
            return cmd_verify(o);
        }
        if (*scaling) {
            return cmd_scaling(o);
        }
        if (*gen) {
            return cmd_mesh_gen(o);
        }
        return cmd_mesh_check(o);
    } catch (const ConfigurationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
}
