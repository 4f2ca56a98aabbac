#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sdgm/config.hpp"
#include "sdgm/errors.hpp"
#include "sdgm/experiment.hpp"
#include "sdgm/fdd.hpp"
#include "sdgm/io.hpp"
#include "support.hpp"

using namespace sdgm;
using Eigen::MatrixXd;

namespace {

ExperimentConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in, test::data_path("configs/desk"));
}

const char* kSmall = "[mesh]\n"
                     "source = cartesian\n"
                     "nx = 2\n"
                     "ny = 2\n"
                     "boundary = dirichlet\n"
                     "[discretization]\n"
                     "p = 2\n"
                     "regime = dirichlet_weak\n"
                     "[simulation]\n"
                     "dt = 1e-4\n"
                     "n_steps = 100\n"
                     "seed = 12\n"
                     "[output]\n"
                     "rows = 3, 7\n";

} // namespace

TEST(MatrixIo, TextRoundTripIsExact)
{
    MatrixXd m(3, 2);
    m << 1.0 / 3, -2e-300, std::numeric_limits<double>::max(), 0.1, -0.0, 12345.678901234567;
    std::stringstream s;
    write_matrix(s, m, {"sdgm test", "second line"});
    EXPECT_EQ(s.str().rfind("# sdgm test\n# second line\nmatrix 3 2\n", 0), 0u);
    EXPECT_EQ(read_matrix(s), m);
}

TEST(MatrixIo, BinaryRoundTripIsExact)
{
    std::mt19937_64 rng(1);
    const MatrixXd m = test::random_matrix(rng, 17, 5);
    std::stringstream s;
    write_matrix_binary(s, m, {"binary"});
    EXPECT_EQ(read_matrix(s), m);
    std::string truncated = s.str();
    truncated.resize(truncated.size() - 3);
    std::istringstream t(truncated);
    EXPECT_THROW((void)read_matrix(t), ParseError);
}

TEST(MatrixIo, ParseErrorsNameTheLine)
{
    auto line_of = [](const std::string& text) -> std::string {
        std::istringstream in(text);
        try {
            (void)read_matrix(in);
        } catch (const ParseError& e) {
            return e.what();
        }
        return "no error";
    };
    EXPECT_NE(line_of("# c\nmatrx 2 2\n").find("line 2"), std::string::npos);
    EXPECT_NE(line_of("matrix 2 2\n1 2\n3\n").find("line 3"), std::string::npos);
    EXPECT_NE(line_of("matrix 2 2\n1 2 9\n3 4\n").find("line 2"), std::string::npos);
    EXPECT_NE(line_of("matrix 2 2\n1 2\n").find("line"), std::string::npos);
    EXPECT_NE(line_of("matrix 1 1\nabc\n").find("line 2"), std::string::npos);
}

TEST(MatrixIo, Files)
{
    const auto dir = std::filesystem::temp_directory_path() / "sdgm_io_test";
    std::filesystem::create_directories(dir);
    const MatrixXd m = MatrixXd::Identity(3, 3) * 0.25;
    for (bool binary : {false, true}) {
        const std::string path = (dir / (binary ? "m.bin" : "m.txt")).string();
        save_matrix(path, m, {provenance(7)}, binary);
        EXPECT_EQ(load_matrix(path), m);
    }
    EXPECT_THROW((void)load_matrix((dir / "missing.txt").string()), IoError);
    EXPECT_THROW(save_matrix("/nonexistent/dir/m.txt", m), IoError);
    std::filesystem::remove_all(dir);
}

TEST(Provenance, HashAndHeader)
{
    // Published FNV-1a 64 test vectors.
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ull);
    EXPECT_EQ(provenance(0xabcull), "sdgm " + std::string(version()) + " config=0000000000000abc");
}

TEST(Config, ParsesAndHashes)
{
    const ExperimentConfig c = parse(kSmall);
    EXPECT_EQ(c.p, 2);
    EXPECT_EQ(c.regime, Regime::DirichletWeak);
    EXPECT_EQ(c.mesh.boundary, BoundaryTag::Dirichlet);
    EXPECT_EQ(c.n_steps, 100);
    EXPECT_EQ(c.rows, (std::vector<Index>{3, 7}));
    EXPECT_DOUBLE_EQ(c.dt, 1e-4);
    EXPECT_EQ(c.sampler, SamplerKind::Fdd);
    EXPECT_FALSE(c.temporal_correction);

    // Key order and whitespace do not change the hash; values do.
    std::string shuffled = kSmall;
    shuffled.replace(shuffled.find("dt = 1e-4\nn_steps = 100\n"), 24, "n_steps=100\ndt   = 1e-4\n");
    EXPECT_EQ(parse(shuffled).hash(), c.hash());
    ExperimentConfig other = c;
    other.set_seed(13);
    EXPECT_NE(other.hash(), c.hash());
    EXPECT_EQ(other.seed, 13u);
    other = c;
    other.set_sampler(SamplerKind::RandomFlux);
    EXPECT_NE(other.hash(), c.hash());
    EXPECT_NE(c.canonical().find("simulation.seed=12"), std::string::npos);
}

TEST(Config, Rejects)
{
    auto rejects = [](const std::string& text) {
        EXPECT_THROW((void)parse(text), ConfigurationError) << text;
    };
    rejects(std::string(kSmall) + "[simulation]\nstep = 3\n");
    rejects(std::string(kSmall) + "[plotting]\ncolor = red\n");
    rejects("[discretization]\np = two\n");
    rejects("[discretization]\np = 0\n");
    rejects("[discretization]\nregime = robin\n");
    rejects("[simulation]\ndt = -1\n");
    rejects("[simulation]\nburn_in_fraction = 1\n");
    rejects("[simulation]\nsampler = white\n");
    rejects("[simulation]\ndt = 1e-5 ; inline comments are not supported\n");
    // Regime and mesh pairing must agree.
    rejects("[mesh]\nperiodic = xy\n[discretization]\nregime = neumann\n");
    rejects("[mesh]\nperiodic = x\n[discretization]\nregime = periodic\n");
    rejects("[mesh]\nsource = annulus\nr_inner = 2\nr_outer = 1\n[discretization]\nregime = neumann\n");
    EXPECT_THROW((void)load_config("/nonexistent/x.cfg"), IoError);
}

TEST(Config, ShippedConfigsBuild)
{
    for (const char* name : {"periodic", "annulus", "dirichlet_weak", "dirichlet_strong", "scaling"}) {
        for (const char* scale : {"desk", "full"}) {
            const std::string path = test::data_path(std::string("configs/") + scale + "/" + name + ".cfg");
            if (!std::filesystem::exists(path)) {
                continue;
            }
            const ExperimentConfig c = load_config(path);
            EXPECT_GT(build_mesh(c.mesh).num_elements(), 0) << path;
        }
    }
    const ExperimentConfig periodic = load_config(test::data_path("configs/desk/periodic.cfg"));
    EXPECT_EQ(simulation_config(periodic).sample_count(), 1000000);
    const DgDiscretization d = make_discretization(periodic);
    EXPECT_EQ(d.num_elements(), 24);
    EXPECT_EQ(d.mesh().num_boundary_faces(), 0);
}

TEST(Experiment, SmallStudyAndVerify)
{
    ExperimentConfig c = parse(kSmall);
    const DgDiscretization d = make_discretization(c);
    for (const Check& ch : verify_discretization(d)) {
        EXPECT_TRUE(ch.pass) << ch.name << " " << ch.value;
    }
    const auto noise = make_noise(c, d);
    const CovarianceStudy s = covariance_study(c, d, *noise);
    EXPECT_EQ(s.samples, 90);
    EXPECT_TRUE(s.dense);
    EXPECT_EQ(s.row_correlations.size(), 2u);
    EXPECT_GT(s.rel_err, 0);
    c.n_steps = 0;
    EXPECT_THROW((void)covariance_study(c, d, *noise), EmptyEstimateError);
    c.n_steps = 10;
    c.rows = {d.num_dofs()};
    EXPECT_THROW((void)covariance_study(c, d, *noise), ConfigurationError);
}

TEST(Experiment, VerifyFlagsSingularPenalty)
{
    ExperimentConfig c = parse(kSmall);
    c.ldg.c11_scale = 0;
    const DgDiscretization d = make_discretization(c);
    bool any_failed = false;
    for (const Check& ch : verify_discretization(d)) {
        any_failed = any_failed || !ch.pass;
    }
    EXPECT_TRUE(any_failed);
}

TEST(Experiment, TemporalCorrectionNoise)
{
    ExperimentConfig c = parse(kSmall);
    c.temporal_correction = true;
    const DgDiscretization d = make_discretization(c);
    const auto noise = make_noise(c, d);
    EXPECT_EQ(noise->name(), "fdd_temporal");
    const auto* dense = dynamic_cast<const DenseNoiseSampler*>(noise.get());
    ASSERT_NE(dense, nullptr);
    const MatrixXd expected =
        noise_covariance_temporal(d.dense_generator(), d.dense_subspace_target(), c.dt);
    EXPECT_LE(test::rel(dense->factor() * dense->factor().transpose(), expected), 1e-10);
}
