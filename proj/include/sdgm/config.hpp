#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sdgm/mesh.hpp"
#include "sdgm/noise.hpp"
#include "sdgm/operators.hpp"

namespace sdgm {

struct MeshSpec {
    enum class Source { File, Cartesian, Annulus };
    Source source = Source::Cartesian;
    std::string path;  // resolved against the config file's directory
    int nx = 4;
    int ny = 4;
    Rectangle domain;
    bool periodic_x = false;
    bool periodic_y = false;
    BoundaryTag boundary = BoundaryTag::Neumann;
    int n_radial = 2;
    int n_angular = 8;
    double r_inner = 0.5;
    double r_outer = 1.0;
    double warp = 0.1;
    int p_geo = 1;
};

/// An experiment read from an INI file. See README for the key list.
struct ExperimentConfig {
    MeshSpec mesh;
    int p = 1;
    Regime regime = Regime::Periodic;
    LdgParameters ldg;

    double dt = 1e-5;
    std::int64_t n_steps = 0;
    double burn_in_fraction = 0.1;
    std::uint64_t seed = 1;
    SamplerKind sampler = SamplerKind::Fdd;
    FluxScale flux_scale = FluxScale::Element;
    bool temporal_correction = false;

    std::vector<Index> rows;
    std::int64_t snapshot_stride = 0;
    bool binary = false;

    std::vector<int> scaling_levels;
    std::vector<int> scaling_degrees;
    std::int64_t scaling_steps = 200;

    /// Every key as written, after command-line overrides.
    std::map<std::string, std::string> entries;

    /// Sorted "section.key=value" lines; input to hash().
    [[nodiscard]] std::string canonical() const;
    [[nodiscard]] std::uint64_t hash() const;
    void set_seed(std::uint64_t s);
    void set_sampler(SamplerKind k);
};

/// Parses and validates. `base_dir` resolves relative mesh paths. Unknown
/// sections or keys, malformed values and inconsistent settings throw
/// ConfigurationError.
[[nodiscard]] ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = ".");
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

[[nodiscard]] QuadMesh build_mesh(const MeshSpec& spec);
/// Same generator at nx = ny = level (Cartesian only).
[[nodiscard]] QuadMesh build_mesh(const MeshSpec& spec, int level);

} // namespace sdgm
