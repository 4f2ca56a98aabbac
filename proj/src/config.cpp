#include "sdgm/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "sdgm/errors.hpp"
#include "sdgm/io.hpp"

namespace sdgm {

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys()
{
    static const std::map<std::string, std::set<std::string>> keys = {
        {"mesh",
         {"source", "file", "nx", "ny", "x0", "y0", "x1", "y1", "periodic", "boundary", "n_radial", "n_angular",
          "r_inner", "r_outer", "warp", "p_geo"}},
        {"discretization", {"p", "regime", "c11_scale"}},
        {"simulation",
         {"dt", "n_steps", "burn_in_fraction", "seed", "sampler", "flux_scale", "temporal_correction"}},
        {"output", {"rows", "snapshot_stride", "format"}},
        {"scaling", {"levels", "degrees", "steps"}},
    };
    return keys;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        return {};
    }
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <typename T>
T number(const std::string& key, const std::string& text)
{
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigurationError("config key '" + key + "': cannot parse '" + text + "' as a number");
    }
    return value;
}

template <typename T>
std::vector<T> number_list(const std::string& key, const std::string& text)
{
    std::vector<T> out;
    std::string item;
    std::istringstream in(text);
    while (in >> item) {
        if (item.back() == ',') {
            item.pop_back();
        }
        if (!item.empty()) {
            out.push_back(number<T>(key, item));
        }
    }
    return out;
}

bool boolean(const std::string& key, const std::string& text)
{
    if (text == "true" || text == "yes" || text == "on" || text == "1") {
        return true;
    }
    if (text == "false" || text == "no" || text == "off" || text == "0") {
        return false;
    }
    throw ConfigurationError("config key '" + key + "': expected true/false, got '" + text + "'");
}

void require(bool ok, const std::string& message)
{
    if (!ok) {
        throw ConfigurationError(message);
    }
}

// Rethrows library parse failures of enum values as configuration errors.
template <typename F>
auto enum_value(const std::string& key, F&& parse)
{
    try {
        return parse();
    } catch (const ConfigurationError&) {
        throw;
    } catch (const Error& ex) {
        throw ConfigurationError("config key '" + key + "': " + ex.what());
    }
}

void apply_entries(ExperimentConfig& c, const std::string& base_dir)
{
    const auto& e = c.entries;
    auto get = [&](const std::string& k) -> const std::string* {
        const auto it = e.find(k);
        return it == e.end() ? nullptr : &it->second;
    };

    if (auto v = get("mesh.source")) {
        if (*v == "file") {
            c.mesh.source = MeshSpec::Source::File;
        } else if (*v == "cartesian") {
            c.mesh.source = MeshSpec::Source::Cartesian;
        } else if (*v == "annulus") {
            c.mesh.source = MeshSpec::Source::Annulus;
        } else {
            throw ConfigurationError("config key 'mesh.source': unknown source '" + *v + "'");
        }
    }
    if (auto v = get("mesh.file")) {
        std::filesystem::path path(*v);
        if (path.is_relative()) {
            path = std::filesystem::path(base_dir) / path;
        }
        c.mesh.path = path.lexically_normal().string();
    }
    if (auto v = get("mesh.nx")) c.mesh.nx = number<int>("mesh.nx", *v);
    if (auto v = get("mesh.ny")) c.mesh.ny = number<int>("mesh.ny", *v);
    if (auto v = get("mesh.x0")) c.mesh.domain.x0 = number<double>("mesh.x0", *v);
    if (auto v = get("mesh.y0")) c.mesh.domain.y0 = number<double>("mesh.y0", *v);
    if (auto v = get("mesh.x1")) c.mesh.domain.x1 = number<double>("mesh.x1", *v);
    if (auto v = get("mesh.y1")) c.mesh.domain.y1 = number<double>("mesh.y1", *v);
    if (auto v = get("mesh.periodic")) {
        require(*v == "none" || *v == "x" || *v == "y" || *v == "xy",
                "config key 'mesh.periodic': expected none, x, y or xy");
        c.mesh.periodic_x = v->find('x') != std::string::npos;
        c.mesh.periodic_y = v->find('y') != std::string::npos;
    }
    if (auto v = get("mesh.boundary")) {
        c.mesh.boundary = enum_value("mesh.boundary", [&] { return parse_boundary_tag(*v); });
    }
    if (auto v = get("mesh.n_radial")) c.mesh.n_radial = number<int>("mesh.n_radial", *v);
    if (auto v = get("mesh.n_angular")) c.mesh.n_angular = number<int>("mesh.n_angular", *v);
    if (auto v = get("mesh.r_inner")) c.mesh.r_inner = number<double>("mesh.r_inner", *v);
    if (auto v = get("mesh.r_outer")) c.mesh.r_outer = number<double>("mesh.r_outer", *v);
    if (auto v = get("mesh.warp")) c.mesh.warp = number<double>("mesh.warp", *v);
    if (auto v = get("mesh.p_geo")) c.mesh.p_geo = number<int>("mesh.p_geo", *v);

    if (auto v = get("discretization.p")) c.p = number<int>("discretization.p", *v);
    if (auto v = get("discretization.regime")) {
        c.regime = enum_value("discretization.regime", [&] { return parse_regime(*v); });
    }
    if (auto v = get("discretization.c11_scale")) {
        c.ldg.c11_scale = number<double>("discretization.c11_scale", *v);
    }

    if (auto v = get("simulation.dt")) c.dt = number<double>("simulation.dt", *v);
    if (auto v = get("simulation.n_steps")) c.n_steps = number<std::int64_t>("simulation.n_steps", *v);
    if (auto v = get("simulation.burn_in_fraction")) {
        c.burn_in_fraction = number<double>("simulation.burn_in_fraction", *v);
    }
    if (auto v = get("simulation.seed")) c.seed = number<std::uint64_t>("simulation.seed", *v);
    if (auto v = get("simulation.sampler")) {
        c.sampler = enum_value("simulation.sampler", [&] { return parse_sampler_kind(*v); });
    }
    if (auto v = get("simulation.flux_scale")) {
        c.flux_scale = enum_value("simulation.flux_scale", [&] { return parse_flux_scale(*v); });
    }
    if (auto v = get("simulation.temporal_correction")) {
        c.temporal_correction = boolean("simulation.temporal_correction", *v);
    }

    if (auto v = get("output.rows")) c.rows = number_list<Index>("output.rows", *v);
    if (auto v = get("output.snapshot_stride")) {
        c.snapshot_stride = number<std::int64_t>("output.snapshot_stride", *v);
    }
    if (auto v = get("output.format")) {
        require(*v == "text" || *v == "binary", "config key 'output.format': expected text or binary");
        c.binary = *v == "binary";
    }

    if (auto v = get("scaling.levels")) c.scaling_levels = number_list<int>("scaling.levels", *v);
    if (auto v = get("scaling.degrees")) c.scaling_degrees = number_list<int>("scaling.degrees", *v);
    if (auto v = get("scaling.steps")) c.scaling_steps = number<std::int64_t>("scaling.steps", *v);
}

void validate(const ExperimentConfig& c)
{
    const auto& m = c.mesh;
    require(m.source != MeshSpec::Source::File || !m.path.empty(), "mesh.source = file needs mesh.file");
    require(m.nx >= 1 && m.ny >= 1, "mesh.nx and mesh.ny must be >= 1");
    require(m.domain.x1 > m.domain.x0 && m.domain.y1 > m.domain.y0, "mesh domain is degenerate");
    require(m.n_radial >= 1 && m.n_angular >= 3, "annulus needs n_radial >= 1 and n_angular >= 3");
    require(m.r_inner > 0 && m.r_outer > m.r_inner, "annulus needs 0 < r_inner < r_outer");
    require(m.p_geo >= 1, "mesh.p_geo must be >= 1");
    require(m.source != MeshSpec::Source::Annulus || !(m.periodic_x || m.periodic_y),
            "mesh.periodic does not apply to the annulus");
    require(c.p >= 1, "discretization.p must be >= 1");
    require(c.ldg.c11_scale >= 0, "discretization.c11_scale must be >= 0");
    require(c.dt > 0, "simulation.dt must be positive");
    require(c.n_steps >= 0, "simulation.n_steps must be >= 0");
    require(c.burn_in_fraction >= 0 && c.burn_in_fraction < 1, "simulation.burn_in_fraction must be in [0, 1)");
    require(c.snapshot_stride >= 0, "output.snapshot_stride must be >= 0");
    for (Index r : c.rows) {
        require(r >= 0, "output.rows entries must be >= 0");
    }
    for (int l : c.scaling_levels) {
        require(l >= 1, "scaling.levels entries must be >= 1");
    }
    for (int d : c.scaling_degrees) {
        require(d >= 1, "scaling.degrees entries must be >= 1");
    }
    require(c.scaling_steps >= 1, "scaling.steps must be >= 1");
    const bool full = m.periodic_x && m.periodic_y;
    require(c.regime != Regime::Periodic || full, "regime periodic needs mesh.periodic = xy");
    require(c.regime == Regime::Periodic || !full, "a fully periodic mesh needs regime periodic");
}

} // namespace

std::string ExperimentConfig::canonical() const
{
    std::string out;
    for (const auto& [k, v] : entries) {
        out += k + "=" + v + "\n";
    }
    return out;
}

std::uint64_t ExperimentConfig::hash() const
{
    return fnv1a(canonical());
}

void ExperimentConfig::set_seed(std::uint64_t s)
{
    seed = s;
    entries["simulation.seed"] = std::to_string(s);
}

void ExperimentConfig::set_sampler(SamplerKind k)
{
    sampler = k;
    entries["simulation.sampler"] = std::string(to_string(k));
}

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& ex) {
        throw ConfigurationError("config line " + std::to_string(ex.line()) + ": " + ex.message());
    }

    ExperimentConfig c;
    const auto& keys = allowed_keys();
    for (const auto& [section, body] : tree) {
        const auto it = keys.find(section);
        if (it == keys.end()) {
            if (body.empty()) {
                throw ConfigurationError("config key '" + section + "' is outside any section");
            }
            throw ConfigurationError("unknown config section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.contains(key)) {
                throw ConfigurationError("unknown config key '" + section + "." + key + "'");
            }
            c.entries[section + "." + key] = trim(value.data());
        }
    }
    apply_entries(c, base_dir);
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path + "'");
    }
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_config(in, dir.empty() ? "." : dir.string());
}

QuadMesh build_mesh(const MeshSpec& spec)
{
    return build_mesh(spec, -1);
}

QuadMesh build_mesh(const MeshSpec& spec, int level)
{
    switch (spec.source) {
    case MeshSpec::Source::File: {
        if (level > 0) {
            throw ConfigurationError("refinement levels need a generated mesh, not a mesh file");
        }
        QuadMesh mesh = load_mesh(spec.path);
        if (spec.periodic_x || spec.periodic_y) {
            mesh = apply_periodic(std::move(mesh), spec.periodic_x, spec.periodic_y);
        }
        return mesh;
    }
    case MeshSpec::Source::Cartesian: {
        const int nx = level > 0 ? level : spec.nx;
        const int ny = level > 0 ? level : spec.ny;
        QuadMesh mesh = cartesian_mesh(nx, ny, spec.domain, spec.boundary);
        if (spec.periodic_x || spec.periodic_y) {
            mesh = apply_periodic(std::move(mesh), spec.periodic_x, spec.periodic_y);
        }
        return mesh;
    }
    case MeshSpec::Source::Annulus: {
        const int nr = level > 0 ? level : spec.n_radial;
        const int na = level > 0 ? 4 * level : spec.n_angular;
        QuadMesh mesh = annulus_mesh(nr, na, spec.r_inner, spec.r_outer, spec.warp, spec.p_geo);
        if (spec.boundary != BoundaryTag::Neumann) {
            mesh = with_boundary_tag(std::move(mesh), spec.boundary);
        }
        return mesh;
    }
    }
    throw ConfigurationError("unknown mesh source");
}

} // namespace sdgm
