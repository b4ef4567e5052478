#include "groom/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace groom {

namespace {

// All binary containers are little-endian; this code assumes a little-endian
// host (checked at startup of the readers).
void require_little_endian() {
    const std::uint16_t probe = 1;
    if (*reinterpret_cast<const std::uint8_t*>(&probe) != 1)
        throw IoError("binary i/o requires a little-endian host");
}

template <typename T>
void write_pod(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& is, const std::string& path, const char* what) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) {
        std::ostringstream msg;
        msg << path << ": truncated while reading " << what << " at byte offset "
            << is.tellg();
        throw IoError(msg.str());
    }
    return v;
}

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    return ext;
}

bool finite_strand(const Strand& s) {
    for (const Vec3& p : s.points)
        if (!p.allFinite()) return false;
    return true;
}

// Shared tail of every importer: reject invalid strands, resample lengths.
ImportResult finalize_import(std::vector<Strand> raw, int n_s, const std::string& path) {
    int offending = 0;
    for (const Strand& s : raw)
        if (s.size() < 2 || !finite_strand(s)) ++offending;
    if (offending > 0) {
        std::ostringstream msg;
        msg << path << ": rejected, " << offending
            << " strand(s) violate invariants (fewer than 2 points or non-finite values)";
        throw IoError(msg.str());
    }
    ImportResult res;
    res.groom.n_s = n_s;
    res.groom.strands.reserve(raw.size());
    for (Strand& s : raw) {
        if (s.size() != n_s) {
            s = resample_uniform(s, n_s);
            ++res.resampled;
        }
        res.groom.strands.push_back(std::move(s));
    }
    return res;
}

constexpr char kGridMagic[4] = {'G', 'K', 'G', 'R'};
constexpr char kNativeMagic[4] = {'G', 'K', 'H', 'R'};
constexpr char kPcaMagic[4] = {'G', 'K', 'P', 'C'};
constexpr std::uint32_t kNativeVersion = 1;

}  // namespace

GroomFormat format_from_name(const std::string& name) {
    if (name == "obj") return GroomFormat::Obj;
    if (name == "hair") return GroomFormat::Hair;
    if (name == "native") return GroomFormat::Native;
    throw IoError("unknown groom format: " + name);
}

GroomFormat format_from_path(const std::string& path) {
    std::string ext = lower_ext(path);
    if (ext == "obj") return GroomFormat::Obj;
    if (ext == "hair") return GroomFormat::Hair;
    return GroomFormat::Native;
}

// ---------------------------------------------------------------- OBJ

namespace {

void write_obj(const std::string& path, const Groom& g) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "# groomkit strands: " << g.strands.size() << " strands, " << g.n_s
       << " points each\n";
    char buf[96];
    std::size_t base = 1;
    for (const Strand& s : g.strands) {
        for (const Vec3& p : s.points) {
            std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", p.x(), p.y(), p.z());
            os << buf;
        }
        os << "l";
        for (int i = 0; i < s.size(); ++i) os << " " << base + std::size_t(i);
        os << "\n";
        base += std::size_t(s.size());
    }
    if (!os) throw IoError("write failed: " + path);
}

ImportResult read_obj(const std::string& path, int n_s) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path);
    std::vector<Vec3> vertices;
    std::vector<Strand> strands;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) {
                std::ostringstream msg;
                msg << path << ":" << line_no << ": malformed vertex line";
                throw IoError(msg.str());
            }
            vertices.emplace_back(x, y, z);
        } else if (tag == "l") {
            Strand s;
            long idx;
            while (ls >> idx) {
                if (idx < 1 || std::size_t(idx) > vertices.size()) {
                    std::ostringstream msg;
                    msg << path << ":" << line_no << ": polyline index " << idx
                        << " out of range";
                    throw IoError(msg.str());
                }
                s.points.push_back(vertices[std::size_t(idx - 1)]);
            }
            strands.push_back(std::move(s));
        }
    }
    return finalize_import(std::move(strands), n_s, path);
}

// ---------------------------------------------------------------- HAIR
// Cem Yuksel's binary layout: 128-byte header (magic "HAIR", strand and point
// counts, flag bits, defaults, free-form info), optional uint16 segment
// counts, then float32 points.

struct HairHeader {
    char magic[4];
    std::uint32_t num_strands;
    std::uint32_t num_points;
    std::uint32_t flags;
    std::uint32_t default_segments;
    float default_thickness;
    float default_transparency;
    float default_color[3];
    char info[88];
};
static_assert(sizeof(HairHeader) == 128);

void write_hair(const std::string& path, const Groom& g) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);

    HairHeader h{};
    std::memcpy(h.magic, "HAIR", 4);
    h.num_strands = std::uint32_t(g.strands.size());
    h.num_points = std::uint32_t(g.strands.size()) * std::uint32_t(g.n_s);
    h.flags = 0x1 | 0x2;  // segments array + points
    h.default_segments = std::uint32_t(g.n_s - 1);
    h.default_thickness = 1.0f;
    h.default_transparency = 0.0f;
    h.default_color[0] = h.default_color[1] = h.default_color[2] = 0.5f;
    std::snprintf(h.info, sizeof(h.info), "groomkit");
    write_pod(os, h);

    for (std::size_t i = 0; i < g.strands.size(); ++i)
        write_pod(os, std::uint16_t(g.n_s - 1));
    for (const Strand& s : g.strands) {
        for (const Vec3& p : s.points) {
            float xyz[3] = {float(p.x()), float(p.y()), float(p.z())};
            os.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
        }
    }
    if (!os) throw IoError("write failed: " + path);
}

ImportResult read_hair(const std::string& path, int n_s) {
    require_little_endian();
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);

    HairHeader h = read_pod<HairHeader>(is, path, "HAIR header");
    if (std::memcmp(h.magic, "HAIR", 4) != 0)
        throw IoError(path + ": bad magic at byte offset 0, expected \"HAIR\"");
    if (!(h.flags & 0x2)) throw IoError(path + ": HAIR file carries no point data");

    std::vector<std::uint32_t> segments(h.num_strands, h.default_segments);
    if (h.flags & 0x1) {
        for (std::uint32_t i = 0; i < h.num_strands; ++i)
            segments[i] = read_pod<std::uint16_t>(is, path, "segment count");
    }

    std::uint64_t expected = 0;
    for (std::uint32_t c : segments) expected += c + 1;
    if (expected != h.num_points) {
        std::ostringstream msg;
        msg << path << ": segment table sums to " << expected << " points but header claims "
            << h.num_points;
        throw IoError(msg.str());
    }

    std::vector<Strand> strands(h.num_strands);
    for (std::uint32_t i = 0; i < h.num_strands; ++i) {
        strands[i].points.resize(segments[i] + 1);
        for (Vec3& p : strands[i].points) {
            float xyz[3];
            is.read(reinterpret_cast<char*>(xyz), sizeof(xyz));
            if (!is) {
                std::ostringstream msg;
                msg << path << ": truncated point data at byte offset " << is.tellg();
                throw IoError(msg.str());
            }
            p = Vec3(xyz[0], xyz[1], xyz[2]);
        }
    }
    return finalize_import(std::move(strands), n_s, path);
}

// ---------------------------------------------------------------- native
// magic, version, n_s, strand count, then per-strand float32 roots followed
// by per-strand float32 gradient rows. Storing gradients keeps frequency
// encoding lossless from file.

void write_native(const std::string& path, const Groom& g) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kNativeMagic, 4);
    write_pod(os, kNativeVersion);
    write_pod(os, std::uint32_t(g.n_s));
    write_pod(os, std::uint32_t(g.strands.size()));
    for (const Strand& s : g.strands) {
        float root[3] = {float(s.points[0].x()), float(s.points[0].y()), float(s.points[0].z())};
        os.write(reinterpret_cast<const char*>(root), sizeof(root));
    }
    for (const Strand& s : g.strands) {
        for (int i = 0; i + 1 < s.size(); ++i) {
            Vec3 d = s.points[std::size_t(i) + 1] - s.points[std::size_t(i)];
            float grad[3] = {float(d.x()), float(d.y()), float(d.z())};
            os.write(reinterpret_cast<const char*>(grad), sizeof(grad));
        }
    }
    if (!os) throw IoError("write failed: " + path);
}

ImportResult read_native(const std::string& path, int n_s) {
    require_little_endian();
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);

    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kNativeMagic, 4) != 0)
        throw IoError(path + ": bad magic at byte offset 0, not a groomkit strand file");
    std::uint32_t version = read_pod<std::uint32_t>(is, path, "version");
    if (version != kNativeVersion)
        throw IoError(path + ": unsupported version " + std::to_string(version));
    std::uint32_t file_ns = read_pod<std::uint32_t>(is, path, "point count");
    std::uint32_t count = read_pod<std::uint32_t>(is, path, "strand count");
    if (file_ns < 2)
        throw IoError(path + ": rejected, " + std::to_string(count) +
                      " strand(s) with fewer than 2 points");

    std::vector<Vec3> roots(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        float xyz[3];
        is.read(reinterpret_cast<char*>(xyz), sizeof(xyz));
        if (!is) {
            std::ostringstream msg;
            msg << path << ": truncated root data at byte offset " << is.tellg();
            throw IoError(msg.str());
        }
        roots[i] = Vec3(xyz[0], xyz[1], xyz[2]);
    }
    std::vector<Strand> strands(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        GradientStrand gs;
        gs.root = roots[i];
        gs.gradients.resize(file_ns - 1);
        for (Vec3& d : gs.gradients) {
            float xyz[3];
            is.read(reinterpret_cast<char*>(xyz), sizeof(xyz));
            if (!is) {
                std::ostringstream msg;
                msg << path << ": truncated gradient data at byte offset " << is.tellg();
                throw IoError(msg.str());
            }
            d = Vec3(xyz[0], xyz[1], xyz[2]);
        }
        strands[i] = from_gradients(gs);
    }
    return finalize_import(std::move(strands), int(n_s), path);
}

}  // namespace

ImportResult read_groom(const std::string& path, GroomFormat format, int n_s) {
    switch (format) {
        case GroomFormat::Obj: return read_obj(path, n_s);
        case GroomFormat::Hair: return read_hair(path, n_s);
        case GroomFormat::Native: return read_native(path, n_s);
    }
    throw IoError("unreachable groom format");
}

ImportResult read_groom(const std::string& path, int n_s) {
    return read_groom(path, format_from_path(path), n_s);
}

void write_groom(const std::string& path, const Groom& g, GroomFormat format) {
    if (g.strands.empty() && format != GroomFormat::Native)
        throw IoError("refusing to write an empty groom to " + path);
    switch (format) {
        case GroomFormat::Obj: write_obj(path, g); return;
        case GroomFormat::Hair: write_hair(path, g); return;
        case GroomFormat::Native: write_native(path, g); return;
    }
}

void write_groom(const std::string& path, const Groom& g) {
    write_groom(path, g, format_from_path(path));
}

// ---------------------------------------------------------------- grids

void write_grid(const std::string& path, const GridFile& grid) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kGridMagic, 4);
    write_pod(os, std::uint32_t(grid.height));
    write_pod(os, std::uint32_t(grid.width));
    write_pod(os, std::uint32_t(grid.channels));
    os.write(reinterpret_cast<const char*>(grid.values.data()),
             std::streamsize(grid.values.size() * sizeof(float)));
    if (!os) throw IoError("write failed: " + path);
}

GridFile read_grid(const std::string& path) {
    require_little_endian();
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kGridMagic, 4) != 0)
        throw IoError(path + ": bad magic at byte offset 0, not a groomkit grid file");
    GridFile g;
    g.height = int(read_pod<std::uint32_t>(is, path, "height"));
    g.width = int(read_pod<std::uint32_t>(is, path, "width"));
    g.channels = int(read_pod<std::uint32_t>(is, path, "channels"));
    std::size_t n = std::size_t(g.height) * g.width * g.channels;
    g.values.resize(n);
    is.read(reinterpret_cast<char*>(g.values.data()), std::streamsize(n * sizeof(float)));
    if (!is) {
        std::ostringstream msg;
        msg << path << ": truncated grid data at byte offset " << is.tellg();
        throw IoError(msg.str());
    }
    return g;
}

GridFile strand_map_to_grid(const StrandMap& m) {
    GridFile g;
    g.height = m.height;
    g.width = m.width;
    g.channels = 1 + m.cfg.dimension();
    g.values.assign(std::size_t(g.height) * g.width * g.channels, 0.0f);
    for (int t = 0; t < m.texels(); ++t) {
        if (m.slot[std::size_t(t)] < 0) continue;
        float* out = g.values.data() + std::size_t(t) * g.channels;
        out[0] = 1.0f;
        const FrequencyCode& c = m.codes[std::size_t(m.slot[std::size_t(t)])];
        const int bands = m.cfg.bands();
        for (int i = 0; i < bands; ++i) {
            out[1 + i] = float(c.amp[std::size_t(i)]);
            out[1 + bands + i] = float(c.cos_phase[std::size_t(i)]);
            out[1 + 2 * bands + i] = float(c.sin_phase[std::size_t(i)]);
        }
    }
    return g;
}

StrandMap grid_to_strand_map(const GridFile& g, const ScalpSurface& scalp, int n_s, int n_g) {
    CodecConfig cfg(n_s, n_g);
    if (g.channels != 1 + cfg.dimension())
        throw IoError("grid channel count does not match a strand map");
    StrandMap m({g.height, g.width}, cfg, scalp);
    const int bands = cfg.bands();
    for (int t = 0; t < m.texels(); ++t) {
        const float* in = g.values.data() + std::size_t(t) * g.channels;
        if (in[0] < 0.5f) continue;
        FrequencyCode c(cfg);
        for (int i = 0; i < bands; ++i) {
            c.amp[std::size_t(i)] = std::max(0.0, double(in[1 + i]));
            c.cos_phase[std::size_t(i)] = double(in[1 + bands + i]);
            c.sin_phase[std::size_t(i)] = double(in[1 + 2 * bands + i]);
            double m2 = c.cos_phase[std::size_t(i)] * c.cos_phase[std::size_t(i)] +
                        c.sin_phase[std::size_t(i)] * c.sin_phase[std::size_t(i)];
            if (m2 < 1e-18) {
                c.cos_phase[std::size_t(i)] = 1.0;
                c.sin_phase[std::size_t(i)] = 0.0;
            } else {
                double norm = std::sqrt(m2);
                c.cos_phase[std::size_t(i)] /= norm;
                c.sin_phase[std::size_t(i)] /= norm;
            }
        }
        m.set(t / m.width, t % m.width, std::move(c));
    }
    return m;
}

GridFile latent_map_to_grid(const LatentMap& m) {
    GridFile g;
    g.height = m.height;
    g.width = m.width;
    g.channels = m.channels();
    g.values.resize(std::size_t(g.height) * g.width * g.channels);
    for (int t = 0; t < m.texels(); ++t) {
        float* out = g.values.data() + std::size_t(t) * g.channels;
        for (int d = 0; d < m.latent_dim; ++d)
            out[d] = float(m.latent[std::size_t(t) * m.latent_dim + d]);
        out[m.latent_dim] = float(m.baldness[std::size_t(t)]);
    }
    return g;
}

LatentMap grid_to_latent_map(const GridFile& g) {
    if (g.channels < 2) throw IoError("grid channel count does not match a latent map");
    LatentMap m(g.height, g.width, g.channels - 1);
    for (int t = 0; t < m.texels(); ++t) {
        const float* in = g.values.data() + std::size_t(t) * g.channels;
        for (int d = 0; d < m.latent_dim; ++d)
            m.latent[std::size_t(t) * m.latent_dim + d] = double(in[d]);
        m.baldness[std::size_t(t)] = std::clamp(double(in[m.latent_dim]), 0.0, 1.0);
    }
    return m;
}

GridFile weights_to_grid(int height, int width, const std::vector<double>& w5) {
    GridFile g;
    g.height = height;
    g.width = width;
    g.channels = 5;
    g.values.resize(w5.size());
    for (std::size_t i = 0; i < w5.size(); ++i) g.values[i] = float(w5[i]);
    return g;
}

GridFile scalars_to_grid(int height, int width, const std::vector<double>& values) {
    GridFile g;
    g.height = height;
    g.width = width;
    g.channels = 1;
    g.values.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) g.values[i] = float(values[i]);
    return g;
}

void write_pgm(const std::string& path, int height, int width,
               const std::vector<double>& values) {
    double peak = 0.0;
    for (double v : values) peak = std::max(peak, v);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "P5\n" << width << " " << height << "\n255\n";
    for (double v : values) {
        int q = peak > 0.0 ? int(std::lround(255.0 * std::clamp(v / peak, 0.0, 1.0))) : 0;
        os.put(char(q));
    }
    if (!os) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------- PCA model

void write_pca(const std::string& path, const PcaModel& m, int kind) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kPcaMagic, 4);
    write_pod(os, std::uint32_t(kind));
    write_pod(os, std::uint32_t(m.input_dim()));
    write_pod(os, std::uint32_t(m.components()));
    os.write(reinterpret_cast<const char*>(m.mean.data()),
             std::streamsize(std::size_t(m.input_dim()) * sizeof(double)));
    for (int r = 0; r < m.components(); ++r) {
        Eigen::VectorXd row = m.basis.row(r);
        os.write(reinterpret_cast<const char*>(row.data()),
                 std::streamsize(std::size_t(m.input_dim()) * sizeof(double)));
    }
    os.write(reinterpret_cast<const char*>(m.variances.data()),
             std::streamsize(std::size_t(m.components()) * sizeof(double)));
    if (!os) throw IoError("write failed: " + path);
}

PcaModel read_pca(const std::string& path, int* kind) {
    require_little_endian();
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kPcaMagic, 4) != 0)
        throw IoError(path + ": bad magic at byte offset 0, not a groomkit model file");
    std::uint32_t k = read_pod<std::uint32_t>(is, path, "model kind");
    std::uint32_t dim = read_pod<std::uint32_t>(is, path, "input dim");
    std::uint32_t comps = read_pod<std::uint32_t>(is, path, "components");
    if (kind) *kind = int(k);

    PcaModel m;
    m.mean.resize(dim);
    is.read(reinterpret_cast<char*>(m.mean.data()), std::streamsize(dim * sizeof(double)));
    m.basis.resize(comps, dim);
    for (std::uint32_t r = 0; r < comps; ++r) {
        Eigen::VectorXd row(dim);
        is.read(reinterpret_cast<char*>(row.data()), std::streamsize(dim * sizeof(double)));
        m.basis.row(r) = row.transpose();
    }
    m.variances.resize(comps);
    is.read(reinterpret_cast<char*>(m.variances.data()),
            std::streamsize(comps * sizeof(double)));
    if (!is) {
        std::ostringstream msg;
        msg << path << ": truncated model data at byte offset " << is.tellg();
        throw IoError(msg.str());
    }
    return m;
}

// ---------------------------------------------------------------- config

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path);
    std::map<std::string, std::string> cfg;
    std::string line;
    int line_no = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(is, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": expected key = value";
            throw IoError(msg.str());
        }
        cfg[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

double config_double(const std::map<std::string, std::string>& cfg, const std::string& key,
                     double fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : std::stod(it->second);
}

int config_int(const std::map<std::string, std::string>& cfg, const std::string& key,
               int fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : std::stoi(it->second);
}

std::string config_string(const std::map<std::string, std::string>& cfg, const std::string& key,
                          const std::string& fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
}

}  // namespace groom
