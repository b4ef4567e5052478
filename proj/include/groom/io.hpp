#pragma once

#include "groom/pca.hpp"
#include "groom/scalp.hpp"
#include "groom/strand.hpp"

#include <map>
#include <string>
#include <vector>

namespace groom {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GroomFormat { Obj, Hair, Native };

// Explicit name ("obj" / "hair" / "native") or file-extension inference.
GroomFormat format_from_name(const std::string& name);
GroomFormat format_from_path(const std::string& path);

struct ImportResult {
    Groom groom;
    int resampled = 0;  // strands resampled to the groom point count
};

// Importers reject invariant-violating files (non-finite values, strands with
// fewer than 2 points) with a count of offending strands; strands of other
// lengths are resampled to n_s and reported.
ImportResult read_groom(const std::string& path, GroomFormat format, int n_s = 100);
ImportResult read_groom(const std::string& path, int n_s = 100);  // infer format

void write_groom(const std::string& path, const Groom& g, GroomFormat format);
void write_groom(const std::string& path, const Groom& g);  // infer format

// Flat binary grid container: magic, height, width, channels, then row-major
// float32 values.
struct GridFile {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> values;
};

void write_grid(const std::string& path, const GridFile& grid);
GridFile read_grid(const std::string& path);

// Grid encodings of the map types. Strand maps use one occupancy channel
// plus the code values; latent maps use latent channels plus baldness.
GridFile strand_map_to_grid(const StrandMap& m);
StrandMap grid_to_strand_map(const GridFile& g, const ScalpSurface& scalp, int n_s = 100,
                             int n_g = 3);
GridFile latent_map_to_grid(const LatentMap& m);
LatentMap grid_to_latent_map(const GridFile& g);
GridFile weights_to_grid(int height, int width, const std::vector<double>& w5);
GridFile scalars_to_grid(int height, int width, const std::vector<double>& values);

// 8-bit PGM for quick visual inspection; values scaled by the grid maximum.
void write_pgm(const std::string& path, int height, int width, const std::vector<double>& values);

// PCA model container: magic, kind, input dim, components, then mean, basis
// rows, and variances as little-endian float64.
void write_pca(const std::string& path, const PcaModel& m, int kind);
PcaModel read_pca(const std::string& path, int* kind = nullptr);

constexpr int kPcaKindStrand = 0;
constexpr int kPcaKindHairstyle = 1;

// Flat "key = value" config text, '#' comments.
std::map<std::string, std::string> read_config(const std::string& path);
double config_double(const std::map<std::string, std::string>& cfg, const std::string& key,
                     double fallback);
int config_int(const std::map<std::string, std::string>& cfg, const std::string& key,
               int fallback);
std::string config_string(const std::map<std::string, std::string>& cfg, const std::string& key,
                          const std::string& fallback);

}  // namespace groom
