// groomkit command line: procedural grooms, frequency-space strand maps,
// linear latent models, guide densification, heuristic refinement, metrics.

#include "groom/densify.hpp"
#include "groom/io.hpp"
#include "groom/metrics.hpp"
#include "groom/pca.hpp"
#include "groom/refine.hpp"
#include "groom/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace groom;

namespace {

StyleRecipe recipe_from_config(const std::string& path) {
    auto cfg = read_config(path);
    StyleRecipe r = style_preset(style_kind_from_string(config_string(cfg, "style", "straight")));
    r.length_min = config_double(cfg, "length_min", r.length_min);
    r.length_max = config_double(cfg, "length_max", r.length_max);
    r.wave_amplitude = config_double(cfg, "wave_amplitude", r.wave_amplitude);
    r.wave_frequency = config_double(cfg, "wave_frequency", r.wave_frequency);
    r.curl_radius = config_double(cfg, "curl_radius", r.curl_radius);
    r.curl_pitch = config_double(cfg, "curl_pitch", r.curl_pitch);
    if (cfg.count("parting_azimuth"))
        r.parting_azimuth = config_double(cfg, "parting_azimuth", 0.0);
    r.baldness_cap = config_double(cfg, "baldness_cap", r.baldness_cap);
    r.droop = config_double(cfg, "droop", r.droop);
    r.seed = std::uint64_t(config_double(cfg, "seed", double(r.seed)));
    return r;
}

void refine_params_from_config(const std::string& path, RefineParams& rp,
                               PenetrationParams& pp) {
    auto cfg = read_config(path);
    rp.noise_amp = config_double(cfg, "noise_amp", rp.noise_amp);
    rp.noise_phase = config_double(cfg, "noise_phase", rp.noise_phase);
    rp.wisp_count = config_int(cfg, "wisp_count", rp.wisp_count);
    rp.stickiness = config_double(cfg, "stickiness", rp.stickiness);
    rp.duplication_factor = config_int(cfg, "duplication_factor", rp.duplication_factor);
    rp.l_bar = config_double(cfg, "l_bar", rp.l_bar);
    rp.texel_pitch_mm = config_double(cfg, "texel_pitch", rp.texel_pitch_mm);
    rp.final_penetration_pass = config_int(cfg, "final_penetration_pass",
                                           rp.final_penetration_pass ? 1 : 0) != 0;
    pp.lookahead = config_int(cfg, "lookahead", pp.lookahead);
    pp.decay = config_double(cfg, "decay", pp.decay);
    pp.surface_margin = config_double(cfg, "surface_margin", pp.surface_margin);
    pp.removal_tolerance = config_double(cfg, "removal_tolerance", pp.removal_tolerance);
    pp.clamp_exponent = config_int(cfg, "clamp_exponent", pp.clamp_exponent ? 1 : 0) != 0;
}

MapResolution resolution_from_name(const std::string& name) {
    if (name == "low") return MapResolution::low();
    if (name == "high") return MapResolution::high();
    throw std::invalid_argument("unknown resolution: " + name + " (use low or high)");
}

void write_groom_as(const std::string& path, const Groom& g, const std::string& format) {
    if (format.empty())
        write_groom(path, g);
    else
        write_groom(path, g, format_from_name(format));
}

Groom read_groom_as(const std::string& path, const std::string& format, int* resampled) {
    ImportResult res = format.empty() ? read_groom(path)
                                      : read_groom(path, format_from_name(format));
    if (resampled) *resampled = res.resampled;
    if (res.resampled > 0)
        std::cerr << "note: resampled " << res.resampled << " strand(s) to 100 points\n";
    return std::move(res.groom);
}

int run(int argc, char** argv) {
    CLI::App app{"groomkit: strand-hair representation and densification toolkit"};
    app.require_subcommand(1);

    ScalpSurface scalp;
    HeadSdf sdf;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a procedural groom from a recipe");
    std::string gen_params, gen_out, gen_res = "low", gen_style = "parted", gen_format;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--params", gen_params, "recipe config file");
    gen->add_option("--style", gen_style, "preset style when no config is given");
    gen->add_option("--out", gen_out, "output groom file")->required();
    gen->add_option("--resolution", gen_res, "map resolution: low|high");
    gen->add_option("--seed", gen_seed, "override recipe seed");
    gen->add_option("--format", gen_format, "output format: obj|hair|native");
    gen->callback([&] {
        StyleRecipe r = gen_params.empty() ? style_preset(style_kind_from_string(gen_style))
                                           : recipe_from_config(gen_params);
        if (gen_seed) r.seed = *gen_seed;
        Groom g = generate_groom(r, scalp, resolution_from_name(gen_res));
        write_groom_as(gen_out, g, gen_format);
    });

    // encode
    auto* enc = app.add_subcommand("encode", "embed a groom into a strand or latent map");
    std::string enc_in, enc_out, enc_res = "low", enc_model;
    enc->add_option("input", enc_in, "groom file")->required();
    enc->add_option("--out", enc_out, "output grid file")->required();
    enc->add_option("--resolution", enc_res, "map resolution: low|high");
    enc->add_option("--model", enc_model, "strand model file; output becomes a latent map");
    enc->callback([&] {
        Groom g = read_groom_as(enc_in, "", nullptr);
        MapBuildResult build = groom_to_map(g, resolution_from_name(enc_res), scalp, CodecConfig());
        if (build.skipped > 0)
            std::cerr << "note: skipped " << build.skipped << " strand(s) rooted off the chart\n";
        if (enc_model.empty()) {
            write_grid(enc_out, strand_map_to_grid(build.map));
        } else {
            PcaModel model = read_pca(enc_model);
            const StrandMap& m = build.map;
            LatentMap lm(m.height, m.width, model.components());
            for (int t = 0; t < m.texels(); ++t) {
                if (m.slot[std::size_t(t)] < 0) continue;
                Eigen::VectorXd l = encode_strand(model, m.codes[std::size_t(m.slot[std::size_t(t)])]);
                double* dst = lm.latent.data() + std::size_t(t) * lm.latent_dim;
                for (int d = 0; d < lm.latent_dim; ++d) dst[d] = l[d];
                lm.baldness[std::size_t(t)] = 1.0;
            }
            write_grid(enc_out, latent_map_to_grid(lm));
        }
    });

    // decode
    auto* dec = app.add_subcommand("decode", "decode a strand or latent map back to a groom");
    std::string dec_in, dec_out, dec_model, dec_format;
    dec->add_option("input", dec_in, "grid file")->required();
    dec->add_option("--out", dec_out, "output groom file")->required();
    dec->add_option("--model", dec_model, "strand model file (required for latent maps)");
    dec->add_option("--format", dec_format, "output format: obj|hair|native");
    dec->callback([&] {
        GridFile grid = read_grid(dec_in);
        CodecConfig cfg;
        StrandMap map({grid.height, grid.width}, cfg, scalp);
        if (grid.channels == 1 + cfg.dimension()) {
            map = grid_to_strand_map(grid, scalp);
        } else {
            if (dec_model.empty())
                throw IoError("latent map input needs --model to decode strands");
            PcaModel model = read_pca(dec_model);
            LatentMap lm = grid_to_latent_map(grid);
            if (lm.latent_dim != model.components())
                throw IoError("latent map channels do not match the model");
            for (int t = 0; t < lm.texels(); ++t) {
                if (!lm.occupied(t / lm.width, t % lm.width)) continue;
                Eigen::Map<const Eigen::VectorXd> l(
                    lm.latent.data() + std::size_t(t) * lm.latent_dim, lm.latent_dim);
                map.set(t / map.width, t % map.width, decode_strand(model, l, cfg));
            }
        }
        Groom g = map_to_groom(map);
        write_groom_as(dec_out, g, dec_format);
    });

    // fit
    auto* fit = app.add_subcommand("fit", "fit strand and hairstyle models on a groom directory");
    std::string fit_dir, fit_strand_out, fit_hair_out;
    int fit_strand_comps = 64, fit_hair_comps = 512;
    fit->add_option("dataset", fit_dir, "directory of groom files")->required();
    fit->add_option("--strand-out", fit_strand_out, "strand model output")->required();
    fit->add_option("--hairstyle-out", fit_hair_out, "hairstyle model output");
    fit->add_option("--strand-components", fit_strand_comps, "strand latent size");
    fit->add_option("--hairstyle-components", fit_hair_comps, "hairstyle latent size");
    fit->callback([&] {
        std::vector<std::string> files;
        for (const auto& e : fs::directory_iterator(fit_dir)) {
            if (!e.is_regular_file()) continue;
            std::string ext = e.path().extension().string();
            if (ext == ".groom" || ext == ".obj" || ext == ".hair") files.push_back(e.path().string());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw IoError("no groom files found in " + fit_dir);

        std::vector<StrandMap> maps;
        std::vector<FrequencyCode> codes;
        for (const std::string& f : files) {
            Groom g = read_groom(f).groom;
            MapBuildResult build = groom_to_map(g, MapResolution::low(), scalp, CodecConfig());
            codes.insert(codes.end(), build.map.codes.begin(), build.map.codes.end());
            maps.push_back(std::move(build.map));
        }
        PcaModel strand_model = fit_strand_pca(codes, fit_strand_comps);
        write_pca(fit_strand_out, strand_model, kPcaKindStrand);
        std::cout << "strand model: " << codes.size() << " samples, "
                  << strand_model.components() << " components\n";

        if (!fit_hair_out.empty()) {
            std::vector<LatentMap> lmaps;
            lmaps.reserve(maps.size());
            for (const StrandMap& m : maps) {
                LatentMap lm(m.height, m.width, strand_model.components());
                for (int t = 0; t < m.texels(); ++t) {
                    if (m.slot[std::size_t(t)] < 0) continue;
                    Eigen::VectorXd l =
                        encode_strand(strand_model, m.codes[std::size_t(m.slot[std::size_t(t)])]);
                    double* dst = lm.latent.data() + std::size_t(t) * lm.latent_dim;
                    for (int d = 0; d < lm.latent_dim; ++d) dst[d] = l[d];
                    lm.baldness[std::size_t(t)] = 1.0;
                }
                lmaps.push_back(std::move(lm));
            }
            PcaModel hair_model = fit_hairstyle_pca(lmaps, fit_hair_comps);
            write_pca(fit_hair_out, hair_model, kPcaKindHairstyle);
            std::cout << "hairstyle model: " << lmaps.size() << " samples, "
                      << hair_model.components() << " components\n";
        }
    });

    // sample
    auto* smp = app.add_subcommand("sample", "sample a novel groom from the hairstyle model");
    std::string smp_hair_model, smp_strand_model, smp_out, smp_format;
    std::uint64_t smp_seed = 0;
    smp->add_option("--hairstyle-model", smp_hair_model, "hairstyle model file")->required();
    smp->add_option("--strand-model", smp_strand_model, "strand model file")->required();
    smp->add_option("--seed", smp_seed, "sampling seed");
    smp->add_option("--out", smp_out, "output groom file")->required();
    smp->add_option("--format", smp_format, "output format: obj|hair|native");
    smp->callback([&] {
        PcaModel hair_model = read_pca(smp_hair_model);
        PcaModel strand_model = read_pca(smp_strand_model);
        MapResolution low = MapResolution::low();
        LatentMap lm = sample_hairstyle(hair_model, low.height, low.width,
                                        strand_model.components(), smp_seed);
        CodecConfig cfg;
        StrandMap map(low, cfg, scalp);
        for (int t = 0; t < lm.texels(); ++t) {
            if (!lm.occupied(t / lm.width, t % lm.width)) continue;
            Eigen::Map<const Eigen::VectorXd> l(lm.latent.data() + std::size_t(t) * lm.latent_dim,
                                                lm.latent_dim);
            map.set(t / map.width, t % map.width, decode_strand(strand_model, l, cfg));
        }
        write_groom_as(smp_out, map_to_groom(map), smp_format);
    });

    // upsample
    auto* up = app.add_subcommand("upsample", "densify a low-resolution strand map");
    std::string up_in, up_out, up_weights_out, up_std_out, up_method = "parting";
    up->add_option("input", up_in, "low-resolution strand map grid")->required();
    up->add_option("--method", up_method, "nearest|bilinear|parting");
    up->add_option("--out", up_out, "output strand map grid")->required();
    up->add_option("--weights-out", up_weights_out, "output weight map grid");
    up->add_option("--std-out", up_std_out, "weight std visualization (PGM)");
    up->callback([&] {
        StrandMap low = grid_to_strand_map(read_grid(up_in), scalp);
        MapResolution high = MapResolution::high();
        UpsampleResult result;
        if (up_method == "nearest")
            result = upsample_nearest(low, high);
        else if (up_method == "bilinear")
            result = upsample_bilinear(low, high);
        else if (up_method == "parting")
            result = upsample_parting_aware(low, high);
        else
            throw std::invalid_argument("unknown method: " + up_method);
        write_grid(up_out, strand_map_to_grid(result.map));
        if (!up_weights_out.empty())
            write_grid(up_weights_out, weights_to_grid(high.height, high.width, result.weights.w));
        if (!up_std_out.empty()) {
            auto std_map = weight_std_map(result.weights, low.height, low.width);
            write_pgm(up_std_out, high.height, high.width, std_map);
        }
    });

    // refine
    auto* ref = app.add_subcommand("refine", "heuristic refinement chain");
    std::string ref_in, ref_out, ref_params, ref_format;
    std::optional<std::uint64_t> ref_seed;
    ref->add_option("input", ref_in, "groom file")->required();
    ref->add_option("--params", ref_params, "refine config file");
    ref->add_option("--out", ref_out, "output groom file")->required();
    ref->add_option("--seed", ref_seed, "override config seed");
    ref->add_option("--format", ref_format, "output format: obj|hair|native");
    ref->callback([&] {
        Groom g = read_groom_as(ref_in, "", nullptr);
        RefineParams rp;
        PenetrationParams pp;
        if (!ref_params.empty()) refine_params_from_config(ref_params, rp, pp);
        if (ref_seed) rp.seed = *ref_seed;
        Groom out = refine(g, rp, pp, sdf, scalp);
        write_groom_as(ref_out, out, ref_format);
        std::cout << "refined " << g.strands.size() << " -> " << out.strands.size()
                  << " strands\n";
    });

    // metrics
    auto* met = app.add_subcommand("metrics", "quality metrics for a groom");
    std::string met_in, met_ref, met_report = "json", met_out;
    double met_tolerance = 0.5;
    met->add_option("input", met_in, "groom file")->required();
    met->add_option("--reference", met_ref, "reference groom for error metrics");
    met->add_option("--report", met_report, "text|json");
    met->add_option("--out", met_out, "write the report to a file instead of stdout");
    met->add_option("--tolerance", met_tolerance, "penetration tolerance, mm");
    met->callback([&] {
        Groom g = read_groom_as(met_in, "", nullptr);
        MetricsReport report;
        report.messiness_mm = messiness(g);
        report.penetration_permille = penetration_rate(g, sdf, met_tolerance);
        if (!met_ref.empty()) {
            Groom r = read_groom_as(met_ref, "", nullptr);
            report.pos_err_mm = positional_error(g, r);
            report.loc_err_mm = local_error(g, r);
            VolumetricComparison cmp = volumetric_compare(voxelize(g), voxelize(r));
            report.iou = cmp.iou;
            report.precision = cmp.precision;
            report.recall = cmp.recall;
            report.l2_flow_mm = cmp.l2_flow;
        }
        std::string text = met_report == "text" ? report.to_text() : report.to_json();
        if (met_out.empty()) {
            std::cout << text << "\n";
        } else {
            std::ofstream os(met_out);
            os << text << "\n";
            if (!os) throw IoError("write failed: " + met_out);
        }
    });

    // export
    auto* exp = app.add_subcommand("export", "convert a groom between file formats");
    std::string exp_in, exp_out, exp_format;
    exp->add_option("input", exp_in, "groom file")->required();
    exp->add_option("--format", exp_format, "obj|hair|native")->required();
    exp->add_option("--out", exp_out, "output file")->required();
    exp->callback([&] {
        Groom g = read_groom_as(exp_in, "", nullptr);
        write_groom_as(exp_out, g, exp_format);
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "groomkit: " << e.what() << "\n";
        return 1;
    }
}
