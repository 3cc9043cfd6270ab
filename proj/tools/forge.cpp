// forge: command-line front end for the synthetic data engine.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "forge/asset_catalog.hpp"
#include "forge/caption_grammar.hpp"
#include "forge/dataset_pipeline.hpp"
#include "forge/scene_sampler.hpp"
#include "forge/weight_io.hpp"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitGeneration = 3;

int cmd_catalog_validate(const std::string& path) {
    forge::AssetCatalog cat;
    try {
        cat = forge::parse_catalog(forge::read_file_bytes(path));
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }
    const auto report = forge::validate_catalog(cat);
    for (const auto& f : report.findings) std::cout << f.subject << ": " << f.message << "\n";
    if (!report.ok()) return kExitValidation;
    std::cout << "ok: " << cat.objects.size() << " objects, " << cat.materials.size() << " materials, "
              << cat.colors.size() << " colors, " << cat.human_templates.size() << " human templates, "
              << cat.clothing_textures.size() << " clothing textures, " << cat.motion_clips.size()
              << " motion clips, " << cat.scene_envs.size() << " scene envs\n";
    return kExitOk;
}

struct GenerateArgs {
    std::string config, catalog, out;
    std::optional<std::uint64_t> seed;
    std::optional<int> videos;
    std::optional<int> workers;
};

int cmd_generate(const GenerateArgs& args) {
    forge::GenerationConfig cfg;
    forge::AssetCatalog catalog;
    std::string config_bytes;
    try {
        config_bytes = forge::read_file_bytes(args.config);
        cfg = forge::parse_generation_config(config_bytes);
        if (args.seed) cfg.seed = *args.seed;
        if (args.videos) cfg.n_videos = *args.videos;
        if (auto problems = cfg.problems(); !problems.empty()) {
            for (const auto& p : problems) std::cerr << "config: " << p << "\n";
            return kExitValidation;
        }
        catalog = forge::load_catalog(args.catalog);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }
    forge::GenerateOptions opts;
    opts.workers = args.workers.value_or(forge::default_worker_count());
    opts.config_digest = forge::digest_hex(config_bytes);
    try {
        const auto manifest = forge::generate_dataset(cfg, catalog, args.out, opts);
        std::cout << "wrote " << manifest.header.samples << " samples from " << manifest.header.videos << " videos to "
                  << args.out << "\n";
        for (const auto& f : manifest.header.failed_videos) std::cerr << "placement failure: " << f.reason << "\n";
    } catch (const std::exception& e) {
        std::cerr << "generation aborted: " << e.what() << "\n";
        return kExitGeneration;
    }
    return kExitOk;
}

int cmd_caption(const std::string& metadata, const std::optional<std::string>& mode_name,
                const std::optional<std::uint64_t>& seed) {
    std::optional<forge::CaptionMode> mode;
    if (mode_name) {
        mode = forge::parse_caption_mode(*mode_name);
        if (!mode) {
            std::cerr << "--mode must be full or sampled\n";
            return kExitUsage;
        }
    }
    try {
        std::cout << forge::recaption(metadata, mode, std::nullopt, seed).full_text << "\n";
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_prompt(const std::string& caption_path) {
    try {
        std::string text = forge::read_file_bytes(caption_path);
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && text[first] == '{') {
            const auto j = nlohmann::json::parse(text);
            text = j.contains("full_text") ? j.at("full_text").get<std::string>() : j.at("caption").get<std::string>();
        }
        const auto last = text.find_last_not_of(" \t\r\n");
        text = first == std::string::npos ? "" : text.substr(first, last - first + 1);
        const auto prompt = forge::build_paraphrase_prompt(text);
        std::cout << nlohmann::json{{"prompt", prompt.text}, {"max_new_tokens", prompt.max_new_tokens}}.dump(2) << "\n";
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_stats(const std::string& manifest, const std::string& format) {
    try {
        const auto stats = forge::dataset_stats(manifest);
        std::cout << (format == "json" ? forge::stats_to_json(stats) : forge::stats_to_text(stats));
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_fixtures(const std::string& out, std::uint64_t seed) {
    try {
        forge::export_kernel_fixtures(out, seed);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitGeneration;
    }
    std::cout << "wrote kernel fixtures to " << out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forge: procedural synthetic vision-language data engine"};
    app.require_subcommand(1);

    auto* catalog_cmd = app.add_subcommand("catalog", "asset catalog tools");
    catalog_cmd->require_subcommand(1);
    auto* validate_cmd = catalog_cmd->add_subcommand("validate", "check every catalog invariant");
    std::string catalog_path;
    validate_cmd->add_option("catalog", catalog_path, "catalog JSON file")->required();

    auto* gen_cmd = app.add_subcommand("generate", "generate a dataset");
    GenerateArgs gen;
    gen_cmd->add_option("--config", gen.config, "generation config JSON")->required();
    gen_cmd->add_option("--catalog", gen.catalog, "asset catalog JSON")->required();
    gen_cmd->add_option("--out", gen.out, "output directory")->required();
    gen_cmd->add_option("--seed", gen.seed, "override the master seed");
    gen_cmd->add_option("--videos", gen.videos, "override n_videos")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--workers", gen.workers, "worker threads (default: FORGE_WORKERS or 1)")
        ->check(CLI::PositiveNumber);

    auto* cap_cmd = app.add_subcommand("caption", "re-run the caption grammar on stored metadata");
    std::string metadata_path;
    std::optional<std::string> mode;
    std::optional<std::uint64_t> cap_seed;
    cap_cmd->add_option("--metadata", metadata_path, "frame metadata JSON")->required();
    cap_cmd->add_option("--mode", mode, "full or sampled");
    cap_cmd->add_option("--seed", cap_seed, "statement shuffle seed (default: stored seed)");

    auto* prompt_cmd = app.add_subcommand("prompt", "build the paraphrase prompt for a caption");
    std::string caption_path;
    prompt_cmd->add_option("--caption", caption_path, "caption text file")->required();

    auto* stats_cmd = app.add_subcommand("stats", "summarize a generated dataset");
    std::string manifest_path, format = "text";
    stats_cmd->add_option("--manifest", manifest_path, "manifest.jsonl or dataset directory")->required();
    stats_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

    auto* fix_cmd = app.add_subcommand("fixtures", "export SVCW kernel fixtures for cross-language checks");
    std::string fixtures_out;
    std::uint64_t fixtures_seed = 2023;
    fix_cmd->add_option("--out", fixtures_out, "output directory")->required();
    fix_cmd->add_option("--seed", fixtures_seed, "fixture seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*validate_cmd) return cmd_catalog_validate(catalog_path);
    if (*gen_cmd) return cmd_generate(gen);
    if (*cap_cmd) return cmd_caption(metadata_path, mode, cap_seed);
    if (*prompt_cmd) return cmd_prompt(caption_path);
    if (*stats_cmd) return cmd_stats(manifest_path, format);
    if (*fix_cmd) return cmd_fixtures(fixtures_out, fixtures_seed);
    return kExitUsage;
}
