#include "uphdr/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "uphdr/container.hpp"
#include "uphdr/errors.hpp"

namespace uphdr {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    std::string s(buf);
    // keep a float-looking literal so round-trips stay typed
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void TrainConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
    if (epochs < 0) fail("epochs must be >= 0");
    if (init_epochs < 0) fail("init_epochs must be >= 0");
    if (!(lr_g > 0) || !(lr_d > 0)) fail("learning rates must be > 0");
    if (batch < 1) fail("batch must be >= 1");
    if (!(w0 > 0)) fail("w0 must be > 0");
    if (content != "perceptual" && content != "mse") fail("content must be perceptual|mse");
    if (reference_index < 1 || reference_index > 3) fail("reference_index must be 1, 2 or 3");
    if (checkpoint_every < 1) fail("checkpoint_every must be >= 1");
    if (res_blocks < 0) fail("res_blocks must be >= 0");
    if (upsample != "nearest" && upsample != "transposed") fail("upsample must be nearest|transposed");
    if (min_patch_window < 1) fail("min_patch_window must be >= 1");
    if (!(gamma > 1.0)) fail("gamma must be > 1");
    if (!(mu > 0)) fail("mu must be > 0");
    if (!(blur_sigma > 0)) fail("blur_sigma must be > 0");
    if (!(normalize_percentile > 0 && normalize_percentile <= 100)) fail("normalize_percentile must be in (0,100]");
    if (patch < 8 || patch % 4) fail("patch must be >= 8 and divisible by 4");
    if (stride < 1) fail("stride must be >= 1");
    if (resize_height < patch || resize_width < patch) fail("resize must be at least the patch size");
    if (min_patch && (patch / 4) % min_patch_window)
        fail("score map side (patch/4) must be divisible by min_patch_window");
    if (features_preset != "tiny" && features_preset != "vgg19") fail("features preset must be tiny|vgg19");
    if (features_preset == "vgg19" && features_weights.empty())
        fail("features preset vgg19 requires a weights path");
    if (!(psnr_cap > 0)) fail("psnr_cap must be > 0");
}

std::string TrainConfig::to_toml() const {
    std::ostringstream o;
    o << "[train]\n";
    o << "epochs = " << epochs << "\n";
    o << "init_epochs = " << init_epochs << "\n";
    o << "lr_g = " << fmt_double(lr_g) << "\n";
    o << "lr_d = " << fmt_double(lr_d) << "\n";
    o << "batch = " << batch << "\n";
    o << "seed = " << seed << "\n";
    o << "w0 = " << fmt_double(w0) << "\n";
    o << "content = \"" << content << "\"\n";
    o << "min_patch = " << (min_patch ? "true" : "false") << "\n";
    o << "blur_set = " << (blur_set ? "true" : "false") << "\n";
    o << "reference_index = " << reference_index << "\n";
    o << "checkpoint_every = " << checkpoint_every << "\n";
    o << "\n[model]\n";
    o << "res_blocks = " << res_blocks << "\n";
    o << "shared_encoder = " << (shared_encoder ? "true" : "false") << "\n";
    o << "upsample = \"" << upsample << "\"\n";
    o << "min_patch_window = " << min_patch_window << "\n";
    o << "\n[radiometry]\n";
    o << "gamma = " << fmt_double(gamma) << "\n";
    o << "mu = " << fmt_double(mu) << "\n";
    o << "blur_sigma = " << fmt_double(blur_sigma) << "\n";
    o << "normalize_percentile = " << fmt_double(normalize_percentile) << "\n";
    o << "\n[data]\n";
    o << "resize_height = " << resize_height << "\n";
    o << "resize_width = " << resize_width << "\n";
    o << "patch = " << patch << "\n";
    o << "stride = " << stride << "\n";
    o << "\n[features]\n";
    o << "preset = \"" << features_preset << "\"\n";
    o << "weights = \"" << features_weights << "\"\n";
    o << "\n[eval]\n";
    o << "psnr_cap = " << fmt_double(psnr_cap) << "\n";
    return o.str();
}

std::string TrainConfig::config_hash() const { return sha256_hex(to_toml()); }

TrainConfig TrainConfig::from_toml(const std::string& text) {
    TrainConfig cfg;
    std::map<std::string, std::function<void(const std::string&)>> setters;

    auto set_int = [](int& dst) {
        return [&dst](const std::string& v) { dst = std::stoi(v); };
    };
    auto set_ll = [](long long& dst) {
        return [&dst](const std::string& v) { dst = std::stoll(v); };
    };
    auto set_dbl = [](double& dst) {
        return [&dst](const std::string& v) { dst = std::stod(v); };
    };
    auto set_bool = [](bool& dst) {
        return [&dst](const std::string& v) {
            if (v == "true") dst = true;
            else if (v == "false") dst = false;
            else throw ConfigError("config: expected true/false, got " + v);
        };
    };
    auto set_str = [](std::string& dst) {
        return [&dst](const std::string& v) {
            if (v.size() < 2 || v.front() != '"' || v.back() != '"')
                throw ConfigError("config: expected quoted string, got " + v);
            dst = v.substr(1, v.size() - 2);
        };
    };

    setters["train.epochs"] = set_int(cfg.epochs);
    setters["train.init_epochs"] = set_int(cfg.init_epochs);
    setters["train.lr_g"] = set_dbl(cfg.lr_g);
    setters["train.lr_d"] = set_dbl(cfg.lr_d);
    setters["train.batch"] = set_int(cfg.batch);
    setters["train.seed"] = set_ll(cfg.seed);
    setters["train.w0"] = set_dbl(cfg.w0);
    setters["train.content"] = set_str(cfg.content);
    setters["train.min_patch"] = set_bool(cfg.min_patch);
    setters["train.blur_set"] = set_bool(cfg.blur_set);
    setters["train.reference_index"] = set_int(cfg.reference_index);
    setters["train.checkpoint_every"] = set_int(cfg.checkpoint_every);
    setters["model.res_blocks"] = set_int(cfg.res_blocks);
    setters["model.shared_encoder"] = set_bool(cfg.shared_encoder);
    setters["model.upsample"] = set_str(cfg.upsample);
    setters["model.min_patch_window"] = set_int(cfg.min_patch_window);
    setters["radiometry.gamma"] = set_dbl(cfg.gamma);
    setters["radiometry.mu"] = set_dbl(cfg.mu);
    setters["radiometry.blur_sigma"] = set_dbl(cfg.blur_sigma);
    setters["radiometry.normalize_percentile"] = set_dbl(cfg.normalize_percentile);
    setters["data.resize_height"] = set_int(cfg.resize_height);
    setters["data.resize_width"] = set_int(cfg.resize_width);
    setters["data.patch"] = set_int(cfg.patch);
    setters["data.stride"] = set_int(cfg.stride);
    setters["features.preset"] = set_str(cfg.features_preset);
    setters["features.weights"] = set_str(cfg.features_weights);
    setters["eval.psnr_cap"] = set_dbl(cfg.psnr_cap);

    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = section + "." + trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key " + key);
        try {
            it->second(value);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("config line " + std::to_string(lineno) + ": bad value for " + key);
        }
    }
    return cfg;
}

TrainConfig TrainConfig::from_toml_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config file not found: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_toml(ss.str());
}

}  // namespace uphdr
