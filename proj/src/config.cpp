#include "qbatt/config.hpp"

#include "qbatt/csv.hpp"
#include "qbatt/spinchain.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace qbatt::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

struct RawEntry {
    std::string value;
    int line;
    bool used = false;
};

struct RawDocument {
    // section -> key -> entry; duplicate keys are reported as violations
    std::map<std::string, std::map<std::string, RawEntry>> sections;
};

RawDocument lex(const std::string& text, std::vector<ConfigError>& errors) {
    RawDocument doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                errors.push_back({line_no, "malformed section header: " + t});
                continue;
            }
            section = trim(t.substr(1, t.size() - 2));
            doc.sections[section];
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            errors.push_back({line_no, "expected key = value: " + t});
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            errors.push_back({line_no, "empty key"});
            continue;
        }
        if (section.empty()) {
            errors.push_back({line_no, "key outside any [section]: " + key});
            continue;
        }
        auto [it, inserted] = doc.sections[section].emplace(key, RawEntry{value, line_no});
        if (!inserted) {
            errors.push_back({line_no, "duplicate key '" + key + "' in [" + section + "]"});
        }
    }
    return doc;
}

class SectionReader {
public:
    SectionReader(RawDocument& doc, std::string section, std::vector<ConfigError>& errors)
        : doc_(doc), section_(std::move(section)), errors_(&errors) {}

    bool has(const std::string& key) const {
        auto sec = doc_.sections.find(section_);
        return sec != doc_.sections.end() && sec->second.count(key) > 0;
    }

    std::optional<std::string> raw(const std::string& key) {
        auto sec = doc_.sections.find(section_);
        if (sec == doc_.sections.end()) return std::nullopt;
        auto it = sec->second.find(key);
        if (it == sec->second.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    int line_of(const std::string& key) const {
        auto sec = doc_.sections.find(section_);
        if (sec == doc_.sections.end()) return 0;
        auto it = sec->second.find(key);
        return it == sec->second.end() ? 0 : it->second.line;
    }

    void fail(const std::string& key, const std::string& message) {
        errors_->push_back({line_of(key), key + ": " + message});
    }

    double number(const std::string& key, double fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const double d = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return d;
        } catch (const std::exception&) {
            fail(key, "not a number: " + *v);
            return fallback;
        }
    }

    int integer(const std::string& key, int fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const long d = std::stol(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return static_cast<int>(d);
        } catch (const std::exception&) {
            fail(key, "not an integer: " + *v);
            return fallback;
        }
    }

    std::string text(const std::string& key, const std::string& fallback) {
        auto v = raw(key);
        return v ? *v : fallback;
    }

    std::vector<double> number_list(const std::string& key, std::vector<double> fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        std::vector<double> out;
        std::string item;
        std::istringstream ss(*v);
        while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            if (t.empty()) continue;
            try {
                std::size_t pos = 0;
                out.push_back(std::stod(t, &pos));
                if (pos != t.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                fail(key, "not a number in list: " + t);
                return fallback;
            }
        }
        if (out.empty()) fail(key, "empty list");
        return out;
    }

    // Accepts "1, 2, 4" and range shorthand "3..8".
    std::vector<int> integer_list(const std::string& key, std::vector<int> fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        const std::size_t dots = v->find("..");
        if (dots != std::string::npos) {
            try {
                const int lo = std::stoi(trim(v->substr(0, dots)));
                const int hi = std::stoi(trim(v->substr(dots + 2)));
                if (hi < lo) throw std::invalid_argument("");
                std::vector<int> out;
                for (int k = lo; k <= hi; ++k) out.push_back(k);
                return out;
            } catch (const std::exception&) {
                fail(key, "malformed range: " + *v);
                return fallback;
            }
        }
        std::vector<int> out;
        std::string item;
        std::istringstream ss(*v);
        while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            if (t.empty()) continue;
            try {
                std::size_t pos = 0;
                out.push_back(std::stoi(t, &pos));
                if (pos != t.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                fail(key, "not an integer in list: " + t);
                return fallback;
            }
        }
        if (out.empty()) fail(key, "empty list");
        return out;
    }

    std::vector<std::string> text_list(const std::string& key, std::vector<std::string> fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        std::vector<std::string> out;
        std::string item;
        std::istringstream ss(*v);
        while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            if (!t.empty()) out.push_back(t);
        }
        if (out.empty()) fail(key, "empty list");
        return out;
    }

private:
    RawDocument& doc_;
    std::string section_;
    std::vector<ConfigError>* errors_;
};

void report_unknown(const RawDocument& doc, const std::vector<std::string>& known_sections,
                    std::vector<ConfigError>& errors) {
    for (const auto& [section, entries] : doc.sections) {
        const bool known =
            std::find(known_sections.begin(), known_sections.end(), section) != known_sections.end();
        if (!known) {
            errors.push_back({0, "unknown section [" + section + "]"});
            continue;
        }
        for (const auto& [key, entry] : entries) {
            if (!entry.used) {
                errors.push_back({entry.line, "unknown key '" + key + "' in [" + section + "]"});
            }
        }
    }
}

void check_levels(SectionReader& sec, const std::vector<double>& levels) {
    if (levels.size() < 2) {
        sec.fail("levels", "needs at least two levels");
        return;
    }
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        if (!(levels[k] < levels[k + 1])) {
            sec.fail("levels", "levels must be strictly increasing");
            return;
        }
    }
}

void check_populations(SectionReader& sec, const std::vector<double>& populations,
                       std::size_t expected) {
    if (populations.size() != expected) {
        sec.fail("populations", "must match the number of levels");
        return;
    }
    double sum = 0.0;
    for (double p : populations) {
        if (p < 0.0) {
            sec.fail("populations", "populations must be non-negative");
            return;
        }
        sum += p;
    }
    if (sum <= 0.0) sec.fail("populations", "populations must have positive sum");
}

} // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::ergotropy: return "ergotropy";
        case ExperimentKind::activation: return "activation";
        case ExperimentKind::extract: return "extract";
        case ExperimentKind::charge: return "charge";
        case ExperimentKind::dicke: return "dicke";
        case ExperimentKind::spinchain: return "spinchain";
    }
    return "unknown";
}

ParseResult parse_config(const std::string& text, ExperimentKind kind) {
    ParseResult result;
    RawDocument doc = lex(text, result.errors);

    ExperimentConfig cfg;
    cfg.experiment = kind;

    SectionReader run(doc, "run", result.errors);
    cfg.seed = run.integer("seed", 0);

    const std::string section = to_string(kind);
    SectionReader sec(doc, section, result.errors);

    switch (kind) {
        case ExperimentKind::ergotropy: {
            ErgotropyParams p;
            p.levels = sec.number_list("levels", {});
            p.populations = sec.number_list("populations", {});
            check_levels(sec, p.levels);
            check_populations(sec, p.populations, p.levels.size());
            cfg.params = std::move(p);
            break;
        }
        case ExperimentKind::activation: {
            ActivationParams p;
            p.levels = sec.number_list("levels", {});
            p.populations = sec.number_list("populations", {});
            p.n_max = sec.integer("n_max", p.n_max);
            check_levels(sec, p.levels);
            check_populations(sec, p.populations, p.levels.size());
            if (p.n_max < 1) sec.fail("n_max", "must be >= 1");
            cfg.params = std::move(p);
            break;
        }
        case ExperimentKind::extract: {
            ExtractParams p;
            p.levels = sec.number_list("levels", {});
            p.populations = sec.number_list("populations", {});
            p.copies = sec.integer("copies", p.copies);
            p.substeps = sec.integer("substeps", p.substeps);
            p.step_duration = sec.number("step_duration", p.step_duration);
            check_levels(sec, p.levels);
            check_populations(sec, p.populations, p.levels.size());
            if (p.copies < 1) sec.fail("copies", "must be >= 1");
            if (p.substeps < 1) sec.fail("substeps", "must be >= 1");
            if (p.step_duration <= 0.0) sec.fail("step_duration", "must be positive");
            cfg.params = std::move(p);
            break;
        }
        case ExperimentKind::charge: {
            ChargeParams p;
            p.levels = sec.number_list("levels", p.levels);
            p.n_list = sec.integer_list("n_list", p.n_list);
            p.e_max = sec.number("E_max", p.e_max);
            p.mode = sec.text("mode", p.mode);
            p.epsilon = sec.number("epsilon", p.epsilon);
            p.samples = sec.integer("samples", p.samples);
            check_levels(sec, p.levels);
            if (p.e_max <= 0.0) sec.fail("E_max", "must be positive");
            if (p.mode != "ground_to_top" && p.mode != "mixed_ball") {
                sec.fail("mode", "must be ground_to_top or mixed_ball");
            }
            if (p.mode == "mixed_ball" && p.levels.size() != 2) {
                sec.fail("levels", "mixed_ball mode runs two-level cells");
            }
            if (p.epsilon < 0.0) sec.fail("epsilon", "must be >= 0");
            for (int n : p.n_list) {
                if (n < 1) sec.fail("n_list", "cell counts must be >= 1");
            }
            if (p.samples < 2) sec.fail("samples", "must be >= 2");
            cfg.params = std::move(p);
            break;
        }
        case ExperimentKind::dicke: {
            DickeParams p;
            p.n_list = sec.integer_list("n_list", p.n_list);
            p.omega_c = sec.number("omega_c", p.omega_c);
            p.omega_a = sec.number("omega_a", p.omega_a);
            p.lambda_bar = sec.number("lambda_bar", p.lambda_bar);
            p.samples = sec.integer("samples", p.samples);
            if (p.omega_c <= 0.0) sec.fail("omega_c", "must be positive");
            if (p.omega_a < 0.0) sec.fail("omega_a", "must be >= 0 (0 selects resonance)");
            if (p.lambda_bar < 0.0) sec.fail("lambda_bar", "must be >= 0");
            for (int n : p.n_list) {
                if (n < 1) sec.fail("n_list", "cell counts must be >= 1");
            }
            if (p.samples < 2) sec.fail("samples", "must be >= 2");
            cfg.params = std::move(p);
            break;
        }
        case ExperimentKind::spinchain: {
            SpinchainParams p;
            p.profiles = sec.text_list("profiles", p.profiles);
            p.n_values = sec.integer_list("n_values", p.n_values);
            p.field_b = sec.number("B", p.field_b);
            p.omega = sec.number("omega", p.omega);
            p.alpha = sec.number("alpha", p.alpha);
            p.regime = sec.text("regime", p.regime);
            p.g = sec.number("g", p.g);
            p.samples = sec.integer("samples", p.samples);
            for (const std::string& name : p.profiles) {
                try {
                    chain::profile_from_string(name);
                } catch (const std::exception& e) {
                    sec.fail("profiles", e.what());
                }
            }
            for (int n : p.n_values) {
                if (n < 2) sec.fail("n_values", "chains need n >= 2");
            }
            if (p.field_b <= 0.0) sec.fail("B", "must be positive");
            if (p.omega <= 0.0) sec.fail("omega", "must be positive");
            if (p.alpha < -1.0 || p.alpha > 1.0) sec.fail("alpha", "must lie in [-1, 1]");
            if (p.regime != "weak" && p.regime != "strong") {
                sec.fail("regime", "must be weak or strong");
            }
            if (p.g < 0.0) sec.fail("g", "must be >= 0");
            if (p.samples < 2) sec.fail("samples", "must be >= 2");
            cfg.params = std::move(p);
            break;
        }
    }

    report_unknown(doc, {"run", section}, result.errors);

    if (result.errors.empty()) {
        result.config = std::move(cfg);
    }
    return result;
}

std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& cfg) {
    using Echo = std::vector<std::pair<std::string, std::string>>;
    Echo echo;
    echo.emplace_back("experiment", to_string(cfg.experiment));
    echo.emplace_back("seed", std::to_string(cfg.seed));

    auto num = [](double v) { return format_g12(v); };
    auto num_list = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
        return s;
    };
    auto int_list = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
        return s;
    };

    if (const auto* p = std::get_if<ErgotropyParams>(&cfg.params)) {
        echo.emplace_back("levels", num_list(p->levels));
        echo.emplace_back("populations", num_list(p->populations));
    } else if (const auto* p = std::get_if<ActivationParams>(&cfg.params)) {
        echo.emplace_back("levels", num_list(p->levels));
        echo.emplace_back("populations", num_list(p->populations));
        echo.emplace_back("n_max", std::to_string(p->n_max));
    } else if (const auto* p = std::get_if<ExtractParams>(&cfg.params)) {
        echo.emplace_back("levels", num_list(p->levels));
        echo.emplace_back("populations", num_list(p->populations));
        echo.emplace_back("copies", std::to_string(p->copies));
        echo.emplace_back("substeps", std::to_string(p->substeps));
        echo.emplace_back("step_duration", num(p->step_duration));
    } else if (const auto* p = std::get_if<ChargeParams>(&cfg.params)) {
        echo.emplace_back("levels", num_list(p->levels));
        echo.emplace_back("n_list", int_list(p->n_list));
        echo.emplace_back("E_max", num(p->e_max));
        echo.emplace_back("mode", p->mode);
        echo.emplace_back("epsilon", num(p->epsilon));
        echo.emplace_back("samples", std::to_string(p->samples));
    } else if (const auto* p = std::get_if<DickeParams>(&cfg.params)) {
        echo.emplace_back("n_list", int_list(p->n_list));
        echo.emplace_back("omega_c", num(p->omega_c));
        echo.emplace_back("omega_a", num(p->omega_a > 0.0 ? p->omega_a : p->omega_c));
        echo.emplace_back("lambda_bar", num(p->lambda_bar));
        echo.emplace_back("samples", std::to_string(p->samples));
    } else if (const auto* p = std::get_if<SpinchainParams>(&cfg.params)) {
        std::string profiles;
        for (std::size_t i = 0; i < p->profiles.size(); ++i) {
            profiles += (i ? ", " : "") + p->profiles[i];
        }
        echo.emplace_back("profiles", profiles);
        echo.emplace_back("n_values", int_list(p->n_values));
        echo.emplace_back("B", num(p->field_b));
        echo.emplace_back("omega", num(p->omega));
        echo.emplace_back("alpha", num(p->alpha));
        echo.emplace_back("regime", p->regime);
        echo.emplace_back("g", num(p->g));
        echo.emplace_back("samples", std::to_string(p->samples));
    }
    return echo;
}

} // namespace qbatt::cli
