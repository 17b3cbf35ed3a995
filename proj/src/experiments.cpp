#include "qbatt/experiments.hpp"

#include "qbatt/charging.hpp"
#include "qbatt/csv.hpp"
#include "qbatt/dicke.hpp"
#include "qbatt/ergotropy.hpp"
#include "qbatt/extraction.hpp"
#include "qbatt/qops.hpp"
#include "qbatt/spinchain.hpp"
#include "qbatt/stats.hpp"
#include "qbatt/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

namespace qbatt::cli {

namespace {

using Json = nlohmann::ordered_json;

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const int workers = std::min<std::size_t>(threads, count);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

DensityState diagonal_state(const std::vector<double>& populations) {
    double sum = 0.0;
    for (double p : populations) sum += p;
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(populations.size()),
                            static_cast<Eigen::Index>(populations.size()));
    for (std::size_t k = 0; k < populations.size(); ++k) {
        m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = populations[k] / sum;
    }
    return DensityState(m);
}

Json provenance(const ExperimentConfig& cfg) {
    Json p;
    p["library"] = "qbatt";
    p["version"] = kVersion;
    p["seed"] = cfg.seed;
    Json echo;
    for (const auto& [key, value] : config_echo(cfg)) echo[key] = value;
    p["config"] = echo;
    return p;
}

RunArtifacts artifact_paths(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.output_path);
    const std::filesystem::path out(cfg.output_path);
    return RunArtifacts{(out / (to_string(cfg.experiment) + ".csv")).string(),
                        (out / "summary.json").string()};
}

void write_summary(const std::string& path, const Json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << doc.dump(2) << '\n';
}

RunArtifacts run_ergotropy(const ExperimentConfig& cfg, const ErgotropyParams& p) {
    const RunArtifacts artifacts = artifact_paths(cfg);
    const ergo::EnergySpectrum spec(p.levels);
    const HermitianOperator h0 = ergo::internal_hamiltonian(spec);
    const DensityState rho = diagonal_state(p.populations);

    const ergo::PassiveDecomposition pd = ergo::passive_decomposition(rho, h0);
    const double bound = ergo::ergotropy_thermal_bound(rho, h0);
    const double beta = ergo::entropy_matched_beta(rho, h0);
    const double s = ergo::entropy(rho);

    CsvWriter csv(artifacts.csv_path, {"level", "energy", "population", "passive_population"});
    for (Eigen::Index j = 0; j < spec.d(); ++j) {
        csv.row({CsvWriter::cell(static_cast<int>(j)), CsvWriter::cell(spec.level(j)),
                 CsvWriter::cell(rho.matrix()(j, j).real()),
                 CsvWriter::cell(pd.passive_state.matrix()(j, j).real())});
    }

    Json summary;
    summary["experiment"] = to_string(cfg.experiment);
    summary["provenance"] = provenance(cfg);
    Json r;
    r["energy_initial"] = (rho.matrix() * h0.matrix()).trace().real();
    r["energy_passive"] = (pd.passive_state.matrix() * h0.matrix()).trace().real();
    r["ergotropy"] = pd.ergotropy;
    r["thermal_bound"] = bound;
    r["beta_matched"] = std::isinf(beta) ? Json("infinity") : Json(beta);
    r["entropy"] = s;
    r["is_passive"] = ergo::is_passive(rho, h0, 1e-9);
    summary["results"] = r;
    write_summary(artifacts.summary_path, summary);
    return artifacts;
}

RunArtifacts run_activation(const ExperimentConfig& cfg, const ActivationParams& p) {
    const RunArtifacts artifacts = artifact_paths(cfg);
    const ergo::EnergySpectrum spec(p.levels);
    const DensityState rho = diagonal_state(p.populations);

    const auto curve = ergo::activation_curve(rho, spec, p.n_max);
    const double asymptote = ergo::activation_asymptote(rho, spec);

    CsvWriter csv(artifacts.csv_path, {"n", "w_max_n", "delta_w", "asymptote"});
    std::vector<double> deltas;
    for (const auto& [n, dw] : curve) {
        const double wn = ergo::per_copy_ergotropy(rho, spec, n);
        csv.row({CsvWriter::cell(n), CsvWriter::cell(wn), CsvWriter::cell(dw),
                 CsvWriter::cell(asymptote)});
        deltas.push_back(dw);
    }

    bool monotone = true;
    for (std::size_t i = 0; i + 1 < deltas.size(); ++i) {
        monotone = monotone && deltas[i + 1] >= deltas[i] - 1e-12;
    }

    Json summary;
    summary["experiment"] = to_string(cfg.experiment);
    summary["provenance"] = provenance(cfg);
    Json r;
    r["asymptote"] = asymptote;
    r["delta_w"] = deltas;
    r["monotone_non_decreasing"] = monotone;
    r["fraction_of_asymptote_at_n_max"] = asymptote > 0.0 ? deltas.back() / asymptote : 0.0;
    summary["results"] = r;
    write_summary(artifacts.summary_path, summary);
    return artifacts;
}

RunArtifacts run_extract(const ExperimentConfig& cfg, const ExtractParams& p) {
    const RunArtifacts artifacts = artifact_paths(cfg);
    const ergo::EnergySpectrum spec(p.levels);
    const DensityState cell = diagonal_state(p.populations);

    DensityState rho = cell;
    for (int k = 1; k < p.copies; ++k) rho = qops::tensor(rho, cell);

    std::vector<double> populations(static_cast<std::size_t>(rho.dim()));
    for (Eigen::Index j = 0; j < rho.dim(); ++j) {
        populations[static_cast<std::size_t>(j)] = rho.matrix()(j, j).real();
    }

    const extract::ExtractionPlan plan =
        extract::make_extraction_plan(populations, spec, p.copies, p.step_duration);
    const HermitianOperator h0n = ergo::ensemble_hamiltonian(spec, p.copies);
    const SimulationTrace trace = extract::execute_plan(rho, plan, p.substeps, h0n);

    const bool ppt_conclusive = rho.dim() <= 6;
    bool all_structural = true;
    bool all_ppt = true;

    CsvWriter csv(artifacts.csv_path,
                  {"sample", "t", "energy", "power", "purity", "structural_ok", "ppt_min_eigenvalue"});
    for (std::size_t i = 0; i < trace.size(); ++i) {
        bool ok = true;
        double min_eig = 0.0;
        if (!plan.steps.empty()) {
            const std::size_t step = extract::active_step_for_sample(plan, p.substeps, i);
            try {
                const extract::SeparabilityCertificate cert =
                    extract::separability_certificate(trace.states[i], plan.steps[step]);
                min_eig = std::numeric_limits<double>::infinity();
                for (const extract::PptReport& ppt : cert.ppt) {
                    min_eig = std::min(min_eig, ppt.min_eigenvalue);
                    all_ppt = all_ppt && ppt.positive;
                }
            } catch (const std::runtime_error&) {
                ok = false;
                all_structural = false;
            }
        }
        csv.row({CsvWriter::cell(static_cast<int>(i)), CsvWriter::cell(trace.times[i]),
                 CsvWriter::cell(trace.energies[i]), CsvWriter::cell(trace.powers[i]),
                 CsvWriter::cell(trace.purities[i]), ok ? "1" : "0", CsvWriter::cell(min_eig)});
    }

    const double work = -trace.energies.back();  // energy channel is deposited-signed
    const ergo::PassiveDecomposition oracle = ergo::multi_copy_passive(cell, spec, p.copies);

    Json summary;
    summary["experiment"] = to_string(cfg.experiment);
    summary["provenance"] = provenance(cfg);
    Json r;
    r["plan_steps"] = plan.steps.size();
    r["work_extracted"] = work;
    r["ensemble_ergotropy_oracle"] = oracle.ergotropy;
    r["all_structural"] = all_structural;
    r["ppt_conclusive"] = ppt_conclusive;
    r["all_ppt"] = all_ppt;
    summary["results"] = r;
    write_summary(artifacts.summary_path, summary);
    return artifacts;
}

RunArtifacts run_charge(const ExperimentConfig& cfg, const ChargeParams& p, int threads) {
    const RunArtifacts artifacts = artifact_paths(cfg);
    const ergo::EnergySpectrum spec(p.levels);

    struct Row {
        std::string driving;
        int n;
        double epsilon;
        charge::AdvantageReport adv;
        double fidelity;
        double margin_min;
        bool inside_all;
    };
    std::vector<Row> rows;

    if (p.mode == "ground_to_top") {
        rows.resize(p.n_list.size() * 2);
        parallel_for(p.n_list.size(), threads, [&](std::size_t i) {
            const int n = p.n_list[i];
            const charge::DrivingDemoReport coll =
                charge::ground_to_top_demo(spec, n, p.e_max, true, p.samples);
            const charge::DrivingDemoReport par =
                charge::ground_to_top_demo(spec, n, p.e_max, false, p.samples);
            rows[2 * i] = Row{"collective", n, 0.0, coll.advantage, coll.final_fidelity,
                              coll.ball_margin_min, coll.ball_inside_all};
            rows[2 * i + 1] = Row{"parallel", n, 0.0, par.advantage, par.final_fidelity,
                                  par.ball_margin_min, par.ball_inside_all};
        });
    } else {
        rows.resize(p.n_list.size());
        parallel_for(p.n_list.size(), threads, [&](std::size_t i) {
            const int n = p.n_list[i];
            const double eps =
                p.epsilon > 0.0 ? p.epsilon : 0.9 * charge::ball_epsilon_threshold(n);
            const charge::MixedAdvantageReport rep =
                charge::mixed_advantage_demo(n, eps, p.e_max, p.samples);
            double margin_min = std::numeric_limits<double>::infinity();
            for (double m : rep.margins) margin_min = std::min(margin_min, m);
            rows[i] = Row{"mirror_swap", n, eps, rep.advantage, rep.final_fidelity,
                          margin_min, rep.all_inside};
        });
    }

    CsvWriter csv(artifacts.csv_path,
                  {"mode", "driving", "n", "epsilon", "work", "time_parallel", "time_actual",
                   "gamma", "fidelity", "ball_margin_min", "ball_inside_all"});
    Json gammas = Json::array();
    for (const Row& row : rows) {
        csv.row({p.mode, row.driving, CsvWriter::cell(row.n), CsvWriter::cell(row.epsilon),
                 CsvWriter::cell(row.adv.work), CsvWriter::cell(row.adv.time_parallel),
                 CsvWriter::cell(row.adv.time_actual), CsvWriter::cell(row.adv.gamma),
                 CsvWriter::cell(row.fidelity), CsvWriter::cell(row.margin_min),
                 row.inside_all ? "1" : "0"});
        Json g;
        g["driving"] = row.driving;
        g["n"] = row.n;
        g["gamma"] = row.adv.gamma;
        gammas.push_back(g);
    }

    Json summary;
    summary["experiment"] = to_string(cfg.experiment);
    summary["provenance"] = provenance(cfg);
    Json r;
    r["gammas"] = gammas;
    summary["results"] = r;
    write_summary(artifacts.summary_path, summary);
    return artifacts;
}

RunArtifacts run_dicke(const ExperimentConfig& cfg, const DickeParams& p, int threads) {
    const RunArtifacts artifacts = artifact_paths(cfg);
    dicke::DickeConfig base;
    base.omega_c = p.omega_c;
    base.omega_a = p.omega_a > 0.0 ? p.omega_a : p.omega_c;
    base.lambda_bar = p.lambda_bar;
    base.samples = p.samples;

    const dicke::MaxPowerResult unit = dicke::dicke_max_power(1, base);
    std::vector<dicke::MaxPowerResult> results(p.n_list.size());
    parallel_for(p.n_list.size(), threads, [&](std::size_t i) {
        results[i] = p.n_list[i] == 1 ? unit : dicke::dicke_max_power(p.n_list[i], base);
    });

    CsvWriter csv(artifacts.csv_path, {"n", "ratio", "max_power", "tau_opt", "photon_cutoff"});
    std::vector<double> ns, ratios;
    for (std::size_t i = 0; i < p.n_list.size(); ++i) {
        const int n = p.n_list[i];
        const double ratio = n == 1 ? 1.0 : results[i].value / (n * unit.value);
        csv.row({CsvWriter::cell(n), CsvWriter::cell(ratio), CsvWriter::cell(results[i].value),
                 CsvWriter::cell(results[i].tau), CsvWriter::cell(results[i].photon_cutoff)});
        ns.push_back(n);
        ratios.push_back(ratio);
    }

    Json summary;
    summary["experiment"] = to_string(cfg.experiment);
    summary["provenance"] = provenance(cfg);
    Json r;
    r["ratios"] = ratios;
    bool non_decreasing = true;
    for (std::size_t i = 0; i + 1 < ratios.size(); ++i) {
        non_decreasing = non_decreasing && ratios[i + 1] >= ratios[i] - 1e-9;
    }
    r["non_decreasing"] = non_decreasing;
    if (ns.size() >= 2) {
        const stats::LineFit fit = stats::loglog_fit(ns, ratios);
        r["fitted_exponent"] = fit.slope;
        r["fit_r_squared"] = fit.r_squared;
    }
    summary["results"] = r;
    write_summary(artifacts.summary_path, summary);
    return artifacts;
}

RunArtifacts run_spinchain(const ExperimentConfig& cfg, const SpinchainParams& p, int threads) {
    const RunArtifacts artifacts = artifact_paths(cfg);
    chain::ChainConfig base;
    base.field_b = p.field_b;
    base.omega = p.omega;
    base.alpha = p.alpha;
    base.samples = p.samples;
    base.profile.g = p.g;  // explicit strength; 0 keeps the regime default

    CsvWriter csv(artifacts.csv_path, {"profile", "n", "gamma", "fit_class"});
    Json summary;
    summary["experiment"] = to_string(cfg.experiment);
    summary["provenance"] = provenance(cfg);
    Json r;

    if (p.regime == "weak") {
        std::vector<chain::ProfileKind> kinds;
        for (const std::string& name : p.profiles) kinds.push_back(chain::profile_from_string(name));
        const chain::ScalingStudy study = chain::scaling_study(kinds, p.n_values, base);

        auto class_of = [&](chain::ProfileKind kind) {
            for (const chain::ProfileSummary& s : study.profiles) {
                if (s.profile == kind) return s.fit_class;
            }
            return std::string("unknown");
        };
        for (const chain::ScalingRow& row : study.rows) {
            csv.row({chain::to_string(row.profile), CsvWriter::cell(row.n),
                     CsvWriter::cell(row.gamma), class_of(row.profile)});
        }
        Json profiles = Json::array();
        for (const chain::ProfileSummary& s : study.profiles) {
            Json ps;
            ps["profile"] = chain::to_string(s.profile);
            ps["g"] = s.g;
            ps["fit_class"] = s.fit_class;
            ps["spread_over_mean"] = s.spread_over_mean;
            ps["linear_slope"] = s.linear.slope;
            ps["linear_r_squared"] = s.linear.r_squared;
            ps["log_slope"] = s.logarithmic.slope;
            ps["log_r_squared"] = s.logarithmic.r_squared;
            ps["fitted_gamma_const"] = s.fitted_gamma_const;
            ps["bound_respected"] = s.bound_respected;
            profiles.push_back(ps);
        }
        r["profiles"] = profiles;
    } else {
        // Strong coupling: explicit g (default 10 omega), per-point advantage.
        const double g = p.g > 0.0 ? p.g : 10.0 * p.omega;
        struct Point {
            std::string profile;
            int n;
            double gamma;
        };
        std::vector<Point> points;
        for (const std::string& name : p.profiles) {
            for (int n : p.n_values) points.push_back(Point{name, n, 0.0});
        }
        parallel_for(points.size(), threads, [&](std::size_t i) {
            chain::ChainConfig cfg_pt = base;
            cfg_pt.n = points[i].n;
            cfg_pt.profile =
                chain::CouplingProfile{chain::profile_from_string(points[i].profile), g};
            points[i].gamma = chain::chain_advantage(cfg_pt).gamma;
        });

        Json profiles = Json::array();
        std::size_t idx = 0;
        for (const std::string& name : p.profiles) {
            bool decreasing = true;
            bool all_below_one = true;
            std::vector<double> gammas;
            for (std::size_t k = 0; k < p.n_values.size(); ++k) {
                gammas.push_back(points[idx + k].gamma);
                all_below_one = all_below_one && points[idx + k].gamma < 1.0;
                if (k > 0) decreasing = decreasing && gammas[k] < gammas[k - 1];
            }
            const std::string fit_class = decreasing ? "decreasing" : "non_monotonic";
            for (std::size_t k = 0; k < p.n_values.size(); ++k) {
                csv.row({name, CsvWriter::cell(p.n_values[k]), CsvWriter::cell(gammas[k]), fit_class});
            }
            Json ps;
            ps["profile"] = name;
            ps["g"] = g;
            ps["gammas"] = gammas;
            ps["all_below_one"] = all_below_one;
            ps["decreasing"] = decreasing;
            profiles.push_back(ps);
            idx += p.n_values.size();
        }
        r["profiles"] = profiles;
    }
    summary["results"] = r;
    write_summary(artifacts.summary_path, summary);
    return artifacts;
}

} // namespace

RunArtifacts run_experiment(const ExperimentConfig& cfg, int threads) {
    switch (cfg.experiment) {
        case ExperimentKind::ergotropy:
            return run_ergotropy(cfg, std::get<ErgotropyParams>(cfg.params));
        case ExperimentKind::activation:
            return run_activation(cfg, std::get<ActivationParams>(cfg.params));
        case ExperimentKind::extract:
            return run_extract(cfg, std::get<ExtractParams>(cfg.params));
        case ExperimentKind::charge:
            return run_charge(cfg, std::get<ChargeParams>(cfg.params), threads);
        case ExperimentKind::dicke:
            return run_dicke(cfg, std::get<DickeParams>(cfg.params), threads);
        case ExperimentKind::spinchain:
            return run_spinchain(cfg, std::get<SpinchainParams>(cfg.params), threads);
    }
    throw std::logic_error("run_experiment: unhandled experiment kind");
}

} // namespace qbatt::cli
