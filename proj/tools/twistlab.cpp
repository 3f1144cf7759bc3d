#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twistlab/curve.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/harness.hpp"
#include "twistlab/predict.hpp"
#include "twistlab/rmt.hpp"
#include "twistlab/stats.hpp"
#include "twistlab/theta.hpp"

namespace tl = twistlab;
using nlohmann::ordered_json;

namespace {

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, Cell>> summary;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
    void note(std::string key, Cell value) { summary.emplace_back(std::move(key), std::move(value)); }
};

Cell opt(const std::optional<double>& v) { return v ? Cell(*v) : Cell(std::monostate{}); }

std::string csv_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return "";
            else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, double>) return format_double(v);
            else {
                if (v.find_first_of(",\"\n") == std::string::npos) return v;
                std::string q = "\"";
                for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                return q + "\"";
            }
        },
        c);
}

ordered_json json_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
            else if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) return nullptr;
                return ordered_json::parse(format_double(v));
            } else return v;
        },
        c);
}

void write_csv(std::ostream& os, const std::vector<std::string>& header, const std::vector<std::vector<Cell>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
        os << '\n';
    }
}

struct Globals {
    std::string curves = "data/curves.jsonl";
    std::string curve = "11A_i";
    std::int64_t xmax = 1'000'000;
    std::int64_t pmax = 10'000;
    int nodes = 64;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    std::string cache;
};

void emit(const Globals& g, const std::string& name, const Table& t) {
    std::ostringstream body, summary;
    if (g.format == "json") {
        ordered_json doc;
        doc["rows"] = ordered_json::array();
        for (const auto& r : t.rows) {
            ordered_json o;
            for (std::size_t i = 0; i < r.size(); ++i) o[t.header[i]] = json_cell(r[i]);
            doc["rows"].push_back(std::move(o));
        }
        ordered_json s = ordered_json::object();
        for (const auto& [k, v] : t.summary) s[k] = json_cell(v);
        doc["summary"] = s;
        body << doc.dump(2) << '\n';
    } else {
        write_csv(body, t.header, t.rows);
        if (!t.summary.empty()) {
            std::vector<std::vector<Cell>> rows;
            for (const auto& [k, v] : t.summary) rows.push_back({k, v});
            write_csv(summary, {"key", "value"}, rows);
        }
    }
    if (g.out.empty()) {
        std::cout << body.str();
        std::cerr << summary.str();
        return;
    }
    std::filesystem::create_directories(g.out);
    const std::string ext = g.format == "json" ? ".json" : ".csv";
    const auto write = [](const std::filesystem::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw tl::DataError("cannot write " + p.string());
        f << text;
    };
    write(std::filesystem::path(g.out) / (name + ext), body.str());
    if (!summary.str().empty()) write(std::filesystem::path(g.out) / (name + "-summary.csv"), summary.str());
}

std::vector<tl::CurveRecord> load(const Globals& g) { return tl::ingest_database(std::filesystem::path(g.curves)); }

tl::SweepResult run_sweep(const Globals& g, const tl::CurveRecord& rec) {
    const tl::CoefficientTable table = tl::coefficients_for(rec, g.xmax, g.cache);
    return tl::sweep(rec, table, g.xmax);
}

tl::PredictionConfig prediction_config(const Globals& g) {
    tl::PredictionConfig c;
    c.p_max = g.pmax;
    c.nodes = g.nodes;
    return c;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        const double x = std::stod(item, &pos);
        if (pos != item.size()) throw tl::DomainError("bad list entry '" + item + "'");
        v.push_back(x);
    }
    return v;
}

struct BinOptions {
    double lo, hi;
    int bins;
};

Table binned(const std::vector<double>& values, const BinOptions& b, const std::function<double(double)>& model,
             const std::string& model_name) {
    if (b.bins < 1 || !(b.hi > b.lo)) throw tl::DomainError("invalid bin specification");
    Table t;
    t.header = {"bin_lo", "bin_hi", "count", "density", model_name};
    std::vector<std::int64_t> counts(std::size_t(b.bins), 0);
    const double w = (b.hi - b.lo) / b.bins;
    for (double v : values) {
        if (v < b.lo || v >= b.hi) continue;
        const auto i = std::min<std::size_t>(std::size_t((v - b.lo) / w), counts.size() - 1);
        ++counts[i];
    }
    for (int i = 0; i < b.bins; ++i) {
        const double lo = b.lo + w * i, hi = b.lo + w * (i + 1);
        const double dens = values.empty() ? 0.0 : double(counts[std::size_t(i)]) / (double(values.size()) * w);
        t.add({lo, hi, counts[std::size_t(i)], dens, model(0.5 * (lo + hi))});
    }
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quadratic twist L-values, random matrix models and moment predictions"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--curves", g.curves, "curve database (JSON lines)");
    app.add_option("--curve", g.curve, "curve name");
    app.add_option("--xmax", g.xmax, "family bound X on |d|")->check(CLI::Range(std::int64_t(0), std::int64_t(2'000'000'000)));
    app.add_option("--pmax", g.pmax, "Euler product truncation")->check(CLI::Range(std::int64_t(100), std::int64_t(100'000'000)));
    app.add_option("--nodes", g.nodes, "quadrature nodes per circle")->check(CLI::Range(16, 4096));
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--out", g.out, "output directory (default: stdout)");
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--cache", g.cache, "coefficient cache directory");

    auto* ingest = app.add_subcommand("ingest", "validate the curve database and list its records");

    auto* theta = app.add_subcommand("theta-build", "compute c(n) up to --xmax and write the cache file");

    auto* sweep_cmd = app.add_subcommand("sweep", "L-values over the twist family");

    std::string s_list = "-0.5,0.5,1,2,3,4";
    auto* moments = app.add_subcommand("moments", "empirical moments of L-values");
    moments->add_option("--s", s_list, "comma-separated exponents");

    tl::HistogramSpec hspec;
    double slope_lo = 0.0;
    int slope_bins = 20;
    auto* histogram = app.add_subcommand("histogram", "value distribution histogram");
    histogram->add_option("--lo", hspec.lo);
    histogram->add_option("--hi", hspec.hi);
    histogram->add_option("--bins", hspec.bins);
    histogram->add_flag("--log", hspec.logarithmic, "log-spaced bins");
    histogram->add_option("--t-scale", hspec.t_scale, "model abscissa scaling");
    histogram->add_option("--y-scale", hspec.y_scale, "model ordinate scaling");
    histogram->add_option("--rmt-n", hspec.rmt_N, "matrix size N of the model density (0 disables)");
    histogram->add_option("--slope-lo", slope_lo, "lower end of the two-decade slope window");
    histogram->add_option("--slope-bins", slope_bins);

    BinOptions clt_bins{-4.0, 4.0, 80};
    int clt_N = 20;
    auto* clt = app.add_subcommand("clt", "central limit transform of log L-values");
    clt->add_option("--lo", clt_bins.lo);
    clt->add_option("--hi", clt_bins.hi);
    clt->add_option("--bins", clt_bins.bins);
    clt->add_option("--rmt-n", clt_N);

    BinOptions dist_bins{0.0, 6.0, 60};
    auto* dist = app.add_subcommand("dist", "rescaled value distribution against the lognormal law");
    dist->add_option("--lo", dist_bins.lo);
    dist->add_option("--hi", dist_bins.hi);
    dist->add_option("--bins", dist_bins.bins);

    std::int64_t vstep = 0;
    bool all_d = false;
    auto* vanish = app.add_subcommand("vanish", "vanishing frequency on an X grid");
    vanish->add_option("--step", vstep, "grid step (default X/100)");
    vanish->add_flag("--all", all_d, "use every d rather than prime |d|");

    std::int64_t qmax = 997;
    auto* rq = app.add_subcommand("rq", "vanishing ratios split by chi_d(q)");
    rq->add_option("--qmax", qmax);

    int nmax = 50, kmax_rmt = 4;
    auto* rmt_moments = app.add_subcommand("rmt-moments", "moments of |det(I - A)| over SO(2N)");
    rmt_moments->add_option("--nmax", nmax)->check(CLI::Range(1, 1000));
    rmt_moments->add_option("--kmax", kmax_rmt)->check(CLI::Range(1, 4));

    int dens_N = 20, dens_points = 200;
    double dens_tmin = 1e-6, dens_tmax = 0.0;
    std::size_t mc_draws = 0;
    bool dens_clt = false;
    auto* rmt_density = app.add_subcommand("rmt-density", "density and CDF of |det(I - A)| over SO(2N)");
    rmt_density->add_option("--n", dens_N)->check(CLI::Range(2, 200));
    rmt_density->add_option("--tmin", dens_tmin);
    rmt_density->add_option("--tmax", dens_tmax, "default 4^N");
    rmt_density->add_option("--points", dens_points)->check(CLI::Range(2, 100000));
    rmt_density->add_option("--mc-draws", mc_draws, "Haar draws for a KS check");
    rmt_density->add_flag("--clt", dens_clt, "tabulate on the CLT abscissa instead");

    std::vector<int> ks = {1, 2, 3};
    double r0 = 0.1;
    auto* upsilon = app.add_subcommand("upsilon", "moment polynomial coefficients");
    upsilon->add_option("--k", ks, "moment orders (1..4)")->check(CLI::Range(1, 4));
    upsilon->add_option("--r0", r0);

    int kmax_cmp = 2;
    auto* compare = app.add_subcommand("predict-compare", "empirical moment sums against the moment polynomials");
    compare->add_option("--kmax", kmax_cmp)->check(CLI::Range(1, 4));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        Table t;
        std::string name;
        if (*ingest) {
            name = "ingest";
            t.header = {"name", "sign", "conductor", "modulus", "kappa", "classes", "forms", "denominator"};
            const auto recs = load(g);
            for (const auto& r : recs)
                t.add({r.name, std::string(tl::to_string(r.sign)), r.conductor, r.modulus, r.kappa_text,
                       std::int64_t(r.residue_classes.size()), std::int64_t(r.half_form.forms.size()),
                       r.half_form.denominator()});
            t.note("records", std::int64_t(recs.size()));
        } else if (*theta) {
            name = "theta-" + g.curve;
            if (g.cache.empty()) g.cache = "cache";
            const auto recs = load(g);
            const auto& rec = tl::find_curve(recs, g.curve);
            const tl::CoefficientTable table = tl::coefficients_for(rec, g.xmax, g.cache);
            std::int64_t nonzero = 0;
            for (std::int64_t n = 2; n <= table.bound; ++n) nonzero += table.values[std::size_t(n)] != 0;
            t.header = {"curve", "bound", "nonzero", "path"};
            t.add({rec.name, table.bound, nonzero, (std::filesystem::path(g.cache) / (rec.name + ".tlcc")).string()});
        } else if (*sweep_cmd) {
            name = "sweep-" + g.curve;
            const auto recs = load(g);
            const auto r = run_sweep(g, tl::find_curve(recs, g.curve));
            t.header = {"d", "c", "lvalue"};
            for (const auto& s : r.samples) t.add({s.d, s.c, s.lvalue});
            t.note("count", std::int64_t(r.size()));
            t.note("vanishing", r.vanishing);
            t.note("prime_count", r.prime_count);
            t.note("prime_vanishing", r.prime_vanishing);
            for (int k = 1; k <= 4; ++k) t.note("sum_k" + std::to_string(k), r.moment_sums[std::size_t(k)]);
        } else if (*moments) {
            name = "moments-" + g.curve;
            const auto recs = load(g);
            const auto r = run_sweep(g, tl::find_curve(recs, g.curve));
            t.header = {"s", "count", "sum", "mean"};
            for (double s : parse_list(s_list)) {
                const auto m = tl::empirical_moment(r, s);
                t.add({s, m.count, m.sum, m.mean});
            }
        } else if (*histogram) {
            name = "histogram-" + g.curve;
            const auto recs = load(g);
            const auto& rec = tl::find_curve(recs, g.curve);
            const auto r = run_sweep(g, rec);
            tl::EulerFactorData data(rec, 1000);
            const double B = tl::small_value_constant(data, rec.sign, g.pmax).value;
            const auto h = tl::value_histogram(r, hspec, B);
            t.header = {"bin_lo", "bin_hi", "count", "density", "small_model", "rmt_model"};
            for (const auto& b : h.bins) t.add({b.lo, b.hi, b.count, b.density, b.small_model, b.rmt_model});
            t.note("nonzero", h.nonzero);
            t.note("zeros", h.zeros);
            t.note("below", h.below);
            t.note("above", h.above);
            t.note("mass", h.mass());
            t.note("B", B);
            if (h.nonzero >= 100) {
                const auto f = tl::small_value_slope(r, slope_lo, slope_bins);
                t.note("slope", f.slope);
                t.note("slope_r2", f.r2);
                t.note("slope_t_lo", f.t_lo);
                t.note("slope_t_hi", f.t_hi);
            }
        } else if (*clt) {
            name = "clt-" + g.curve;
            const auto recs = load(g);
            const auto r = run_sweep(g, tl::find_curve(recs, g.curve));
            auto tr = tl::clt_transform(r);
            const tl::MellinDensity md(clt_N);
            t = binned(tr.value, clt_bins, tl::normal_pdf, "gaussian");
            t.header.push_back("rmt_model");
            for (auto& row : t.rows) {
                const double x = 0.5 * (std::get<double>(row[0]) + std::get<double>(row[1]));
                const double tt = tl::clt_abscissa_to_t(clt_N, x);
                row.push_back(tt >= 1e-12 ? tl::clt_density(md, x) : 0.0);
            }
            std::sort(tr.value.begin(), tr.value.end());
            t.note("samples", std::int64_t(tr.value.size()));
            if (!tr.value.empty()) {
                t.note("ks_gaussian", tl::ks_statistic(tr.value, tl::normal_cdf));
                t.note("ks_rmt", tl::ks_statistic(tr.value, [&](double x) {
                           const double tt = tl::clt_abscissa_to_t(clt_N, x);
                           return tt < 1e-12 ? 0.0 : md.cdf(tt);
                       }));
            }
        } else if (*dist) {
            name = "dist-" + g.curve;
            const auto recs = load(g);
            const auto r = run_sweep(g, tl::find_curve(recs, g.curve));
            auto tr = tl::distribution_transform(r);
            t = binned(tr.value, dist_bins,
                       [](double v) { return v > 0 ? tl::normal_pdf(std::log(v)) / v : 0.0; }, "lognormal");
            std::sort(tr.value.begin(), tr.value.end());
            t.note("samples", std::int64_t(tr.value.size()));
            if (!tr.value.empty()) t.note("ks_lognormal", tl::ks_statistic(tr.value, tl::lognormal_cdf));
        } else if (*vanish) {
            name = "vanish-" + g.curve;
            const auto recs = load(g);
            const auto& rec = tl::find_curve(recs, g.curve);
            const auto r = run_sweep(g, rec);
            tl::EulerFactorData data(rec, 1000);
            const double a = tl::arithmetic_factor(data, rec.sign, -0.5, g.pmax).value;
            const std::int64_t step = vstep > 0 ? vstep : std::max<std::int64_t>(2, g.xmax / 100);
            const auto rep = tl::vanishing_report(r, !all_d, step, a);
            t.header = {"X", "count", "vanishing", "fraction", "normalized"};
            for (const auto& p : rep.points) t.add({p.X, p.count, p.vanishing, p.fraction, p.normalized});
            t.note("prime_only", std::int64_t(rep.prime_only));
            t.note("A_minus_half", a);
            t.note("slope", rep.slope);
            t.note("no_vanishing", std::int64_t(rep.no_vanishing));
        } else if (*rq) {
            name = "rq-" + g.curve;
            const auto recs = load(g);
            const auto& rec = tl::find_curve(recs, g.curve);
            const auto r = run_sweep(g, rec);
            tl::EulerFactorData data(rec, std::max(qmax, g.pmax));
            const auto entries = tl::rq_report(r, data, qmax, g.pmax);
            t.header = {"q", "a_q", "n_plus", "n_minus", "empirical", "main", "refined", "delta_main", "delta_refined"};
            for (const auto& e : entries)
                t.add({e.q, e.a_q, e.plus, e.minus, opt(e.empirical), e.main, e.refined, opt(e.delta_main()),
                       opt(e.delta_refined())});
            const bool any = std::any_of(entries.begin(), entries.end(), [](const auto& e) { return bool(e.empirical); });
            if (any) {
                t.note("median_abs_delta_main", tl::median_abs_delta(entries, false));
                t.note("median_abs_delta_refined", tl::median_abs_delta(entries, true));
            }
        } else if (*rmt_moments) {
            name = "rmt-moments";
            t.header = {"N", "k", "product", "polynomial", "contour"};
            tl::QuadratureSpec q;
            q.nodes = g.nodes;
            for (int N = 1; N <= nmax; ++N)
                for (int k = 1; k <= kmax_rmt; ++k) {
                    const tl::Rational p = tl::mo_polynomial(N, k);
                    t.add({std::int64_t(N), std::int64_t(k), tl::mo_product(N, double(k)),
                           double(p.numerator()) / double(p.denominator()), tl::mo_contour(N, k, q)});
                }
        } else if (*rmt_density) {
            name = "rmt-density-" + std::to_string(dens_N);
            tl::LineQuadratureSpec ls;
            ls.t_min = std::min(1e-12, dens_tmin);
            const tl::MellinDensity md(dens_N, ls);
            if (dens_clt) {
                t.header = {"x", "clt_density", "gaussian"};
                for (int i = 0; i < dens_points; ++i) {
                    const double x = -4.0 + 8.0 * i / (dens_points - 1);
                    const double tt = tl::clt_abscissa_to_t(dens_N, x);
                    t.add({x, tt >= ls.t_min ? tl::clt_density(md, x) : 0.0, tl::normal_pdf(x)});
                }
            } else {
                const double hi = dens_tmax > 0 ? dens_tmax : md.support_max();
                if (!(dens_tmin > 0 && hi > dens_tmin)) throw tl::DomainError("need 0 < tmin < tmax");
                t.header = {"t", "density", "cdf"};
                for (int i = 0; i < dens_points; ++i) {
                    const double tt = dens_tmin * std::pow(hi / dens_tmin, double(i) / (dens_points - 1));
                    t.add({tt, md.density(tt), md.cdf(tt)});
                }
            }
            t.note("nodes", std::int64_t(md.nodes()));
            if (mc_draws > 0) {
                auto draws = tl::haar_samples(dens_N, mc_draws, g.seed);
                std::sort(draws.begin(), draws.end());
                t.note("mc_draws", std::int64_t(mc_draws));
                t.note("mc_ks", tl::ks_statistic(draws, [&](double v) { return v < ls.t_min ? 0.0 : md.cdf(v); }));
            }
        } else if (*upsilon) {
            name = "upsilon-" + g.curve;
            const auto recs = load(g);
            const auto& rec = tl::find_curve(recs, g.curve);
            tl::EulerFactorData data(rec, g.pmax);
            auto cfg = prediction_config(g);
            cfg.r0 = r0;
            t.header = {"k", "r", "coefficient"};
            for (int k : ks) {
                const auto poly = tl::upsilon(data, rec.sign, k, cfg);
                for (std::size_t i = 0; i < poly.coefficients.size(); ++i)
                    t.add({std::int64_t(k), std::int64_t(i), poly.coefficients[i]});
                t.note("node_delta_k" + std::to_string(k), poly.node_delta);
                t.note("imaginary_ratio_k" + std::to_string(k), poly.imaginary_ratio);
            }
        } else if (*compare) {
            name = "predict-compare-" + g.curve;
            const auto recs = load(g);
            const auto& rec = tl::find_curve(recs, g.curve);
            const auto r = run_sweep(g, rec);
            tl::EulerFactorData data(rec, g.pmax);
            const auto cfg = prediction_config(g);
            t.header = {"k", "count", "empirical_sum", "predicted_sum", "ratio", "empirical_mean",
                        "predicted_integral_mean"};
            for (int k = 1; k <= kmax_cmp; ++k) {
                const auto c = tl::compare_moment(r, tl::upsilon(data, rec.sign, k, cfg));
                t.add({std::int64_t(k), c.count, c.empirical_sum, c.predicted_sum, c.ratio, c.empirical_mean,
                       c.predicted_integral_mean});
            }
        }
        emit(g, name, t);
        return 0;
    } catch (const tl::ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return 3;
    } catch (const tl::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const tl::DomainError& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
