#include "orbitlens/cli_app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "orbitlens/abel.hpp"
#include "orbitlens/classifier.hpp"

namespace orbitlens {

namespace {

using nlohmann::json;

json complex_json(cplx v) { return json{{"re", v.real()}, {"im", v.imag()}}; }

Series parse_rhs(const std::string& text, int order) {
    if (text == "-z") {
        Series g(std::max(order, 1));
        g.at(1) = -1.0;
        return g;
    }
    if (text == "1") {
        Series g(std::max(order, 1));
        g.at(0) = 1.0;
        return g;
    }
    std::vector<cplx> c;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) c.push_back(parse_complex(item));
    if (c.empty()) throw std::invalid_argument("empty rhs spec");
    Series g(std::max<int>(order, static_cast<int>(c.size()) - 1));
    for (std::size_t j = 0; j < c.size(); ++j) g.at(static_cast<int>(j)) = c[j];
    return g;
}

struct SweepOutput {
    OrbitSample orbit;
    EpsSweep sweep;
};

SweepOutput build_complex_sweep(const Germ& g, cplx z0, double decades, int ppd, bool pin) {
    SweepOutput so{orbit(g, z0), {}};
    SweepSpec spec = auto_sweep_spec(so.orbit, decades, ppd);
    spec.eps_max = 0.9 * valid_eps_max(so.orbit);
    if (spec.eps_max / spec.eps_min < std::pow(10.0, decades))
        spec.eps_min = spec.eps_max / std::pow(10.0, decades);
    spec.pin_to_half_distances = pin;
    so.sweep = sweep(so.orbit, spec);
    return so;
}

json report_json(const FractalReport& rep) {
    json j;
    j["dim_b"] = rep.dim_b;
    j["content"] = rep.minkowski_content;
    j["k1_re"] = rep.directed_content.real();
    j["k1_im"] = rep.directed_content.imag();
    j["kk1_re"] = rep.residual_content.real();
    j["kk1_im"] = rep.residual_content.imag();
    j["h_re"] = rep.principal_part.real();
    j["h_im"] = rep.principal_part.imag();
    j["diagnostics"] = {{"residual_rel", rep.diagnostics.residual_rel},
                        {"condition", rep.diagnostics.condition},
                        {"low_confidence", rep.diagnostics.low_confidence}};
    return j;
}

json invariants_json(const FormalInvariants& inv) {
    return json{{"k", inv.k},
                {"a1_re", inv.a1.real()},
                {"a1_im", inv.a1.imag()},
                {"lambda_re", inv.lambda.real()},
                {"lambda_im", inv.lambda.imag()}};
}

void write_plot_columns(const std::string& prefix, const EpsSweep& s) {
    auto dump = [&](const std::string& name, auto getter) {
        std::ofstream os(prefix + "_" + name + ".dat");
        os.precision(17);
        for (const auto& r : s.rows) os << r.eps << ' ' << getter(r) << '\n';
    };
    if (s.kind == Germ::Kind::real_line) {
        dump("length", [](const EpsSweep::Row& r) { return r.length; });
        return;
    }
    dump("area", [](const EpsSweep::Row& r) { return r.area; });
    dump("cm_re", [](const EpsSweep::Row& r) { return r.cm.real(); });
    dump("cm_im", [](const EpsSweep::Row& r) { return r.cm.imag(); });
    dump("da_re", [](const EpsSweep::Row& r) { return r.da.real(); });
    dump("da_im", [](const EpsSweep::Row& r) { return r.da.imag(); });
}

int cmd_sweep(CLI::App* app, std::ostream& out) {
    std::string germ_spec = app->get_option("--germ")->as<std::string>();
    std::string z0s = app->get_option("--z0")->as<std::string>();
    double decades = app->get_option("--decades")->as<double>();
    int ppd = app->get_option("--ppd")->as<int>();
    std::string out_path = app->get_option("--out")->as<std::string>();
    std::string plot = app->get_option("--plot")->as<std::string>();
    std::string tail = app->get_option("--tail")->as<std::string>();

    Germ g = Germ::parse(germ_spec);
    cplx z0 = parse_complex(z0s);
    SweepOutput so{orbit(g, z0), {}};
    SweepSpec spec = auto_sweep_spec(so.orbit, decades, ppd);
    if (tail == "finite") spec.tail = TailPolicy::finite_set;
    so.sweep = sweep(so.orbit, spec);
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        write_sweep_csv(os, so.sweep);
    } else {
        write_sweep_csv(out, so.sweep);
    }
    if (!plot.empty()) write_plot_columns(plot, so.sweep);
    return 0;
}

json classify_complex_germ(const Germ& g, cplx z0) {
    json j;
    if (std::abs(std::abs(g.a1()) - 1.0) > 1e-12) {
        // hyperbolic: exponential orbits keep few points above any modulus
        // floor, so deepen the stops to expose enough decades for the fit
        StopCriteria stop;
        stop.min_modulus = 1e-30;
        stop.min_distance = 1e-40;
        OrbitSample o = orbit(g, z0, stop);
        SweepSpec spec = auto_sweep_spec(o, 20.0, 16);
        EpsSweep s = sweep(o, spec);
        FitDiagnostics d;
        double dim = fit_box_dimension(s, &d);
        j["route"] = "parabolic_formal";
        j["dim_b"] = dim;
        j["note"] = "hyperbolic; analytically linearizable (Koenigs)";
        return j;
    }
    SweepOutput so = build_complex_sweep(g, z0, 2.5, 60, true);
    FractalReport rep = fractal_report(so.sweep, &g, so.orbit.direction_index);
    if (rep.k == 0) throw std::runtime_error("classify: box dimension does not snap to an integer k");
    FormalInvariants inv = rep.k == 1 ? k1_invariants(rep) : parabolic_invariants(rep);
    // the germ is known symbolically here, so take lambda from the orbit's
    // Fatou variable (the sweep-channel lambda is kept in the report fields)
    inv.lambda = lambda_from_orbit(g, so.orbit.direction_index);
    j["route"] = "parabolic_formal";
    j["k"] = inv.k;
    j["a1"] = complex_json(inv.a1);
    j["lambda"] = complex_json(inv.lambda);
    j["report"] = report_json(rep);
    j["confidence"] = rep.diagnostics.low_confidence ? "low" : "normal";
    auto [nf, exact] = normalize_extended(g);
    j["exact"] = invariants_json(exact);
    j["delta"] = {{"k", inv.k - exact.k},
                  {"a1_abs", std::abs(inv.a1) - std::abs(exact.a1)},
                  {"lambda", std::abs(inv.lambda - exact.lambda)}};
    return j;
}

json order_route(const std::string& generator, double x0, const std::string& scale_spec,
                 OrbitSample* orbit_out = nullptr) {
    RealGenerator gen = parse_generator(generator);
    StopCriteria stop;
    OrbitSample o = real_orbit([&](double x) { return gen.displacement(x); }, x0, stop);
    SweepSpec spec;
    spec.lengths = true;
    spec.eps_max = 0.9 * valid_eps_max(o);
    spec.eps_min = std::max(1.05 * valid_eps_min(o), spec.eps_max * 1e-8);
    spec.points_per_decade = 20;
    EpsSweep s = sweep(o, spec);
    ChebyshevScale scale = parse_scale(scale_spec);
    CriticalOrderResult cr = critical_order(s, scale);
    OrderReading reading = multiplicity_from_order(cr, scale);
    json j;
    j["route"] = "chebyshev_order";
    if (reading.inapplicable) {
        j["order"] = "infinite";
        j["note"] = reading.note;
        return j;
    }
    j["order"] = cr.order;
    j["gauge"] = reading.gauge;
    if (reading.cyclicity_bound) j["cyclicity_bound"] = *reading.cyclicity_bound;
    j["multiplicity_bound"] = reading.multiplicity_bound;
    j["note"] = reading.note;
    if (orbit_out) *orbit_out = std::move(o);
    return j;
}

int cmd_classify(CLI::App* app, std::ostream& out) {
    std::string route = app->get_option("--route")->as<std::string>();
    json j;
    if (route == "order") {
        j = order_route(app->get_option("--germ-real")->as<std::string>(),
                        app->get_option("--x0")->as<double>(),
                        app->get_option("--scale")->as<std::string>());
    } else if (route == "holonomy") {
        std::string pq = app->get_option("--pq")->as<std::string>();
        auto comma = pq.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("--pq expects p,q");
        int p = std::stoi(pq.substr(0, comma)), q = std::stoi(pq.substr(comma + 1));
        Germ h = Germ::parse(app->get_option("--germ")->as<std::string>());
        int order = h.truncation_order();
        Germ hq = h;
        for (int i = 1; i < q; ++i) hq = compose(h, hq, order);
        cplx z0 = parse_complex(app->get_option("--z0")->as<std::string>());
        SweepOutput so = build_complex_sweep(hq, z0, 2.5, 60, true);
        FractalReport rep = fractal_report(so.sweep, &hq, so.orbit.direction_index);
        HolonomyResult hr = holonomy_invariants(p, q, rep);
        j["route"] = "holonomy";
        j["linearizable"] = hr.linearizable;
        if (!hr.linearizable) {
            j["k"] = hr.k;
            j["lambda"] = complex_json(hr.lambda);
        }
        j["report"] = report_json(rep);
    } else if (app->count("--from-csv") > 0) {
        std::ifstream is(app->get_option("--from-csv")->as<std::string>());
        if (!is) throw std::invalid_argument("cannot open sweep CSV");
        EpsSweep s = read_sweep_csv(is);
        if (s.kind == Germ::Kind::real_line) {
            FitDiagnostics d;
            double dim = fit_box_dimension(s, &d);
            j["route"] = "real_multiplicity";
            j["dim_b"] = dim;
            j["multiplicity"] = multiplicity_from_dimension(dim);
        } else {
            FractalReport rep = fractal_report(s, nullptr, 0);
            j["route"] = "parabolic_formal";
            j["report"] = report_json(rep);
            if (rep.k == 1) j["invariants"] = invariants_json(k1_invariants(rep));
        }
        j["confidence"] = "sweep-only";
    } else {
        Germ g = Germ::parse(app->get_option("--germ")->as<std::string>());
        cplx z0 = parse_complex(app->get_option("--z0")->as<std::string>());
        j = classify_complex_germ(g, z0);
    }
    std::string out_path = app->get_option("--out")->as<std::string>();
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        os << j.dump(2) << '\n';
    } else {
        out << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_order(CLI::App* app, std::ostream& out) {
    json j = order_route(app->get_option("--germ-real")->as<std::string>(),
                         app->get_option("--x0")->as<double>(),
                         app->get_option("--scale")->as<std::string>());
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_abel(CLI::App* app, std::ostream& out) {
    Germ g = Germ::parse(app->get_option("--germ")->as<std::string>());
    Series rhs = parse_rhs(app->get_option("--rhs")->as<std::string>(), 4);
    cplx z = parse_complex(app->get_option("--eval")->as<std::string>());
    std::string side = app->get_option("--side")->as<std::string>();
    bool check = app->count("--check-residual") > 0;

    PetalQuery q = petal_membership(g, z);
    if (side == "plus" && !q.attracted)
        throw std::runtime_error("abel: evaluation point is not in the attracting petal");
    if (side == "minus" && q.attracted)
        throw std::runtime_error("abel: evaluation point is not in the repelling petal");

    AbelProblem p(g, rhs);
    SectorialSolution sol(p, side == "plus" ? PetalSide::plus : PetalSide::minus);
    cplx v = sol.eval(z);
    json j{{"value_re", v.real()}, {"value_im", v.imag()}};
    if (check) j["residual"] = std::abs(sol.residual(z));
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_saddle(CLI::App* app, std::ostream& out) {
    json j;
    if (app->count("--codim") > 0) {
        j["dim"] = saddle_loop_dimension(app->get_option("--codim")->as<int>());
    } else if (app->count("--dim") > 0) {
        auto cs = cyclicity_set(app->get_option("--dim")->as<double>());
        j["cyclicity_set"] = cs;
    } else if (app->count("--hyperbolas") > 0) {
        double s = app->get_option("--s")->as<double>();
        double r = app->get_option("--r")->as<double>();
        j["dim"] = hyperbola_family_dimension(s, r);
        if (app->count("--boxcount") > 0)
            j["boxcount_dim"] = hyperbola_box_count_dimension(s, r);
    } else {
        throw std::invalid_argument("saddle: need --codim, --dim or --hyperbolas");
    }
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_orbit_dump(CLI::App* app, std::ostream& out) {
    Germ g = Germ::parse(app->get_option("--germ")->as<std::string>());
    cplx z0 = parse_complex(app->get_option("--z0")->as<std::string>());
    StopCriteria stop;
    stop.max_points = app->get_option("--max-points")->as<std::size_t>();
    OrbitSample o = orbit(g, z0, stop);
    std::string out_path = app->get_option("--out")->as<std::string>();
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        write_orbit_csv(os, o);
    } else {
        write_orbit_csv(out, o);
    }
    return 0;
}

std::vector<std::string> apply_config(std::vector<std::string> args) {
    // --config FILE provides defaults for the subcommand; explicit flags win
    std::string path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") path = args[i + 1];
    if (path.empty()) return args;
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file: " + path);
    json cfg = json::parse(is);
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        std::string flag = "--" + it.key();
        bool present = false;
        for (const auto& a : args) present = present || a == flag;
        if (present) continue;
        args.push_back(flag);
        if (!it.value().is_boolean() || !it.value().get<bool>()) {
            if (it.value().is_string())
                args.push_back(it.value().get<std::string>());
            else
                args.push_back(it.value().dump());
        }
    }
    return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
#ifdef _OPENMP
    if (const char* t = std::getenv("ORBITLENS_THREADS")) {
        int n = std::atoi(t);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
    CLI::App app{"fractal geometry of orbits of one-dimensional germs"};
    app.require_subcommand(1);

    auto add_common = [](CLI::App* c) {
        c->add_option("--config", "flat JSON with default flags");
    };

    CLI::App* sw = app.add_subcommand("sweep", "measure eps-neighborhoods over a geometric grid");
    sw->add_option("--germ")->required();
    sw->add_option("--z0")->required();
    sw->add_option("--decades")->default_val(2.5);
    sw->add_option("--ppd")->default_val(60);
    sw->add_option("--out")->default_val("");
    sw->add_option("--plot")->default_val("");
    sw->add_option("--tail")->default_val("extend")->check(CLI::IsMember({"extend", "finite"}));
    add_common(sw);

    CLI::App* cl = app.add_subcommand("classify", "orbit -> sweep -> fits -> formal invariants");
    cl->add_option("--germ")->default_val("");
    cl->add_option("--z0")->default_val("-0.1");
    cl->add_option("--route")->default_val("auto")
        ->check(CLI::IsMember({"auto", "order", "holonomy"}));
    cl->add_option("--germ-real")->default_val("");
    cl->add_option("--x0")->default_val(0.1);
    cl->add_option("--scale")->default_val("saddle_loop:8");
    cl->add_option("--pq")->default_val("");
    cl->add_option("--from-csv")->default_val("");
    cl->add_option("--out")->default_val("");
    add_common(cl);

    CLI::App* od = app.add_subcommand("order", "critical Minkowski order of a real generator");
    od->add_option("--germ-real")->required();
    od->add_option("--x0")->default_val(0.1);
    od->add_option("--scale")->default_val("saddle_loop:8");
    add_common(od);

    CLI::App* ab = app.add_subcommand("abel", "sectorial solutions of generalized Abel equations");
    ab->add_option("--germ")->required();
    ab->add_option("--rhs")->default_val("-z");
    ab->add_option("--eval")->required();
    ab->add_option("--side")->default_val("plus")->check(CLI::IsMember({"plus", "minus"}));
    ab->add_flag("--check-residual");
    add_common(ab);

    CLI::App* sa = app.add_subcommand("saddle", "saddle-loop dimension/cyclicity tables");
    sa->add_option("--codim");
    sa->add_option("--dim");
    sa->add_flag("--hyperbolas");
    sa->add_option("--s")->default_val(0.5);
    sa->add_option("--r")->default_val(1.0);
    sa->add_flag("--boxcount");
    add_common(sa);

    CLI::App* dump = app.add_subcommand("orbit-dump", "orbit CSV with header n,re,im,d");
    dump->add_option("--germ")->required();
    dump->add_option("--z0")->required();
    dump->add_option("--max-points")->default_val(std::size_t{10000});
    dump->add_option("--out")->default_val("");
    add_common(dump);

    try {
        std::vector<std::string> args = apply_config(raw_args);
        // CLI11 parses reversed argv without the program name
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
        if (sw->parsed()) return cmd_sweep(sw, out);
        if (cl->parsed()) return cmd_classify(cl, out);
        if (od->parsed()) return cmd_order(od, out);
        if (ab->parsed()) return cmd_abel(ab, out);
        if (sa->parsed()) return cmd_saddle(sa, out);
        if (dump->parsed()) return cmd_orbit_dump(dump, out);
        err << "no subcommand\n";
        return 1;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        err << "precondition: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        err << "numeric abort: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace orbitlens
