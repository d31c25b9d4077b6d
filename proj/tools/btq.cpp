#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "btq/acceptance.hpp"
#include "btq/modsym.hpp"

using namespace btq;
using json = nlohmann::json;
namespace fs = std::filesystem;

#ifndef BTQ_VERSION
#define BTQ_VERSION "unknown"
#endif
#ifndef BTQ_GOLDEN_DIR
#define BTQ_GOLDEN_DIR ""
#endif

namespace {

struct RunConfig {
    int p = 2;
    int e = 1;
    std::vector<int> field_modulus; // only for e > 1
    int d = 2;
    std::vector<int> level{1};
    bool identity_component = false;
    int alpha_min = 0; // 0 means d
    int alpha_max = 0; // 0 means alpha_min + 4
    int alpha = 0;     // symbols and export; 0 means alpha_max
    int dgen = 2;
    long aut_ceiling = 10'000'000;
    long enumeration_ceiling = 2'000'000;
    int series_ceiling = 4096;
    std::string out = "out";
    std::string format = "json";
    bool span = true;
    std::string basis_file;
    std::string criteria;
    std::string golden = BTQ_GOLDEN_DIR;
};

void to_json(json& j, const RunConfig& c) {
    j = json{{"p", c.p},
             {"e", c.e},
             {"field_modulus", c.field_modulus},
             {"d", c.d},
             {"level", c.level},
             {"identity_component", c.identity_component},
             {"alpha_min", c.alpha_min},
             {"alpha_max", c.alpha_max},
             {"alpha", c.alpha},
             {"dgen", c.dgen},
             {"aut_ceiling", c.aut_ceiling},
             {"enumeration_ceiling", c.enumeration_ceiling},
             {"series_ceiling", c.series_ceiling},
             {"format", c.format},
             {"span", c.span}};
}

template <class T>
void take(const json& j, const char* name, T& field) {
    if (j.contains(name))
        field = j.at(name).get<T>();
}

void load_config(const std::string& path, RunConfig& c) {
    std::ifstream in(path);
    require(in.is_open(), ErrorKind::Config, "cannot read config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& ex) {
        throw Error(ErrorKind::Config, std::string("config is not valid JSON: ") + ex.what());
    }
    require(j.is_object(), ErrorKind::Config, "config must be a JSON object");
    try {
        if (j.contains("q")) {
            FieldSpec s = FieldSpec::of_order(j.at("q").get<int>());
            c.p = s.p;
            c.e = s.e;
        }
        take(j, "p", c.p);
        take(j, "e", c.e);
        take(j, "field_modulus", c.field_modulus);
        take(j, "d", c.d);
        take(j, "level", c.level);
        take(j, "identity_component", c.identity_component);
        take(j, "alpha_min", c.alpha_min);
        take(j, "alpha_max", c.alpha_max);
        take(j, "alpha", c.alpha);
        take(j, "dgen", c.dgen);
        take(j, "aut_ceiling", c.aut_ceiling);
        take(j, "enumeration_ceiling", c.enumeration_ceiling);
        take(j, "series_ceiling", c.series_ceiling);
        take(j, "out", c.out);
        take(j, "format", c.format);
        take(j, "span", c.span);
        take(j, "basis", c.basis_file);
        take(j, "criteria", c.criteria);
        take(j, "golden", c.golden);
    } catch (const json::exception& ex) {
        throw Error(ErrorKind::Config, std::string("bad config field: ") + ex.what());
    }
}

FieldSpec field_spec(const RunConfig& c) {
    if (c.e == 1 || !c.field_modulus.empty())
        return FieldSpec{c.p, c.e, c.field_modulus};
    int q = 1;
    for (int i = 0; i < c.e; ++i)
        q *= c.p;
    return FieldSpec::of_order(q);
}

void validate(RunConfig& c) {
    require(c.d >= 1 && c.d <= 6, ErrorKind::Config, "d must lie in 1..6");
    require(c.aut_ceiling > 0 && c.enumeration_ceiling > 0 && c.series_ceiling > 0, ErrorKind::Config,
            "ceilings must be positive");
    FieldSpec fs = field_spec(c);
    Field F(fs); // rejects a non-prime p or a reducible modulus
    require(c.d * std::log2(double(fs.q())) <= 16, ErrorKind::Config, "d log2 q exceeds the global budget of 16");
    require(!c.level.empty() && c.level.back() == 1, ErrorKind::Config, "level must be monic (leading coefficient 1)");
    for (int x : c.level)
        require(x >= 0 && x < fs.q(), ErrorKind::Config, "level coefficients must lie in 0..q-1");
    if (c.alpha_min <= 0)
        c.alpha_min = c.d;
    if (c.alpha_max <= 0)
        c.alpha_max = c.alpha_min + 4;
    if (c.alpha <= 0)
        c.alpha = c.alpha_max;
    require(c.alpha_min <= c.alpha_max, ErrorKind::Config, "alpha_min exceeds alpha_max");
    require(c.dgen >= 0, ErrorKind::Config, "dgen must be nonnegative");
    require(c.format == "json" || c.format == "csv", ErrorKind::Config, "format must be json or csv");
}

std::shared_ptr<QuotientContext> make_context(const RunConfig& c) {
    QuotientParams P;
    P.field = field_spec(c);
    P.d = c.d;
    P.level = c.level;
    P.identity_component = c.identity_component;
    P.aut_ceiling = c.aut_ceiling;
    P.enumeration_ceiling = c.enumeration_ceiling;
    P.limits.series_ceiling = c.series_ceiling;
    return std::make_shared<QuotientContext>(P);
}

std::string rat(const Rational& x) { return x.get_str(); }

json chain_json(const OrientedChain& c) {
    json j = json::object();
    for (const auto& [k, v] : c.coeffs)
        j[hex(k)] = rat(v);
    return j;
}

std::vector<std::string> hex_all(const std::vector<Key>& ks) {
    std::vector<std::string> out;
    for (const auto& k : ks)
        out.push_back(hex(k));
    return out;
}

// Files are collected first and written together once the command succeeded.
struct Output {
    std::map<std::string, std::string> files;

    void put(const std::string& name, std::string content) { files[name] = std::move(content); }

    void flush(const std::string& dir) const {
        fs::create_directories(dir);
        for (const auto& [name, content] : files) {
            fs::path target = fs::path(dir) / name;
            fs::path tmp = target;
            tmp += ".tmp";
            {
                std::ofstream os(tmp, std::ios::binary);
                os << content;
                require(static_cast<bool>(os), ErrorKind::Config, "cannot write " + tmp.string());
            }
            fs::rename(tmp, target);
        }
    }
};

json cmd_quotient(const RunConfig& c, Output& out) {
    auto ctx = make_context(c);
    QuotientComplex X(ctx);
    json cores = json::array();
    for (int a = c.alpha_min; a <= c.alpha_max; ++a) {
        const CoreView& v = X.core_ref(a);
        const Complex& C = *v.closure;
        std::ostringstream text;
        write_complex(text, C);
        out.put("complex_alpha" + std::to_string(a) + ".txt", text.str());

        json vertices = json::array(), simplices = json::array();
        for (const auto& k : C.sorted_keys(0)) {
            PointedKey p = ctx->decode(k);
            vertices.push_back({{"key", hex(k)},
                                {"type", p.type},
                                {"level", ctx->level_group().to_string(p.level)},
                                {"level_orbit", ctx->level_orbit_size(p.type, p.level)},
                                {"delta_p", delta_p(p.type)},
                                {"stabilizer_order", ctx->vertex_stabilizer_order(p.type, p.level).get_str()},
                                {"in_core", v.open[0].find(k) >= 0}});
        }
        for (int i = 1; i <= C.max_dim(); ++i)
            for (const auto& k : C.sorted_keys(i)) {
                const QSimplex& s = ctx->simplex(k);
                simplices.push_back({{"key", hex(k)},
                                     {"dim", i},
                                     {"vertices", hex_all(s.vertices)},
                                     {"pointed_rotations", hex_all(s.canon.pointed)},
                                     {"in_core", static_cast<int>(v.open.size()) > i && v.open[i].find(k) >= 0}});
            }
        out.put("sidecar_alpha" + std::to_string(a) + ".json",
                json{{"vertices", vertices}, {"simplices", simplices}}.dump(1) + "\n");

        json open = json::array(), closure = json::array();
        for (const auto& b : v.open)
            open.push_back(b.size());
        for (int i = 0; i <= C.max_dim(); ++i)
            closure.push_back(C.count(i));
        cores.push_back({{"alpha", a}, {"core_cells", open}, {"closure_cells", closure}});
    }
    return {{"cores", cores}};
}

json cmd_homology(const RunConfig& c, Output& out) {
    auto ctx = make_context(c);
    QuotientComplex X(ctx);
    const int top = c.d - 1;
    json per_alpha = json::array();
    bool uct = true;
    std::ostringstream csv;
    csv << "alpha,H_top,H^top,relative_H_top\n";
    auto bm = bm_homology(X, top, c.alpha_min, c.alpha_max);
    auto hc = compact_support_cohomology(X, top, c.alpha_min, c.alpha_max);
    for (size_t k = 0; k < bm.alphas.size(); ++k) {
        const Complex& C = *X.core_ref(bm.alphas[k]).closure;
        json h = json::array(), co = json::array();
        for (int i = 0; i <= top; ++i) {
            int a = homology(C, i).dimension, b = cohomology(C, i).dimension;
            h.push_back(a);
            co.push_back(b);
            uct = uct && a == b;
        }
        per_alpha.push_back({{"alpha", bm.alphas[k]},
                             {"homology", h},
                             {"cohomology", co},
                             {"relative_homology_top", bm.dims[k]},
                             {"relative_cohomology_top", hc.dims[k]}});
        csv << bm.alphas[k] << ',' << h.back() << ',' << co.back() << ',' << bm.dims[k] << '\n';
    }
    require(bm.stabilized, ErrorKind::NotStabilized, "Borel-Moore homology not stabilized; raise alpha_max");
    require(hc.stabilized, ErrorKind::NotStabilized, "compact support cohomology not stabilized; raise alpha_max");
    uct = uct && bm.stable_dim == hc.stable_dim;
    if (c.format == "csv")
        out.put("homology.csv", csv.str());
    return {{"degree", top},
            {"per_alpha", per_alpha},
            {"borel_moore", {{"dims", bm.dims}, {"transition_ranks", bm.transition_ranks}, {"stable_dim", bm.stable_dim}}},
            {"compact_support", {{"dims", hc.dims}, {"transition_ranks", hc.transition_ranks}, {"stable_dim", hc.stable_dim}}},
            {"H_top", per_alpha.back()["homology"].back()},
            {"H^top", per_alpha.back()["cohomology"].back()},
            {"uct_consistent", uct}};
}

PolyMatrix poly_matrix(const Field& F, const json& rows, int d, const std::string& what) {
    require(rows.is_array() && static_cast<int>(rows.size()) == d, ErrorKind::Config, what + " must have d rows");
    PolyMatrix M(&F, d, d);
    for (int i = 0; i < d; ++i) {
        require(rows[i].is_array() && static_cast<int>(rows[i].size()) == d, ErrorKind::Config,
                what + " rows must have d entries");
        for (int j = 0; j < d; ++j) {
            std::vector<Elt> cs;
            for (int x : rows[i][j].get<std::vector<int>>()) {
                require(x >= 0 && x < F.q(), ErrorKind::Config, what + " coefficients must lie in 0..q-1");
                cs.push_back(static_cast<Elt>(x));
            }
            M(i, j) = Poly(&F, cs);
        }
    }
    return M;
}

json matrix_json(const PolyMatrix& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < M.cols(); ++j)
            row.push_back(M(i, j).to_string());
        rows.push_back(row);
    }
    return rows;
}

json cmd_modsym(const RunConfig& c, Output& out) {
    auto ctx = make_context(c);
    QuotientComplex X(ctx);
    const Field& F = *ctx->field();
    json bases = json::array();
    if (!c.basis_file.empty()) {
        std::ifstream in(c.basis_file);
        require(in.is_open(), ErrorKind::Config, "cannot read basis file " + c.basis_file);
        json j;
        try {
            j = json::parse(in);
            bases = j.at("bases");
        } catch (const json::exception& ex) {
            throw Error(ErrorKind::Config, std::string("bad basis file: ") + ex.what());
        }
    }
    json symbols = json::array();
    for (size_t b = 0; b < bases.size(); ++b) {
        PolyMatrix V;
        uint64_t g = ctx->level_group().identity();
        try {
            V = poly_matrix(F, bases[b].at("rows"), c.d, "basis");
            if (bases[b].contains("level"))
                g = ctx->level_group().reduce(poly_matrix(F, bases[b].at("level"), c.d, "level datum"));
        } catch (const json::exception& ex) {
            throw Error(ErrorKind::Config, std::string("bad basis entry: ") + ex.what());
        }
        ModularSymbol m = modular_symbol(X, to_rat(V), c.alpha, g);
        const auto& cert = m.certificate;
        symbols.push_back({{"basis", matrix_json(V)},
                           {"level", ctx->level_group().to_string(g)},
                           {"alpha", c.alpha},
                           {"chain", chain_json(m.chain)},
                           {"certificate",
                            {{"initial_radius", cert.initial_radius},
                             {"radius", cert.radius},
                             {"margin", cert.margin},
                             {"shell_vertices", cert.shell_vertices},
                             {"window_simplices", cert.window_simplices},
                             {"contributing_simplices", cert.contributing_simplices},
                             {"max_fiber", cert.max_fiber},
                             {"relative_cycle", cert.relative_cycle}}}});
        out.put("automorphic_" + std::to_string(b) + ".csv",
                automorphic_csv(automorphic_export(X, m.chain, c.alpha)));
    }
    json result{{"symbols", symbols}};
    if (c.span) {
        auto img = homology_image(X, c.alpha_min, c.alpha_max);
        SpanPolicy pol;
        pol.max_degree = c.dgen;
        auto cert = span_test(X, img, pol);
        json gens = json::array();
        for (const auto& s : cert.generators)
            gens.push_back({{"basis", matrix_json(s.V)}, {"level", ctx->level_group().to_string(s.level)}});
        json coeffs = json::array();
        for (const auto& row : cert.coefficients) {
            json sparse = json::array();
            for (size_t i = 0; i < row.size(); ++i)
                if (row[i] != 0)
                    sparse.push_back({i, rat(row[i])});
            coeffs.push_back(sparse);
        }
        result["span"] = {{"status", to_string(cert.status)},
                          {"alpha", cert.alpha},
                          {"image_dim", cert.image_dim},
                          {"degree_used", cert.degree_used},
                          {"candidates", cert.candidates},
                          {"distinct_symbols", cert.distinct_symbols},
                          {"symbol_rank", cert.symbol_rank},
                          {"verified", cert.verified},
                          {"generators", gens},
                          {"coefficients", coeffs}};
    }
    return result;
}

std::set<int> parse_criteria(const std::string& s, bool given) {
    std::set<int> ids;
    if (!given)
        return ids;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) {
            try {
                ids.insert(std::stoi(tok));
            } catch (const std::exception&) {
                throw Error(ErrorKind::Config, "bad criterion id '" + tok + "'");
            }
        }
    require(!ids.empty(), ErrorKind::Config, "empty criteria selection");
    return ids;
}

json cmd_verify(const RunConfig& c, bool criteria_given, bool& all_pass, json& timing) {
    acceptance::Options opt;
    opt.only = parse_criteria(c.criteria, criteria_given);
    opt.golden_dir = c.golden;
    acceptance::ScanRowSink sink;
    opt.scan = &sink;
    json rows = json::array();
    all_pass = true;
    for (const auto& o : acceptance::run(opt)) {
        std::cout << acceptance::format(o) << std::endl;
        rows.push_back({{"id", o.id}, {"name", o.name}, {"pass", o.pass}, {"detail", o.detail}});
        timing["criterion_" + std::to_string(o.id)] = o.seconds;
        all_pass = all_pass && o.pass;
    }
    json result{{"criteria", rows}, {"all_pass", all_pass}};
    if (!sink.rows.empty()) {
        json scan = json::array();
        for (const auto& r : sink.rows)
            scan.push_back({{"q", r.q},
                            {"level", r.level},
                            {"alpha", r.alpha},
                            {"h1", r.betti},
                            {"image_dim", r.image_dim},
                            {"status", to_string(r.status)},
                            {"degree_used", r.degree_used},
                            {"verified", r.verified},
                            {"error", r.error}});
        result["scan"] = scan;
    }
    return result;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quotients of Bruhat-Tits buildings over F_q(t), their homology and modular symbols"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<int> q, p, e, d, alpha_min, alpha_max, alpha, dgen, series;
    std::optional<long> aut, enumeration;
    std::optional<std::string> level, out, format, basis, golden;
    std::optional<std::vector<int>> modulus;
    bool identity = false, no_span = false;
    std::string criteria;

    auto add_common = [&](CLI::App* s) {
        s->add_option("--config", config_path, "JSON config file; flags override its fields");
        s->add_option("--q", q, "field order (default irreducible modulus for prime powers)");
        s->add_option("--p", p, "field characteristic");
        s->add_option("--e", e, "field degree over F_p");
        s->add_option("--field-modulus", modulus, "defining polynomial of F_q over F_p, lowest coefficient first");
        s->add_option("--d", d, "rank");
        s->add_option("--level", level, "monic level polynomial, coefficients lowest first, comma separated");
        s->add_flag("--identity-component", identity, "restrict level data to the identity component");
        s->add_option("--alpha-min", alpha_min, "smallest truncation (default d)");
        s->add_option("--alpha-max", alpha_max, "largest truncation (default alpha-min + 4)");
        s->add_option("--aut-ceiling", aut, "ceiling on automorphism images per type");
        s->add_option("--enumeration-ceiling", enumeration, "ceiling on enumerated simplices and level data");
        s->add_option("--series-ceiling", series, "ceiling on Laurent series terms");
        s->add_option("--out", out, "output directory");
        s->add_option("--format", format, "report projection: json or csv");
    };
    auto* quotient = app.add_subcommand("quotient", "assemble truncated quotient complexes");
    auto* homol = app.add_subcommand("homology", "homology, cohomology and their stabilized versions");
    auto* modsym = app.add_subcommand("modsym", "modular symbols, span test and automorphic export");
    auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
    for (auto* s : {quotient, homol, modsym, verify})
        add_common(s);
    modsym->add_option("--basis", basis, "JSON file with {\"bases\": [{\"rows\": ..., \"level\": ...}]}");
    modsym->add_option("--alpha", alpha, "truncation for the symbols (default alpha-max)");
    modsym->add_option("--dgen", dgen, "maximal entry degree of span generators");
    modsym->add_flag("--no-span", no_span, "skip the span test");
    auto* crit = verify->add_option("--criteria", criteria, "comma separated criterion ids (default all)");
    verify->add_option("--golden", golden, "directory with golden files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        int code = app.exit(ex);
        return code == 0 ? 0 : 2;
    }
    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();

    RunConfig c;
    json report{{"command", name}, {"version", BTQ_VERSION}};
    json timing;
    auto t0 = std::chrono::steady_clock::now();
    Output files;
    int code = 0;
    try {
        if (!config_path.empty())
            load_config(config_path, c);
        if (q) {
            FieldSpec s = FieldSpec::of_order(*q);
            c.p = s.p;
            c.e = s.e;
        }
        if (p)
            c.p = *p;
        if (e)
            c.e = *e;
        if (modulus)
            c.field_modulus = *modulus;
        if (d)
            c.d = *d;
        if (level) {
            c.level.clear();
            std::stringstream ss(*level);
            std::string tok;
            while (std::getline(ss, tok, ','))
                try {
                    c.level.push_back(std::stoi(tok));
                } catch (const std::exception&) {
                    throw Error(ErrorKind::Config, "bad level coefficient '" + tok + "'");
                }
        }
        c.identity_component = c.identity_component || identity;
        if (alpha_min)
            c.alpha_min = *alpha_min;
        if (alpha_max)
            c.alpha_max = *alpha_max;
        if (alpha)
            c.alpha = *alpha;
        if (dgen)
            c.dgen = *dgen;
        if (aut)
            c.aut_ceiling = *aut;
        if (enumeration)
            c.enumeration_ceiling = *enumeration;
        if (series)
            c.series_ceiling = *series;
        if (out)
            c.out = *out;
        if (format)
            c.format = *format;
        if (basis)
            c.basis_file = *basis;
        if (golden)
            c.golden = *golden;
        if (no_span)
            c.span = false;
        const bool criteria_given = crit->count() > 0 || !c.criteria.empty();
        if (crit->count() > 0)
            c.criteria = criteria;
        report["config"] = c;
        validate(c);
        report["config"] = c;

        if (name == "quotient") {
            report["results"] = cmd_quotient(c, files);
        } else if (name == "homology") {
            report["results"] = cmd_homology(c, files);
        } else if (name == "modsym") {
            report["results"] = cmd_modsym(c, files);
        } else {
            bool all_pass = true;
            report["results"] = cmd_verify(c, criteria_given, all_pass, timing);
            code = all_pass ? 0 : 1;
        }
    } catch (const Error& ex) {
        files.files.clear();
        report["error"] = {{"kind", to_string(ex.kind())}, {"message", ex.what()}};
        code = is_ceiling(ex.kind()) ? 3 : 2;
        std::cerr << ex.what() << std::endl;
    }
    timing["total_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    files.put("report.json", report.dump(2) + "\n");
    files.put("timing.json", timing.dump(2) + "\n");
    try {
        files.flush(c.out);
    } catch (const std::exception& ex) {
        std::cerr << "cannot write output: " << ex.what() << std::endl;
        return 2;
    }
    if (code != 1 && !report.contains("error"))
        std::cout << name << ": report written to " << (fs::path(c.out) / "report.json").string() << std::endl;
    return code;
}
