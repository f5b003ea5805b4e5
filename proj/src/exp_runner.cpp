#include "dioph/exp_runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "dioph/adversarial.hpp"
#include "dioph/best_approx.hpp"
#include "dioph/exponent_lab.hpp"
#include "dioph/number_factory.hpp"
#include "dioph/rng.hpp"
#include "dioph/transference.hpp"

namespace dioph {

namespace {

enum class KeyType { integer, seed, real, text, int_list };

struct KeySpec {
    const char* key;
    KeyType type;
    bool positive;
};

const std::vector<KeySpec>& schema() {
    static const std::vector<KeySpec> s = {
        {"kind", KeyType::text, false},
        {"system", KeyType::text, false},
        {"system.d", KeyType::integer, true},
        {"system.rule", KeyType::text, false},
        {"system.a", KeyType::integer, true},
        {"system.b", KeyType::integer, true},
        {"system.quotients", KeyType::int_list, false},
        {"system.angle", KeyType::int_list, false},
        {"system.length", KeyType::integer, true},
        {"system.degree", KeyType::integer, true},
        {"system.orientation", KeyType::text, false},
        {"system.base", KeyType::integer, true},
        {"system.terms", KeyType::integer, true},
        {"system.n", KeyType::integer, true},
        {"system.m", KeyType::integer, true},
        {"system.seed", KeyType::seed, false},
        {"y_max", KeyType::integer, true},
        {"x_max", KeyType::integer, true},
        {"x_min", KeyType::integer, true},
        {"x_bound", KeyType::integer, true},
        {"samples", KeyType::integer, false},
        {"seed", KeyType::seed, false},
        {"precision", KeyType::integer, true},
        {"guard_bits", KeyType::integer, true},
        {"budget", KeyType::integer, true},
        {"engine", KeyType::text, false},
        {"exhaustive_up_to", KeyType::integer, true},
        {"inhom_exhaustive_up_to", KeyType::integer, true},
        {"ladder_ratio", KeyType::real, true},
        {"window.fraction", KeyType::real, true},
        {"window.minimum", KeyType::integer, true},
        {"tolerance", KeyType::real, true},
        {"expect.w", KeyType::real, false},
        {"expect.w_hat", KeyType::real, false},
        {"expect.tolerance", KeyType::real, true},
        {"w", KeyType::real, true},
        {"output_dir", KeyType::text, false},
        {"format", KeyType::text, false},
    };
    return s;
}

const KeySpec* find_key(const std::string& key) {
    for (const auto& k : schema())
        if (key == k.key) return &k;
    return nullptr;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
std::optional<T> parse_number(const std::string& s) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

double round15(double v) { return std::isfinite(v) ? std::strtod(fmt(v).c_str(), nullptr) : v; }

void check_value(const KeySpec& k, const std::string& value) {
    auto bad = [&](const std::string& why) {
        throw InvalidManifest(std::string("key '") + k.key + "': " + why + " (got '" + value + "')");
    };
    switch (k.type) {
        case KeyType::integer: {
            auto v = parse_number<std::int64_t>(value);
            if (!v) bad("expected an integer");
            if (k.positive && *v <= 0) bad("must be positive");
            if (!k.positive && *v < 0) bad("must be non-negative");
            break;
        }
        case KeyType::seed:
            if (!parse_number<std::uint64_t>(value)) bad("expected an unsigned 64-bit integer");
            break;
        case KeyType::real: {
            auto v = parse_real(value);
            if (!v) bad("expected a real number");
            if (k.positive && *v <= 0) bad("must be positive");
            break;
        }
        case KeyType::int_list:
            if (value.empty()) bad("empty list");
            for (const auto& part : split(value, ','))
                if (!parse_number<std::int64_t>(part)) bad("expected comma-separated integers");
            break;
        case KeyType::text:
            if (value.empty()) bad("empty value");
            break;
    }
}

void check_choice(const ExperimentManifest& m, const std::string& key, std::initializer_list<const char*> allowed) {
    if (!m.has(key)) return;
    std::string v = m.text(key);
    for (const char* a : allowed)
        if (v == a) return;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    throw InvalidManifest("key '" + key + "': '" + v + "' is not one of " + list);
}

}  // namespace

const std::vector<std::string>& ExperimentManifest::kinds() {
    static const std::vector<std::string> k = {"best_approx",     "hom_exponents", "inhom_exponents",
                                               "generic_theorem", "transference",  "adversarial",
                                               "khintchine_audit"};
    return k;
}

ExperimentManifest ExperimentManifest::parse(const std::string& text) {
    ExperimentManifest m;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidManifest("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
        if (key.empty()) throw InvalidManifest("line " + std::to_string(lineno) + ": empty key");
        if (m.values_.count(key)) throw InvalidManifest("line " + std::to_string(lineno) + ": duplicate key " + key);
        m.values_[key] = value;
    }
    return m;
}

ExperimentManifest ExperimentManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read manifest " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ExperimentManifest::set(const std::string& key, const std::string& value) { values_[key] = value; }

const std::string& ExperimentManifest::kind() const {
    static const std::string none;
    auto it = values_.find("kind");
    return it == values_.end() ? none : it->second;
}

std::string ExperimentManifest::text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::int64_t ExperimentManifest::integer(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto v = parse_number<std::int64_t>(it->second)) return *v;
    if (auto u = parse_number<std::uint64_t>(it->second)) return static_cast<std::int64_t>(*u);
    throw InvalidManifest("key '" + key + "' is not an integer");
}

double ExperimentManifest::real(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto v = parse_real(it->second)) return *v;
    throw InvalidManifest("key '" + key + "' is not a real number");
}

std::vector<std::int64_t> ExperimentManifest::int_list(const std::string& key) const {
    std::vector<std::int64_t> out;
    if (!has(key)) return out;
    for (const auto& part : split(text(key), ',')) {
        auto v = parse_number<std::int64_t>(part);
        if (!v) throw InvalidManifest("key '" + key + "' is not an integer list");
        out.push_back(*v);
    }
    return out;
}

std::string ExperimentManifest::to_text() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
    return out.str();
}

void ExperimentManifest::validate() const {
    const std::string& k = kind();
    if (k.empty()) throw InvalidManifest("missing key 'kind'");
    if (std::find(kinds().begin(), kinds().end(), k) == kinds().end())
        throw InvalidManifest("unknown experiment kind '" + k + "'");
    for (const auto& [key, value] : values_) {
        if (key.rfind("effective.", 0) == 0) continue;  // echoed settings
        const KeySpec* spec = find_key(key);
        if (!spec) throw InvalidManifest("unknown key '" + key + "'");
        check_value(*spec, value);
    }
    if (!has("system")) throw InvalidManifest("missing key 'system'");
    check_choice(*this, "system", {"golden", "sqrt", "cf", "liouville", "random"});
    check_choice(*this, "system.rule", {"fibonacci", "periodic", "list", "sturmian"});
    check_choice(*this, "system.orientation", {"row", "column"});
    check_choice(*this, "engine", {"auto", "exhaustive", "guided"});
    check_choice(*this, "format", {"csv", "text", "both"});
    std::string sys = text("system");
    if (sys == "sqrt" && !has("system.d")) throw InvalidManifest("system sqrt needs system.d");
    if (sys == "cf") {
        std::string rule = text("system.rule", "fibonacci");
        if ((rule == "list" || rule == "periodic") && !has("system.quotients"))
            throw InvalidManifest("system cf with rule " + rule + " needs system.quotients");
        if (rule == "sturmian" && !has("system.angle")) throw InvalidManifest("sturmian rule needs system.angle");
    }
    if (sys == "random" && (!has("system.n") || !has("system.m")))
        throw InvalidManifest("system random needs system.n and system.m");

    auto require = [&](std::initializer_list<const char*> keys) {
        for (const char* key : keys)
            if (!has(key)) throw InvalidManifest("kind " + k + " needs key '" + key + "'");
    };
    if (k == "best_approx" || k == "hom_exponents" || k == "khintchine_audit") require({"y_max"});
    if (k == "inhom_exponents") require({"x_max", "samples"});
    if (k == "generic_theorem") require({"x_max", "y_max", "samples"});
    if (k == "transference") require({"y_max", "samples"});
    if (k == "adversarial") require({"y_max", "x_bound"});
    if (integer("samples", 0) > 0 && !has("seed")) throw InvalidManifest("samples > 0 needs a seed");
    if ((k == "inhom_exponents" || k == "generic_theorem" || k == "transference") && integer("samples") < 1)
        throw InvalidManifest("kind " + k + " needs samples >= 1");
    if (has("window.fraction") && real("window.fraction") > 1) throw InvalidManifest("window.fraction must be <= 1");
    if (integer("precision", 128) < 32) throw InvalidManifest("precision must be >= 32 bits");
}

ExperimentManifest ExperimentManifest::template_for(const std::string& kind) {
    if (std::find(kinds().begin(), kinds().end(), kind) == kinds().end())
        throw InvalidManifest("unknown experiment kind '" + kind + "'");
    ExperimentManifest m;
    m.set("kind", kind);
    m.set("system", "sqrt");
    m.set("system.d", "2");
    m.set("precision", "128");
    m.set("format", "text");
    if (kind == "best_approx" || kind == "hom_exponents" || kind == "khintchine_audit") m.set("y_max", "1000000");
    if (kind == "inhom_exponents" || kind == "generic_theorem") {
        m.set("x_max", "100000");
        m.set("samples", "20");
        m.set("seed", "1");
    }
    if (kind == "generic_theorem") m.set("y_max", "1000000");
    if (kind == "transference") {
        m.set("y_max", "50");
        m.set("samples", "20");
        m.set("seed", "1");
    }
    if (kind == "adversarial") {
        m.erase("system.d");
        m.set("system", "golden");
        m.set("y_max", "100000000");
        m.set("x_bound", "10000");
    }
    return m;
}

Verdict make_verdict(std::string name, std::string anchor, bool pass, double margin, std::string detail) {
    for (auto* s : {&name, &anchor, &detail})
        for (char& c : *s)
            if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return Verdict{std::move(name), std::move(anchor), pass, round15(margin), std::move(detail)};
}

bool Report::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

const std::string* Report::table(const std::string& name) const {
    for (const auto& [n, t] : tables)
        if (n == name) return &t;
    return nullptr;
}

RunSettings settings_for(const ExperimentManifest& manifest) {
    RunSettings s;
    if (const char* env = std::getenv("DLAB_BUDGET")) {
        auto v = parse_number<std::uint64_t>(env);
        if (!v || *v == 0) throw InvalidManifest(std::string("DLAB_BUDGET is not a positive integer: ") + env);
        s.budget = *v;
        s.budget_source = "env";
    }
    if (const char* env = std::getenv("DLAB_PRECISION")) {
        auto v = parse_number<int>(env);
        if (!v || *v < 32) throw InvalidManifest(std::string("DLAB_PRECISION must be an integer >= 32: ") + env);
        s.precision = *v;
        s.precision_source = "env";
    }
    if (manifest.has("budget")) {
        s.budget = static_cast<std::uint64_t>(manifest.integer("budget"));
        s.budget_source = "manifest";
    }
    if (manifest.has("precision")) {
        s.precision = static_cast<int>(manifest.integer("precision"));
        s.precision_source = "manifest";
    }
    return s;
}

LinearSystem build_system(const ExperimentManifest& m, const PrecisionContext& ctx) {
    std::string name = m.text("system");
    std::string orient = m.text("system.orientation", "row");
    auto degree = static_cast<int>(m.integer("system.degree", 1));
    auto wrap = [&](const CertifiedReal& xi, Provenance p) {
        if (degree == 1) return scalar_system(xi, std::move(p));
        return power_matrix(xi, degree, orient == "row" ? Orientation::row : Orientation::column, std::move(p));
    };
    if (name == "golden") return wrap(golden_ratio(ctx), {"golden", {}});
    if (name == "sqrt") {
        auto d = m.integer("system.d");
        return wrap(sqrt_of(d, ctx), {"sqrt", {{"d", std::to_string(d)}}});
    }
    if (name == "cf") {
        std::string rule = m.text("system.rule", "fibonacci");
        auto length = static_cast<std::size_t>(m.integer("system.length", 0));
        CFSpec spec;
        if (rule == "fibonacci") spec = CFSpec::fibonacci(m.integer("system.a", 1), m.integer("system.b", 2), length);
        if (rule == "periodic") spec = CFSpec::periodic(m.int_list("system.quotients"), length);
        if (rule == "list") spec = CFSpec::explicit_list(m.int_list("system.quotients"));
        if (rule == "sturmian")
            spec = CFSpec::sturmian(m.integer("system.a", 1), m.integer("system.b", 2), m.int_list("system.angle"),
                                    length);
        return wrap(cf_to_real(spec, ctx), {"cf", {{"spec", spec.describe()}}});
    }
    if (name == "liouville") {
        auto base = m.integer("system.base", 10);
        auto terms = static_cast<int>(m.integer("system.terms", 4));
        return wrap(liouville_number(base, terms, ctx),
                    {"liouville", {{"base", std::to_string(base)}, {"terms", std::to_string(terms)}}});
    }
    if (name == "random") {
        return random_matrix(static_cast<std::uint64_t>(m.integer("system.seed", 0)),
                             static_cast<int>(m.integer("system.n")), static_cast<int>(m.integer("system.m")), ctx);
    }
    throw InvalidManifest("unknown system '" + name + "'");
}

namespace {

struct Runner {
    const ExperimentManifest& m;
    RunSettings settings;
    PrecisionContext ctx;
    Report rep;

    template <class F>
    auto phase(const std::string& name, F&& f) {
        auto t0 = std::chrono::steady_clock::now();
        auto done = [&] {
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            for (auto& [p, t] : rep.timing)
                if (p == name) {
                    t += secs;
                    return;
                }
            rep.timing.emplace_back(name, secs);
        };
        try {
            auto out = f();
            done();
            return out;
        } catch (const RunFailure&) {
            throw;
        } catch (const BudgetExceeded& e) {
            throw RunFailure(name, e.what(), 3);
        } catch (const PrecisionError& e) {
            throw RunFailure(name, e.what(), 3);
        } catch (const DegenerateForm& e) {
            throw RunFailure(name, e.what(), 3);
        } catch (const InvalidArgument& e) {
            throw RunFailure(name, e.what(), 4);
        } catch (const InvalidManifest& e) {
            throw RunFailure(name, e.what(), 4);
        } catch (const Error& e) {
            throw RunFailure(name, e.what(), 1);
        }
    }

    void verdict(std::string name, std::string anchor, bool pass, double margin, std::string detail = "") {
        rep.verdicts.push_back(make_verdict(std::move(name), std::move(anchor), pass, margin, std::move(detail)));
    }

    TailWindow window() const {
        TailWindow w;
        w.fraction = m.real("window.fraction", w.fraction);
        w.minimum = static_cast<std::size_t>(m.integer("window.minimum", static_cast<std::int64_t>(w.minimum)));
        return w;
    }

    std::optional<std::int64_t> exhaustive_bound() const {
        if (m.has("exhaustive_up_to")) return m.integer("exhaustive_up_to");
        return std::nullopt;
    }

    BestApproxSeq sequence(const LinearSystem& sys, const std::string& label) {
        return phase(label, [&] {
            std::int64_t y_max = m.integer("y_max");
            BuildOptions bo;
            bo.budget = settings.budget;
            std::string engine = m.text("engine", "auto");
            if (engine == "exhaustive") return build_sequence_exhaustive(sys, y_max, bo);
            return build_sequence_guided(sys, y_max, m.real("ladder_ratio", 2.0), exhaustive_bound(), bo);
        });
    }

    RealVector theta_sample(const LinearSystem& sys, std::uint64_t s) const {
        RealVector th;
        auto seed = static_cast<std::uint64_t>(m.integer("seed"));
        for (int k = 0; k < sys.n(); ++k)
            th.push_back(uniform_dyadic(seed, s * 16 + static_cast<std::uint64_t>(k), 64, sys.precision()));
        return th;
    }

    static std::string theta_text(const RealVector& th) {
        std::string out;
        for (std::size_t j = 0; j < th.size(); ++j) out += (j ? " " : "") + th[j].center().to_string(15);
        return out;
    }

    static std::string vec_text(const IntVector& v) {
        std::string out;
        for (std::size_t j = 0; j < v.size(); ++j) out += (j ? " " : "") + std::to_string(v[j]);
        return out;
    }

    void sequence_verdicts(const BestApproxSeq& seq) {
        SequenceCheck d = validate_dirichlet(seq, seq.n, seq.m);
        verdict("dirichlet", "Dirichlet bound M_i <= Y_{i+1}^(-n/m)", d.pass, d.min_margin,
                std::to_string(d.checked) + " checked, " + std::to_string(d.violations) + " violations");
        SequenceCheck g = validate_lemma1(seq, seq.n, seq.m);
        verdict("geometric_growth", "geometric growth Y_{i+3^(m+n)} >= 2 Y_{i+1}", g.pass,
                g.applicable ? g.min_margin : 0,
                g.applicable ? std::to_string(g.checked) + " checked, " + std::to_string(g.violations) + " violations"
                             : "vacuous: sequence shorter than the step");
        bool inv = sequence_invariants_hold(seq);
        verdict("record_invariants", "best approximation records: Y increasing, M decreasing", inv, 0,
                std::to_string(seq.size()) + " records");
    }

    static std::string estimate_row(const std::string& label, const ExponentEstimate& e) {
        return label + "," + exponent_kind_name(e.kind) + "," + fmt(e.value()) + "," + fmt(e.ratio_limsup_proxy) +
               "," + fmt(e.ratio_liminf_proxy) + "," + fmt(e.regression_slope) + "," +
               std::to_string(e.window_begin) + "," + std::to_string(e.window_end) + "," +
               std::to_string(e.truncation_bound) + "," + (e.flagged ? "1" : "0") + "\n";
    }
    static constexpr const char* kEstimateHeader =
        "exponent,kind,value,limsup_proxy,liminf_proxy,slope,window_begin,window_end,truncation,flagged\n";

    void expectation(const std::string& key, const std::string& label, double value) {
        if (!m.has(key)) return;
        double want = m.real(key), tol = m.real("expect.tolerance", 0.1);
        double margin = tol - std::abs(value - want);
        verdict("expected_" + label, "exponent estimate within tolerance of the expected value", margin >= 0, margin,
                "estimate " + fmt(value) + " expected " + fmt(want) + " +- " + fmt(tol));
    }

    void run_best_approx(const LinearSystem& sys) {
        BestApproxSeq seq = sequence(sys, "best approximations");
        rep.tables.emplace_back("best_approximations", seq.to_table());
        sequence_verdicts(seq);
    }

    std::pair<ExponentEstimate, ExponentEstimate> hom(const BestApproxSeq& seq, const std::string& label) {
        return phase(label, [&] { return hom_exponents(seq, window()); });
    }

    void run_hom_exponents(const LinearSystem& sys) {
        BestApproxSeq seq = sequence(sys, "best approximations");
        rep.tables.emplace_back("best_approximations", seq.to_table());
        sequence_verdicts(seq);
        auto [w, wh] = hom(seq, "homogeneous exponents");
        rep.tables.emplace_back("exponents",
                                std::string(kEstimateHeader) + estimate_row("w(tA)", w) + estimate_row("w_hat(tA)", wh));
        expectation("expect.w", "w", w.value());
        expectation("expect.w_hat", "w_hat", wh.value());
    }

    void run_inhom_exponents(const LinearSystem& sys) {
        std::optional<std::pair<ExponentEstimate, ExponentEstimate>> h;
        if (m.has("y_max")) {
            BestApproxSeq seq = sequence(sys, "best approximations");
            h = hom(seq, "homogeneous exponents");
        }
        InhomOptions io;
        io.budget = settings.budget;
        io.ladder_ratio = m.real("ladder_ratio", 2.0);
        if (m.has("inhom_exhaustive_up_to")) io.exhaustive_up_to = m.integer("inhom_exhaustive_up_to");
        std::ostringstream table;
        table << "sample,theta,records,w,w_hat,flagged,insufficient\n";
        std::vector<double> ws, whs;
        std::size_t violations = 0, usable = 0;
        double worst = INFINITY;
        auto samples = static_cast<std::uint64_t>(m.integer("samples"));
        for (std::uint64_t s = 0; s < samples; ++s) {
            RealVector th = theta_sample(sys, s);
            InhomRecordSeq rec = phase("inhomogeneous records", [&] {
                return build_inhom_records(sys, th, m.integer("x_max"), io);
            });
            if (s == 0) rep.tables.emplace_back("inhom_records_sample0", rec.to_table());
            table << s << ',' << theta_text(th) << ',' << rec.size() << ',';
            try {
                auto [w, wh] = inhom_exponents(rec, window());
                table << fmt(w.value()) << ',' << fmt(wh.value()) << ','
                      << (w.flagged || wh.flagged || rec.near_zero ? 1 : 0) << ",0\n";
                ws.push_back(w.value());
                whs.push_back(wh.value());
                ++usable;
                if (h) {
                    double mw = w.value() - 1.0 / h->second.value();
                    double mh = wh.value() - 1.0 / h->first.value();
                    worst = std::min({worst, mw, mh});
                    if (mw < -0.1 || mh < -0.1) ++violations;
                }
            } catch (const InsufficientData&) {
                table << ",,0,1\n";
            }
        }
        rep.tables.emplace_back("inhom_estimates", table.str());
        verdict("usable_samples", "enough records for a tail estimate", usable > 0, static_cast<double>(usable),
                std::to_string(usable) + " of " + std::to_string(samples));
        if (h)
            verdict("lower_bounds", "w(A,theta) >= 1/w_hat(tA) and w_hat(A,theta) >= 1/w(tA), slack 0.1",
                    violations == 0, usable ? worst : 0, std::to_string(violations) + " violating samples");
        if (!ws.empty()) {
            expectation("expect.w", "median_w", median(ws));
            expectation("expect.w_hat", "median_w_hat", median(whs));
        }
    }

    void run_generic(const LinearSystem& sys) {
        GenericOptions go;
        go.tolerance = m.real("tolerance", 0.1);
        go.window = window();
        go.ladder_ratio = m.real("ladder_ratio", 2.0);
        go.exhaustive_up_to = exhaustive_bound();
        if (m.has("inhom_exhaustive_up_to")) go.inhom_exhaustive_up_to = m.integer("inhom_exhaustive_up_to");
        go.budget = settings.budget;
        GenericReport g = phase("generic experiment", [&] {
            return generic_theorem_experiment(sys, static_cast<std::size_t>(m.integer("samples")), m.integer("x_max"),
                                              m.integer("y_max"), static_cast<std::uint64_t>(m.integer("seed")), go);
        });
        rep.tables.emplace_back("homogeneous", std::string(kEstimateHeader) + estimate_row("w(tA)", g.hom_w) +
                                                   estimate_row("w_hat(tA)", g.hom_w_hat));
        std::ostringstream t;
        t << "sample,theta,records,w,w_hat,flagged,insufficient\n";
        for (const auto& s : g.samples) {
            t << s.index << ',' << theta_text(s.theta) << ',' << s.records << ',';
            if (s.insufficient)
                t << ",,0,1\n";
            else
                t << fmt(s.w.value()) << ',' << fmt(s.w_hat.value()) << ',' << (s.flagged ? 1 : 0) << ",0\n";
        }
        rep.tables.emplace_back("samples", t.str());
        std::size_t usable = g.samples.size() - g.insufficient_samples;
        verdict("lower_bounds", "w(A,theta) >= 1/w_hat(tA) and w_hat(A,theta) >= 1/w(tA)",
                g.lower_bound_violations == 0 && usable > 0,
                g.lower_bound_violations ? -static_cast<double>(g.lower_bound_violations) : 0.0,
                std::to_string(g.lower_bound_violations) + " of " + std::to_string(usable) + " usable samples violate");
        if (usable == 0) return;
        double want = m.has("expect.w") ? m.real("expect.w") : g.predicted_w;
        double tol = m.real("expect.tolerance", go.tolerance);
        double margin = tol - std::abs(g.median_w - want);
        verdict("generic_equality", "median w(A,theta) equals 1/w_hat(tA) for generic theta", margin >= 0, margin,
                "median " + fmt(g.median_w) + " target " + fmt(want) + " predicted " + fmt(g.predicted_w));
        expectation("expect.w_hat", "median_w_hat", g.median_w_hat);
    }

    void run_transference(const LinearSystem& sys) {
        std::int64_t Y = m.integer("y_max");
        double X;
        if (m.has("x_max")) {
            X = static_cast<double>(m.integer("x_max"));
        } else {
            CertifiedReal mm = phase("hypothesis threshold", [&] { return min_M_up_to(sys, Y, settings.budget); });
            X = kappa(sys.m(), sys.n()).get_d() / mm.to_double() * (1 + 1e-9);
        }
        HypothesisReport h = phase("hypothesis", [&] { return check_hypothesis(sys, X, static_cast<double>(Y), settings.budget); });
        verdict("hypothesis", "M(y) >= kappa/X for 0 < |y| <= Y", h.holds, 0,
                "X " + fmt(X) + " Y " + std::to_string(Y) +
                    (h.violating ? " violated at y = " + vec_text(*h.violating) : ""));
        if (!h.holds) return;
        std::ostringstream t;
        t << "trial,theta,X,Y,kappa,x,achieved,bound,verified\n";
        std::size_t ok = 0;
        double worst = INFINITY;
        auto samples = static_cast<std::uint64_t>(m.integer("samples"));
        for (std::uint64_t s = 0; s < samples; ++s) {
            RealVector th = theta_sample(sys, s);
            TransferenceCertificate c =
                phase("transference search", [&] { return lemma3_solve(sys, th, X, static_cast<double>(Y), settings.budget); });
            bool v = verify_certificate(c, sys, th);
            ok += v;
            worst = std::min(worst, 1 - c.achieved.to_double() / c.bound.to_double());
            t << s << ',' << theta_text(th) << ',' << fmt(X) << ',' << Y << ',' << c.kappa.get_str() << ','
              << vec_text(c.solution_x) << ',' << c.achieved.to_string(15) << ',' << c.bound.to_string(15) << ','
              << (v ? 1 : 0) << '\n';
        }
        rep.tables.emplace_back("certificates", t.str());
        verdict("transference", "some |x| <= X has ||Ax+theta|| <= kappa/Y", ok == samples, worst,
                std::to_string(ok) + " of " + std::to_string(samples) + " certified");
    }

    void run_adversarial(const LinearSystem& sys) {
        BestApproxSeq seq = sequence(sys, "best approximations");
        PhiSubsequence phi = phase("phi extraction", [&] { return extract_phi(seq, sys.n()); });
        PhiCheck pc = verify_phi(phi.Y, phi.phi, sys.n());
        std::ostringstream pt;
        pt << "i,phi,Y,y\n";
        for (std::size_t i = 0; i < phi.size(); ++i)
            pt << (i + 1) << ',' << phi.phi[i] << ',' << phi.Y[phi.phi[i] - 1] << ',' << vec_text(phi.y[i]) << '\n';
        rep.tables.emplace_back("phi", pt.str());
        verdict("phi_growth", "Y_phi(i) >= (9n)^(1/2) Y_phi(i-1) and Y_phi(i-1)+1 >= Y_phi(i)/(9n)", pc.pass(),
                static_cast<double>(phi.size()), std::to_string(phi.size()) + " indices");
        AdversarialTarget t = phase("target construction", [&] { return build_theta(phi, sys.precision()); });
        bool rechecked = recheck_target(t, 2 * sys.precision());
        double min_d = INFINITY;
        std::ostringstream ct;
        ct << "i,phi,y,distance,radius\n";
        for (const auto& r : t.certificate) {
            min_d = std::min(min_d, r.distance.to_double());
            ct << r.i << ',' << r.phi << ',' << vec_text(r.y) << ',' << r.distance.center().to_string(15) << ','
               << r.distance.radius().to_string(3) << '\n';
        }
        rep.tables.emplace_back("target_certificate", ct.str());
        std::string theta;
        for (std::size_t j = 0; j < t.theta_exact.size(); ++j) theta += (j ? " " : "") + t.theta_exact[j].get_str();
        rep.tables.emplace_back("target", "theta,boxes,final_width\n" + theta + ',' +
                                              std::to_string(t.box_chain.size()) + ',' + t.final_width.get_str() + '\n');
        verdict("quarter_distance", "||y_phi(i) . theta|| >= 1/4 on every certified index, doubled precision",
                rechecked, min_d - 0.25, std::to_string(t.certified_indices()) + " indices");
        Prop1Report p = phase("explicit lower bound", [&] {
            return verify_prop1_bound(sys, t, m.integer("x_bound"), settings.budget);
        });
        verdict("explicit_lower_bound", "||Ax+theta|| >= |x|^(-m/n) / (72 n^2 (8m)^(m/n)) for 0 < |x| <= x_bound",
                p.holds(), p.min_slack - 1,
                p.verdict() + ", constant " + fmt(p.constant) + ", min slack " + fmt(p.min_slack));
    }

    void run_khintchine(const LinearSystem& sys) {
        LinearSystem tr = sys.transpose();
        BestApproxSeq s_t = sequence(sys, "best approximations");
        BestApproxSeq s_a = sequence(tr, "transposed best approximations");
        auto [w_tA, wh_tA] = hom(s_t, "homogeneous exponents");
        auto [w_A, wh_A] = hom(s_a, "transposed homogeneous exponents");
        rep.tables.emplace_back("exponents", std::string(kEstimateHeader) + estimate_row("w(A)", w_A) +
                                                 estimate_row("w_hat(A)", wh_A) + estimate_row("w(tA)", w_tA) +
                                                 estimate_row("w_hat(tA)", wh_tA));
        double tol = m.real("tolerance", 0.1);
        for (int side = 0; side < 2; ++side) {
            KhintchineAudit a = side == 0 ? khintchine_audit(sys.n(), sys.m(), w_A.value(), w_tA.value(),
                                                             wh_A.value(), wh_tA.value(), tol)
                                          : khintchine_audit(sys.m(), sys.n(), w_tA.value(), w_A.value(),
                                                             wh_tA.value(), wh_A.value(), tol);
            std::string who = side == 0 ? "A" : "tA";
            verdict("khintchine_w_" + who, "Khintchine transference for w(" + who + ")", a.w_pass, a.w_margin,
                    "rhs " + fmt(a.w_rhs));
            verdict("khintchine_w_hat_" + who, "Khintchine transference for w_hat(" + who + ")", a.hat_pass,
                    a.hat_margin, "rhs " + fmt(a.hat_rhs));
        }
    }
};

}  // namespace

Report run(const ExperimentManifest& manifest) {
    manifest.validate();
    RunSettings settings = settings_for(manifest);
    PrecisionContext ctx{settings.precision, static_cast<int>(manifest.integer("guard_bits", 16))};
    Runner r{manifest, settings, ctx, {}};
    r.rep.manifest_echo = manifest;
    r.rep.manifest_echo.set("effective.budget", std::to_string(settings.budget) + " (" + settings.budget_source + ")");
    r.rep.manifest_echo.set("effective.precision",
                            std::to_string(settings.precision) + " (" + settings.precision_source + ")");

    LinearSystem sys = r.phase("system", [&] {
        ctx.validate();
        return build_system(manifest, ctx);
    });
    r.rep.manifest_echo.set("effective.system", sys.provenance().to_text());
    const std::string& k = manifest.kind();
    if (k == "best_approx") r.run_best_approx(sys);
    if (k == "hom_exponents") r.run_hom_exponents(sys);
    if (k == "inhom_exponents") r.run_inhom_exponents(sys);
    if (k == "generic_theorem") r.run_generic(sys);
    if (k == "transference") r.run_transference(sys);
    if (k == "adversarial") r.run_adversarial(sys);
    if (k == "khintchine_audit") r.run_khintchine(sys);

    if (manifest.has("output_dir")) {
        std::string f = manifest.text("format", "text");
        std::string dir = manifest.text("output_dir");
        if (f == "csv" || f == "both") emit_report(r.rep, ReportFormat::csv, dir);
        if (f == "text" || f == "both") emit_report(r.rep, ReportFormat::structured_text, dir);
    }
    return r.rep;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << content;
    if (!out) throw IoError("write failed for " + p.string());
}

std::string verdicts_csv(const Report& r) {
    std::string out = "name,anchor,pass,margin,detail\n";
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    };
    for (const auto& v : r.verdicts)
        out += v.name + ',' + quote(v.anchor) + ',' + (v.pass ? "1" : "0") + ',' + fmt(v.margin) + ',' +
               quote(v.detail) + '\n';
    return out;
}

}  // namespace

std::vector<std::string> emit_report(const Report& report, ReportFormat format, const std::string& dir) {
    std::filesystem::path base(dir);
    std::error_code ec;
    std::filesystem::create_directories(base, ec);
    if (ec) throw IoError("cannot create " + base.string() + ": " + ec.message());
    std::vector<std::string> paths;
    if (format == ReportFormat::csv) {
        for (const auto& [name, csv] : report.tables) {
            auto p = base / (name + ".csv");
            write_file(p, csv);
            paths.push_back(p.string());
        }
        auto p = base / "verdicts.csv";
        write_file(p, verdicts_csv(report));
        paths.push_back(p.string());
    } else {
        auto p = base / "report.txt";
        write_file(p, report_to_text(report));
        paths.push_back(p.string());
    }
    return paths;
}

std::string report_to_text(const Report& r) {
    std::ostringstream out;
    out << "dlab-report 1\n[manifest]\n" << r.manifest_echo.to_text();
    out << "[verdicts]\n";
    for (const auto& v : r.verdicts)
        out << v.name << '\t' << v.anchor << '\t' << (v.pass ? "PASS" : "FAIL") << '\t' << fmt(v.margin) << '\t'
            << v.detail << '\n';
    for (const auto& [name, csv] : r.tables) {
        out << "[table " << name << "]\n" << csv;
        if (!csv.empty() && csv.back() != '\n') out << '\n';
    }
    out << "[timing]\n";
    for (const auto& [phase, secs] : r.timing) out << phase << " = " << fmt(secs) << '\n';
    out << "[end]\n";
    return out.str();
}

Report parse_report(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "dlab-report 1") throw InvalidManifest("not a dlab report");
    Report r;
    std::string section, manifest_text, table_name, table_text;
    bool ended = false;
    auto flush_table = [&] {
        if (!table_name.empty()) r.tables.emplace_back(table_name, table_text);
        table_name.clear();
        table_text.clear();
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '[' && line.back() == ']') {
            flush_table();
            section = line.substr(1, line.size() - 2);
            if (section.rfind("table ", 0) == 0) {
                table_name = section.substr(6);
                section = "table";
            }
            if (section == "end") ended = true;
            continue;
        }
        if (section == "manifest") {
            manifest_text += line + '\n';
        } else if (section == "verdicts") {
            auto parts = split(line, '\t');
            if (parts.size() != 5) throw InvalidManifest("malformed verdict line: " + line);
            auto margin = parse_real(parts[3]);
            bool inf = parts[3] == "inf" || parts[3] == "-inf";
            if (!margin && !inf) throw InvalidManifest("malformed verdict margin: " + parts[3]);
            double mv = margin ? *margin : (parts[3] == "inf" ? INFINITY : -INFINITY);
            if (parts[2] != "PASS" && parts[2] != "FAIL") throw InvalidManifest("malformed verdict flag: " + parts[2]);
            r.verdicts.push_back(Verdict{parts[0], parts[1], parts[2] == "PASS", mv, parts[4]});
        } else if (section == "table") {
            table_text += line + '\n';
        } else if (section == "timing") {
            auto eq = line.find('=');
            if (eq == std::string::npos) throw InvalidManifest("malformed timing line: " + line);
            r.timing.emplace_back(trim(line.substr(0, eq)), std::strtod(trim(line.substr(eq + 1)).c_str(), nullptr));
        }
    }
    flush_table();
    if (!ended) throw InvalidManifest("report is truncated");
    r.manifest_echo = ExperimentManifest::parse(manifest_text);
    return r;
}

VerifyResult verify_report(const Report& stored) {
    ExperimentManifest m = stored.manifest_echo;
    // pin the settings that were in force, and do not write files again
    auto number_of = [](const std::string& s) { return s.substr(0, s.find(' ')); };
    if (m.has("effective.budget")) m.set("budget", number_of(m.text("effective.budget")));
    if (m.has("effective.precision")) m.set("precision", number_of(m.text("effective.precision")));
    for (const char* k : {"effective.budget", "effective.precision", "effective.system", "output_dir"}) m.erase(k);
    Report again = run(m);
    VerifyResult v;
    v.all_pass = again.all_pass();
    if (again.verdicts.size() != stored.verdicts.size()) v.differences.push_back("verdict count differs");
    for (std::size_t i = 0; i < std::min(again.verdicts.size(), stored.verdicts.size()); ++i)
        if (!(again.verdicts[i] == stored.verdicts[i])) v.differences.push_back("verdict " + stored.verdicts[i].name);
    if (again.tables.size() != stored.tables.size()) v.differences.push_back("table count differs");
    for (std::size_t i = 0; i < std::min(again.tables.size(), stored.tables.size()); ++i)
        if (again.tables[i] != stored.tables[i]) v.differences.push_back("table " + stored.tables[i].first);
    v.reproduced = v.differences.empty();
    return v;
}

int exit_code_for(const Report& report) { return report.all_pass() ? 0 : 2; }

}  // namespace dioph
