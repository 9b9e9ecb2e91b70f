#include "wellpose/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wellpose/error.hpp"

namespace wellpose {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// Object reader that tracks the key path and rejects unknown keys.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) fail("", "expected an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        throw ValidationError(at(key) + ": " + what);
    }

    std::string at(const std::string& key) const
    {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key)
    {
        used_.insert(key);
        if (!j_.contains(key)) fail(key, "missing");
        return j_.at(key);
    }

    Reader object(const std::string& key) { return Reader(raw(key), at(key)); }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt)
    {
        if (!has(key)) {
            if (fallback) return *fallback;
            fail(key, "missing");
        }
        const json& v = raw(key);
        if (!v.is_number()) fail(key, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(key, "must be finite");
        return x;
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt)
    {
        if (!has(key)) {
            if (fallback) return *fallback;
            fail(key, "missing");
        }
        const json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "expected a non-negative integer");
        return v.get<std::size_t>();
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt)
    {
        if (!has(key)) {
            if (fallback) return *fallback;
            fail(key, "missing");
        }
        const json& v = raw(key);
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_array()) fail(key, "expected an array");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail(key, "expected an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) fail(it.key(), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

template <class F>
auto guarded(const std::string& path, F&& f)
{
    try {
        return f();
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        if (what.rfind(path, 0) == 0) throw;
        throw ValidationError(path + ": " + what);
    } catch (const DomainError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

PsiSpec read_psi(Reader r)
{
    const std::string f = r.text("family");
    PsiSpec psi;
    if (f == "identity") psi = PsiSpec::identity();
    else if (f == "one_minus_exp") {
        const double a = r.number("alpha");
        psi = guarded(r.at("alpha"), [&] { return PsiSpec::one_minus_exp(a); });
    } else if (f == "one_plus_log") psi = PsiSpec::one_plus_log();
    else if (f == "power_beta") {
        const double b = r.number("beta");
        psi = guarded(r.at("beta"), [&] { return PsiSpec::power_beta(b); });
    } else r.fail("family", "unknown psi family '" + f + "'");
    r.finish();
    return psi;
}

ojson write_psi(const PsiSpec& psi)
{
    switch (psi.family) {
    case PsiSpec::Family::Identity: return {{"family", "identity"}};
    case PsiSpec::Family::OneMinusExp: return {{"family", "one_minus_exp"}, {"alpha", psi.alpha}};
    case PsiSpec::Family::OnePlusLog: return {{"family", "one_plus_log"}};
    case PsiSpec::Family::PowerBeta: return {{"family", "power_beta"}, {"beta", psi.beta}};
    }
    return {};
}

ModulusSpec read_modulus(Reader r)
{
    const std::string f = r.text("family");
    ModulusSpec mu;
    if (f == "holder") {
        const double a = r.number("alpha");
        const double t0 = r.number("tau0", 1.0);
        mu = guarded(r.at(""), [&] { return ModulusSpec::holder(a, t0); });
    } else if (f == "psi_derived") {
        const PsiSpec psi = read_psi(r.object("psi"));
        mu = guarded(r.at("psi"), [&] { return ModulusSpec::psi_derived(psi); });
    } else if (f == "custom") {
        auto tau = r.numbers("tau");
        auto m = r.numbers("mu");
        mu = guarded(r.at(""), [&] { return ModulusSpec::custom(std::move(tau), std::move(m)); });
    } else r.fail("family", "unknown modulus family '" + f + "'");
    r.finish();
    return mu;
}

ojson write_modulus(const ModulusSpec& mu)
{
    switch (mu.family) {
    case ModulusSpec::Family::Holder: return {{"family", "holder"}, {"alpha", mu.alpha}, {"tau0", mu.tau0}};
    case ModulusSpec::Family::PsiDerived: return {{"family", "psi_derived"}, {"psi", write_psi(mu.psi)}};
    case ModulusSpec::Family::Custom: return {{"family", "custom"}, {"tau", mu.tau_samples}, {"mu", mu.mu_samples}};
    }
    return {};
}

BlowupSpec read_blowup(Reader r)
{
    const std::string f = r.text("family");
    BlowupSpec nu;
    if (f == "power") {
        const double p = r.number("p");
        nu = guarded(r.at("p"), [&] { return BlowupSpec::power(p); });
    } else if (f == "psi_derived") nu = BlowupSpec::psi_derived(read_psi(r.object("psi")));
    else if (f == "constant") nu = BlowupSpec::constant();
    else r.fail("family", "unknown blow-up family '" + f + "'");
    r.finish();
    return nu;
}

ojson write_blowup(const BlowupSpec& nu)
{
    switch (nu.family) {
    case BlowupSpec::Family::Power: return {{"family", "power"}, {"p", nu.p}};
    case BlowupSpec::Family::PsiDerived: return {{"family", "psi_derived"}, {"psi", write_psi(nu.psi)}};
    case BlowupSpec::Family::Constant: return {{"family", "constant"}};
    }
    return {};
}

EntryConfig read_entry(Reader r)
{
    EntryConfig e;
    const std::string kind = r.text("kind");
    if (kind == "constant") {
        e.kind = EntryConfig::Kind::Constant;
        e.c = r.number("c");
    } else if (kind == "linear") {
        e.kind = EntryConfig::Kind::Linear;
        e.c0 = r.number("c0");
        e.c1 = r.number("c1");
    } else if (kind == "holder_singular") {
        e.kind = EntryConfig::Kind::HolderSingular;
        e.mean = r.number("mean");
        e.amp = r.number("amp");
        e.q = r.number("q");
    } else if (kind == "psi_singular") {
        e.kind = EntryConfig::Kind::PsiSingular;
        e.mean = r.number("mean");
        e.amp = r.number("amp");
        e.k = r.number("k", 1.0);
        e.psi = read_psi(r.object("psi"));
    } else if (kind == "table") {
        e.kind = EntryConfig::Kind::Table;
        e.path = r.text("path");
    } else r.fail("kind", "unknown entry kind '" + kind + "'");
    r.finish();
    return e;
}

ojson write_entry(const EntryConfig& e)
{
    switch (e.kind) {
    case EntryConfig::Kind::Constant: return {{"kind", "constant"}, {"c", e.c}};
    case EntryConfig::Kind::Linear: return {{"kind", "linear"}, {"c0", e.c0}, {"c1", e.c1}};
    case EntryConfig::Kind::HolderSingular:
        return {{"kind", "holder_singular"}, {"mean", e.mean}, {"amp", e.amp}, {"q", e.q}};
    case EntryConfig::Kind::PsiSingular:
        return {{"kind", "psi_singular"}, {"mean", e.mean}, {"amp", e.amp}, {"k", e.k}, {"psi", write_psi(e.psi)}};
    case EntryConfig::Kind::Table: return {{"kind", "table"}, {"path", e.path}};
    }
    return {};
}

CertifyOptions read_certify(Reader r)
{
    CertifyOptions o;
    o.t_min = r.number("t_min", o.t_min);
    o.tau_min = r.number("tau_min", o.tau_min);
    o.points = r.count("points", o.points);
    r.finish();
    if (!(o.t_min > 0.0)) r.fail("t_min", "must be positive");
    if (!(o.tau_min > 0.0)) r.fail("tau_min", "must be positive");
    if (o.points < 2) r.fail("points", "must be at least 2");
    return o;
}

FieldConfig read_field(Reader r)
{
    FieldConfig f;
    const std::string family = r.text("family");
    auto& p = f.params;
    p.T = r.number("T", 1.0);
    if (!(p.T > 0.0)) r.fail("T", "must be positive");
    if (family == "constant") {
        f.family = FieldConfig::Family::Constant;
        p.c = r.number("c", 1.0);
    } else if (family == "holder_singular") {
        f.family = FieldConfig::Family::HolderSingular;
        p.mean = r.number("mean", 2.0);
        p.amp = r.number("amp", 1.0);
        p.alpha = r.number("alpha");
        p.p = r.number("p");
        if (!(p.alpha > 0.0 && p.alpha <= 1.0)) r.fail("alpha", "must lie in ]0, 1]");
        if (!(p.p > p.alpha)) r.fail("p", "must exceed alpha");
    } else if (family == "psi_singular") {
        f.family = FieldConfig::Family::PsiSingular;
        p.mean = r.number("mean", 2.0);
        p.amp = r.number("amp", 1.0);
        p.k = r.number("k", 1.0);
        p.psi = read_psi(r.object("psi"));
    } else if (family == "matrix" || family == "table") {
        f.family = FieldConfig::Family::Matrix;
        if (family == "table") {
            EntryConfig e;
            e.kind = EntryConfig::Kind::Table;
            e.path = r.text("path");
            f.entries.push_back(e);
        } else {
            f.n = r.count("n");
            if (f.n < 1) r.fail("n", "must be at least 1");
            const json& arr = r.raw("entries");
            if (!arr.is_array() || arr.size() != f.n * f.n)
                r.fail("entries", "expected an array of n*n = " + std::to_string(f.n * f.n) + " entries");
            for (std::size_t k = 0; k < arr.size(); ++k)
                f.entries.push_back(read_entry(Reader(arr[k], r.at("entries") + "[" + std::to_string(k) + "]")));
        }
        if (r.has("certificate")) {
            Reader c = r.object("certificate");
            FieldConfig::CertificateConfig cc;
            cc.mu = read_modulus(c.object("mu"));
            cc.nu = read_blowup(c.object("nu"));
            c.finish();
            f.certificate = cc;
        }
    } else r.fail("family", "unknown field family '" + family + "'");
    if (r.has("certify")) f.certify = read_certify(r.object("certify"));
    p.cert_t_min = f.certify.t_min;
    p.cert_tau_min = f.certify.tau_min;
    p.cert_points = f.certify.points;
    r.finish();
    return f;
}

ojson write_field(const FieldConfig& f)
{
    const auto& p = f.params;
    ojson j;
    switch (f.family) {
    case FieldConfig::Family::Constant: j = {{"family", "constant"}, {"T", p.T}, {"c", p.c}}; break;
    case FieldConfig::Family::HolderSingular:
        j = {{"family", "holder_singular"}, {"T", p.T},     {"mean", p.mean},
             {"amp", p.amp},                {"alpha", p.alpha}, {"p", p.p}};
        break;
    case FieldConfig::Family::PsiSingular:
        j = {{"family", "psi_singular"}, {"T", p.T}, {"mean", p.mean}, {"amp", p.amp}, {"k", p.k}, {"psi", write_psi(p.psi)}};
        break;
    case FieldConfig::Family::Matrix: {
        j = {{"family", "matrix"}, {"T", p.T}, {"n", f.n}};
        ojson arr = ojson::array();
        for (const auto& e : f.entries) arr.push_back(write_entry(e));
        j["entries"] = arr;
        if (f.certificate) j["certificate"] = {{"mu", write_modulus(f.certificate->mu)}, {"nu", write_blowup(f.certificate->nu)}};
        break;
    }
    }
    j["certify"] = {{"t_min", f.certify.t_min}, {"tau_min", f.certify.tau_min}, {"points", f.certify.points}};
    return j;
}

ScalarFunction build_entry(const EntryConfig& e, double T, const std::string& base_dir)
{
    switch (e.kind) {
    case EntryConfig::Kind::Constant: return ScalarFunction::constant(e.c);
    case EntryConfig::Kind::Linear: return ScalarFunction::linear(e.c0, e.c1);
    case EntryConfig::Kind::HolderSingular: return ScalarFunction::holder_singular(e.mean, e.amp, e.q);
    case EntryConfig::Kind::PsiSingular: return ScalarFunction::psi_singular(e.mean, e.amp, e.k, e.psi, T);
    case EntryConfig::Kind::Table: {
        std::filesystem::path path(e.path);
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        return load_table(path.string());
    }
    }
    return ScalarFunction::constant(e.c);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("<root>: invalid JSON: ") + e.what());
    }
    ExperimentConfig c;
    c.base_dir = base_dir;
    Reader r(root, "");
    c.name = r.text("name", c.name);
    c.field = read_field(r.object("field"));

    if (r.has("kernel")) {
        Reader k = r.object("kernel");
        const std::string profile = k.text("profile", "bump");
        if (profile == "bump") c.kernel.profile = MollifierKernel::Profile::Bump;
        else if (profile == "polynomial") {
            c.kernel.profile = MollifierKernel::Profile::Polynomial;
            c.kernel.degree = static_cast<int>(k.count("degree"));
        } else k.fail("profile", "unknown kernel profile '" + profile + "'");
        k.finish();
    }
    {
        Reader g = r.object("xi_grid");
        c.xi_grid.min = g.number("min");
        c.xi_grid.max = g.number("max");
        c.xi_grid.count = g.count("count");
        g.finish();
    }
    {
        Reader d = r.object("data");
        const std::string profile = d.text("profile");
        if (profile == "constant") c.data.profile = DataConfig::Profile::Constant;
        else if (profile == "gevrey") {
            c.data.profile = DataConfig::Profile::Gevrey;
            c.data.sigma = d.number("sigma");
            c.data.delta = d.number("delta", 1.0);
        } else if (profile == "gaussian") {
            c.data.profile = DataConfig::Profile::Gaussian;
            c.data.width = d.number("width", 1.0);
        } else d.fail("profile", "unknown data profile '" + profile + "'");
        d.finish();
    }
    {
        Reader m = r.object("model");
        const std::string kind = m.text("kind");
        if (kind == "gevrey") {
            c.model.kind = ExponentModel::Kind::Gevrey;
            c.model.p = m.number("p");
            c.model.alpha = m.number("alpha");
        } else if (kind == "log_psi") {
            c.model.kind = ExponentModel::Kind::LogPsi;
            c.model.psi = read_psi(m.object("psi"));
        } else m.fail("kind", "unknown model kind '" + kind + "'");
        m.finish();
    }
    if (r.has("solver")) {
        Reader s = r.object("solver");
        c.solver.rtol = s.number("rtol", c.solver.rtol);
        c.solver.atol = s.number("atol", c.solver.atol);
        c.solver.t_start = s.number("t_start", c.solver.t_start);
        c.solver.samples = s.count("samples", c.solver.samples);
        c.solver.step_factor = s.number("step_factor", c.solver.step_factor);
        s.finish();
    }
    if (r.has("quadrature")) {
        Reader q = r.object("quadrature");
        c.quadrature.tol = q.number("tol", c.quadrature.tol);
        c.quadrature.mollify_tol = q.number("mollify_tol", c.quadrature.mollify_tol);
        q.finish();
    }
    if (r.has("approximation")) {
        Reader p = r.object("approximation");
        c.approximation.eps_min = p.number("eps_min", c.approximation.eps_min);
        c.approximation.eps_max = p.number("eps_max", c.approximation.eps_max);
        c.approximation.eps_count = p.count("eps_count", c.approximation.eps_count);
        c.approximation.t_min = p.number("t_min", c.approximation.t_min);
        c.approximation.t_count = p.count("t_count", c.approximation.t_count);
        p.finish();
    }
    if (r.has("fit")) {
        Reader f = r.object("fit");
        c.fit.slack = f.number("slack", c.fit.slack);
        c.fit.min_decades = f.number("min_decades", c.fit.min_decades);
        c.fit.min_points = f.count("min_points", c.fit.min_points);
        c.fit.floor = f.number("floor", c.fit.floor);
        f.finish();
    }
    // default decay check follows the data profile
    const bool gevrey_data = c.data.profile == DataConfig::Profile::Gevrey;
    c.decay.kind = gevrey_data ? DecayOptions::Kind::Gevrey : DecayOptions::Kind::Polynomial;
    if (r.has("decay")) {
        Reader d = r.object("decay");
        const std::string kind = d.text("kind", gevrey_data ? "gevrey" : "polynomial");
        if (kind == "gevrey") c.decay.kind = DecayOptions::Kind::Gevrey;
        else if (kind == "polynomial") c.decay.kind = DecayOptions::Kind::Polynomial;
        else d.fail("kind", "expected gevrey or polynomial");
        c.decay.min_xi = d.number("min_xi", c.decay.min_xi);
        if (d.has("zetas")) c.decay.zetas = d.numbers("zetas");
        d.finish();
    }
    if (r.has("output")) {
        Reader o = r.object("output");
        c.output.dir = o.text("dir", c.output.dir);
        const std::string fmt = o.text("format", "csv");
        c.output.format = guarded(o.at("format"), [&] { return parse_format(fmt); });
        o.finish();
    }
    c.workers = r.count("workers", c.workers);
    r.finish();
    validate_config(c);
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto parent = std::filesystem::path(path).parent_path();
    return parse_config(ss.str(), parent.empty() ? "." : parent.string());
}

std::string serialize_config(const ExperimentConfig& c)
{
    ojson j;
    j["name"] = c.name;
    j["field"] = write_field(c.field);
    j["kernel"] = c.kernel.profile == MollifierKernel::Profile::Bump
                      ? ojson{{"profile", "bump"}}
                      : ojson{{"profile", "polynomial"}, {"degree", c.kernel.degree}};
    j["xi_grid"] = {{"min", c.xi_grid.min}, {"max", c.xi_grid.max}, {"count", c.xi_grid.count}};
    switch (c.data.profile) {
    case DataConfig::Profile::Constant: j["data"] = {{"profile", "constant"}}; break;
    case DataConfig::Profile::Gevrey: j["data"] = {{"profile", "gevrey"}, {"sigma", c.data.sigma}, {"delta", c.data.delta}}; break;
    case DataConfig::Profile::Gaussian: j["data"] = {{"profile", "gaussian"}, {"width", c.data.width}}; break;
    }
    if (c.model.kind == ExponentModel::Kind::Gevrey)
        j["model"] = {{"kind", "gevrey"}, {"p", c.model.p}, {"alpha", c.model.alpha}};
    else
        j["model"] = {{"kind", "log_psi"}, {"psi", write_psi(c.model.psi)}};
    j["solver"] = {{"rtol", c.solver.rtol},       {"atol", c.solver.atol},
                   {"t_start", c.solver.t_start}, {"samples", c.solver.samples},
                   {"step_factor", c.solver.step_factor}};
    j["quadrature"] = {{"tol", c.quadrature.tol}, {"mollify_tol", c.quadrature.mollify_tol}};
    j["approximation"] = {{"eps_min", c.approximation.eps_min}, {"eps_max", c.approximation.eps_max}, {"eps_count", c.approximation.eps_count},
                   {"t_min", c.approximation.t_min},     {"t_count", c.approximation.t_count}};
    j["fit"] = {{"slack", c.fit.slack}, {"min_decades", c.fit.min_decades}, {"min_points", c.fit.min_points},
                {"floor", c.fit.floor}};
    j["decay"] = {{"kind", c.decay.kind == DecayOptions::Kind::Gevrey ? "gevrey" : "polynomial"},
                  {"min_xi", c.decay.min_xi},
                  {"zetas", c.decay.zetas}};
    j["output"] = {{"dir", c.output.dir}, {"format", c.output.format == TableFormat::Csv ? "csv" : "jsonl"}};
    j["workers"] = c.workers;
    return j.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& c)
{
    auto fail = [](const std::string& key, const std::string& what) { throw ValidationError(key + ": " + what); };
    const double T = c.field.params.T;
    if (c.field.family == FieldConfig::Family::Matrix && c.field.entries.size() != c.field.n * c.field.n)
        fail("field.entries", "expected n*n entries");
    if (c.kernel.profile == MollifierKernel::Profile::Polynomial && c.kernel.degree < 1)
        fail("kernel.degree", "must be at least 1");
    if (!(c.xi_grid.min >= 1.0)) fail("xi_grid.min", "must be >= 1");
    if (!(c.xi_grid.max > c.xi_grid.min)) fail("xi_grid.max", "must exceed xi_grid.min");
    if (c.xi_grid.count < 8) fail("xi_grid.count", "must be at least 8");
    if (c.data.profile == DataConfig::Profile::Gevrey) {
        if (!(c.data.sigma >= 1.0)) fail("data.sigma", "must be >= 1");
        if (!(c.data.delta > 0.0)) fail("data.delta", "must be positive");
    }
    if (c.data.profile == DataConfig::Profile::Gaussian && !(c.data.width > 0.0)) fail("data.width", "must be positive");
    if (c.model.kind == ExponentModel::Kind::Gevrey) {
        if (!(c.model.alpha > 0.0 && c.model.alpha <= 1.0)) fail("model.alpha", "must lie in ]0, 1]");
        if (!(c.model.p > c.model.alpha)) fail("model.p", "must exceed model.alpha");
    } else {
        // tau1 <= min(T, e^-1); the certified tau0 can only raise the threshold further
        const double threshold = 1.0 / std::min(T, std::exp(-1.0));
        if (c.xi_grid.min < threshold * (1.0 - 1e-12))
            fail("xi_grid.min", "must be >= 1/tau1 = " + std::to_string(threshold) + " for the log_psi model");
    }
    if (!(c.solver.rtol > 0.0)) fail("solver.rtol", "must be positive");
    if (!(c.solver.atol > 0.0)) fail("solver.atol", "must be positive");
    if (!(c.solver.t_start >= 0.0 && c.solver.t_start < T)) fail("solver.t_start", "must lie in [0, T[");
    if (c.solver.samples < 2) fail("solver.samples", "must be at least 2");
    if (!(c.solver.step_factor > 0.0)) fail("solver.step_factor", "must be positive");
    if (!(c.quadrature.tol > 0.0)) fail("quadrature.tol", "must be positive");
    if (!(c.quadrature.mollify_tol > 0.0)) fail("quadrature.mollify_tol", "must be positive");
    if (!(c.approximation.eps_min > 0.0)) fail("approximation.eps_min", "must be positive");
    if (!(c.approximation.eps_max >= c.approximation.eps_min)) fail("approximation.eps_max", "must be >= eps_min");
    if (c.approximation.eps_count < 1) fail("approximation.eps_count", "must be at least 1");
    if (!(c.approximation.t_min > 0.0 && c.approximation.t_min <= T)) fail("approximation.t_min", "must lie in ]0, T]");
    if (c.approximation.t_count < 1) fail("approximation.t_count", "must be at least 1");
    if (!(c.fit.slack >= 0.0)) fail("fit.slack", "must be non-negative");
    if (!(c.fit.min_decades > 0.0)) fail("fit.min_decades", "must be positive");
    if (c.fit.min_points < 2) fail("fit.min_points", "must be at least 2");
    if (!(c.fit.floor >= 0.0)) fail("fit.floor", "must be non-negative");
    if (!(c.decay.min_xi >= 1.0)) fail("decay.min_xi", "must be >= 1");
    if (c.decay.kind == DecayOptions::Kind::Polynomial) {
        if (c.decay.zetas.empty()) fail("decay.zetas", "must not be empty");
        for (double z : c.decay.zetas)
            if (!(z > 0.0)) fail("decay.zetas", "must be positive");
    }
    if (c.decay.kind == DecayOptions::Kind::Gevrey && c.data.profile != DataConfig::Profile::Gevrey)
        fail("decay.kind", "gevrey decay needs a gevrey data profile");
    if (c.output.dir.empty()) fail("output.dir", "must not be empty");
    if (c.workers < 1) fail("workers", "must be at least 1");
}

CoefficientField build_field(const ExperimentConfig& c)
{
    const FieldConfig& f = c.field;
    return guarded("field", [&] {
        switch (f.family) {
        case FieldConfig::Family::Constant: return make_test_coefficient(TestFamily::Constant, f.params);
        case FieldConfig::Family::HolderSingular: return make_test_coefficient(TestFamily::HolderSingular, f.params);
        case FieldConfig::Family::PsiSingular: return make_test_coefficient(TestFamily::PsiSingular, f.params);
        case FieldConfig::Family::Matrix: break;
        }
        std::vector<ScalarFunction> entries;
        for (const auto& e : f.entries) entries.push_back(build_entry(e, f.params.T, c.base_dir));
        CoefficientField field = f.n == 1 ? CoefficientField::scalar(entries.front(), f.params.T)
                                          : CoefficientField::matrix(f.n, std::move(entries), f.params.T);
        if (f.certificate) field.certificate = certify(field, f.certificate->mu, f.certificate->nu, f.certify);
        return field;
    });
}

MollifierKernel build_kernel(const KernelConfig& k)
{
    return k.profile == MollifierKernel::Profile::Bump ? MollifierKernel::bump() : MollifierKernel::polynomial(k.degree);
}

ExponentModel build_model(const ExperimentConfig& c, const CoefficientField& field)
{
    if (c.model.kind == ExponentModel::Kind::Gevrey) return ExponentModel::gevrey(c.model.p, c.model.alpha, 1.0);
    return ExponentModel::log_psi(c.model.psi, 1.0, tau_one(field));
}

double log_data_amplitude(const DataConfig& d, double xi)
{
    switch (d.profile) {
    case DataConfig::Profile::Constant: return 0.0;
    case DataConfig::Profile::Gevrey: return -d.delta * std::pow(xi, 1.0 / d.sigma);
    case DataConfig::Profile::Gaussian: return -0.5 * xi * xi / (d.width * d.width);
    }
    return 0.0;
}

}  // namespace wellpose
