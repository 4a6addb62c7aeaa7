#include <mgqda/model_io.hpp>

#include <mgqda/error.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mgqda {

namespace {

using nlohmann::json;

std::string real(double v)
{
    return fmt::format("{:.17g}", v);
}

std::string quoted(const std::string& s)
{
    return json(s).dump();
}

template <class Range, class Fn>
std::string array_of(const Range& items, Fn&& fn)
{
    std::string out = "[";
    bool first = true;
    for (const auto& item : items) {
        if (!first) out += ", ";
        out += fn(item);
        first = false;
    }
    out += "]";
    return out;
}

std::string vector_json(const Vector& v)
{
    std::string out = "[";
    for (Index k = 0; k < v.size(); ++k) {
        if (k) out += ", ";
        out += real(v(k));
    }
    return out + "]";
}

std::string lower_triangle_json(const SymMatrix& m)
{
    std::string out = "[";
    bool first = true;
    for (Index i = 0; i < m.dim(); ++i) {
        for (Index j = 0; j <= i; ++j) {
            if (!first) out += ", ";
            out += real(m(i, j));
            first = false;
        }
    }
    return out + "]";
}

Vector read_vector(const json& j, Index expected, const char* what)
{
    if (!j.is_array() || static_cast<Index>(j.size()) != expected) {
        throw InvalidInput(std::string("model: field '") + what + "' has the wrong length");
    }
    Vector v(expected);
    for (Index k = 0; k < expected; ++k) v(k) = j[static_cast<std::size_t>(k)].get<double>();
    return v;
}

const json& field(const json& doc, const char* name)
{
    auto it = doc.find(name);
    if (it == doc.end()) throw InvalidInput(std::string("model: missing field '") + name + "'");
    return *it;
}

} // namespace

std::string model_to_json(const FittedModel& model)
{
    const auto& m = model.parts();
    const auto str = [](const std::string& s) { return quoted(s); };
    const auto idx = [](int i) { return std::to_string(i); };

    std::string omega = "[";
    for (Index i = 0; i < m.omega_s.rows(); ++i) {
        for (Index j = 0; j < m.omega_s.cols(); ++j) {
            if (i || j) omega += ", ";
            omega += real(m.omega_s(i, j));
        }
    }
    omega += "]";

    std::string out = "{\n";
    out += fmt::format("  \"format_version\": {},\n", kModelFormatVersion);
    out += fmt::format("  \"p_full\": {},\n", m.p_full);
    out += fmt::format("  \"g_count\": {},\n", m.g_count);
    out += "  \"labels\": " + array_of(m.labels, str) + ",\n";
    out += "  \"priors\": " + vector_json(m.priors) + ",\n";
    out += "  \"support\": " + array_of(m.support, idx) + ",\n";
    out += "  \"group_supports\": "
           + array_of(m.group_supports, [&](const std::vector<int>& s) { return array_of(s, idx); }) + ",\n";
    out += "  \"omega_s\": " + omega + ",\n";
    out += "  \"means_s\": " + array_of(m.means_s, vector_json) + ",\n";
    out += "  \"cov_s\": " + array_of(m.cov_s, lower_triangle_json) + ",\n";
    out += "  \"alpha\": " + real(m.alpha) + ",\n";
    out += "  \"lambda\": " + real(m.lambda) + ",\n";
    out += fmt::format("  \"cov_mode\": \"{}\"", to_string(m.cov_mode));
    if (!m.feature_names.empty()) {
        out += ",\n  \"feature_names\": " + array_of(m.feature_names, str);
    }
    out += "\n}\n";
    return out;
}

FittedModel model_from_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("model: invalid JSON: ") + e.what());
    }
    try {
        if (field(doc, "format_version").get<int>() != kModelFormatVersion) {
            throw InvalidInput("model: unsupported format_version");
        }
        ModelParts m;
        m.p_full = field(doc, "p_full").get<Index>();
        m.g_count = field(doc, "g_count").get<int>();
        if (m.g_count < 2) throw InvalidInput("model: g_count must be >= 2");
        const auto g = static_cast<std::size_t>(m.g_count);
        const Index width = static_cast<Index>(m.g_count) * (m.g_count - 1);

        m.labels = field(doc, "labels").get<std::vector<std::string>>();
        m.priors = read_vector(field(doc, "priors"), m.g_count, "priors");
        m.support = field(doc, "support").get<std::vector<int>>();
        m.group_supports = field(doc, "group_supports").get<std::vector<std::vector<int>>>();
        const auto s = static_cast<Index>(m.support.size());

        const Vector flat = read_vector(field(doc, "omega_s"), s * width, "omega_s");
        m.omega_s.resize(s, width);
        for (Index i = 0; i < s; ++i) {
            for (Index j = 0; j < width; ++j) m.omega_s(i, j) = flat(i * width + j);
        }

        const auto& means = field(doc, "means_s");
        const auto& covs = field(doc, "cov_s");
        if (!means.is_array() || means.size() != g || !covs.is_array() || covs.size() != g) {
            throw InvalidInput("model: means_s and cov_s need one entry per group");
        }
        for (std::size_t k = 0; k < g; ++k) {
            m.means_s.push_back(read_vector(means[k], s, "means_s"));
            const Vector tri = read_vector(covs[k], s * (s + 1) / 2, "cov_s");
            Matrix cov(s, s);
            Index t = 0;
            for (Index i = 0; i < s; ++i) {
                for (Index j = 0; j <= i; ++j) cov(i, j) = tri(t++);
            }
            m.cov_s.emplace_back(std::move(cov));
        }
        m.alpha = field(doc, "alpha").get<double>();
        m.lambda = field(doc, "lambda").get<double>();
        m.cov_mode = cov_mode_from_string(field(doc, "cov_mode").get<std::string>());
        if (auto it = doc.find("feature_names"); it != doc.end()) {
            m.feature_names = it->get<std::vector<std::string>>();
        }
        return FittedModel(std::move(m));
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("model: ") + e.what());
    }
}

void save_model(const FittedModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write model file '" + path.string() + "'");
    out << model_to_json(model);
    if (!out) throw InvalidInput("failed writing model file '" + path.string() + "'");
}

FittedModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read model file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

} // namespace mgqda
