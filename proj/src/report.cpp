#include "kcoll/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace kcoll {

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    return out;
}

std::string optional_field(const std::optional<double>& v)
{
    return v ? format_double(*v) : "";
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(const std::string& text)
{
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        require(!item.empty(), "empty list item in '" + text + "'");
        items.push_back(item);
    }
    require(!items.empty(), "empty list");
    return items;
}

double to_real(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("not a number: '" + s + "'");
    }
    require(used == s.size(), "not a number: '" + s + "'");
    return v;
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += ch;
        }
    }
    return out;
}

} // namespace

void write_records_csv(const std::filesystem::path& path, const std::vector<ConvergenceRecord>& records)
{
    std::ofstream out = open_output(path);
    out << "method,pde,tau,eps,gamma,NX,NY,NZ,hX,rel_l2,cond,kappaW,truncated,seed,wall_ms\n";
    for (const auto& r : records) {
        out << r.method << ',' << r.pde << ',' << r.tau << ',' << format_double(r.eps) << ','
            << format_double(r.gamma) << ',' << r.n_x << ',' << r.n_y << ',' << r.n_z << ',' << format_double(r.h_x)
            << ',' << format_double(r.ok() ? r.rel_l2 : std::numeric_limits<double>::quiet_NaN()) << ','
            << optional_field(r.cond) << ',' << optional_field(r.kappa_w) << ',' << (r.truncated ? "true" : "false")
            << ',' << r.seed << ',' << format_double(r.wall_ms) << '\n';
    }
}

std::vector<RateRow> fit_rates(const std::vector<ConvergenceRecord>& records)
{
    std::map<std::tuple<std::string, std::string, int, double>, std::vector<ConvergenceRecord>> groups;
    std::vector<std::tuple<std::string, std::string, int, double>> order;
    for (const auto& r : records) {
        const auto key = std::make_tuple(r.method, r.pde, r.tau, r.gamma);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) {
            order.push_back(key);
        }
        it->second.push_back(r);
    }
    std::vector<RateRow> rows;
    for (const auto& key : order) {
        const auto& group = groups.at(key);
        RateRow row{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), {}, false};
        try {
            row.fit = fit_rate(group);
            row.flagged = 2 * row.fit.points_excluded > static_cast<int>(group.size());
        } catch (const InvalidArgument&) {
            row.fit.slope = std::numeric_limits<double>::quiet_NaN();
            row.fit.intercept = std::numeric_limits<double>::quiet_NaN();
            row.fit.r_squared = std::numeric_limits<double>::quiet_NaN();
            row.fit.points_excluded = static_cast<int>(group.size());
            row.flagged = true;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_rates_csv(const std::filesystem::path& path, const std::vector<RateRow>& rates)
{
    std::ofstream out = open_output(path);
    out << "method,pde,tau,gamma,slope,intercept,r_squared,points_used,points_excluded,flagged\n";
    for (const auto& r : rates) {
        out << r.method << ',' << r.pde << ',' << r.tau << ',' << format_double(r.gamma) << ','
            << format_double(r.fit.slope) << ',' << format_double(r.fit.intercept) << ','
            << format_double(r.fit.r_squared) << ',' << r.fit.points_used << ',' << r.fit.points_excluded << ','
            << (r.flagged ? "true" : "false") << '\n';
    }
}

std::string loglog_svg(const std::vector<ConvergenceRecord>& records, const std::string& title, int tau)
{
    constexpr double width = 720.0;
    constexpr double height = 520.0;
    constexpr double left = 80.0;
    constexpr double right = 170.0;
    constexpr double top = 40.0;
    constexpr double bottom = 60.0;

    std::map<std::pair<std::string, double>, std::vector<std::pair<double, double>>> curves;
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double ymin = xmin;
    double ymax = -xmin;
    for (const auto& r : records) {
        if (!r.ok() || !(r.rel_l2 > 0.0) || !std::isfinite(r.rel_l2) || !(r.h_x > 0.0)) {
            continue;
        }
        const double lx = std::log10(r.h_x);
        const double ly = std::log10(r.rel_l2);
        curves[{r.method, r.gamma}].emplace_back(lx, ly);
        xmin = std::min(xmin, lx);
        xmax = std::max(xmax, lx);
        ymin = std::min(ymin, ly);
        ymax = std::max(ymax, ly);
    }

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << xml_escape(title) << "</text>\n";
    if (curves.empty()) {
        svg << "<text x=\"" << width / 2 << "\" y=\"" << height / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\">no data</text>\n</svg>\n";
        return svg.str();
    }
    xmin = std::floor(xmin * 10.0) / 10.0 - 0.05;
    xmax = std::ceil(xmax * 10.0) / 10.0 + 0.05;
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax - ymin < 1.0) {
        ymax = ymin + 1.0;
    }
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    const auto sx = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * pw; };
    const auto sy = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * ph; };

    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e) {
        svg << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << sy(e) << "\" y2=\"" << sy(e)
            << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << left - 8 << "\" y=\"" << sy(e) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e << "</text>\n";
    }
    for (int t = static_cast<int>(std::ceil(xmin * 10.0)); t <= static_cast<int>(std::floor(xmax * 10.0)); ++t) {
        const double lx = t / 10.0;
        char label[32];
        std::snprintf(label, sizeof label, "%.3g", std::pow(10.0, lx));
        svg << "<line x1=\"" << sx(lx) << "\" x2=\"" << sx(lx) << "\" y1=\"" << top + ph << "\" y2=\"" << top + ph + 5
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << sx(lx) << "\" y=\"" << top + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
    }
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">fill distance h_X</text>\n"
        << "<text transform=\"translate(20," << top + ph / 2
        << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << "relative l2 error</text>\n";

    const std::map<std::string, std::string> palette{
        {"vls-tp", "#1f77b4"}, {"wls-id", "#d62728"}, {"wls-rd", "#2ca02c"}};
    std::set<double> gammas;
    for (const auto& [key, pts] : curves) {
        gammas.insert(key.second);
    }
    const std::array<const char*, 4> dashes{"", "6,3", "2,2", "8,3,2,3"};
    double legend_y = top + 10.0;
    for (auto& [key, pts] : curves) {
        std::sort(pts.begin(), pts.end());
        const auto it = palette.find(key.first);
        const std::string color = it == palette.end() ? "#555" : it->second;
        const auto gi = static_cast<std::size_t>(std::distance(gammas.begin(), gammas.find(key.second)));
        const char* dash = dashes[gi % dashes.size()];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (*dash != '\0') {
            svg << " stroke-dasharray=\"" << dash << "\"";
        }
        svg << " points=\"";
        for (const auto& [lx, ly] : pts) {
            svg << sx(lx) << ',' << sy(ly) << ' ';
        }
        svg << "\"/>\n";
        for (const auto& [lx, ly] : pts) {
            svg << "<circle cx=\"" << sx(lx) << "\" cy=\"" << sy(ly) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
        svg << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 36 << "\" y1=\"" << legend_y
            << "\" y2=\"" << legend_y << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (*dash != '\0') {
            svg << " stroke-dasharray=\"" << dash << "\"";
        }
        svg << "/>\n<text x=\"" << left + pw + 42 << "\" y=\"" << legend_y + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(key.first)
            << " g=" << format_double(key.second) << "</text>\n";
        legend_y += 16.0;
    }

    // slope-tau guide anchored at the coarsest point of the lowest curve
    double anchor_x = -std::numeric_limits<double>::infinity();
    double anchor_y = std::numeric_limits<double>::infinity();
    for (const auto& [key, pts] : curves) {
        const auto& p = pts.back();
        if (p.first > anchor_x || (p.first == anchor_x && p.second < anchor_y)) {
            anchor_x = p.first;
            anchor_y = p.second;
        }
    }
    double x_start = xmin + 0.05;
    double y_start = anchor_y + tau * (x_start - anchor_x);
    if (y_start < ymin) {
        x_start = anchor_x + (ymin - anchor_y) / tau;
        y_start = ymin;
    }
    svg << "<line x1=\"" << sx(x_start) << "\" y1=\"" << sy(y_start) << "\" x2=\"" << sx(anchor_x) << "\" y2=\""
        << sy(anchor_y) << "\" stroke=\"black\" stroke-dasharray=\"4,4\"/>\n"
        << "<text x=\"" << left + pw + 12 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">- - slope " << tau << "</text>\n"
        << "</svg>\n";
    return svg.str();
}

void emit_outputs(const std::vector<ConvergenceRecord>& records, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_records_csv(dir / "records.csv", records);
    write_rates_csv(dir / "rates.csv", fit_rates(records));
    std::map<std::pair<std::string, int>, std::vector<ConvergenceRecord>> plots;
    for (const auto& r : records) {
        plots[{r.pde, r.tau}].push_back(r);
    }
    for (const auto& [key, group] : plots) {
        const std::string name = "loglog_pde" + key.first + "_tau" + std::to_string(key.second) + ".svg";
        std::ofstream out = open_output(dir / name);
        out << loglog_svg(group, "pde " + key.first + ", tau = " + std::to_string(key.second), key.second);
    }
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot read config file " + path.string());
    }
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        require(eq != std::string::npos,
                path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        require(!key.empty() && !value.empty(), path.string() + ":" + std::to_string(lineno) + ": empty key or value");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    for (double v : parse_real_list(text)) {
        require(v == std::round(v), "expected integers in '" + text + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::vector<double> parse_real_list(const std::string& text)
{
    const std::string t = trim(text);
    if (t.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(t);
        std::string item;
        while (std::getline(ss, item, ':')) {
            parts.push_back(trim(item));
        }
        require(parts.size() == 3, "range must be start:step:stop, got '" + text + "'");
        const double start = to_real(parts[0]);
        const double step = to_real(parts[1]);
        const double stop = to_real(parts[2]);
        require(step > 0.0 && stop >= start, "range must be increasing: '" + text + "'");
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        require(count <= 100000, "range too long: '" + text + "'");
        std::vector<double> out;
        for (long i = 0; i < count; ++i) {
            out.push_back(start + static_cast<double>(i) * step);
        }
        return out;
    }
    std::vector<double> out;
    for (const auto& item : split_commas(t)) {
        out.push_back(to_real(item));
    }
    return out;
}

} // namespace kcoll
