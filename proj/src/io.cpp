#include "fbmtp/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace fbmtp {

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string reports_csv(const std::vector<BoundReport>& reports) {
    std::ostringstream os;
    os << "name,measured,bound,margin,pass\n";
    for (const BoundReport& r : reports) {
        os << r.name << ',' << fmt_full(r.measured) << ',' << fmt_full(r.bound) << ','
           << fmt_full(r.margin()) << ',' << (r.pass() ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string rate_table_csv(const RateTable& table) {
    std::ostringstream os;
    os << "# fit: slope=" << fmt_full(table.fit.slope) << " intercept=" << fmt_full(table.fit.intercept)
       << " residual=" << fmt_full(table.fit.residual) << '\n';
    os << "n,replicas,mean_err,median_err,max_err\n";
    for (const RateRow& r : table.rows) {
        os << r.n << ',' << r.replicas << ',' << fmt_full(r.mean_err) << ',' << fmt_full(r.median_err)
           << ',' << fmt_full(r.max_err) << '\n';
    }
    return os.str();
}

namespace {
double nice_round(double v) { return std::floor(v * 100.0 + 0.5) / 100.0; }
} // namespace

std::string rate_table_svg(const RateTable& table, const std::string& title) {
    const double W = 640, Hh = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const RateRow& r : table.rows) {
        const double x = std::log10(static_cast<double>(r.n));
        const double y = std::log10(std::max(r.mean_err, 1e-300));
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double padx = 0.05 * (xmax - xmin), pady = 0.10 * (ymax - ymin);
    xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;
    auto X = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double ly) { return Hh - mb - (ly - ymin) / (ymax - ymin) * (Hh - mt - mb); };

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << Hh << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
       << "</text>\n";
    os << "<line x1='" << ml << "' y1='" << Hh - mb << "' x2='" << W - mr << "' y2='" << Hh - mb
       << "' stroke='black'/>\n";
    os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << Hh - mb
       << "' stroke='black'/>\n";
    os << "<text x='" << W / 2 << "' y='" << Hh - 12
       << "' text-anchor='middle' font-size='12'>log10 n</text>\n";
    os << "<text x='16' y='" << Hh / 2
       << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 " << Hh / 2
       << ")'>log10 sup-error</text>\n";
    // axis ticks at the data points
    for (const RateRow& r : table.rows) {
        const double x = X(std::log10(static_cast<double>(r.n)));
        os << "<line x1='" << x << "' y1='" << Hh - mb << "' x2='" << x << "' y2='" << Hh - mb + 5
           << "' stroke='black'/>\n";
        os << "<text x='" << x << "' y='" << Hh - mb + 18 << "' text-anchor='middle' font-size='11'>"
           << r.n << "</text>\n";
    }
    const int yticks = 5;
    for (int i = 0; i <= yticks; ++i) {
        const double ly = ymin + (ymax - ymin) * i / yticks;
        const double y = Y(ly);
        os << "<line x1='" << ml - 5 << "' y1='" << y << "' x2='" << ml << "' y2='" << y
           << "' stroke='black'/>\n";
        os << "<text x='" << ml - 8 << "' y='" << y + 4 << "' text-anchor='end' font-size='11'>"
           << nice_round(ly) << "</text>\n";
    }
    // fitted line (natural-log fit; convert to log10 axes)
    const double l10 = std::log(10.0);
    const double yl = (table.fit.intercept + table.fit.slope * (xmin * l10)) / l10;
    const double yr = (table.fit.intercept + table.fit.slope * (xmax * l10)) / l10;
    os << "<line x1='" << X(xmin) << "' y1='" << Y(yl) << "' x2='" << X(xmax) << "' y2='" << Y(yr)
       << "' stroke='steelblue' stroke-dasharray='4 3'/>\n";
    os << "<text x='" << W - mr - 4 << "' y='" << mt + 14
       << "' text-anchor='end' font-size='12'>slope " << nice_round(table.fit.slope) << "</text>\n";
    for (const RateRow& r : table.rows) {
        const double x = X(std::log10(static_cast<double>(r.n)));
        const double y = Y(std::log10(std::max(r.mean_err, 1e-300)));
        os << "<circle cx='" << x << "' cy='" << y << "' r='4' fill='crimson'/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace fbmtp
